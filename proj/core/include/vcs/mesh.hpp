#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "vcs/geometry.hpp"

namespace vcs {

/// Indexed triangle mesh (mm).
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  [[nodiscard]] bool empty() const noexcept { return faces.empty(); }
  [[nodiscard]] Aabb bounds() const;
  [[nodiscard]] Vec3 vertex_centroid() const;
  [[nodiscard]] TriangleMesh transformed(const RigidTransform& T) const;
};

using Edge = std::pair<int, int>;  // (min, max) vertex index

/// Edges used by exactly one face, sorted.
[[nodiscard]] std::vector<Edge> boundary_edges(const TriangleMesh& mesh);

/// Edges used by more than two faces, sorted.
[[nodiscard]] std::vector<Edge> nonmanifold_edges(const TriangleMesh& mesh);

/// Closed boundary loops as ordered vertex index lists. Loops are ordered by
/// their smallest vertex index. Throws topology if boundary edges do not
/// form simple closed loops.
[[nodiscard]] std::vector<std::vector<int>> boundary_loops(const TriangleMesh& mesh);

/// V - E + F.
[[nodiscard]] long euler_characteristic(const TriangleMesh& mesh);

struct CappedMesh {
  TriangleMesh mesh;
  std::vector<bool> is_cap;              // per face
  std::vector<Vec3> loop_centroids;      // one per capped boundary loop
};

/// Closes every boundary loop with a triangle fan around the loop centroid and
/// checks the result is watertight; throws topology listing offending edges.
[[nodiscard]] CappedMesh cap_boundaries(const TriangleMesh& mesh);

/// Merges vertices closer than `tolerance`, drops degenerate faces.
[[nodiscard]] TriangleMesh weld(const TriangleMesh& mesh, double tolerance = 1e-6);

/// Closest point on triangle (a, b, c) to p.
[[nodiscard]] Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                             const Vec3& c);

}  // namespace vcs
