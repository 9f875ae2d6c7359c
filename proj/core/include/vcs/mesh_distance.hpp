#pragma once

#include <limits>
#include <span>
#include <vector>

#include "vcs/mesh.hpp"

namespace vcs {

/// Bounding-volume hierarchy over a subset of mesh triangles answering exact
/// closest-point queries.
class TriangleBvh {
 public:
  /// Indexes the given faces of `mesh` (all faces when `faces` is empty).
  explicit TriangleBvh(const TriangleMesh& mesh, std::span<const int> faces = {});

  struct Hit {
    double distance = std::numeric_limits<double>::infinity();
    int face = -1;  // index into the mesh face list
    Vec3 point = Vec3::Zero();
  };

  /// Closest indexed triangle to p. `hint_face` (a mesh face index that is
  /// part of the index) seeds the search bound; the result is exact either way.
  [[nodiscard]] Hit closest(const Vec3& p, int hint_face = -1) const;

  [[nodiscard]] std::size_t size() const noexcept { return tris_.size(); }

 private:
  struct Tri {
    Vec3 a, b, c;
    int face;
  };
  struct Node {
    Eigen::Vector3d lo, hi;
    int left = -1;   // child index, or first triangle when leaf
    int right = -1;  // child index, or -1 when leaf
    int count = 0;   // triangles in leaf
  };

  int build(int begin, int end);
  [[nodiscard]] static double box_distance_sq(const Node& n, const Vec3& p);

  std::vector<Tri> tris_;
  std::vector<Node> nodes_;
  std::vector<int> slot_of_face_;  // mesh face -> position in tris_, -1 if absent
};

}  // namespace vcs
