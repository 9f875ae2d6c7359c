#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "vcs/geometry.hpp"
#include "vcs/mesh.hpp"
#include "vcs/splines.hpp"

namespace vcs {

/// Voxel grid over the lumen with the distance from each inside voxel center
/// to the vessel wall (cap triangles excluded).
class DistanceVolume {
 public:
  DistanceVolume(Vec3 origin, double spacing, std::array<int, 3> dims);

  [[nodiscard]] const Vec3& origin() const noexcept { return origin_; }
  [[nodiscard]] double spacing() const noexcept { return spacing_; }
  [[nodiscard]] const std::array<int, 3>& dims() const noexcept { return dims_; }
  [[nodiscard]] std::size_t size() const noexcept { return distance_.size(); }

  [[nodiscard]] std::size_t index(int i, int j, int k) const noexcept {
    return (static_cast<std::size_t>(k) * dims_[1] + static_cast<std::size_t>(j)) * dims_[0] +
           static_cast<std::size_t>(i);
  }
  [[nodiscard]] std::array<int, 3> ijk(std::size_t index) const noexcept;
  [[nodiscard]] Vec3 center(int i, int j, int k) const noexcept {
    return origin_ + spacing_ * Vec3(i, j, k);
  }
  [[nodiscard]] Vec3 center(std::size_t index) const noexcept;

  [[nodiscard]] bool inside(std::size_t index) const noexcept { return inside_[index] != 0; }
  [[nodiscard]] double distance(std::size_t index) const noexcept { return distance_[index]; }
  [[nodiscard]] double max_distance() const noexcept;

  /// Marks a voxel inside with the given wall distance (> 0), or outside when
  /// distance <= 0.
  void set(std::size_t index, double distance) noexcept {
    inside_[index] = distance > 0.0 ? 1 : 0;
    distance_[index] = distance > 0.0 ? distance : 0.0;
  }

 private:
  Vec3 origin_;
  double spacing_;
  std::array<int, 3> dims_;
  std::vector<std::uint8_t> inside_;
  std::vector<double> distance_;
};

struct VoxelizeOptions {
  int padding = 2;  // voxels added around the mesh bounding box
};

/// Caps the open ends, classifies voxel centers by ray parity and stores the
/// exact distance to the (uncapped) wall for every inside voxel.
[[nodiscard]] DistanceVolume voxelize(const TriangleMesh& mesh, double spacing,
                                      const VoxelizeOptions& options = {});

struct DiscretePath {
  std::vector<Vec3> points;
  std::vector<double> clearance;
  std::vector<std::size_t> voxels;
  double cost = 0.0;
};

/// Optional path constraint: reject voxels whose clearance exceeds the radius
/// of the circle through the path `window` and `2 window` steps back. Off by
/// default; when on, optimality of the search is no longer guaranteed.
struct CurvatureConstraint {
  bool enabled = false;
  int window = 6;
};

struct PathOptions {
  double clearance_floor = 1.0;  // in voxel spacings; thinner voxels leave the graph
  CurvatureConstraint curvature;
};

/// Edge weight between neighbouring voxels: length * 2 / (d(u) + d(v)).
[[nodiscard]] double path_edge_cost(double length, double du, double dv) noexcept;

/// The 26 neighbour offsets in a fixed order.
[[nodiscard]] const std::array<std::array<int, 3>, 26>& neighbor_offsets() noexcept;

/// Whether a voxel participates in the search graph.
[[nodiscard]] bool is_graph_voxel(const DistanceVolume& vol, std::size_t index,
                                  const PathOptions& options = {}) noexcept;

/// Nearest graph voxel to p.
[[nodiscard]] std::size_t snap_to_lumen(const DistanceVolume& vol, const Vec3& p,
                                        const PathOptions& options = {});

/// A* maximum-clearance route between the voxels nearest to pA and pB.
[[nodiscard]] DiscretePath extract_path(const DistanceVolume& vol, const Vec3& pA, const Vec3& pB,
                                        const PathOptions& options = {});

/// Cubic centerline through a discrete path (light box smoothing of the voxel
/// staircase, then chord-length least squares).
[[nodiscard]] SplineCurve3 build_centerline(const DiscretePath& path, int spans);

/// v1 perpendicular to t(0), in the plane of t(0) and the wall centroid,
/// pointing toward the centroid. Returns {v1, v2 = t(0) x v1}.
[[nodiscard]] std::pair<Vec3, Vec3> initial_frame(const SplineCurve3& curve,
                                                  std::span<const Vec3> wall_points);

}  // namespace vcs
