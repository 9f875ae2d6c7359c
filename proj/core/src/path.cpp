#include "vcs/centerline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "vcs/error.hpp"

namespace vcs {

double path_edge_cost(double length, double du, double dv) noexcept {
  return length * 2.0 / (du + dv);
}

const std::array<std::array<int, 3>, 26>& neighbor_offsets() noexcept {
  static const auto offsets = [] {
    std::array<std::array<int, 3>, 26> o{};
    int n = 0;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if (dx || dy || dz) o[static_cast<std::size_t>(n++)] = {dx, dy, dz};
    return o;
  }();
  return offsets;
}

bool is_graph_voxel(const DistanceVolume& vol, std::size_t index, const PathOptions& options) noexcept {
  return vol.inside(index) && vol.distance(index) >= options.clearance_floor * vol.spacing();
}

std::size_t snap_to_lumen(const DistanceVolume& vol, const Vec3& p, const PathOptions& options) {
  std::size_t best = vol.size();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vol.size(); ++i) {
    if (!is_graph_voxel(vol, i, options)) continue;
    const double d = (vol.center(i) - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (best == vol.size())
    fail(ErrorCode::disconnected_lumen, "no lumen voxel clears the wall by the clearance floor");
  return best;
}

namespace {

double circumradius(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double area2 = (b - a).cross(c - a).norm();
  if (area2 < 1e-12) return std::numeric_limits<double>::infinity();
  return (b - a).norm() * (c - b).norm() * (a - c).norm() / (2.0 * area2);
}

}  // namespace

DiscretePath extract_path(const DistanceVolume& vol, const Vec3& pA, const Vec3& pB,
                          const PathOptions& options) {
  const std::size_t start = snap_to_lumen(vol, pA, options);
  const std::size_t goal = snap_to_lumen(vol, pB, options);
  const auto& dims = vol.dims();
  const double h = vol.spacing();
  const double inv_dmax = 1.0 / vol.max_distance();
  const Vec3 goal_p = vol.center(goal);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::vector<double> g(vol.size(), std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(vol.size(), kNone);
  using Entry = std::pair<double, std::size_t>;  // (f, voxel)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  std::array<double, 26> lengths{};
  const auto& offsets = neighbor_offsets();
  for (std::size_t n = 0; n < 26; ++n)
    lengths[n] = h * std::sqrt(static_cast<double>(offsets[n][0] * offsets[n][0] +
                                                   offsets[n][1] * offsets[n][1] +
                                                   offsets[n][2] * offsets[n][2]));

  auto heuristic = [&](std::size_t v) { return (vol.center(v) - goal_p).norm() * inv_dmax; };
  auto ancestor = [&](std::size_t v, int steps) {
    for (int s = 0; s < steps && v != kNone; ++s) v = parent[v];
    return v;
  };

  g[start] = 0.0;
  open.emplace(heuristic(start), start);
  while (!open.empty()) {
    const auto [f, u] = open.top();
    open.pop();
    if (f > g[u] + heuristic(u)) continue;  // stale entry
    if (u == goal) break;
    const auto c = vol.ijk(u);
    const double du = vol.distance(u);
    for (std::size_t n = 0; n < 26; ++n) {
      const int x = c[0] + offsets[n][0];
      const int y = c[1] + offsets[n][1];
      const int z = c[2] + offsets[n][2];
      if (x < 0 || y < 0 || z < 0 || x >= dims[0] || y >= dims[1] || z >= dims[2]) continue;
      const std::size_t v = vol.index(x, y, z);
      if (!is_graph_voxel(vol, v, options)) continue;
      const double tentative = g[u] + path_edge_cost(lengths[n], du, vol.distance(v));
      if (!(tentative < g[v])) continue;
      if (options.curvature.enabled) {
        const std::size_t a1 = ancestor(u, options.curvature.window - 1);
        const std::size_t a2 = ancestor(u, 2 * options.curvature.window - 1);
        if (a1 != kNone && a2 != kNone &&
            vol.distance(v) > circumradius(vol.center(a2), vol.center(a1), vol.center(v)))
          continue;
      }
      g[v] = tentative;
      parent[v] = u;
      open.emplace(tentative + heuristic(v), v);
    }
  }
  if (!std::isfinite(g[goal]))
    fail(ErrorCode::disconnected_lumen, "no connected lumen route between the two seed points");

  DiscretePath path;
  path.cost = g[goal];
  for (std::size_t v = goal; v != kNone; v = parent[v]) {
    path.voxels.push_back(v);
    if (v == start) break;
  }
  std::reverse(path.voxels.begin(), path.voxels.end());
  for (std::size_t v : path.voxels) {
    path.points.push_back(vol.center(v));
    path.clearance.push_back(vol.distance(v));
  }
  return path;
}

SplineCurve3 build_centerline(const DiscretePath& path, int spans) {
  const auto& p = path.points;
  const std::size_t n = p.size();
  if (n < static_cast<std::size_t>(spans + 4))
    fail(ErrorCode::insufficient_samples, "centerline with " + std::to_string(spans) +
                                              " spans needs a path of at least " +
                                              std::to_string(spans + 4) + " voxels, got " +
                                              std::to_string(n));
  constexpr std::size_t kHalfWindow = 2;
  std::vector<Vec3> smooth(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t w = std::min({kHalfWindow, i, n - 1 - i});
    Vec3 s = Vec3::Zero();
    for (std::size_t k = i - w; k <= i + w; ++k) s += p[k];
    smooth[i] = s / static_cast<double>(2 * w + 1);
  }
  return fit_curve(smooth, spans);
}

std::pair<Vec3, Vec3> initial_frame(const SplineCurve3& curve, std::span<const Vec3> wall_points) {
  if (wall_points.empty()) fail(ErrorCode::input, "initial frame needs wall points");
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : wall_points) centroid += p;
  centroid /= static_cast<double>(wall_points.size());
  const Vec3 t0 = curve.unit_tangent(0.0);
  const Vec3 w = centroid - curve.position(0.0);
  const Vec3 v1 = w - w.dot(t0) * t0;
  if (v1.norm() < 1e-9)
    fail(ErrorCode::degenerate_frame,
         "wall centroid lies on the tangent line at c(0); supply v1 explicitly");
  const Vec3 u1 = v1.normalized();
  return {u1, t0.cross(u1)};
}

}  // namespace vcs
