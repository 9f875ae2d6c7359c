#include "vcs/centerline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vcs/error.hpp"
#include "vcs/mesh_distance.hpp"
#include "vcs/parallel.hpp"

namespace vcs {

DistanceVolume::DistanceVolume(Vec3 origin, double spacing, std::array<int, 3> dims)
    : origin_(std::move(origin)), spacing_(spacing), dims_(dims) {
  if (!(spacing > 0.0)) fail(ErrorCode::domain, "voxel spacing must be positive");
  if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1) fail(ErrorCode::domain, "volume dimensions must be positive");
  const std::size_t n = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  inside_.assign(n, 0);
  distance_.assign(n, 0.0);
}

std::array<int, 3> DistanceVolume::ijk(std::size_t index) const noexcept {
  const auto nx = static_cast<std::size_t>(dims_[0]);
  const auto ny = static_cast<std::size_t>(dims_[1]);
  return {static_cast<int>(index % nx), static_cast<int>((index / nx) % ny),
          static_cast<int>(index / (nx * ny))};
}

Vec3 DistanceVolume::center(std::size_t index) const noexcept {
  const auto c = ijk(index);
  return center(c[0], c[1], c[2]);
}

double DistanceVolume::max_distance() const noexcept {
  return distance_.empty() ? 0.0 : *std::max_element(distance_.begin(), distance_.end());
}

DistanceVolume voxelize(const TriangleMesh& mesh, double spacing, const VoxelizeOptions& options) {
  if (!(spacing > 0.0)) fail(ErrorCode::domain, "voxel spacing must be positive");
  if (mesh.empty()) fail(ErrorCode::input, "cannot voxelize an empty mesh");
  const CappedMesh capped = cap_boundaries(mesh);
  const TriangleMesh& closed = capped.mesh;

  const Aabb box = closed.bounds();
  const Vec3 origin = box.lo - Vec3::Constant(options.padding * spacing);
  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a)
    dims[a] = static_cast<int>(std::floor((box.hi[a] - box.lo[a]) / spacing)) + 1 + 2 * options.padding;
  DistanceVolume vol(origin, spacing, dims);
  const int ny = dims[1];
  const int nz = dims[2];

  // Rays run along +x through (y_j, z_k), nudged off the lattice so they do not
  // graze mesh edges or vertices that sit exactly on voxel rows.
  const double jy = spacing * 1.3719e-7;
  const double jz = spacing * 2.7183e-7;

  // Bucket triangles by the rows whose ray can cross them (CSR layout).
  const std::size_t rows = static_cast<std::size_t>(ny) * nz;
  std::vector<int> row_count(rows + 1, 0);
  auto row_range = [&](const std::array<int, 3>& f, int& j0, int& j1, int& k0, int& k1) {
    double ylo = 1e300, yhi = -1e300, zlo = 1e300, zhi = -1e300;
    for (int v : f) {
      const Vec3& p = closed.vertices[static_cast<std::size_t>(v)];
      ylo = std::min(ylo, p.y());
      yhi = std::max(yhi, p.y());
      zlo = std::min(zlo, p.z());
      zhi = std::max(zhi, p.z());
    }
    j0 = std::max(0, static_cast<int>(std::ceil((ylo - origin.y() - jy) / spacing)));
    j1 = std::min(ny - 1, static_cast<int>(std::floor((yhi - origin.y() - jy) / spacing)));
    k0 = std::max(0, static_cast<int>(std::ceil((zlo - origin.z() - jz) / spacing)));
    k1 = std::min(nz - 1, static_cast<int>(std::floor((zhi - origin.z() - jz) / spacing)));
  };
  for (const auto& f : closed.faces) {
    int j0, j1, k0, k1;
    row_range(f, j0, j1, k0, k1);
    for (int k = k0; k <= k1; ++k)
      for (int j = j0; j <= j1; ++j) ++row_count[static_cast<std::size_t>(k) * ny + j + 1];
  }
  for (std::size_t r = 0; r < rows; ++r) row_count[r + 1] += row_count[r];
  std::vector<int> row_faces(static_cast<std::size_t>(row_count[rows]));
  {
    std::vector<int> fill(row_count.begin(), row_count.end() - 1);
    for (std::size_t fi = 0; fi < closed.faces.size(); ++fi) {
      int j0, j1, k0, k1;
      row_range(closed.faces[fi], j0, j1, k0, k1);
      for (int k = k0; k <= k1; ++k)
        for (int j = j0; j <= j1; ++j)
          row_faces[static_cast<std::size_t>(fill[static_cast<std::size_t>(k) * ny + j]++)] =
              static_cast<int>(fi);
    }
  }

  std::vector<int> wall_faces;
  for (std::size_t f = 0; f < closed.faces.size(); ++f)
    if (!capped.is_cap[f]) wall_faces.push_back(static_cast<int>(f));
  const TriangleBvh bvh(closed, wall_faces);

  parallel_for(
      rows,
      [&](std::size_t r) {
        const int j = static_cast<int>(r % static_cast<std::size_t>(ny));
        const int k = static_cast<int>(r / static_cast<std::size_t>(ny));
        const double y = origin.y() + j * spacing + jy;
        const double z = origin.z() + k * spacing + jz;
        std::vector<double> xs;
        for (int s = row_count[r]; s < row_count[r + 1]; ++s) {
          const auto& f = closed.faces[static_cast<std::size_t>(row_faces[static_cast<std::size_t>(s)])];
          const Vec3& a = closed.vertices[static_cast<std::size_t>(f[0])];
          const Vec3& b = closed.vertices[static_cast<std::size_t>(f[1])];
          const Vec3& c = closed.vertices[static_cast<std::size_t>(f[2])];
          // barycentric coordinates of (y, z) in the yz-projection
          const double w0 = (b.y() - y) * (c.z() - z) - (c.y() - y) * (b.z() - z);
          const double w1 = (c.y() - y) * (a.z() - z) - (a.y() - y) * (c.z() - z);
          const double w2 = (a.y() - y) * (b.z() - z) - (b.y() - y) * (a.z() - z);
          const bool pos = w0 >= 0 && w1 >= 0 && w2 >= 0;
          const bool neg = w0 <= 0 && w1 <= 0 && w2 <= 0;
          const double area = w0 + w1 + w2;
          if (!(pos || neg) || area == 0.0) continue;
          xs.push_back((w0 * a.x() + w1 * b.x() + w2 * c.x()) / area);
        }
        if (xs.size() < 2) return;
        std::sort(xs.begin(), xs.end());
        std::size_t crossed = 0;
        int hint = -1;
        for (int i = 0; i < dims[0]; ++i) {
          const double x = origin.x() + i * spacing;
          while (crossed < xs.size() && xs[crossed] < x) ++crossed;
          if (crossed % 2 == 0) {
            hint = -1;
            continue;
          }
          const std::size_t idx = vol.index(i, j, k);
          const auto hit = bvh.closest(vol.center(idx), hint);
          hint = hit.face;
          vol.set(idx, hit.distance > 1e-12 ? hit.distance : 0.0);
        }
      },
      4);
  return vol;
}

}  // namespace vcs
