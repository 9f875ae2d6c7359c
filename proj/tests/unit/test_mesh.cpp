#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vcs/centerline.hpp"
#include "vcs/error.hpp"
#include "vcs/mesh.hpp"
#include "vcs/mesh_distance.hpp"

using namespace vcs;

namespace {

TriangleMesh to_mesh(const oracle::SimpleMesh& m) {
  return {m.vertices, m.faces};
}

TriangleMesh unit_cube() {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) m.vertices.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  m.faces = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
             {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

}  // namespace

TEST(Mesh, BoundsAndCentroid) {
  const auto m = unit_cube();
  EXPECT_NEAR(m.bounds().diagonal(), std::sqrt(3.0), 1e-15);
  EXPECT_LT((m.vertex_centroid() - Vec3(0.5, 0.5, 0.5)).norm(), 1e-15);
}

TEST(Mesh, ClosedCubeTopology) {
  const auto m = unit_cube();
  EXPECT_TRUE(boundary_edges(m).empty());
  EXPECT_TRUE(nonmanifold_edges(m).empty());
  EXPECT_EQ(euler_characteristic(m), 2);
  EXPECT_TRUE(boundary_loops(m).empty());
}

TEST(Mesh, OpenCylinderHasTwoLoops) {
  const auto m = to_mesh(oracle::cylinder(5.0, 20.0, 24, 9));
  EXPECT_EQ(boundary_edges(m).size(), 48u);
  EXPECT_EQ(euler_characteristic(m), 0);
  const auto loops = boundary_loops(m);
  ASSERT_EQ(loops.size(), 2u);
  EXPECT_EQ(loops[0].size(), 24u);
  EXPECT_EQ(loops[1].size(), 24u);
}

TEST(Mesh, CappingClosesTheTube) {
  const auto m = to_mesh(oracle::cylinder(5.0, 20.0, 24, 9));
  const auto capped = cap_boundaries(m);
  EXPECT_TRUE(boundary_edges(capped.mesh).empty());
  EXPECT_EQ(euler_characteristic(capped.mesh), 2);
  ASSERT_EQ(capped.loop_centroids.size(), 2u);
  EXPECT_LT((capped.loop_centroids[0] - Vec3(0, 0, 0)).norm(), 1e-12);
  EXPECT_LT((capped.loop_centroids[1] - Vec3(0, 0, 20)).norm(), 1e-12);
  long caps = 0;
  for (bool c : capped.is_cap) caps += c;
  EXPECT_EQ(caps, 48);
}

TEST(Mesh, NonManifoldEdgeIsTopologyError) {
  auto m = unit_cube();
  m.vertices.emplace_back(0.5, -1.0, 0.0);
  m.faces.push_back({0, 1, 8});
  EXPECT_EQ(nonmanifold_edges(m).size(), 1u);
  try {
    (void)cap_boundaries(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::topology);
  }
}

TEST(Mesh, WeldMergesDuplicatesAndDropsDegenerateFaces) {
  TriangleMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 0, 1e-9}, {1, 1, 0}};
  m.faces = {{0, 1, 2}, {3, 4, 2}, {1, 3, 2}};
  const auto w = weld(m, 1e-6);
  EXPECT_EQ(w.vertices.size(), 4u);
  EXPECT_EQ(w.faces.size(), 2u);
}

TEST(Mesh, TransformIsRigid) {
  const auto m = unit_cube();
  RigidTransform T;
  T.rotation = Eigen::AngleAxisd(0.3, Vec3::UnitZ()).toRotationMatrix();
  T.translation = Vec3(1, 2, 3);
  const auto moved = m.transformed(T);
  for (std::size_t i = 0; i < m.vertices.size(); ++i)
    EXPECT_LT((moved.vertices[i] - T.apply(m.vertices[i])).norm(), 1e-15);
  EXPECT_EQ(moved.faces, m.faces);
}

TEST(ClosestPoint, MatchesDenseSampling) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 a(g(rng), g(rng), g(rng)), b(g(rng), g(rng), g(rng)), c(g(rng), g(rng), g(rng));
    const Vec3 p = 2.0 * Vec3(g(rng), g(rng), g(rng));
    const Vec3 q = closest_point_on_triangle(p, a, b, c);
    double best = 1e300;
    const int n = 200;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= n; ++j) {
        const double u = static_cast<double>(i) / n, v = static_cast<double>(j) / n;
        best = std::min(best, (a + u * (b - a) + v * (c - a) - p).norm());
      }
    EXPECT_LE((q - p).norm(), best + 1e-12);
    EXPECT_GT((q - p).norm(), best - 0.05);
  }
}

TEST(Bvh, AgreesWithBruteForce) {
  const auto m = to_mesh(oracle::cylinder(5.0, 20.0, 32, 11));
  const TriangleBvh bvh(m);
  EXPECT_EQ(bvh.size(), m.faces.size());
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-8.0, 28.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 p(u(rng) / 2, u(rng) / 2, u(rng));
    double brute = 1e300;
    for (const auto& f : m.faces) {
      const Vec3 q = closest_point_on_triangle(p, m.vertices[f[0]], m.vertices[f[1]], m.vertices[f[2]]);
      brute = std::min(brute, (q - p).norm());
    }
    const auto hit = bvh.closest(p, trial % 7 == 0 ? 3 : -1);
    EXPECT_NEAR(hit.distance, brute, 1e-12);
    EXPECT_NEAR((hit.point - p).norm(), hit.distance, 1e-12);
  }
}

TEST(Bvh, SubsetAndEmpty) {
  const auto m = unit_cube();
  const std::vector<int> top{2, 3};
  const TriangleBvh bvh(m, top);
  EXPECT_EQ(bvh.size(), 2u);
  const auto hit = bvh.closest(Vec3(0.5, 0.5, 0.4));
  EXPECT_NEAR(hit.distance, 0.6, 1e-15);
  EXPECT_TRUE(hit.face == 2 || hit.face == 3);
  TriangleMesh none;
  EXPECT_THROW((void)TriangleBvh(none), Error);
}

TEST(Voxelize, CylinderDistances) {
  const double r = 10.0;
  const auto m = to_mesh(oracle::cylinder(r, 60.0, 64, 31));
  const auto vol = voxelize(m, 1.0);
  int axis = 0;
  for (std::size_t i = 0; i < vol.size(); ++i) {
    const Vec3 c = vol.center(i);
    const double radial = std::hypot(c.x(), c.y());
    if (radial > r + 0.01 || c.z() < -0.01 || c.z() > 60.01) {
      EXPECT_FALSE(vol.inside(i)) << c.transpose();
      EXPECT_EQ(vol.distance(i), 0.0);
    } else if (radial < r * std::cos(std::numbers::pi / 64) - 0.01 && c.z() > 0.01 && c.z() < 59.99) {
      EXPECT_TRUE(vol.inside(i)) << c.transpose();
      EXPECT_NEAR(vol.distance(i), r - radial, 0.02) << c.transpose();
    }
    if (vol.inside(i) && radial < 0.5 && c.z() > 10 && c.z() < 50) {
      ++axis;
      EXPECT_GE(vol.distance(i), 9.5);
      EXPECT_LE(vol.distance(i), 10.0);
    }
  }
  EXPECT_GT(axis, 0);
  EXPECT_LE(vol.max_distance(), r);
}

TEST(Voxelize, TorusTubeRadius) {
  // torus tube of radius 4 around a circle of radius 15 in the xy plane
  const double big = 15.0, small = 4.0;
  const int nu = 96, nv = 32;
  TriangleMesh m;
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const double u = 2 * std::numbers::pi * i / nu, v = 2 * std::numbers::pi * j / nv;
      m.vertices.emplace_back((big + small * std::cos(v)) * std::cos(u), (big + small * std::cos(v)) * std::sin(u),
                              small * std::sin(v));
    }
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nv; ++j) {
      const int a = i * nv + j, b = ((i + 1) % nu) * nv + j, c = i * nv + (j + 1) % nv,
                d = ((i + 1) % nu) * nv + (j + 1) % nv;
      m.faces.push_back({a, b, c});
      m.faces.push_back({b, d, c});
    }
  const double h = 0.5;
  const auto vol = voxelize(m, h);
  EXPECT_NEAR(vol.max_distance(), small, h);
  EXPECT_LE(vol.max_distance(), small);
}

TEST(Voxelize, Errors) {
  TriangleMesh empty;
  EXPECT_THROW((void)voxelize(empty, 1.0), Error);
  EXPECT_THROW((void)voxelize(unit_cube(), 0.0), Error);
  EXPECT_THROW((void)DistanceVolume(Vec3::Zero(), 1.0, {0, 1, 1}), Error);
}

TEST(Voxelize, IndexRoundTrip) {
  const DistanceVolume vol(Vec3(1, 2, 3), 0.5, {4, 5, 6});
  for (std::size_t i = 0; i < vol.size(); ++i) {
    const auto c = vol.ijk(i);
    EXPECT_EQ(vol.index(c[0], c[1], c[2]), i);
  }
  EXPECT_LT((vol.center(vol.index(3, 4, 5)) - Vec3(2.5, 4.0, 5.5)).norm(), 1e-15);
}
