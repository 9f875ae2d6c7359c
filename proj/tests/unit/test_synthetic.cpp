#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "vcs/error.hpp"
#include "vcs/synthetic.hpp"

using namespace vcs;

namespace {

constexpr double kPi = std::numbers::pi;

SyntheticSpec spec_of(CenterlineKind kind, double radius) {
  SyntheticSpec s;
  s.centerline.kind = kind;
  s.base_radius = radius;
  return s;
}

double frame_defect(const Frame& f) {
  return std::max({std::abs(f.t.norm() - 1), std::abs(f.v1.norm() - 1), std::abs(f.t.dot(f.v1)),
                   (f.t.cross(f.v1) - f.v2).norm()});
}

}  // namespace

TEST(Synthetic, RadiusLimits) {
  EXPECT_NO_THROW(SyntheticVessel(spec_of(CenterlineKind::arc, 10.0)));
  try {
    SyntheticVessel v(spec_of(CenterlineKind::arc, 31.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::spec);
  }
  EXPECT_THROW(SyntheticVessel(spec_of(CenterlineKind::line, 0.0)), Error);
  auto s = spec_of(CenterlineKind::line, 5.0);
  s.terms.push_back({RadiusTermKind::sinusoidal, 6.0, 1.0, 1.0});
  EXPECT_THROW(SyntheticVessel{s}, Error);
  s = spec_of(CenterlineKind::line, 5.0);
  s.noise = -1.0;
  EXPECT_THROW(SyntheticVessel{s}, Error);
  // helix curvature radius (a^2 + b^2) / a with b = pitch / 2 pi
  const SyntheticVessel helix(spec_of(CenterlineKind::helix, 5.0));
  const double b = 20.0 / (2 * kPi);
  EXPECT_NEAR(helix.min_curvature_radius(), (100.0 + b * b) / 10.0, 1e-12);
}

TEST(Synthetic, Lengths) {
  EXPECT_NEAR(SyntheticVessel(spec_of(CenterlineKind::line, 5)).length(), 100.0, 1e-12);
  EXPECT_NEAR(SyntheticVessel(spec_of(CenterlineKind::arc, 5)).length(), 30.0 * kPi / 2, 1e-12);
  EXPECT_NEAR(SyntheticVessel(spec_of(CenterlineKind::aorta, 5)).length(), 50.0 + 30.0 * kPi + 120.0, 1e-12);
  const double b = 20.0 / (2 * kPi);
  EXPECT_NEAR(SyntheticVessel(spec_of(CenterlineKind::helix, 5)).length(),
              2 * 2 * kPi * std::sqrt(100.0 + b * b), 1e-9);
}

TEST(Synthetic, FramesAreTransported) {
  for (auto kind : {CenterlineKind::line, CenterlineKind::arc, CenterlineKind::helix, CenterlineKind::aorta}) {
    const SyntheticVessel v(spec_of(kind, 5.0));
    const double h = 1e-6;
    for (int i = 1; i < 50; ++i) {
      const double tau = i / 50.0;
      const Frame f = v.frame(tau);
      EXPECT_LT(frame_defect(f), 1e-12) << to_string(kind);
      // tangent matches the centerline derivative
      const Vec3 d = (v.centerline(tau + h) - v.centerline(tau - h)) / (2 * h);
      EXPECT_LT((d.normalized() - f.t).norm(), 1e-6) << to_string(kind);
      // dv1/ds has no component along v2 (no twist)
      const Vec3 dv1 = (v.frame(tau + h).v1 - v.frame(tau - h).v1) / (2 * h);
      EXPECT_NEAR(dv1.dot(f.v2), 0.0, 1e-6) << to_string(kind);
    }
  }
}

TEST(Synthetic, FrameAngleRotatesV1) {
  auto s = spec_of(CenterlineKind::aorta, 5.0);
  const SyntheticVessel a(s);
  s.frame_angle = 0.4;
  const SyntheticVessel b(s);
  for (double tau : {0.0, 0.5, 1.0}) {
    const Frame fa = a.frame(tau), fb = b.frame(tau);
    EXPECT_NEAR(std::atan2(fa.v1.cross(fb.v1).dot(fa.t), fa.v1.dot(fb.v1)), 0.4, 1e-12);
  }
}

TEST(Synthetic, MeshMatchesOracleCoordinates) {
  auto s = spec_of(CenterlineKind::aorta, 10.0);
  s.terms.push_back({RadiusTermKind::valsalva, 2.0, 1, 1, 0.1, 0.05});
  s.n_tau = 60;
  s.n_theta = 24;
  const SyntheticVessel v(s);
  const auto mesh = v.mesh();
  const auto coords = v.vertex_coordinates();
  ASSERT_EQ(mesh.vertices.size(), coords.size());
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const auto c = v.closest(mesh.vertices[k]);
    EXPECT_NEAR(c.tau, coords[k].tau, 1e-9);
    EXPECT_NEAR(c.rho, coords[k].rho, 1e-9);
    EXPECT_NEAR(std::remainder(c.theta - coords[k].theta, 2 * kPi), 0.0, 1e-9);
    EXPECT_NEAR(coords[k].rho, v.radius(coords[k].tau, coords[k].theta), 1e-12);
  }
  EXPECT_EQ(euler_characteristic(mesh), 0);
}

TEST(Synthetic, NoiseIsSeeded) {
  auto s = spec_of(CenterlineKind::line, 10.0);
  s.noise = 0.2;
  s.seed = 42;
  const auto a = SyntheticVessel(s).mesh();
  const auto b = SyntheticVessel(s).mesh();
  EXPECT_EQ(a.vertices, b.vertices);
  s.seed = 43;
  const auto c = SyntheticVessel(s).mesh();
  EXPECT_NE(a.vertices, c.vertices);
  double sq = 0.0;
  const auto coords = SyntheticVessel(s).vertex_coordinates();
  for (const auto& k : coords) sq += (k.rho - 10.0) * (k.rho - 10.0);
  EXPECT_NEAR(std::sqrt(sq / static_cast<double>(coords.size())), 0.2, 0.02);
}

TEST(Synthetic, OracleAgreesWithCoordinateSystem) {
  for (auto kind : {CenterlineKind::arc, CenterlineKind::helix, CenterlineKind::aorta}) {
    auto s = spec_of(kind, 5.0);
    s.n_tau = 40;
    s.n_theta = 16;
    const SyntheticVessel v(s);
    const VcsContext ctx(fit_curve(v.centerline_samples(3000), 39), v.frame(0.0).v1);
    // the aorta centreline has curvature jumps at the arch ends, which a cubic fit smooths over
    const double tol = kind == CenterlineKind::aorta ? 2e-2 : 1e-3;
    for (const auto& p : v.mesh().vertices) {
      const auto want = v.closest(p);
      const auto got = to_vcs(ctx, p);
      if (want.boundary) continue;
      EXPECT_NEAR(got.rho, want.rho, tol) << to_string(kind);
      EXPECT_NEAR(got.tau, want.tau, tol) << to_string(kind);
      EXPECT_NEAR(std::remainder(got.theta - want.theta, 2 * kPi), 0.0, tol) << to_string(kind);
    }
  }
}

TEST(Synthetic, KindNames) {
  EXPECT_EQ(parse_centerline_kind("helix"), CenterlineKind::helix);
  EXPECT_EQ(parse_centerline_kind("aorta-like"), CenterlineKind::aorta);
  EXPECT_STREQ(to_string(CenterlineKind::arc), "arc");
  EXPECT_THROW((void)parse_centerline_kind("spiral"), Error);
}

TEST(Synthetic, PoiseuilleField) {
  auto s = spec_of(CenterlineKind::line, 5.0);
  s.centerline.length = 20.0;
  const SyntheticVessel v(s);
  const auto f = poiseuille_field(v, 1.5, 1.0);
  ASSERT_FALSE(f.points.empty());
  EXPECT_EQ(f.values.size(), f.points.size());
  for (std::size_t i = 0; i < f.points.size(); ++i) {
    const double r = std::hypot(f.points[i].x(), f.points[i].y());
    EXPECT_LE(r, 5.0 + 1e-9);
    EXPECT_NEAR(f.values[i], 1.5 * (1 - r * r / 25.0), 1e-9);
  }
  EXPECT_THROW((void)poiseuille_field(v, 1.0, 0.0), Error);
}

TEST(Synthetic, PoiseuilleExteriorBand) {
  auto s = spec_of(CenterlineKind::line, 5.0);
  s.centerline.length = 20.0;
  const SyntheticVessel v(s);
  const auto inner = poiseuille_field(v, 1.0, 1.0);
  const auto banded = poiseuille_field(v, 1.0, 1.0, 2.0);
  EXPECT_GT(banded.points.size(), inner.points.size());
  double rmax = 0.0;
  for (std::size_t i = 0; i < banded.points.size(); ++i) {
    const double r = std::hypot(banded.points[i].x(), banded.points[i].y());
    rmax = std::max(rmax, r);
    EXPECT_NEAR(banded.values[i], 1 - r * r / 25.0, 1e-9);
  }
  EXPECT_GT(rmax, 5.5);
  EXPECT_LE(rmax, 7.0 + 1e-9);
  EXPECT_THROW((void)poiseuille_field(v, 1.0, 1.0, -1.0), Error);
}
