#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "vcs/error.hpp"
#include "vcs/model.hpp"
#include "vcs/synthetic.hpp"

using namespace vcs;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

VcsContext context_for(const SyntheticVessel& v, int spans) {
  const auto samples = v.centerline_samples(2000);
  return VcsContext(fit_curve(samples, spans), v.frame(0.0).v1);
}

SyntheticVessel straight_tube() {
  SyntheticSpec s;
  s.centerline.kind = CenterlineKind::line;
  s.base_radius = 10.0;
  s.n_tau = 100;
  return SyntheticVessel(s);
}

SyntheticVessel bumpy_aorta() {
  SyntheticSpec s;
  s.centerline.kind = CenterlineKind::aorta;
  s.base_radius = 10.0;
  s.terms.push_back({RadiusTermKind::sinusoidal, 2.0, 1.0, 1.0});
  s.n_tau = 300;
  return SyntheticVessel(s);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::input;
}

}  // namespace

TEST(Dims, FeatureLength) {
  EXPECT_EQ(ModelDims{}.feature_length(), 366u);
  EXPECT_EQ((ModelDims{5, 5, 4}.feature_length()), 3u * 8 + 8u * 4);
}

TEST(FitModel, ConstantTube) {
  const auto v = straight_tube();
  const auto ctx = context_for(v, 9);
  const auto model = fit_model(v.mesh(), ctx, ModelDims{});
  for (int i = 0; i <= 50; ++i)
    for (int j = 0; j < 32; ++j) EXPECT_NEAR(model.wall()(i / 50.0, kTwoPi * j / 32), 10.0, 1e-6);
  const auto report = residuals(v.mesh(), model);
  EXPECT_LT(report.max, 1e-6);
  EXPECT_LT(report.nearest_max, 0.02);
  EXPECT_EQ(report.residual.size() + report.excluded, v.mesh().vertices.size());
}

TEST(FitModel, AortaResidualSmall) {
  const auto v = bumpy_aorta();
  const auto ctx = context_for(v, 9);
  const auto model = fit_model(v.mesh(), ctx, ModelDims{});
  const auto report = residuals(v.mesh(), model, {20, false});
  EXPECT_LT(report.mean, 0.01 * 10.0);
  EXPECT_TRUE(report.nearest.empty());
  std::size_t total = 0;
  for (auto c : report.histogram.counts) total += c;
  EXPECT_EQ(total, report.residual.size());
  EXPECT_EQ(report.histogram.edges.size(), 21u);
  EXPECT_LE(report.p75, report.max);
}

TEST(FitModel, TessellationRefit) {
  const auto v = bumpy_aorta();
  const auto ctx = context_for(v, 9);
  const auto model = fit_model(v.mesh(), ctx, ModelDims{});
  const auto mesh = tessellate(model, 300, 64);
  const auto again = fit_model(mesh, model.context(), model.dims());
  EXPECT_LT((again.wall().coefficients() - model.wall().coefficients()).cwiseAbs().maxCoeff(), 1e-6);
  const auto self = residuals(mesh, model, {20, false});
  EXPECT_LT(self.max, 1e-6);
}

TEST(FitModel, DimensionMismatch) {
  const auto v = straight_tube();
  const auto ctx = context_for(v, 9);
  EXPECT_EQ(code_of([&] { (void)fit_model(v.mesh(), ctx, ModelDims{5, 19, 15}); }), ErrorCode::precondition);
  EXPECT_EQ(code_of([&] { (void)fit_model(TriangleMesh{}, ctx, ModelDims{}); }), ErrorCode::input);
}

TEST(FitWall, ValidityAndStarConvexity) {
  std::vector<VesselCoordinates> coords;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 4000; ++i) coords.push_back({u(rng), kTwoPi * u(rng), 10.0});
  EXPECT_NO_THROW((void)fit_wall(coords, 9, 8));
  auto bad = coords;
  for (int i = 0; i < 100; ++i) bad[static_cast<std::size_t>(i)].valid = false;
  EXPECT_EQ(code_of([&] { (void)fit_wall(bad, 9, 8); }), ErrorCode::validity);
  auto sparse_invalid = coords;
  for (int i = 0; i < 30; ++i) sparse_invalid[static_cast<std::size_t>(i)].valid = false;
  EXPECT_NO_THROW((void)fit_wall(sparse_invalid, 9, 8));
  auto negative = coords;
  for (auto& c : negative)
    if (c.tau > 0.4 && c.tau < 0.6) c.rho = -5.0;
  EXPECT_EQ(code_of([&] { (void)fit_wall(negative, 9, 8); }), ErrorCode::star_convexity);
  EXPECT_EQ(code_of([&] { (void)fit_wall(std::vector<VesselCoordinates>{}, 9, 8); }), ErrorCode::input);
}

TEST(Residuals, RadialAndQuantile) {
  const BivariateSpline wall(Eigen::MatrixXd::Constant(8, 6, 10.0), 5, 6);
  std::vector<VesselCoordinates> c{{0.2, 1.0, 10.5}, {0.4, 2.0, 9.0}, {0.6, 0.0, 10.0}};
  c.push_back({0.0, 0.0, 3.0, true, false, true});
  const auto r = radial_residuals(c, wall, 4);
  ASSERT_EQ(r.residual.size(), 3u);
  EXPECT_EQ(r.excluded, 1u);
  EXPECT_NEAR(r.residual[0], 0.5, 1e-12);
  EXPECT_NEAR(r.residual[1], 1.0, 1e-12);
  EXPECT_NEAR(r.mean, 0.5, 1e-12);
  EXPECT_NEAR(r.max, 1.0, 1e-12);
  EXPECT_NEAR(quantile({4, 1, 3, 2}, 0.75), 3.25, 1e-15);
  EXPECT_EQ(quantile({}, 0.5), 0.0);
  EXPECT_EQ(quantile({7}, 0.3), 7.0);
  EXPECT_EQ(quantile({1, 2, 3}, 1.0), 3.0);
}

TEST(Tessellate, Topology) {
  const auto v = straight_tube();
  const auto ctx = context_for(v, 5);
  const auto model = fit_model(v.mesh(), ctx, ModelDims{5, 9, 8});
  const auto mesh = tessellate(model, 40, 24);
  EXPECT_EQ(mesh.vertices.size(), 960u);
  EXPECT_EQ(mesh.faces.size(), 2u * 39 * 24);
  EXPECT_EQ(euler_characteristic(mesh), 0);
  EXPECT_EQ(boundary_loops(mesh).size(), 2u);
  for (const auto& p : mesh.vertices) EXPECT_NEAR(std::hypot(p.x(), p.y()), 10.0, 1e-6);
  // outward normals
  const auto& f = mesh.faces[100];
  const Vec3 n = (mesh.vertices[f[1]] - mesh.vertices[f[0]]).cross(mesh.vertices[f[2]] - mesh.vertices[f[0]]);
  const Vec3 centre = (mesh.vertices[f[0]] + mesh.vertices[f[1]] + mesh.vertices[f[2]]) / 3.0;
  EXPECT_GT(n.dot(Vec3(centre.x(), centre.y(), 0.0)), 0.0);
  EXPECT_EQ(code_of([&] { (void)tessellate(model, 1, 24); }), ErrorCode::precondition);
  EXPECT_EQ(code_of([&] { (void)tessellate(model, 4, 2); }), ErrorCode::precondition);
}

TEST(FeatureVector, RoundTripAndLayout) {
  const auto v = bumpy_aorta();
  const auto model = fit_model(v.mesh(), context_for(v, 9), ModelDims{});
  const auto fv = to_feature_vector(model);
  ASSERT_EQ(static_cast<std::size_t>(fv.values.size()), 366u);
  EXPECT_EQ(fv.values[0], model.centerline().coefficients()[0].x());
  EXPECT_EQ(fv.values[36], model.wall().coefficients()(0, 0));
  EXPECT_EQ(fv.values[37], model.wall().coefficients()(0, 1));
  const auto back = from_feature_vector(fv.values, fv.dims, model.v1_0(), "x");
  EXPECT_EQ(back.centerline(), model.centerline());
  EXPECT_EQ(back.wall(), model.wall());
  EXPECT_LT((back.v1_0() - model.v1_0()).norm(), 1e-15);
  EXPECT_EQ(back.id(), "x");
  Eigen::VectorXd shorter = fv.values.head(365);
  EXPECT_EQ(code_of([&] { (void)from_feature_vector(shorter, fv.dims, model.v1_0()); }), ErrorCode::layout);
  const Vec3 t0 = model.centerline().unit_tangent(0.0);
  EXPECT_EQ(code_of([&] { (void)from_feature_vector(fv.values, fv.dims, t0); }), ErrorCode::degenerate_frame);
}

TEST(VesselModel, RigidTransform) {
  const auto v = bumpy_aorta();
  const auto model = fit_model(v.mesh(), context_for(v, 9), ModelDims{});
  RigidTransform T;
  T.rotation = Eigen::AngleAxisd(0.8, Vec3(1, 1, 0).normalized()).toRotationMatrix();
  T.translation = Vec3(3, -9, 1);
  const auto moved = model.transformed(T);
  EXPECT_EQ(moved.wall(), model.wall());
  for (double tau : {0.0, 0.3, 0.77, 1.0})
    for (double th : {0.0, 1.0, 4.0})
      EXPECT_LT((moved.surface_point(tau, th) - T.apply(model.surface_point(tau, th))).norm(), 1e-9);
  EXPECT_EQ(model.with_id("a").id(), "a");
  EXPECT_TRUE(model == model.with_id(model.id()));
}
