#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vcs/error.hpp"
#include "vcs/splines.hpp"

using namespace vcs;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an exception";
  return ErrorCode::input;
}

std::vector<Vec3> helix_points(int n, double radius, double pitch, double turns) {
  std::vector<Vec3> p;
  for (int i = 0; i < n; ++i) {
    const double a = kTwoPi * turns * i / (n - 1);
    p.emplace_back(radius * std::cos(a), radius * std::sin(a), pitch * a / kTwoPi);
  }
  return p;
}

}  // namespace

TEST(KnotVector, UniformValuesAndCounts) {
  const KnotVector k(5, 0.0, 1.0);
  EXPECT_EQ(k.knot_count(), 12);
  EXPECT_EQ(k.basis_count(), 8);
  const auto v = k.values();
  ASSERT_EQ(v.size(), 12u);
  EXPECT_DOUBLE_EQ(v[3], 0.0);
  EXPECT_DOUBLE_EQ(v[8], 1.0);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_NEAR(v[i] - v[i - 1], 0.2, 1e-15);
}

TEST(KnotVector, PeriodicCountsAndWrap) {
  const KnotVector k(15, 0.0, kTwoPi, true);
  EXPECT_EQ(k.basis_count(), 15);
  EXPECT_NEAR(k.normalize(kTwoPi + 0.25), 0.25, 1e-12);
  EXPECT_NEAR(k.normalize(-0.25), kTwoPi - 0.25, 1e-12);
}

TEST(KnotVector, RejectsBadDomains) {
  EXPECT_EQ(code_of([] { (void)KnotVector(0, 0.0, 1.0); }), ErrorCode::domain);
  EXPECT_EQ(code_of([] { (void)KnotVector(3, 0.0, 1.0, true); }), ErrorCode::domain);
  EXPECT_EQ(code_of([] { (void)KnotVector(5, 1.0, 1.0); }), ErrorCode::domain);
}

TEST(Basis, PartitionOfUnity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int spans : {1, 5, 9, 19}) {
    const KnotVector k(spans, 0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
      const double t = u(rng);
      double sum = 0.0;
      for (int i = 0; i < k.basis_count(); ++i) sum += eval_basis(k, i, t);
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(Basis, PeriodicPartitionOfUnity) {
  const KnotVector k(15, 0.0, kTwoPi, true);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int trial = 0; trial < 1000; ++trial) {
    const double t = u(rng);
    double sum = 0.0;
    for (int i = 0; i < k.basis_count(); ++i) sum += eval_basis(k, i, t);
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Basis, LocalSupport) {
  const KnotVector k(9, 0.0, 1.0);
  for (int i = 0; i < k.basis_count(); ++i)
    for (int s = 0; s <= 900; ++s) {
      const double t = s / 900.0;
      if (t < k.knot(i) || t > k.knot(i + 4)) EXPECT_EQ(eval_basis(k, i, t), 0.0) << i << " " << t;
      else EXPECT_GE(eval_basis(k, i, t), 0.0);
    }
}

TEST(Basis, SingleSpanMidpointMatchesDeBoor) {
  const KnotVector k(1, 0.0, 1.0);
  const auto t = oracle::uniform_knots(1, 0.0, 1.0);
  // frozen from the de Boor oracle: 1/48, 23/48, 23/48, 1/48
  const double expected[4] = {1.0 / 48, 23.0 / 48, 23.0 / 48, 1.0 / 48};
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double b = eval_basis(k, i, 0.5);
    EXPECT_NEAR(b, oracle::basis_by_de_boor(t, 4, i, 0.5), 1e-15);
    EXPECT_NEAR(b, expected[i], 1e-15);
    EXPECT_GT(b, 0.0);
    sum += b;
  }
  EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(Basis, CoxDeBoorAgreesWithDeBoorEverywhere) {
  const KnotVector k(7, 0.0, 1.0);
  const auto t = oracle::uniform_knots(7, 0.0, 1.0);
  for (int i = 0; i < k.basis_count(); ++i)
    for (int s = 0; s < 97; ++s) {
      const double x = s / 96.0;
      EXPECT_NEAR(eval_basis(k, i, x), oracle::basis_by_de_boor(t, k.basis_count(), i, x), 1e-13);
    }
}

TEST(Basis, ClosedFormWindowMatchesRecursion) {
  const KnotVector k(6, 0.0, 1.0);
  for (int s = 0; s <= 60; ++s) {
    const double x = s / 60.0;
    const auto w = basis_window(k, x);
    for (int a = 0; a < 4; ++a) EXPECT_NEAR(w.values[static_cast<std::size_t>(a)], eval_basis(k, w.first + a, x), 1e-14);
  }
}

TEST(Basis, WindowDerivativesMatchFiniteDifferences) {
  const KnotVector k(6, 0.0, 1.0);
  const double h = 1e-6;
  for (double x : {0.13, 0.41, 0.77}) {
    const auto w1 = basis_window(k, x, 1);
    const auto w2 = basis_window(k, x, 2);
    for (int a = 0; a < 4; ++a) {
      const int i = w1.first + a;
      const double fd1 = (eval_basis(k, i, x + h) - eval_basis(k, i, x - h)) / (2 * h);
      const double fd2 = (eval_basis(k, i, x + 1e-4) - 2 * eval_basis(k, i, x) + eval_basis(k, i, x - 1e-4)) / 1e-8;
      EXPECT_NEAR(w1.values[static_cast<std::size_t>(a)], fd1, 1e-6);
      EXPECT_NEAR(w2.values[static_cast<std::size_t>(a)], fd2, 1e-3);
    }
  }
}

TEST(Basis, DomainErrors) {
  const KnotVector k(5, 0.0, 1.0);
  EXPECT_EQ(code_of([&] { (void)eval_basis(k, 0, 1.5); }), ErrorCode::domain);
  EXPECT_EQ(code_of([&] { (void)eval_basis(k, 0, -0.1); }), ErrorCode::domain);
  EXPECT_EQ(code_of([&] { (void)eval_basis(k, 8, 0.5); }), ErrorCode::domain);
  EXPECT_EQ(code_of([&] { (void)basis_window(k, 0.5, 3); }), ErrorCode::domain);
}

TEST(Curve, EvaluationMatchesDeBoor) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<Vec3> c;
  for (int i = 0; i < 12; ++i) c.emplace_back(g(rng), g(rng), g(rng));
  const SplineCurve3 curve(c, 9);
  const auto t = oracle::uniform_knots(9, 0.0, 1.0);
  for (int s = 0; s <= 200; ++s) {
    const double x = s / 200.0;
    EXPECT_LT((curve.position(x) - oracle::de_boor(t, c, x)).norm(), 1e-13);
  }
}

TEST(Curve, StraightLineFit) {
  std::vector<Vec3> pts;
  for (int i = 0; i < 100; ++i) pts.push_back(Vec3(1, 2, 3) + i * Vec3(0.3, -0.2, 0.5));
  const auto curve = fit_curve(pts, 5);
  const auto params = chord_length_parameters(pts);
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) worst = std::max(worst, (curve.position(params[i]) - pts[i]).norm());
  EXPECT_LT(worst, 1e-9);
  const Vec3 d0 = curve.evaluate(0.0, 1);
  for (double x : {0.1, 0.5, 0.93, 1.0}) EXPECT_LT((curve.evaluate(x, 1) - d0).norm(), 1e-8 * d0.norm());
  EXPECT_LT(curve.evaluate(0.4, 2).norm(), 1e-7);
}

TEST(Curve, FirstDerivativeMatchesFiniteDifference) {
  const auto curve = fit_curve(helix_points(500, 10, 20, 2), 19);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(1e-3, 1.0 - 1e-3);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    const Vec3 fd = oracle::central_difference([&](double s) { return curve.position(s); }, x, 1e-6);
    const Vec3 d = curve.evaluate(x, 1);
    worst = std::max(worst, (fd - d).norm() / d.norm());
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(Curve, SecondDerivativePointsToArcCenter) {
  std::vector<Vec3> pts;
  const double r = 30.0;
  for (int i = 0; i < 200; ++i) {
    const double a = 0.5 * std::numbers::pi * i / 199;
    pts.emplace_back(r * std::cos(a), r * std::sin(a), 0.0);
  }
  const auto curve = fit_curve(pts, 9);
  for (double x : {0.2, 0.5, 0.8}) {
    const Vec3 acc = curve.evaluate(x, 2);
    const Vec3 to_center = -curve.position(x);
    EXPECT_GT(acc.normalized().dot(to_center.normalized()), 0.999) << x;
  }
}

TEST(Curve, DomainErrors) {
  const SplineCurve3 curve(std::vector<Vec3>(8, Vec3::Zero()), 5);
  EXPECT_EQ(code_of([&] { (void)curve.evaluate(1.01); }), ErrorCode::domain);
  EXPECT_EQ(code_of([&] { (void)curve.evaluate(-0.5); }), ErrorCode::domain);
  EXPECT_EQ(code_of([] { (void)SplineCurve3(std::vector<Vec3>(7, Vec3::Zero()), 5); }), ErrorCode::layout);
}

TEST(Curve, HelixFitAccuracy) {
  const auto pts = helix_points(500, 10.0, 20.0, 2.0);
  const auto curve = fit_curve(pts, 19);
  const auto params = chord_length_parameters(pts);
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) worst = std::max(worst, (curve.position(params[i]) - pts[i]).norm());
  EXPECT_LT(worst, 0.05);
}

TEST(Curve, RefitIsStable) {
  const auto curve = fit_curve(helix_points(500, 10.0, 20.0, 2.0), 19);
  std::vector<Vec3> pts;
  std::vector<double> params;
  for (int i = 0; i < 1000; ++i) {
    params.push_back(i / 999.0);
    pts.push_back(curve.position(params.back()));
  }
  const auto again = fit_curve(pts, params, 19);
  double scale = 0.0;
  for (const auto& c : curve.coefficients()) scale = std::max(scale, c.norm());
  for (std::size_t i = 0; i < curve.coefficients().size(); ++i)
    EXPECT_LT((again.coefficients()[i] - curve.coefficients()[i]).norm() / scale, 1e-6);
}

TEST(Curve, FitErrors) {
  const auto few = helix_points(20, 10, 20, 1);
  EXPECT_EQ(code_of([&] { (void)fit_curve(few, 19); }), ErrorCode::insufficient_samples);
  const std::vector<Vec3> same(50, Vec3(1, 1, 1));
  EXPECT_EQ(code_of([&] { (void)fit_curve(same, 5); }), ErrorCode::degenerate_geometry);
  // every sample at one parameter: rank-deficient design matrix
  const auto pts = helix_points(50, 10, 20, 1);
  const std::vector<double> params(50, 0.5);
  EXPECT_EQ(code_of([&] { (void)fit_curve(pts, params, 5); }), ErrorCode::degenerate_geometry);
}

TEST(Curve, RigidEquivariance) {
  const auto curve = fit_curve(helix_points(300, 10, 20, 2), 9);
  RigidTransform T;
  T.rotation = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  T.translation = Vec3(5, -4, 12);
  const auto moved = curve.transformed(T);
  for (int s = 0; s <= 100; ++s) {
    const double x = s / 100.0;
    EXPECT_LT((moved.position(x) - T.apply(curve.position(x))).norm(), 1e-12);
  }
}

TEST(Curve, Curvature) {
  std::vector<Vec3> pts;
  for (int i = 0; i < 400; ++i) {
    const double a = std::numbers::pi * i / 399;
    pts.emplace_back(25 * std::cos(a), 0.0, 25 * std::sin(a));
  }
  const auto curve = fit_curve(pts, 19);
  EXPECT_NEAR(curve.curvature(0.5), 1.0 / 25.0, 1e-4);
}

TEST(Surface, ConstantReproduction) {
  std::vector<SurfaceSample> s;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 3000; ++i) s.push_back({u(rng), kTwoPi * u(rng), 10.0});
  const auto w = fit_surface(s, 9, 8);
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) EXPECT_NEAR(w(i / 20.0, kTwoPi * j / 20.0), 10.0, 1e-9);
}

TEST(Surface, AnalyticRadiusRms) {
  std::vector<SurfaceSample> s;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto f = [](double t, double th) { return 10.0 + 2.0 * std::sin(kTwoPi * t) * std::cos(th); };
  for (int i = 0; i < 10000; ++i) {
    const double t = u(rng);
    const double th = kTwoPi * u(rng);
    s.push_back({t, th, f(t, th)});
  }
  const auto w = fit_surface(s, 19, 15);
  double sq = 0.0;
  for (const auto& p : s) sq += std::pow(w(p.tau, p.theta) - p.rho, 2);
  EXPECT_LT(std::sqrt(sq / static_cast<double>(s.size())), 0.02);
}

TEST(Surface, SeamContinuity) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Random(12, 15).array() + 10.0;
  const BivariateSpline w(b, 9, 15);
  for (int i = 0; i <= 10; ++i) {
    const double t = i / 10.0;
    EXPECT_NEAR(w.evaluate(t, 0.0), w.evaluate(t, kTwoPi), 1e-12);
    EXPECT_NEAR(w.evaluate(t, 0.0, 0, 1), w.evaluate(t, kTwoPi, 0, 1), 1e-12);
    EXPECT_NEAR(w.evaluate(t, 0.0, 0, 2), w.evaluate(t, kTwoPi, 0, 2), 1e-10);
  }
}

TEST(Surface, CoverageBandReported) {
  std::vector<SurfaceSample> s;
  for (int i = 0; i < 2000; ++i) s.push_back({0.5 * (i % 100) / 99.0, kTwoPi * (i / 100) / 20.0, 10.0});
  try {
    (void)fit_surface(s, 9, 8);
    FAIL() << "expected a coverage error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::coverage);
    EXPECT_NE(std::string(e.what()).find("tau"), std::string::npos) << e.what();
  }
}

TEST(Surface, TooFewSamples) {
  std::vector<SurfaceSample> s{{0.1, 0.1, 1.0}, {0.5, 1.0, 1.0}};
  EXPECT_EQ(code_of([&] { (void)fit_surface(s, 9, 8); }), ErrorCode::insufficient_samples);
}
