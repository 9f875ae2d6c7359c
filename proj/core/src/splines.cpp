#include "vcs/splines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/SparseCore>

#include "vcs/error.hpp"
#include "vcs/least_squares.hpp"

namespace vcs {

namespace {

constexpr double kDomainSlack = 1e-12;

std::string fmt_interval(double a, double b) {
  return "[" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace

KnotVector::KnotVector(int spans, double lower, double upper, bool periodic)
    : spans_(spans), lower_(lower), upper_(upper), width_(0.0), periodic_(periodic) {
  if (spans < 1) fail(ErrorCode::domain, "knot vector needs at least one span");
  if (periodic && spans < kDegree + 1)
    fail(ErrorCode::domain, "periodic cubic knot vector needs at least 4 spans");
  if (!(upper > lower)) fail(ErrorCode::domain, "knot vector domain is empty");
  width_ = (upper - lower) / spans;
}

std::vector<double> KnotVector::values() const {
  std::vector<double> v(static_cast<std::size_t>(knot_count()));
  for (int k = 0; k < knot_count(); ++k)
    v[static_cast<std::size_t>(k)] =
        lower_ + (upper_ - lower_) * static_cast<double>(k - kDegree) / spans_;
  return v;
}

double KnotVector::normalize(double t) const {
  if (!std::isfinite(t)) fail(ErrorCode::domain, "spline parameter is not finite");
  if (periodic_) {
    const double period = upper_ - lower_;
    double r = std::fmod(t - lower_, period);
    if (r < 0) r += period;
    if (r >= period) r = 0.0;
    return lower_ + r;
  }
  if (t < lower_ - kDomainSlack || t > upper_ + kDomainSlack)
    fail(ErrorCode::domain, "spline parameter " + std::to_string(t) + " outside " +
                                "[" + std::to_string(lower_) + ", " + std::to_string(upper_) + "]");
  return std::clamp(t, lower_, upper_);
}

KnotVector::Location KnotVector::locate(double t) const {
  const double x = (normalize(t) - lower_) * spans_ / (upper_ - lower_);
  int s = static_cast<int>(std::floor(x));
  s = std::clamp(s, 0, spans_ - 1);
  return {s, x - s};
}

BasisWindow basis_window(const KnotVector& knots, double t, int order) {
  const auto [s, u] = knots.locate(t);
  BasisWindow w;
  w.first = s;
  const double v = 1.0 - u;
  switch (order) {
    case 0:
      w.values = {v * v * v / 6.0, (3 * u * u * u - 6 * u * u + 4) / 6.0,
                  (-3 * u * u * u + 3 * u * u + 3 * u + 1) / 6.0, u * u * u / 6.0};
      break;
    case 1: {
      const double k = 1.0 / knots.width();
      w.values = {-v * v / 2.0 * k, (3 * u * u - 4 * u) / 2.0 * k,
                  (-3 * u * u + 2 * u + 1) / 2.0 * k, u * u / 2.0 * k};
      break;
    }
    case 2: {
      const double k = 1.0 / (knots.width() * knots.width());
      w.values = {v * k, (3 * u - 2) * k, (1 - 3 * u) * k, u * k};
      break;
    }
    default:
      fail(ErrorCode::domain, "basis derivative order must be 0, 1 or 2");
  }
  return w;
}

namespace {

// Cox-de Boor recursion on the extended (non-periodic) knot sequence.
double cox_de_boor(const std::vector<double>& knots, int e, int p, double t) {
  if (p == 0) return (knots[e] <= t && t < knots[e + 1]) ? 1.0 : 0.0;
  double left = 0.0;
  double right = 0.0;
  const double dl = knots[e + p] - knots[e];
  const double dr = knots[e + p + 1] - knots[e + 1];
  if (dl > 0) left = (t - knots[e]) / dl * cox_de_boor(knots, e, p - 1, t);
  if (dr > 0) right = (knots[e + p + 1] - t) / dr * cox_de_boor(knots, e + 1, p - 1, t);
  return left + right;
}

}  // namespace

double eval_basis(const KnotVector& knots, int i, double t) {
  if (i < 0 || i >= knots.basis_count())
    fail(ErrorCode::domain, "basis index " + std::to_string(i) + " out of range");
  const double x = knots.normalize(t);
  const auto kv = knots.values();
  if (!knots.periodic()) return cox_de_boor(kv, i, kDegree, x);
  double sum = 0.0;
  for (int e = i; e < knots.extended_basis_count(); e += knots.spans())
    sum += cox_de_boor(kv, e, kDegree, x);
  return sum;
}

SplineCurve3::SplineCurve3(std::vector<Vec3> coefficients, int spans)
    : coefficients_(std::move(coefficients)), knots_(spans, 0.0, 1.0) {
  if (static_cast<int>(coefficients_.size()) != knots_.basis_count())
    fail(ErrorCode::layout, "curve with " + std::to_string(spans) + " spans needs " +
                                std::to_string(knots_.basis_count()) + " coefficients, got " +
                                std::to_string(coefficients_.size()));
}

Vec3 SplineCurve3::evaluate(double t, int order) const {
  const BasisWindow w = basis_window(knots_, t, order);
  Vec3 p = Vec3::Zero();
  for (int a = 0; a < 4; ++a) p += w.values[a] * coefficients_[static_cast<std::size_t>(w.first + a)];
  return p;
}

double SplineCurve3::curvature(double t) const {
  const Vec3 d1 = evaluate(t, 1);
  const Vec3 d2 = evaluate(t, 2);
  const double speed = d1.norm();
  if (speed == 0.0) return std::numeric_limits<double>::infinity();
  return d1.cross(d2).norm() / (speed * speed * speed);
}

SplineCurve3 SplineCurve3::transformed(const RigidTransform& T) const {
  std::vector<Vec3> c;
  c.reserve(coefficients_.size());
  for (const auto& p : coefficients_) c.push_back(T.apply(p));
  return SplineCurve3(std::move(c), spans());
}

BivariateSpline::BivariateSpline(Eigen::MatrixXd coefficients, int spans_tau, int spans_theta)
    : coefficients_(std::move(coefficients)),
      knots_tau_(spans_tau, 0.0, 1.0),
      knots_theta_(spans_theta, 0.0, 2.0 * std::numbers::pi, true) {
  if (coefficients_.rows() != knots_tau_.basis_count() ||
      coefficients_.cols() != knots_theta_.basis_count())
    fail(ErrorCode::layout, "wall coefficient matrix must be " +
                                std::to_string(knots_tau_.basis_count()) + "x" +
                                std::to_string(knots_theta_.basis_count()));
}

double BivariateSpline::evaluate(double tau, double theta, int d_tau, int d_theta) const {
  const BasisWindow wt = basis_window(knots_tau_, tau, d_tau);
  const BasisWindow wq = basis_window(knots_theta_, theta, d_theta);
  const int r = knots_theta_.spans();
  double sum = 0.0;
  for (int a = 0; a < 4; ++a) {
    double row = 0.0;
    for (int b = 0; b < 4; ++b) row += wq.values[b] * coefficients_(wt.first + a, (wq.first + b) % r);
    sum += wt.values[a] * row;
  }
  return sum;
}

std::vector<double> chord_length_parameters(std::span<const Vec3> points) {
  std::vector<double> s(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) s[i] = s[i - 1] + (points[i] - points[i - 1]).norm();
  const double total = s.empty() ? 0.0 : s.back();
  if (!(total > 0.0))
    fail(ErrorCode::degenerate_geometry, "samples have zero chord length");
  for (auto& v : s) v /= total;
  s.back() = 1.0;
  return s;
}

SplineCurve3 fit_curve(std::span<const Vec3> points, int spans) {
  if (spans < 1) fail(ErrorCode::domain, "curve needs at least one knot span");
  if (points.size() < static_cast<std::size_t>(spans + 4))
    fail(ErrorCode::insufficient_samples,
         "curve fit with " + std::to_string(spans) + " spans needs at least " +
             std::to_string(spans + 4) + " samples, got " + std::to_string(points.size()));
  const auto params = chord_length_parameters(points);
  return fit_curve(points, params, spans);
}

SplineCurve3 fit_curve(std::span<const Vec3> points, std::span<const double> params, int spans) {
  if (points.size() != params.size())
    fail(ErrorCode::layout, "curve fit: point and parameter counts differ");
  const KnotVector knots(spans, 0.0, 1.0);
  const int n = knots.basis_count();
  const auto m = static_cast<Eigen::Index>(points.size());
  if (m < n)
    fail(ErrorCode::insufficient_samples, "curve fit: " + std::to_string(m) +
                                              " samples for " + std::to_string(n) + " coefficients");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(points.size() * 4);
  Eigen::MatrixXd rhs(m, 3);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto w = basis_window(knots, params[static_cast<std::size_t>(r)]);
    for (int a = 0; a < 4; ++a)
      if (w.values[a] != 0.0) triplets.emplace_back(r, w.first + a, w.values[a]);
    rhs.row(r) = points[static_cast<std::size_t>(r)].transpose();
  }
  Eigen::SparseMatrix<double> A(m, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  const Eigen::MatrixXd x = solve_least_squares(A, rhs, "curve fit");
  std::vector<Vec3> coef(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) coef[static_cast<std::size_t>(i)] = x.row(i).transpose();
  return SplineCurve3(std::move(coef), spans);
}

BivariateSpline fit_surface(std::span<const SurfaceSample> samples, int spans_tau, int spans_theta) {
  const KnotVector kt(spans_tau, 0.0, 1.0);
  const KnotVector kq(spans_theta, 0.0, 2.0 * std::numbers::pi, true);
  const int rows = kt.basis_count();
  const int cols = kq.basis_count();
  const int unknowns = rows * cols;
  if (samples.size() < static_cast<std::size_t>(unknowns))
    fail(ErrorCode::insufficient_samples, "surface fit: " + std::to_string(samples.size()) +
                                              " samples for " + std::to_string(unknowns) +
                                              " coefficients");

  std::vector<int> tau_hits(static_cast<std::size_t>(spans_tau), 0);
  std::vector<int> theta_hits(static_cast<std::size_t>(spans_theta), 0);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(samples.size() * 16);
  Eigen::MatrixXd rhs(static_cast<Eigen::Index>(samples.size()), 1);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    const auto& s = samples[r];
    if (!std::isfinite(s.rho)) fail(ErrorCode::input, "surface fit: non-finite radius sample");
    const auto wt = basis_window(kt, s.tau);
    const auto wq = basis_window(kq, s.theta);
    ++tau_hits[static_cast<std::size_t>(wt.first)];
    ++theta_hits[static_cast<std::size_t>(wq.first)];
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double v = wt.values[a] * wq.values[b];
        if (v != 0.0)
          triplets.emplace_back(static_cast<int>(r), (wt.first + a) * cols + (wq.first + b) % cols, v);
      }
    rhs(static_cast<Eigen::Index>(r), 0) = s.rho;
  }
  for (int k = 0; k < spans_tau; ++k)
    if (tau_hits[static_cast<std::size_t>(k)] == 0)
      fail(ErrorCode::coverage, "surface fit: no samples in tau band " +
                                    fmt_interval(kt.knot(k + kDegree), kt.knot(k + kDegree + 1)));
  for (int k = 0; k < spans_theta; ++k)
    if (theta_hits[static_cast<std::size_t>(k)] == 0)
      fail(ErrorCode::coverage, "surface fit: no samples in theta band " +
                                    fmt_interval(kq.knot(k + kDegree), kq.knot(k + kDegree + 1)));

  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(samples.size()), unknowns);
  A.setFromTriplets(triplets.begin(), triplets.end());
  const Eigen::MatrixXd x = solve_least_squares(A, rhs, "surface fit");
  Eigen::MatrixXd coef(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) coef(i, j) = x(i * cols + j, 0);
  return BivariateSpline(std::move(coef), spans_tau, spans_theta);
}

}  // namespace vcs
