#pragma once

// Uniform cubic B-splines: basis functions, 3D curves and the periodic
// bivariate radius surface used to encode the vessel wall.

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "vcs/geometry.hpp"

namespace vcs {

inline constexpr int kDegree = 3;

/// Uniform knot vector of a cubic spline with `spans` knot spans over
/// [lower, upper]. Knots are t_k = lower + (k - 3) * w, k = 0..spans+6, with
/// w = (upper - lower) / spans, so the three outer knots on each side lie
/// outside the domain and the basis is a partition of unity on the whole
/// domain. A periodic vector identifies basis e with e mod spans.
class KnotVector {
 public:
  KnotVector(int spans, double lower, double upper, bool periodic = false);

  [[nodiscard]] int spans() const noexcept { return spans_; }
  [[nodiscard]] double lower() const noexcept { return lower_; }
  [[nodiscard]] double upper() const noexcept { return upper_; }
  [[nodiscard]] double width() const noexcept { return width_; }
  [[nodiscard]] bool periodic() const noexcept { return periodic_; }

  /// Number of distinct basis functions (= number of coefficients).
  [[nodiscard]] int basis_count() const noexcept { return periodic_ ? spans_ : spans_ + kDegree; }
  /// Number of basis functions before periodic identification.
  [[nodiscard]] int extended_basis_count() const noexcept { return spans_ + kDegree; }
  [[nodiscard]] int knot_count() const noexcept { return spans_ + 2 * kDegree + 1; }
  [[nodiscard]] double knot(int k) const noexcept { return lower_ + (k - kDegree) * width_; }
  [[nodiscard]] std::vector<double> values() const;

  /// Maps t to the periodic domain (periodic) or validates it (open).
  /// Values within 1e-12 of an open domain end are clamped onto it.
  [[nodiscard]] double normalize(double t) const;

  /// Span index in [0, spans) and local coordinate u in [0, 1].
  struct Location {
    int span;
    double u;
  };
  [[nodiscard]] Location locate(double t) const;

  friend bool operator==(const KnotVector&, const KnotVector&) = default;

 private:
  int spans_;
  double lower_;
  double upper_;
  double width_;
  bool periodic_;
};

/// The four non-zero basis values (or their t-derivatives) on a span.
/// `first` is the extended basis index of values[0].
struct BasisWindow {
  int first = 0;
  std::array<double, 4> values{};
};

/// Closed-form uniform cubic basis, derivative order 0, 1 or 2.
[[nodiscard]] BasisWindow basis_window(const KnotVector& knots, double t, int order = 0);

/// B_i(t) by Cox-de Boor recursion. For periodic knots i is a periodic index.
[[nodiscard]] double eval_basis(const KnotVector& knots, int i, double t);

/// Cubic B-spline curve c(t) = sum_i c_i B_i(t), t in [0, 1].
class SplineCurve3 {
 public:
  SplineCurve3(std::vector<Vec3> coefficients, int spans);

  [[nodiscard]] const std::vector<Vec3>& coefficients() const noexcept { return coefficients_; }
  [[nodiscard]] const KnotVector& knots() const noexcept { return knots_; }
  [[nodiscard]] int spans() const noexcept { return knots_.spans(); }

  /// Position (order 0), velocity (1) or acceleration (2).
  [[nodiscard]] Vec3 evaluate(double t, int order = 0) const;
  [[nodiscard]] Vec3 position(double t) const { return evaluate(t, 0); }
  [[nodiscard]] Vec3 unit_tangent(double t) const { return evaluate(t, 1).normalized(); }
  /// ||c' x c''|| / ||c'||^3
  [[nodiscard]] double curvature(double t) const;

  [[nodiscard]] SplineCurve3 transformed(const RigidTransform& T) const;

  friend bool operator==(const SplineCurve3&, const SplineCurve3&) = default;

 private:
  std::vector<Vec3> coefficients_;
  KnotVector knots_;
};

/// rho_w(tau, theta) = sum_ij b_ij B_i(tau) B_j(theta); uniform open knots
/// in tau over [0, 1] and periodic knots in theta over [0, 2 pi].
/// Coefficient matrix is (spans_tau + 3) x spans_theta.
class BivariateSpline {
 public:
  BivariateSpline(Eigen::MatrixXd coefficients, int spans_tau, int spans_theta);

  [[nodiscard]] const Eigen::MatrixXd& coefficients() const noexcept { return coefficients_; }
  [[nodiscard]] const KnotVector& knots_tau() const noexcept { return knots_tau_; }
  [[nodiscard]] const KnotVector& knots_theta() const noexcept { return knots_theta_; }

  /// Value with derivative orders (d_tau, d_theta), each in 0..2.
  [[nodiscard]] double evaluate(double tau, double theta, int d_tau = 0, int d_theta = 0) const;
  [[nodiscard]] double operator()(double tau, double theta) const { return evaluate(tau, theta); }

  friend bool operator==(const BivariateSpline&, const BivariateSpline&) = default;

 private:
  Eigen::MatrixXd coefficients_;
  KnotVector knots_tau_;
  KnotVector knots_theta_;
};

/// Normalized cumulative chord length of an ordered polyline, in [0, 1].
[[nodiscard]] std::vector<double> chord_length_parameters(std::span<const Vec3> points);

/// Least-squares cubic curve with `spans` knot spans, parameters by chord length.
[[nodiscard]] SplineCurve3 fit_curve(std::span<const Vec3> points, int spans);
/// Least-squares cubic curve through samples at the given parameters.
[[nodiscard]] SplineCurve3 fit_curve(std::span<const Vec3> points, std::span<const double> params,
                                     int spans);

struct SurfaceSample {
  double tau;
  double theta;
  double rho;
};

/// Least-squares periodic radius surface.
[[nodiscard]] BivariateSpline fit_surface(std::span<const SurfaceSample> samples, int spans_tau,
                                          int spans_theta);

}  // namespace vcs
