#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vcs/coords.hpp"
#include "vcs/mesh.hpp"
#include "vcs/splines.hpp"

namespace vcs {

/// Knot-span counts: L for the centerline, K along tau and R around theta.
struct ModelDims {
  int L = 9;
  int K = 19;
  int R = 15;

  [[nodiscard]] int centerline_coefficients() const noexcept { return L + kDegree; }
  [[nodiscard]] int wall_rows() const noexcept { return K + kDegree; }
  [[nodiscard]] int wall_cols() const noexcept { return R; }
  /// 3 (L + 3) + (K + 3) R
  [[nodiscard]] std::size_t feature_length() const noexcept {
    return static_cast<std::size_t>(3 * centerline_coefficients() + wall_rows() * wall_cols());
  }
  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

/// Centerline spline, wall radius spline and initial frame vector.
/// The transported frame field is built once at construction.
class VesselModel {
 public:
  VesselModel(SplineCurve3 centerline, BivariateSpline wall, Vec3 v1_0, std::string id = {});

  [[nodiscard]] const SplineCurve3& centerline() const noexcept { return centerline_; }
  [[nodiscard]] const BivariateSpline& wall() const noexcept { return wall_; }
  [[nodiscard]] const Vec3& v1_0() const noexcept { return v1_0_; }
  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] const VcsContext& context() const noexcept { return *context_; }
  [[nodiscard]] ModelDims dims() const noexcept;

  /// x(tau, theta) = c(tau) + rho_w(tau, theta) (v1 cos theta + v2 sin theta)
  [[nodiscard]] Vec3 surface_point(double tau, double theta) const;

  [[nodiscard]] VesselModel with_id(std::string id) const;
  /// Rigid motion applied to the control points and to v1_0; wall untouched.
  [[nodiscard]] VesselModel transformed(const RigidTransform& T) const;

  friend bool operator==(const VesselModel& a, const VesselModel& b) {
    return a.centerline_ == b.centerline_ && a.wall_ == b.wall_ && a.v1_0_ == b.v1_0_ &&
           a.id_ == b.id_;
  }

 private:
  SplineCurve3 centerline_;
  BivariateSpline wall_;
  Vec3 v1_0_;
  std::string id_;
  std::shared_ptr<const VcsContext> context_;
};

struct FitOptions {
  double tau_margin = 1e-3;        // vertices this close to either end are skipped
  double max_invalid_fraction = 0.01;
  int probe_tau = 200;
  int probe_theta = 100;
};

/// to_vcs of every mesh vertex.
[[nodiscard]] std::vector<VesselCoordinates> vertex_coordinates(const TriangleMesh& mesh,
                                                                const VcsContext& ctx);

/// Wall surface over precomputed vertex coordinates, with the validity and
/// star-convexity checks of fit_model.
[[nodiscard]] BivariateSpline fit_wall(std::span<const VesselCoordinates> coords, int K, int R,
                                       const FitOptions& options = {});

/// Fits the wall surface to every mesh vertex. `dims.L` must match the
/// context centerline.
[[nodiscard]] VesselModel fit_model(const TriangleMesh& mesh, const VcsContext& ctx,
                                    const ModelDims& dims, const FitOptions& options = {});

/// Smallest wall radius on a regular probe grid, and where it occurs.
struct RadiusProbe {
  double min_radius;
  double tau;
  double theta;
};
[[nodiscard]] RadiusProbe probe_wall(const BivariateSpline& wall, int n_tau = 200, int n_theta = 100);

struct Histogram {
  std::vector<double> edges;        // bins + 1 values
  std::vector<std::size_t> counts;  // bins values
};

struct ResidualReport {
  std::vector<std::size_t> vertex;  // mesh index of each residual
  std::vector<double> residual;     // |p - x(tau(p), theta(p))|, mm
  std::size_t excluded = 0;         // boundary-clamped or on-centerline vertices
  double mean = 0.0;
  double p75 = 0.0;
  double max = 0.0;
  Histogram histogram;
  // nearest distance to a fine tessellation of the model; empty if disabled
  std::vector<double> nearest;
  double nearest_mean = 0.0;
  double nearest_max = 0.0;
};

struct ResidualOptions {
  int bins = 20;
  bool nearest_surface = true;
  int nearest_tau = 400;
  int nearest_theta = 128;
};

[[nodiscard]] ResidualReport residuals(const TriangleMesh& mesh, const VesselModel& model,
                                       const ResidualOptions& options = {});

/// Residuals from precomputed coordinates against a wall on the same
/// centerline: p and x(tau, theta) share the direction from c(tau), so the
/// residual reduces to |rho - rho_w(tau, theta)|. No nearest-surface metric.
[[nodiscard]] ResidualReport radial_residuals(std::span<const VesselCoordinates> coords,
                                              const BivariateSpline& wall, int bins = 20);

/// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
[[nodiscard]] double quantile(std::vector<double> values, double q);

/// Regular wall mesh: vertex (i, j) at index i * n_theta + j with
/// tau_i = i / (n_tau - 1), theta_j = 2 pi j / n_theta; normals point outward.
[[nodiscard]] TriangleMesh tessellate(const VesselModel& model, int n_tau, int n_theta);

/// Flat coefficient vector: control points (x, y, z) in order, then the wall
/// coefficients b_ij row by row (tau index major).
struct FeatureVector {
  Eigen::VectorXd values;
  ModelDims dims;
};

[[nodiscard]] FeatureVector to_feature_vector(const VesselModel& model);
/// v1_0 is projected onto the normal plane of the new centerline at tau = 0.
[[nodiscard]] VesselModel from_feature_vector(const Eigen::VectorXd& values, const ModelDims& dims,
                                              const Vec3& v1_0, std::string id = {});

}  // namespace vcs
