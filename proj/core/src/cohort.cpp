#include "vcs/cohort.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SVD>

#include "vcs/error.hpp"
#include "vcs/parallel.hpp"

namespace vcs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double squared_distance(std::span<const Vec3> a, std::span<const Vec3> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]).squaredNorm();
  return s;
}

std::vector<Vec3> transform_points(const RigidTransform& T, std::span<const Vec3> pts) {
  std::vector<Vec3> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = T.apply(pts[i]);
  return out;
}

}  // namespace

std::vector<Vec3> correspondence_points(const VesselModel& model, int n_tau, int n_theta) {
  return tessellate(model, n_tau, n_theta).vertices;
}

RigidTransform fit_rigid(std::span<const Vec3> from, std::span<const Vec3> to) {
  if (from.size() != to.size() || from.empty())
    fail(ErrorCode::cardinality, "rigid fit needs two equal, nonempty point sets");
  Vec3 ca = Vec3::Zero();
  Vec3 cb = Vec3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    ca += from[i];
    cb += to[i];
  }
  ca /= static_cast<double>(from.size());
  cb /= static_cast<double>(to.size());
  Mat3 H = Mat3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) H += (from[i] - ca) * (to[i] - cb).transpose();
  Eigen::JacobiSVD<Mat3> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 D = Mat3::Identity();
  D(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0 ? -1.0 : 1.0;
  RigidTransform T;
  T.rotation = svd.matrixV() * D * svd.matrixU().transpose();
  T.translation = cb - T.rotation * ca;
  return T;
}

Coregistration coregister(std::span<const VesselModel> models, const CoregistrationOptions& options) {
  if (models.size() < 2) fail(ErrorCode::cardinality, "coregistration needs at least 2 models");
  const ModelDims dims = models.front().dims();
  for (const auto& m : models)
    if (!(m.dims() == dims)) fail(ErrorCode::layout, "models have different (L, K, R)");

  std::vector<std::vector<Vec3>> points(models.size());
  parallel_for(models.size(), [&](std::size_t k) {
    points[k] = correspondence_points(models[k], options.n_tau, options.n_theta);
  }, 1);
  const std::size_t n = points.front().size();

  Coregistration out;
  out.transforms.assign(models.size(), RigidTransform::identity());
  std::vector<Vec3> mean = points.front();
  for (int it = 0; it < options.max_iter; ++it) {
    std::vector<Vec3> next(n, Vec3::Zero());
    double objective = 0.0;
    for (std::size_t k = 0; k < models.size(); ++k) {
      out.transforms[k] = fit_rigid(points[k], mean);
      const auto moved = transform_points(out.transforms[k], points[k]);
      objective += squared_distance(moved, mean);
      for (std::size_t i = 0; i < n; ++i) next[i] += moved[i];
    }
    out.objective.push_back(objective);
    for (auto& p : next) p /= static_cast<double>(models.size());
    // fix the gauge: keep the mean where the previous one was
    next = transform_points(fit_rigid(next, mean), next);
    const double movement = std::sqrt(squared_distance(next, mean) / static_cast<double>(n));
    mean = std::move(next);
    out.iterations = it + 1;
    if (movement < options.tol) {
      out.converged = true;
      break;
    }
  }
  // transforms against the final mean
  for (std::size_t k = 0; k < models.size(); ++k) out.transforms[k] = fit_rigid(points[k], mean);
  if (!out.converged) {
    std::ostringstream msg;
    msg << "Procrustes did not converge in " << out.iterations << " iterations; last objective "
        << out.objective.back();
    out.warning = msg.str();
  }
  out.aligned.reserve(models.size());
  for (std::size_t k = 0; k < models.size(); ++k)
    out.aligned.push_back(models[k].transformed(out.transforms[k]));
  return out;
}

CohortModel shape_pca(std::span<const FeatureVector> vectors, const Vec3& v1_0) {
  if (vectors.size() < 2) fail(ErrorCode::cardinality, "shape PCA needs at least 2 samples");
  const auto& first = vectors.front();
  Eigen::MatrixXd data(static_cast<Eigen::Index>(vectors.size()), first.values.size());
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (!(vectors[k].dims == first.dims) || vectors[k].values.size() != first.values.size())
      fail(ErrorCode::layout, "feature vector " + std::to_string(k) + " has a different layout");
    data.row(static_cast<Eigen::Index>(k)) = vectors[k].values.transpose();
  }
  return {first.dims, principal_components(data), v1_0.normalized()};
}

CohortModel shape_pca(std::span<const VesselModel> models) {
  std::vector<FeatureVector> vectors;
  Vec3 v = Vec3::Zero();
  for (const auto& m : models) {
    vectors.push_back(to_feature_vector(m));
    v += m.v1_0();
  }
  if (v.norm() < 1e-9) v = models.empty() ? Vec3::UnitX() : models.front().v1_0();
  return shape_pca(vectors, v);
}

Synthesis synthesize(const CohortModel& cohort, const Eigen::VectorXd& alpha) {
  const Eigen::VectorXd values = cohort.pca.reconstruct(alpha);
  Synthesis out{from_feature_vector(values, cohort.dims, cohort.v1_0), std::nullopt};
  const auto probe = probe_wall(out.model.wall());
  if (!(probe.min_radius > 0.0)) {
    std::ostringstream msg;
    msg << "synthesized wall radius " << probe.min_radius << " at tau=" << probe.tau
        << ", theta=" << probe.theta << " is outside the valid shape manifold";
    out.warning = msg.str();
  }
  return out;
}

ModeDecomposition mode_decomposition(const CohortModel& cohort, Eigen::Index mode, double scale,
                                     int n_tau, int n_theta) {
  if (mode < 0 || mode >= cohort.mode_count())
    fail(ErrorCode::precondition, "mode index " + std::to_string(mode) + " out of range (" +
                                      std::to_string(cohort.mode_count()) + " modes)");
  if (n_tau < 2 || n_theta < 1) fail(ErrorCode::precondition, "decomposition grid too small");
  const Eigen::VectorXd delta = scale * cohort.sigma(mode) * cohort.pca.modes.col(mode);
  const auto mean = from_feature_vector(cohort.pca.mean, cohort.dims, cohort.v1_0);
  const auto deformed = from_feature_vector(cohort.pca.mean + delta, cohort.dims, cohort.v1_0);

  ModeDecomposition out;
  out.n_tau = n_tau;
  out.n_theta = n_theta;
  for (int i = 0; i < n_tau; ++i) {
    const double tau = static_cast<double>(i) / (n_tau - 1);
    out.tau.push_back(tau);
    out.displacement.push_back(
        (mean.centerline().position(tau) - deformed.centerline().position(tau)).norm());
    for (int j = 0; j < n_theta; ++j) {
      const double theta = kTwoPi * j / n_theta;
      out.radius_difference.push_back(deformed.wall()(tau, theta) - mean.wall()(tau, theta));
    }
  }
  return out;
}

}  // namespace vcs
