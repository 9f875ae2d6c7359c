#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vcs/model.hpp"
#include "vcs/pca.hpp"

namespace vcs {

/// Wall points x(tau_i, theta_j) at index i * n_theta + j, on the same
/// parameter grid as tessellate().
[[nodiscard]] std::vector<Vec3> correspondence_points(const VesselModel& model, int n_tau,
                                                      int n_theta);

/// Least-squares rigid motion T minimizing sum ||T from_k - to_k||^2 (Kabsch).
[[nodiscard]] RigidTransform fit_rigid(std::span<const Vec3> from, std::span<const Vec3> to);

struct CoregistrationOptions {
  int n_tau = 64;
  int n_theta = 32;
  int max_iter = 100;
  double tol = 1e-10;  // rms movement of the mean shape, mm
};

struct Coregistration {
  std::vector<RigidTransform> transforms;  // model k -> common frame
  std::vector<VesselModel> aligned;
  std::vector<double> objective;           // sum of squared distances to the mean, per iteration
  int iterations = 0;
  bool converged = false;
  std::string warning;
};

/// Rigid generalized Procrustes alignment. The mean starts at the first
/// model's points and is re-aligned to its predecessor after every update.
[[nodiscard]] Coregistration coregister(std::span<const VesselModel> models,
                                        const CoregistrationOptions& options = {});

/// Statistical shape model over feature vectors.
struct CohortModel {
  ModelDims dims;
  PrincipalComponents pca;
  Vec3 v1_0 = Vec3::UnitX();  // reference initial frame used for synthesis

  [[nodiscard]] Eigen::Index mode_count() const noexcept { return pca.mode_count(); }
  [[nodiscard]] double sigma(Eigen::Index i) const { return std::sqrt(pca.variances[i]); }
};

[[nodiscard]] CohortModel shape_pca(std::span<const FeatureVector> vectors,
                                    const Vec3& v1_0 = Vec3::UnitX());
/// Uses the normalized average of the models' v1_0 as the reference frame.
[[nodiscard]] CohortModel shape_pca(std::span<const VesselModel> models);

struct Synthesis {
  VesselModel model;
  std::optional<std::string> warning;  // set when the probe grid finds a nonpositive radius
};

/// from_feature_vector(mean + sum_i alpha_i u_i).
[[nodiscard]] Synthesis synthesize(const CohortModel& cohort, const Eigen::VectorXd& alpha);

struct ModeDecomposition {
  int n_tau = 0;
  int n_theta = 0;
  std::vector<double> tau;                // n_tau values
  std::vector<double> displacement;       // ||c_mean(tau) - c_def(tau)||
  std::vector<double> radius_difference;  // rho_def - rho_mean at i * n_theta + j
};

/// Splits mean + scale * sigma_i * u_i into its centerline and radius parts.
[[nodiscard]] ModeDecomposition mode_decomposition(const CohortModel& cohort, Eigen::Index mode,
                                                   double scale, int n_tau = 100,
                                                   int n_theta = 64);

}  // namespace vcs
