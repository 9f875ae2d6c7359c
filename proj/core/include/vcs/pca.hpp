#pragma once

#include <Eigen/Core>

namespace vcs {

/// Principal components of the rows of `data` (one sample per row).
struct PrincipalComponents {
  Eigen::VectorXd mean;
  Eigen::MatrixXd modes;       // one unit mode per column, variance descending
  Eigen::VectorXd variances;   // sigma_i^2 = s_i^2 / (M - 1)
  int n_samples = 0;

  [[nodiscard]] Eigen::Index mode_count() const noexcept { return modes.cols(); }
  /// Coefficients alpha_i = u_i . (a - mean).
  [[nodiscard]] Eigen::VectorXd project(const Eigen::VectorXd& sample) const;
  /// mean + sum_i alpha_i u_i over the first alpha.size() modes.
  [[nodiscard]] Eigen::VectorXd reconstruct(const Eigen::VectorXd& alpha) const;
  [[nodiscard]] double total_variance() const { return variances.sum(); }
};

/// SVD of the centered data; keeps modes with s_i > rel_tol * s_max (at most
/// M - 1). Each mode is signed so its largest-magnitude entry is positive.
[[nodiscard]] PrincipalComponents principal_components(const Eigen::MatrixXd& data,
                                                       double rel_tol = 1e-10);

}  // namespace vcs
