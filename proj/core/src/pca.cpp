#include "vcs/pca.hpp"

#include <algorithm>

#include <Eigen/SVD>

#include "vcs/error.hpp"

namespace vcs {

Eigen::VectorXd PrincipalComponents::project(const Eigen::VectorXd& sample) const {
  if (sample.size() != mean.size()) fail(ErrorCode::layout, "sample length differs from the mean");
  return modes.transpose() * (sample - mean);
}

Eigen::VectorXd PrincipalComponents::reconstruct(const Eigen::VectorXd& alpha) const {
  if (alpha.size() > modes.cols())
    fail(ErrorCode::precondition, std::to_string(alpha.size()) + " coefficients for " +
                                      std::to_string(modes.cols()) + " modes");
  return mean + modes.leftCols(alpha.size()) * alpha;
}

PrincipalComponents principal_components(const Eigen::MatrixXd& data, double rel_tol) {
  const auto m = data.rows();
  if (m < 2) fail(ErrorCode::cardinality, "PCA needs at least 2 samples");
  PrincipalComponents pc;
  pc.n_samples = static_cast<int>(m);
  pc.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - pc.mean.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double s_max = s.size() > 0 ? s[0] : 0.0;
  Eigen::Index keep = 0;
  const Eigen::Index limit = std::min<Eigen::Index>(s.size(), m - 1);
  while (keep < limit && s[keep] > rel_tol * s_max && s[keep] > 0.0) ++keep;

  pc.modes = svd.matrixV().leftCols(keep);
  pc.variances = s.head(keep).array().square() / static_cast<double>(m - 1);
  for (Eigen::Index k = 0; k < keep; ++k) {
    Eigen::Index arg = 0;
    pc.modes.col(k).cwiseAbs().maxCoeff(&arg);
    if (pc.modes(arg, k) < 0) pc.modes.col(k) *= -1.0;
  }
  return pc;
}

}  // namespace vcs
