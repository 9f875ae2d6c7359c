#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace vcs {

/// Minimizes ||A X - B||_F with a sparse orthogonal (QR) factorization.
/// Throws Error{degenerate_geometry} when A is numerically rank deficient;
/// `what` names the system in the message.
[[nodiscard]] Eigen::MatrixXd solve_least_squares(const Eigen::SparseMatrix<double>& A,
                                                  const Eigen::MatrixXd& B, const char* what);

}  // namespace vcs
