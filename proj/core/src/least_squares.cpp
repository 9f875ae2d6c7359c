#include "vcs/least_squares.hpp"

#include <string>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseQR>

#include "vcs/error.hpp"

namespace vcs {

Eigen::MatrixXd solve_least_squares(const Eigen::SparseMatrix<double>& A, const Eigen::MatrixXd& B,
                                    const char* what) {
  Eigen::SparseMatrix<double> a = A;
  a.makeCompressed();
  Eigen::SparseQR<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> qr;
  qr.compute(a);
  if (qr.info() != Eigen::Success)
    fail(ErrorCode::degenerate_geometry, std::string(what) + ": QR factorization failed");
  if (qr.rank() < a.cols())
    fail(ErrorCode::degenerate_geometry,
         std::string(what) + ": design matrix is rank deficient (rank " +
             std::to_string(qr.rank()) + " < " + std::to_string(a.cols()) + ")");
  Eigen::MatrixXd x = qr.solve(B);
  if (qr.info() != Eigen::Success)
    fail(ErrorCode::degenerate_geometry, std::string(what) + ": least-squares solve failed");
  return x;
}

}  // namespace vcs
