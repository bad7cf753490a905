#pragma once

#include <Eigen/Dense>

namespace suprec {

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted descending.
/// Sweeps until the off-diagonal Frobenius norm is <= rel_tol * ||M||_F.
/// Throws InvalidInput when M is not square or asymmetric beyond 1e-12 relative.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& M, double rel_tol = 1e-12);

double min_eig_symmetric(const Eigen::MatrixXd& M);

bool is_symmetric(const Eigen::MatrixXd& M, double rel_tol = 1e-12);

}  // namespace suprec
