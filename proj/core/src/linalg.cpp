#include "suprec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "suprec/errors.hpp"

namespace suprec {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Eigen::Index q = 0; q < a.cols(); ++q)
    for (Eigen::Index p = 0; p < a.rows(); ++p)
      if (p != q) sum += a(p, q) * a(p, q);
  return std::sqrt(sum);
}

}  // namespace

bool is_symmetric(const Eigen::MatrixXd& M, double rel_tol) {
  if (M.rows() != M.cols()) return false;
  const double scale = std::max(M.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index q = 0; q < M.cols(); ++q)
    for (Eigen::Index p = q + 1; p < M.rows(); ++p)
      if (std::abs(M(p, q) - M(q, p)) > rel_tol * scale) return false;
  return true;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& M, double rel_tol) {
  if (M.rows() != M.cols()) throw InvalidInput("matrix must be square");
  if (!M.allFinite()) throw InvalidInput("matrix has non-finite entries");
  if (!is_symmetric(M)) throw InvalidInput("matrix is not symmetric");

  const Eigen::Index size = M.rows();
  Eigen::MatrixXd a = 0.5 * (M + M.transpose());
  const double target = rel_tol * a.norm();

  for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(a) > target; ++sweep) {
    for (Eigen::Index p = 0; p + 1 < size; ++p) {
      for (Eigen::Index q = p + 1; q < size; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that annihilates a(p, q); t is the smaller root of t^2 + 2 theta t - 1 = 0.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Eigen::Index r = 0; r < size; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (Eigen::Index r = 0; r < size; ++r) {
          const double apr = a(p, r);
          const double aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }

  Eigen::VectorXd eig = a.diagonal();
  std::sort(eig.data(), eig.data() + eig.size(), std::greater<>());
  return eig;
}

double min_eig_symmetric(const Eigen::MatrixXd& M) {
  if (M.size() == 0) throw InvalidInput("empty matrix");
  const auto eig = symmetric_eigenvalues(M);
  return eig[eig.size() - 1];
}

}  // namespace suprec
