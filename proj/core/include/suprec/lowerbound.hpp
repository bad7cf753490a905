#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "suprec/datagen.hpp"
#include "suprec/rng.hpp"

namespace suprec {

/// Eigenvalues in descending order.
struct EigenSpectrum {
  Eigen::VectorXd eigenvalues;
};

/// Spectrum of the m x m Gram matrix Phi_S Phi_S^T.
/// Throws InvalidInput on non-finite entries.
EigenSpectrum gram_spectrum(const Eigen::MatrixXd& phi_s);

/// Columns of phi listed in `support`.
Eigen::MatrixXd select_columns(const Eigen::MatrixXd& phi, const SupportSet& support);

/// KL( N(0, A_{S_u}) || N(0, A_{S_0}) ) = 1/2 (log|A_{S_0}|/|A_{S_u}| + Tr(A_{S_0}^{-1} A_{S_u}) - m),
/// with log-determinants from Cholesky factors. Throws DegenerateInput when either Gram
/// matrix has min eigenvalue <= 1e-12 * trace/m.
double exact_gaussian_kl(const Eigen::MatrixXd& phi, const SupportSet& s_u, const SupportSet& s_0);

struct KLChainReport {
  double exact_kl = 0.0;
  double eig_bound = 0.0;    // 1/2 sum(log(b_i/a_i) - (1 - a_i/b_i))
  double ratio_bound = 0.0;  // 1/2 sum (a_i - b_i)^2 / (a_i b_i)
  double hw_lhs = 0.0;       // sum (a_i - b_i)^2
  double hw_rhs = 0.0;       // ||A_{S_0} - A_{S_u}||_F^2
  /// 1/2 (sum log(b_i/a_i) + sum a_i/b_{m+1-i} - m): the trace term bounded with
  /// oppositely ordered eigenvalues, since A_{S_0}^{-1} reverses the order of b.
  double trace_bound = 0.0;
  bool regime_ok = true;     // m < k

  bool kl_below_eig(double rel_tol = 1e-9) const;
  bool eig_below_ratio(double rel_tol = 1e-9) const;
  bool hw_holds(double rel_tol = 1e-9) const;
  bool kl_below_trace(double rel_tol = 1e-9) const;

  /// Number of the three chain inequalities (kl <= eig, eig <= ratio, hw) violated beyond rel_tol.
  int violations(double rel_tol = 1e-9) const;
};

/// S_0 = {0..k-1}, S_u = S_0 with coordinate 0 swapped for coordinate k.
/// Requires phi to have at least k+1 columns.
KLChainReport kl_chain(const Eigen::MatrixXd& phi, std::size_t k);

/// True when the Gram matrix passes the positive-definiteness threshold 1e-12 * trace/m.
bool gram_is_positive_definite(const Eigen::MatrixXd& gram);

struct WishartReport {
  std::size_t k = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  double estimate = 0.0;     // Monte Carlo E[a_min^{-4}]
  double std_error = 0.0;
  double bound_ratio = 0.0;  // estimate * k^4 (1 - m/k)^8
  std::size_t rejections = 0;
  bool regime_ok = true;     // k - m > 7
  std::string warning;
};

/// Minimum-eigenvalue fourth inverse moment of A = Phi Phi^T, Phi m x k with N(0,1) entries.
WishartReport wishart_min_eig_inv4(std::size_t k, std::size_t m, std::size_t trials, Rng& rng);

/// E[(chi^2_k)^{-4}] = 1/((k-2)(k-4)(k-6)(k-8)), k > 8.
double inverse_chi_squared_fourth_moment(std::size_t k);

struct BoundParams {
  std::size_t m = 2;
  std::size_t k = 10;
  std::size_t d = 100;
  double sigma2 = 0.0;
  double delta = 1.0 / 3.0;
  double c_upper = 1.0;
  double c_lower = 0.125;
  double lambda_min = 1.0;
  double lambda_max = 1.0;
};

struct SampleBoundResult {
  double n_upper = 0.0;
  double n_lower = 0.0;
  double n_norm = 0.0;
  /// Lower bound is only claimed for m < k/2.
  bool lower_in_regime = true;
};

/// n_upper = c_upper (lmax/lmin)^2 (k/m + 1 + sigma2/lmax)^2 log(k(d-k)/delta)
/// n_norm  = (k^2 (1-m/k)^4 / m^2) log(k(d-k))
/// n_lower = c_lower (lmax/lmin)^2 (k^2/m^2) log(d-k+1)
/// Natural logarithms. Throws InvalidConfig unless 1 <= k <= d-1, m >= 1, 0 < delta < 1.
SampleBoundResult sample_bounds(const BoundParams& p);

nlohmann::json to_json(const KLChainReport& r);
nlohmann::json to_json(const WishartReport& r);
nlohmann::json to_json(const BoundParams& p);
nlohmann::json to_json(const SampleBoundResult& r);

}  // namespace suprec
