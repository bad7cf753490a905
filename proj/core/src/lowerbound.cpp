#include "suprec/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "suprec/errors.hpp"
#include "suprec/linalg.hpp"
#include "suprec/stats.hpp"

namespace suprec {

namespace {

Eigen::MatrixXd gram(const Eigen::MatrixXd& phi_s) { return phi_s * phi_s.transpose(); }

/// log|A| from the Cholesky factor; throws DegenerateInput if A is not numerically PD.
double log_determinant(const Eigen::MatrixXd& a) {
  if (!gram_is_positive_definite(a)) throw DegenerateInput("Gram matrix is not positive definite");
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw DegenerateInput("Cholesky factorization failed");
  const Eigen::MatrixXd l = llt.matrixL();
  return 2.0 * l.diagonal().array().log().sum();
}

double relative_slack(double lhs, double rhs, double rel_tol) {
  return rel_tol * std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

}  // namespace

EigenSpectrum gram_spectrum(const Eigen::MatrixXd& phi_s) {
  if (!phi_s.allFinite()) throw InvalidInput("matrix has non-finite entries");
  return EigenSpectrum{symmetric_eigenvalues(gram(phi_s))};
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& phi, const SupportSet& support) {
  Eigen::MatrixXd out(phi.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t c = 0; c < support.size(); ++c) {
    const auto col = support.indices()[c];
    if (col >= static_cast<std::size_t>(phi.cols())) throw InvalidInput("support does not fit the matrix");
    out.col(static_cast<Eigen::Index>(c)) = phi.col(static_cast<Eigen::Index>(col));
  }
  return out;
}

bool gram_is_positive_definite(const Eigen::MatrixXd& g) {
  if (g.rows() == 0) return false;
  const double threshold = 1e-12 * g.trace() / static_cast<double>(g.rows());
  if (!(threshold > 0.0)) return false;
  return min_eig_symmetric(g) > threshold;
}

double exact_gaussian_kl(const Eigen::MatrixXd& phi, const SupportSet& s_u, const SupportSet& s_0) {
  const Eigen::MatrixXd a_u = gram(select_columns(phi, s_u));
  const Eigen::MatrixXd a_0 = gram(select_columns(phi, s_0));
  const double logdet_u = log_determinant(a_u);
  const double logdet_0 = log_determinant(a_0);
  Eigen::LLT<Eigen::MatrixXd> llt0(a_0);
  const double trace_term = llt0.solve(a_u).trace();
  return 0.5 * (logdet_0 - logdet_u + trace_term - static_cast<double>(phi.rows()));
}

bool KLChainReport::kl_below_eig(double rel_tol) const {
  return exact_kl <= eig_bound + relative_slack(exact_kl, eig_bound, rel_tol);
}

bool KLChainReport::eig_below_ratio(double rel_tol) const {
  return eig_bound <= ratio_bound + relative_slack(eig_bound, ratio_bound, rel_tol);
}

bool KLChainReport::hw_holds(double rel_tol) const { return hw_lhs <= hw_rhs + relative_slack(hw_lhs, hw_rhs, rel_tol); }

bool KLChainReport::kl_below_trace(double rel_tol) const {
  return exact_kl <= trace_bound + relative_slack(exact_kl, trace_bound, rel_tol);
}

int KLChainReport::violations(double rel_tol) const {
  return static_cast<int>(!kl_below_eig(rel_tol)) + static_cast<int>(!eig_below_ratio(rel_tol)) +
         static_cast<int>(!hw_holds(rel_tol));
}

KLChainReport kl_chain(const Eigen::MatrixXd& phi, std::size_t k) {
  const auto d = static_cast<std::size_t>(phi.cols());
  if (k == 0 || k + 1 > d) throw InvalidInput("kl_chain needs 1 <= k and k + 1 <= d");

  std::vector<std::size_t> base(k);
  std::iota(base.begin(), base.end(), std::size_t{0});
  std::vector<std::size_t> swapped = base;
  swapped[0] = k;
  const SupportSet s_0(base, d);
  const SupportSet s_u(swapped, d);

  const Eigen::MatrixXd a_0 = gram(select_columns(phi, s_0));
  const Eigen::MatrixXd a_u = gram(select_columns(phi, s_u));

  KLChainReport r;
  r.regime_ok = static_cast<std::size_t>(phi.rows()) < k;
  r.exact_kl = exact_gaussian_kl(phi, s_u, s_0);

  const Eigen::VectorXd a = symmetric_eigenvalues(a_u);
  const Eigen::VectorXd b = symmetric_eigenvalues(a_0);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double ratio = a[i] / b[i];
    const double diff = a[i] - b[i];
    r.eig_bound += 0.5 * (std::log(b[i] / a[i]) - (1.0 - ratio));
    r.ratio_bound += 0.5 * diff * diff / (a[i] * b[i]);
    r.hw_lhs += diff * diff;
    r.trace_bound += 0.5 * (std::log(b[i] / a[i]) + a[i] / b[b.size() - 1 - i]);
  }
  r.trace_bound -= 0.5 * static_cast<double>(a.size());
  r.hw_rhs = (a_0 - a_u).squaredNorm();
  return r;
}

WishartReport wishart_min_eig_inv4(std::size_t k, std::size_t m, std::size_t trials, Rng& rng) {
  if (k == 0 || m == 0 || trials < 2) throw InvalidInput("wishart_min_eig_inv4 needs k, m >= 1 and trials >= 2");
  WishartReport r;
  r.k = k;
  r.m = m;
  r.trials = trials;
  r.regime_ok = k > m + 7;
  if (!r.regime_ok) r.warning = "k - m <= 7: the fourth inverse moment bound is not claimed in this regime";

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
  RunningStats stats;
  while (stats.count() < trials) {
    for (Eigen::Index e = 0; e < phi.size(); ++e) phi.data()[e] = normal(rng);
    const Eigen::MatrixXd a = phi * phi.transpose();
    if (!gram_is_positive_definite(a)) {
      ++r.rejections;
      continue;
    }
    const double z = min_eig_symmetric(a);
    const double z2 = z * z;
    stats.push(1.0 / (z2 * z2));
  }
  r.estimate = stats.mean();
  r.std_error = stats.std_error();
  const double kd = static_cast<double>(k);
  r.bound_ratio = r.estimate * std::pow(kd, 4) * std::pow(1.0 - static_cast<double>(m) / kd, 8);
  return r;
}

double inverse_chi_squared_fourth_moment(std::size_t k) {
  if (k <= 8) throw InvalidInput("E[(chi^2_k)^-4] is finite only for k > 8");
  const double kd = static_cast<double>(k);
  return 1.0 / ((kd - 2.0) * (kd - 4.0) * (kd - 6.0) * (kd - 8.0));
}

SampleBoundResult sample_bounds(const BoundParams& p) {
  if (p.m < 1) throw InvalidConfig("m must be >= 1");
  if (p.k < 1 || p.k + 1 > p.d) throw InvalidConfig("need 1 <= k <= d - 1");
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw InvalidConfig("delta must lie in (0, 1)");
  if (!(p.lambda_min > 0.0 && p.lambda_min <= p.lambda_max)) throw InvalidConfig("need 0 < lambda_min <= lambda_max");
  if (p.sigma2 < 0.0) throw InvalidConfig("sigma2 must be >= 0");

  const double k = static_cast<double>(p.k);
  const double m = static_cast<double>(p.m);
  const double d = static_cast<double>(p.d);
  const double ratio2 = (p.lambda_max / p.lambda_min) * (p.lambda_max / p.lambda_min);
  const double pairs = k * (d - k);

  SampleBoundResult r;
  const double upper_core = k / m + 1.0 + p.sigma2 / p.lambda_max;
  r.n_upper = p.c_upper * ratio2 * upper_core * upper_core * std::log(pairs / p.delta);
  r.n_norm = (k * k * std::pow(1.0 - m / k, 4) / (m * m)) * std::log(pairs);
  r.n_lower = p.c_lower * ratio2 * (k * k / (m * m)) * std::log(d - k + 1.0);
  r.lower_in_regime = 2.0 * m < k;
  return r;
}

nlohmann::json to_json(const KLChainReport& r) {
  return nlohmann::json{{"exact_kl", r.exact_kl}, {"eig_bound", r.eig_bound}, {"ratio_bound", r.ratio_bound},
                        {"hw_lhs", r.hw_lhs},     {"hw_rhs", r.hw_rhs},       {"trace_bound", r.trace_bound},
                        {"regime_ok", r.regime_ok}};
}

nlohmann::json to_json(const WishartReport& r) {
  nlohmann::json j{{"k", r.k},
                   {"m", r.m},
                   {"trials", r.trials},
                   {"estimate", r.estimate},
                   {"std_error", r.std_error},
                   {"bound_ratio", r.bound_ratio},
                   {"rejections", r.rejections},
                   {"regime_ok", r.regime_ok}};
  if (!r.warning.empty()) j["warning"] = r.warning;
  return j;
}

nlohmann::json to_json(const BoundParams& p) {
  return nlohmann::json{{"m", p.m},
                        {"k", p.k},
                        {"d", p.d},
                        {"sigma2", p.sigma2},
                        {"delta", p.delta},
                        {"c_upper", p.c_upper},
                        {"c_lower", p.c_lower},
                        {"lambda_min", p.lambda_min},
                        {"lambda_max", p.lambda_max}};
}

nlohmann::json to_json(const SampleBoundResult& r) {
  nlohmann::json j{{"n_upper", r.n_upper}, {"n_lower", r.n_lower}, {"n_norm", r.n_norm},
                   {"lower_in_regime", r.lower_in_regime}};
  if (!r.lower_in_regime) j["lower_note"] = "outside the lower-bound regime (requires m < k/2)";
  return j;
}

}  // namespace suprec
