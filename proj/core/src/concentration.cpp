#include "suprec/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "suprec/errors.hpp"

namespace suprec {

double AlphaStats::mean() const {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double AlphaStats::sum_of_squares() const {
  return std::accumulate(values.begin(), values.end(), 0.0, [](double acc, double v) { return acc + v * v; });
}

double AlphaStats::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

AlphaStats alpha_squared(const MeasurementMatrixBatch& matrices, const SupportSet& support, double sigma2,
                         std::size_t i) {
  if (i >= matrices.cols()) throw InvalidInput("coordinate out of range");
  AlphaStats out;
  out.coordinate = i;
  out.in_support = support.contains(i);
  out.values.reserve(matrices.count());
  const auto col = static_cast<Eigen::Index>(i);
  for (const auto& phi : matrices.matrices) {
    const auto phi_i = phi.col(col);
    const double norm2 = phi_i.squaredNorm();
    double value = sigma2 * norm2;
    if (out.in_support) value += norm2 * norm2;
    for (auto l : support.indices()) {
      if (l == i) continue;
      const double ip = phi.col(static_cast<Eigen::Index>(l)).dot(phi_i);
      value += ip * ip;
    }
    out.values.push_back(value);
  }
  return out;
}

std::vector<AlphaStats> alpha_squared_all(const MeasurementMatrixBatch& matrices, const SupportSet& support,
                                          double sigma2) {
  const auto d = matrices.cols();
  const auto n = matrices.count();
  std::vector<AlphaStats> out(d);
  for (std::size_t i = 0; i < d; ++i) {
    out[i].coordinate = i;
    out[i].in_support = support.contains(i);
    out[i].values.resize(n);
  }

  const auto& idx = support.indices();
  Eigen::MatrixXd phi_s;
  Eigen::MatrixXd cross;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& phi = matrices.matrices[j];
    phi_s.resize(phi.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) phi_s.col(static_cast<Eigen::Index>(c)) = phi.col(static_cast<Eigen::Index>(idx[c]));
    // For i in S the l = i term of sum_l (phi_l^T phi_i)^2 is ||phi_i||^4, so one formula covers both cases.
    cross.noalias() = phi.transpose() * phi_s;
    const Eigen::VectorXd inner = cross.rowwise().squaredNorm();
    const Eigen::VectorXd norms = phi.colwise().squaredNorm().transpose();
    for (std::size_t i = 0; i < d; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      out[i].values[j] = inner[r] + sigma2 * norms[r];
    }
  }
  return out;
}

double default_delta_prime(double delta, std::size_t k, std::size_t d) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidConfig("delta must lie in (0, 1)");
  if (k == 0 || k > d) throw InvalidConfig("need 1 <= k <= d");
  return delta / (4.0 * static_cast<double>(std::max(k, d - k)));
}

double separation_radius(const AlphaStats& stats, double delta_prime, SeparationConstants c) {
  if (stats.values.empty()) throw InvalidInput("empty alpha statistics");
  if (!(delta_prime > 0.0)) throw InvalidInput("delta' must be positive");
  const double n = static_cast<double>(stats.values.size());
  const double log_term = std::log(1.0 / delta_prime);
  const double quadratic = std::sqrt(std::max(0.0, c.c1 / (n * n) * stats.sum_of_squares() * log_term));
  const double linear = c.c2 / n * stats.max() * log_term;
  return std::max(quadratic, linear);
}

SeparationReport separation_holds(const AlphaStats& in_stats, const AlphaStats& out_stats, double delta_prime,
                                  double c1, double c2) {
  if (in_stats.values.size() != out_stats.values.size()) throw InvalidInput("alpha statistics differ in length");
  SeparationReport r;
  r.in_coordinate = in_stats.coordinate;
  r.out_coordinate = out_stats.coordinate;
  r.constants = SeparationConstants{c1, c2};
  r.delta_prime = delta_prime;
  r.nu_in = separation_radius(in_stats, delta_prime, r.constants);
  r.nu_out = separation_radius(out_stats, delta_prime, r.constants);
  r.lhs = in_stats.mean() - out_stats.mean();
  r.rhs = r.nu_in + r.nu_out;
  r.holds = r.lhs >= r.rhs;
  return r;
}

SeparationSummary separation_all_pairs(std::span<const AlphaStats> stats, double delta_prime,
                                       SeparationConstants c) {
  // lhs >= rhs  <=>  mu_i - nu_i >= mu_i' + nu_i', so each coordinate reduces to one number.
  std::vector<double> lower;  // mu_i - nu_i, i in S
  std::vector<double> upper;  // mu_i' + nu_i', i' not in S
  for (const auto& s : stats) {
    const double mu = s.mean();
    const double nu = separation_radius(s, delta_prime, c);
    (s.in_support ? lower : upper).push_back(s.in_support ? mu - nu : mu + nu);
  }
  SeparationSummary out;
  out.pairs = lower.size() * upper.size();
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (double lo : lower) {
    for (double up : upper) {
      const double margin = lo - up;
      if (margin < 0.0) ++out.violations;
      out.worst_margin = std::min(out.worst_margin, margin);
    }
  }
  if (out.pairs == 0) out.worst_margin = 0.0;
  return out;
}

double subexp_tail_bound(SubexpParams params, double t) {
  if (!(t >= 0.0)) throw InvalidInput("tail bound needs t >= 0");
  if (params.v2 < 0.0 || params.b < 0.0) throw InvalidInput("subexponential parameters must be >= 0");
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double quadratic = params.v2 > 0.0 ? t * t / (2.0 * params.v2) : inf;
  const double linear = params.b > 0.0 ? t / (2.0 * params.b) : inf;
  const double exponent = std::min(quadratic, linear);
  if (std::isinf(exponent)) return t > 0.0 ? 0.0 : 1.0;
  return std::min(1.0, 2.0 * std::exp(-exponent));
}

SubexpParams subgaussian_square_params(double sigma2) {
  if (sigma2 < 0.0) throw InvalidInput("variance parameter must be >= 0");
  return SubexpParams{128.0 * sigma2 * sigma2, 8.0 * sigma2};
}

SubexpParams subexp_combine(std::span<const SubexpParams> parts, double scale) {
  if (parts.empty()) throw InvalidInput("subexp_combine needs at least one part");
  SubexpParams sum;
  for (const auto& p : parts) {
    sum.v2 += p.v2;
    sum.b = std::max(sum.b, p.b);
  }
  return SubexpParams{scale * scale * sum.v2, std::abs(scale) * sum.b};
}

MomentReport moment_suite(Ensemble ensemble, std::size_t m, std::size_t trials, Rng& rng) {
  if (m == 0 || trials < 2) throw InvalidInput("moment_suite needs m >= 1 and trials >= 2");
  const double md = static_cast<double>(m);
  const double scale = 1.0 / std::sqrt(md);
  std::normal_distribution<double> normal(0.0, scale);
  auto draw = [&]() {
    if (ensemble == Ensemble::Gaussian) return normal(rng);
    return (rng() >> 63) != 0 ? scale : -scale;
  };

  RunningStats norm4;
  RunningStats inner2;
  Eigen::VectorXd z(static_cast<Eigen::Index>(m));
  Eigen::VectorXd w(static_cast<Eigen::Index>(m));
  for (std::size_t t = 0; t < trials; ++t) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = draw();
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = draw();
    const double sq = z.squaredNorm();
    const double ip = z.dot(w);
    norm4.push(sq * sq);
    inner2.push(ip * ip);
  }

  MomentReport r;
  r.ensemble = ensemble;
  r.m = m;
  r.trials = trials;
  r.inner2 = CheckReport{"E(Z^T W)^2", inner2.mean(), inner2.std_error(), 1.0 / md, false};
  r.inner2.pass = std::abs(r.inner2.estimate - r.inner2.bound) <= 4.0 * r.inner2.std_error;
  if (ensemble == Ensemble::Gaussian) {
    r.norm4 = CheckReport{"E||Z||^4", norm4.mean(), norm4.std_error(), 1.0 + 2.0 / md, false};
    r.norm4.pass = std::abs(r.norm4.estimate - r.norm4.bound) <= 4.0 * r.norm4.std_error;
  } else {
    // ||Z||^2 = m * (1/m) on every draw; only rounding separates it from 1.
    r.norm4 = CheckReport{"||Z||^4", norm4.mean(), norm4.std_error(), 1.0, false};
    r.norm4.pass = std::abs(r.norm4.estimate - 1.0) <= 1e-12 && r.norm4.std_error <= 1e-12;
  }
  r.pass = r.norm4.pass && r.inner2.pass;
  return r;
}

nlohmann::json to_json(const SeparationReport& r) {
  return nlohmann::json{{"pair", {r.in_coordinate + 1, r.out_coordinate + 1}},
                        {"lhs", r.lhs},
                        {"rhs", r.rhs},
                        {"nu_in", r.nu_in},
                        {"nu_out", r.nu_out},
                        {"holds", r.holds},
                        {"c1", r.constants.c1},
                        {"c2", r.constants.c2},
                        {"delta_prime", r.delta_prime}};
}

nlohmann::json to_json(const MomentReport& r) {
  return nlohmann::json{{"ensemble", to_string(r.ensemble)},
                        {"m", r.m},
                        {"trials", r.trials},
                        {"norm4", to_json(r.norm4)},
                        {"inner2", to_json(r.inner2)},
                        {"pass", r.pass}};
}

}  // namespace suprec
