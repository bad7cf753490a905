#include "suprec/verify.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "suprec/datagen.hpp"
#include "suprec/errors.hpp"
#include "suprec/estimator.hpp"
#include "suprec/linalg.hpp"
#include "suprec/lowerbound.hpp"
#include "suprec/thread_pool.hpp"

namespace suprec {

namespace {

constexpr std::size_t kDefaultDraws = 100000;
constexpr std::size_t kDefaultSeeds = 200;
constexpr std::size_t kChunks = 64;

std::size_t pick(std::size_t value, std::size_t fallback) { return value == 0 ? fallback : value; }

Rng chunk_stream(std::uint64_t seed, std::uint64_t salt, std::size_t chunk) {
  return Rng(derive_seed(hash_combine(seed, salt), chunk, StreamTag::MonteCarlo));
}

/// Splits `total` draws into fixed chunks with their own streams, so the merged result
/// does not depend on the number of threads.
template <typename Acc, typename Fn>
Acc chunked(std::size_t total, std::uint64_t seed, std::uint64_t salt, std::size_t threads, Acc init, Fn&& fn) {
  const std::size_t chunks = std::min(total, kChunks);
  std::vector<Acc> parts(chunks, init);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t begin = total * c / chunks;
    const std::size_t end = total * (c + 1) / chunks;
    auto rng = chunk_stream(seed, salt, c);
    fn(parts[c], rng, end - begin);
  });
  Acc out = init;
  for (const auto& p : parts) out.merge(p);
  return out;
}

struct CoordinateStats {
  std::vector<RunningStats> coords;
  void merge(const CoordinateStats& other) {
    if (coords.empty()) coords.resize(other.coords.size());
    for (std::size_t i = 0; i < other.coords.size(); ++i) coords[i].merge(other.coords[i]);
  }
};

/// Pushes each per-sample term (phi_ji^T y_j)^2; each is one n = 1 evaluation of lambda~.
void accumulate_proxy_terms(CoordinateStats& acc, const VarianceVector& lambda, std::size_t m, double sigma2,
                            std::size_t count, Rng& rng) {
  constexpr std::size_t kBatch = 1024;
  const auto d = static_cast<std::size_t>(lambda.values.size());
  if (acc.coords.empty()) acc.coords.resize(d);
  Eigen::VectorXd z(static_cast<Eigen::Index>(d));
  for (std::size_t done = 0; done < count;) {
    const std::size_t n = std::min(kBatch, count - done);
    const auto signals = sample_signals(lambda, Prior::Gaussian, n, rng);
    auto matrices = sample_measurement_matrices(m, d, n, Ensemble::Gaussian, rng);
    const auto batch = observe(signals, std::move(matrices), sigma2, rng);
    for (std::size_t j = 0; j < n; ++j) {
      z.noalias() = batch.matrices.matrices[j].transpose() * batch.observations.col(static_cast<Eigen::Index>(j));
      for (std::size_t i = 0; i < d; ++i) acc.coords[i].push(z[static_cast<Eigen::Index>(i)] * z[static_cast<Eigen::Index>(i)]);
    }
    done += n;
  }
}

SuiteStatus status_of(const std::vector<CheckReport>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckReport& c) { return c.pass; }) ? SuiteStatus::Pass
                                                                                                 : SuiteStatus::Fail;
}

struct Counter {
  std::size_t total = 0;
  std::size_t violations = 0;
  std::size_t rejections = 0;
  void merge(const Counter& o) {
    total += o.total;
    violations += o.violations;
    rejections += o.rejections;
  }
};

struct ChainCounter {
  std::size_t total = 0;
  std::size_t violations = 0;  // draws breaking at least one link
  std::size_t kl_eig = 0;
  std::size_t eig_ratio = 0;
  std::size_t hw = 0;
  std::size_t kl_trace = 0;
  std::size_t rejections = 0;
  void merge(const ChainCounter& o) {
    total += o.total;
    violations += o.violations;
    kl_eig += o.kl_eig;
    eig_ratio += o.eig_ratio;
    hw += o.hw;
    kl_trace += o.kl_trace;
    rejections += o.rejections;
  }
};

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double sd, Rng& rng) {
  std::normal_distribution<double> normal(0.0, sd);
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index e = 0; e < out.size(); ++e) out.data()[e] = normal(rng);
  return out;
}

}  // namespace

std::string_view to_string(SuiteStatus s) {
  switch (s) {
    case SuiteStatus::Pass: return "pass";
    case SuiteStatus::Fail: return "fail";
    case SuiteStatus::Skipped: return "skipped";
  }
  return "fail";
}

SuiteReport verify_bias(const SuiteOptions& opt) {
  SuiteReport report;
  report.name = "bias";
  const std::size_t draws = pick(opt.trials, kDefaultDraws);

  // Binary variances on a fixed random support.
  const std::size_t d = pick(opt.d, 50);
  const std::size_t k = pick(opt.k, 5);
  const std::size_t m = pick(opt.m, 3);
  const double sigma2 = 0.1;
  if (k > d) throw InvalidConfig("bias suite needs k <= d");
  auto support_rng = make_stream(opt.seed, 0, StreamTag::Support);
  const auto support = sample_support(d, k, support_rng);
  const VarianceVector binary{[&] {
                                Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
                                for (auto i : support.indices()) v[static_cast<Eigen::Index>(i)] = 1.0;
                                return v;
                              }(),
                              support};
  const Eigen::VectorXd expected = expected_proxy(binary, m, sigma2);
  const auto stats = chunked(draws, opt.seed, 1, opt.threads, CoordinateStats{},
                             [&](CoordinateStats& acc, Rng& rng, std::size_t count) {
                               accumulate_proxy_terms(acc, binary, m, sigma2, count, rng);
                             });
  double worst_z = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const auto& s = stats.coords[i];
    CheckReport c{fmt::format("binary lambda~_{}", i + 1), s.mean(), s.std_error(), expected[static_cast<Eigen::Index>(i)], false};
    c.pass = std::abs(c.estimate - c.bound) <= 3.0 * c.std_error;
    worst_z = std::max(worst_z, std::abs(c.estimate - c.bound) / c.std_error);
    report.checks.push_back(c);
  }

  // Nonbinary variances (2, 1, 0, ...), m = 1, noiseless.
  const std::size_t d_nb = 10;
  Eigen::VectorXd values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d_nb));
  values[0] = 2.0;
  values[1] = 1.0;
  const VarianceVector nonbinary{values, SupportSet({0, 1}, d_nb)};
  const Eigen::VectorXd expected_nb = expected_proxy(nonbinary, 1, 0.0);
  const auto stats_nb = chunked(draws, opt.seed, 2, opt.threads, CoordinateStats{},
                                [&](CoordinateStats& acc, Rng& rng, std::size_t count) {
                                  accumulate_proxy_terms(acc, nonbinary, 1, 0.0, count, rng);
                                });
  CheckReport nb{"nonbinary lambda~_1", stats_nb.coords[0].mean(), stats_nb.coords[0].std_error(), expected_nb[0], false};
  nb.pass = std::abs(nb.estimate - nb.bound) <= 3.0 * nb.std_error;
  report.checks.push_back(nb);

  report.status = status_of(report.checks);
  report.details = {{"d", d}, {"k", k}, {"m", m}, {"sigma2", sigma2}, {"evaluations", draws},
                    {"support", support.one_based()}, {"worst_binary_z", worst_z}};
  return report;
}

SuiteReport verify_separation(const SuiteOptions& opt) {
  SuiteReport report;
  report.name = "separation";
  const std::size_t seeds = pick(opt.trials, kDefaultSeeds);
  const std::size_t d = pick(opt.d, 100);
  const std::size_t k = pick(opt.k, 10);
  const std::size_t m = pick(opt.m, 2);
  if (k >= d) throw InvalidConfig("separation suite needs k < d");
  const double delta_prime = default_delta_prime(1.0 / 3.0, k, d);
  const double base = static_cast<double>(k * k) / static_cast<double>(m * m) * std::log(static_cast<double>(k * (d - k)));
  const std::vector<double> multipliers{10.0, 15.0, 20.0, 30.0, 40.0};
  const SeparationConstants defaults{};

  std::vector<std::size_t> holds(multipliers.size(), 0);
  std::vector<std::size_t> holds_default(multipliers.size(), 0);
  std::vector<std::size_t> ns;
  for (double mult : multipliers) ns.push_back(static_cast<std::size_t>(std::llround(mult * base)));

  std::vector<char> ok(multipliers.size() * seeds, 0);
  std::vector<char> ok_default(multipliers.size() * seeds, 0);
  parallel_for(ok.size(), opt.threads, [&](std::size_t item) {
    const std::size_t point = item / seeds;
    const std::size_t trial = item % seeds;
    const std::uint64_t point_seed = hash_combine(opt.seed, ns[point]);
    auto support_rng = make_stream(point_seed, trial, StreamTag::Support);
    auto matrix_rng = make_stream(point_seed, trial, StreamTag::Matrices);
    const auto support = sample_support(d, k, support_rng);
    const auto matrices = sample_measurement_matrices(m, d, ns[point], Ensemble::Gaussian, matrix_rng);
    const auto alpha = alpha_squared_all(matrices, support, 0.0);
    ok[item] = separation_all_pairs(alpha, delta_prime, opt.separation).all_hold() ? 1 : 0;
    ok_default[item] = separation_all_pairs(alpha, delta_prime, defaults).all_hold() ? 1 : 0;
  });
  for (std::size_t p = 0; p < multipliers.size(); ++p) {
    for (std::size_t t = 0; t < seeds; ++t) {
      holds[p] += static_cast<std::size_t>(ok[p * seeds + t]);
      holds_default[p] += static_cast<std::size_t>(ok_default[p * seeds + t]);
    }
  }

  auto grid = nlohmann::json::array();
  bool monotone = true;
  for (std::size_t p = 0; p < multipliers.size(); ++p) {
    const auto ci = wilson_interval(holds[p], seeds);
    grid.push_back({{"multiplier", multipliers[p]},
                    {"n", ns[p]},
                    {"frequency", static_cast<double>(holds[p]) / static_cast<double>(seeds)},
                    {"ci_low", ci.low},
                    {"ci_high", ci.high},
                    {"frequency_default_constants", static_cast<double>(holds_default[p]) / static_cast<double>(seeds)}});
    if (p > 0 && holds[p] < holds[p - 1]) {
      const auto prev = wilson_interval(holds[p - 1], seeds);
      if (ci.high < prev.low) monotone = false;
    }
  }

  const std::size_t at20 = 2;
  const double freq = static_cast<double>(holds[at20]) / static_cast<double>(seeds);
  const auto ci20 = wilson_interval(holds[at20], seeds);
  report.checks.push_back(CheckReport{"all-pairs separation frequency at n = 20 (k^2/m^2) log k(d-k)", freq,
                                      (ci20.high - ci20.low) / (2.0 * kZ95), 0.9, freq >= 0.9});
  report.checks.push_back(CheckReport{"frequency nondecreasing in n (CI overlap)", monotone ? 1.0 : 0.0, 0.0, 1.0, monotone});
  report.status = status_of(report.checks);
  report.details = {{"d", d},
                    {"k", k},
                    {"m", m},
                    {"seeds", seeds},
                    {"delta_prime", delta_prime},
                    {"c1", opt.separation.c1},
                    {"c2", opt.separation.c2},
                    {"default_c1", defaults.c1},
                    {"default_c2", defaults.c2},
                    {"grid", grid}};
  return report;
}

SuiteReport verify_wishart(const SuiteOptions& opt) {
  SuiteReport report;
  report.name = "wishart";
  const std::size_t trials = pick(opt.trials, kDefaultDraws);

  std::vector<std::pair<std::size_t, std::size_t>> points{{20, 5}, {40, 10}, {80, 20}};
  if (opt.k != 0 || opt.m != 0) points = {{pick(opt.k, 20), pick(opt.m, 5)}};
  for (const auto& [k, m] : points) {
    if (k <= m + 7) {
      report.status = SuiteStatus::Skipped;
      report.warnings.push_back(fmt::format("k - m = {} <= 7: outside the regime of the fourth inverse moment bound",
                                            static_cast<long long>(k) - static_cast<long long>(m)));
      report.details = {{"k", k}, {"m", m}};
      return report;
    }
  }

  std::vector<WishartReport> results(points.size());
  const std::size_t oracle_k = 30;
  WishartReport oracle;
  parallel_for(points.size() + 1, opt.threads, [&](std::size_t p) {
    auto rng = chunk_stream(opt.seed, 100 + p, 0);
    if (p < points.size()) results[p] = wishart_min_eig_inv4(points[p].first, points[p].second, trials, rng);
    else oracle = wishart_min_eig_inv4(oracle_k, 1, trials, rng);
  });

  auto rows = nlohmann::json::array();
  double lo = results.front().bound_ratio;
  double hi = lo;
  for (const auto& r : results) {
    rows.push_back(to_json(r));
    lo = std::min(lo, r.bound_ratio);
    hi = std::max(hi, r.bound_ratio);
  }
  if (results.size() > 1) {
    report.checks.push_back(CheckReport{"bound_ratio spread (max/min) < 3", hi / lo, 0.0, 3.0, hi / lo < 3.0});
  }
  const double exact = inverse_chi_squared_fourth_moment(oracle_k);
  CheckReport oc{fmt::format("m = 1, k = {} inverse chi-squared fourth moment", oracle_k), oracle.estimate,
                 oracle.std_error, exact, false};
  oc.pass = std::abs(oc.estimate - exact) <= 3.0 * oc.std_error;
  report.checks.push_back(oc);
  report.status = status_of(report.checks);
  report.details = {{"points", rows}, {"oracle", to_json(oracle)}, {"trials", trials}};
  return report;
}

SuiteReport verify_klchain(const SuiteOptions& opt) {
  SuiteReport report;
  report.name = "klchain";
  const std::size_t draws = pick(opt.trials, kDefaultDraws);
  const std::size_t d = pick(opt.d, 20);
  const std::size_t k = pick(opt.k, 8);
  const std::size_t m = pick(opt.m, 3);
  if (k + 1 > d) throw InvalidConfig("klchain suite needs k + 1 <= d");
  if (m >= k) report.warnings.push_back("m >= k: outside the measurement-starved regime");
  const double sd = 1.0 / std::sqrt(static_cast<double>(m));
  const auto mi = static_cast<Eigen::Index>(m);

  constexpr double kTol = 1e-9;
  const auto chain = chunked(draws, opt.seed, 10, opt.threads, ChainCounter{}, [&](ChainCounter& acc, Rng& rng, std::size_t count) {
    while (acc.total < count) {
      const Eigen::MatrixXd phi = gaussian_matrix(mi, static_cast<Eigen::Index>(d), sd, rng);
      try {
        const auto r = kl_chain(phi, k);
        if (r.violations(kTol) > 0) ++acc.violations;
        acc.kl_eig += static_cast<std::size_t>(!r.kl_below_eig(kTol));
        acc.eig_ratio += static_cast<std::size_t>(!r.eig_below_ratio(kTol));
        acc.hw += static_cast<std::size_t>(!r.hw_holds(kTol));
        acc.kl_trace += static_cast<std::size_t>(!r.kl_below_trace(kTol));
        ++acc.total;
      } catch (const DegenerateInput&) {
        ++acc.rejections;
      }
    }
  });
  report.checks.push_back(CheckReport{"KL chain violations", static_cast<double>(chain.violations), 0.0, 0.0,
                                      chain.violations == 0});

  // Trace inequality Tr(AB) <= sum a_i b_i on random PD pairs.
  const std::size_t trace_draws = std::max<std::size_t>(draws / 10, 1);
  const auto trace = chunked(trace_draws, opt.seed, 11, opt.threads, Counter{}, [&](Counter& acc, Rng& rng, std::size_t count) {
    for (std::size_t t = 0; t < count; ++t) {
      const Eigen::MatrixXd ga = gaussian_matrix(mi, mi + 2, 1.0, rng);
      const Eigen::MatrixXd gb = gaussian_matrix(mi, mi + 2, 1.0, rng);
      const Eigen::MatrixXd a = ga * ga.transpose();
      const Eigen::MatrixXd b = gb * gb.transpose();
      const double lhs = (a * b).trace();
      const double rhs = symmetric_eigenvalues(a).dot(symmetric_eigenvalues(b));
      if (lhs > rhs + 1e-9 * std::max(std::abs(lhs), std::abs(rhs))) ++acc.violations;
      ++acc.total;
    }
  });
  report.checks.push_back(CheckReport{"trace inequality violations", static_cast<double>(trace.violations), 0.0, 0.0,
                                      trace.violations == 0});

  // log x + (1 - x)/x <= (x - 1)^2 / x on a log-spaced grid.
  std::size_t scalar_violations = 0;
  for (int e = -600; e <= 600; ++e) {
    const double x = std::pow(10.0, e / 100.0);
    const double lhs = std::log(x) + (1.0 - x) / x;
    const double rhs = (x - 1.0) * (x - 1.0) / x;
    if (lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs))) ++scalar_violations;
  }
  report.checks.push_back(CheckReport{"scalar log inequality violations", static_cast<double>(scalar_violations), 0.0, 0.0,
                                      scalar_violations == 0});

  // Nonbinary construction: A = lmax sum_{i<k} phi_i phi_i^T + lmin phi_{k+1} phi_{k+1}^T dominates lmax sum_{i<k} phi_i phi_i^T.
  const double lambda_max = 2.0;
  const double lambda_min = 1.0;
  const auto domination = chunked(trace_draws, opt.seed, 12, opt.threads, Counter{}, [&](Counter& acc, Rng& rng, std::size_t count) {
    for (std::size_t t = 0; t < count; ++t) {
      const Eigen::MatrixXd phi = gaussian_matrix(mi, static_cast<Eigen::Index>(k + 1), sd, rng);
      const Eigen::MatrixXd head = phi.leftCols(static_cast<Eigen::Index>(k - 1));
      const Eigen::MatrixXd sigma = head * head.transpose();
      const auto last = phi.col(static_cast<Eigen::Index>(k));
      const Eigen::MatrixXd a = lambda_max * sigma + lambda_min * last * last.transpose();
      const double lhs = min_eig_symmetric(a);
      const double rhs = lambda_max * min_eig_symmetric(sigma);
      if (lhs + 1e-9 * std::max(1.0, std::abs(lhs)) < rhs) ++acc.violations;
      ++acc.total;
    }
  });
  report.checks.push_back(CheckReport{"nonbinary min-eigenvalue domination violations",
                                      static_cast<double>(domination.violations), 0.0, 0.0, domination.violations == 0});

  report.status = status_of(report.checks);
  report.details = {{"d", d},
                    {"k", k},
                    {"m", m},
                    {"draws", chain.total},
                    {"rejections", chain.rejections},
                    {"violations_kl_above_eig_bound", chain.kl_eig},
                    {"violations_eig_above_ratio_bound", chain.eig_ratio},
                    {"violations_hoffman_wielandt", chain.hw},
                    {"violations_kl_above_trace_bound", chain.kl_trace},
                    {"trace_draws", trace.total}};
  if (chain.kl_eig > 0) {
    report.warnings.push_back(fmt::format(
        "exact KL exceeded eig_bound on {} of {} draws; pairing a_i with b_(m+1-i) (trace_bound) fails on {}",
        chain.kl_eig, chain.total, chain.kl_trace));
  }
  return report;
}

SuiteReport verify_moments(const SuiteOptions& opt) {
  SuiteReport report;
  report.name = "moments";
  const std::size_t trials = pick(opt.trials, kDefaultDraws);
  std::vector<std::size_t> ms{1, 4, 16};
  if (opt.m != 0) ms = {opt.m};

  std::vector<MomentReport> results(ms.size() * 2);
  parallel_for(results.size(), opt.threads, [&](std::size_t item) {
    const auto ensemble = item % 2 == 0 ? Ensemble::Gaussian : Ensemble::Rademacher;
    auto rng = chunk_stream(opt.seed, 200 + item, 0);
    results[item] = moment_suite(ensemble, ms[item / 2], trials, rng);
  });

  auto rows = nlohmann::json::array();
  for (const auto& r : results) {
    auto label = [&](const CheckReport& c) {
      CheckReport out = c;
      out.name = fmt::format("{} m={} {}", to_string(r.ensemble), r.m, c.name);
      return out;
    };
    report.checks.push_back(label(r.norm4));
    report.checks.push_back(label(r.inner2));
    rows.push_back(to_json(r));
  }
  report.status = status_of(report.checks);
  report.details = {{"trials", trials}, {"results", rows}};
  return report;
}

std::vector<SuiteReport> run_suites(std::string_view name, const SuiteOptions& opt) {
  if (name == "all") {
    return {verify_bias(opt), verify_separation(opt), verify_wishart(opt), verify_klchain(opt), verify_moments(opt)};
  }
  if (name == "bias") return {verify_bias(opt)};
  if (name == "separation") return {verify_separation(opt)};
  if (name == "wishart") return {verify_wishart(opt)};
  if (name == "klchain") return {verify_klchain(opt)};
  if (name == "moments") return {verify_moments(opt)};
  throw InvalidInput("unknown suite: " + std::string(name));
}

nlohmann::json to_json(const SuiteReport& r) {
  auto checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return nlohmann::json{{"suite", r.name},
                        {"status", to_string(r.status)},
                        {"checks", checks},
                        {"warnings", r.warnings},
                        {"details", r.details}};
}

}  // namespace suprec
