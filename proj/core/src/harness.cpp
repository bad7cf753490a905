#include "suprec/harness.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "suprec/errors.hpp"
#include "suprec/estimator.hpp"
#include "suprec/rng.hpp"
#include "suprec/stats.hpp"
#include "suprec/thread_pool.hpp"

namespace suprec {

namespace {

constexpr std::array kSweepable{"n", "sigma2", "prior", "m", "k", "d"};

std::size_t as_count(const std::string& parameter, const GridValue& v) {
  const auto* x = std::get_if<double>(&v);
  if (x == nullptr || !(*x >= 1.0) || std::floor(*x) != *x) {
    throw InvalidConfig("grid values for " + parameter + " must be positive integers");
  }
  return static_cast<std::size_t>(*x);
}

void apply_grid_value(ProblemConfig& cfg, const std::string& parameter, const GridValue& v) {
  if (parameter == "n") cfg.n = as_count(parameter, v);
  else if (parameter == "m") cfg.m = as_count(parameter, v);
  else if (parameter == "k") cfg.k = as_count(parameter, v);
  else if (parameter == "d") cfg.d = as_count(parameter, v);
  else if (parameter == "sigma2") {
    const auto* x = std::get_if<double>(&v);
    if (x == nullptr) throw InvalidConfig("grid values for sigma2 must be numbers");
    cfg.sigma2 = *x;
  } else if (parameter == "prior") {
    const auto* p = std::get_if<Prior>(&v);
    if (p == nullptr) throw InvalidConfig("grid values for prior must be prior names");
    cfg.prior = *p;
  } else {
    throw InvalidConfig("parameter is not sweepable: " + parameter);
  }
}

nlohmann::json grid_value_to_json(const GridValue& v) {
  if (const auto* p = std::get_if<Prior>(&v)) return to_string(*p);
  const double x = std::get<double>(v);
  if (std::floor(x) == x && std::abs(x) < 9.0e15) return static_cast<std::int64_t>(x);
  return x;
}

GridValue grid_value_from_json(const std::string& parameter, const nlohmann::json& j) {
  if (parameter == "prior") {
    if (!j.is_string()) throw InvalidConfig("prior grid values must be strings");
    return parse_prior(j.get<std::string>());
  }
  if (!j.is_number()) throw InvalidConfig("grid values for " + parameter + " must be numbers");
  return j.get<double>();
}

using CurveKey = std::tuple<std::size_t, std::size_t, std::size_t, double, Prior, Ensemble, std::size_t>;

CurveKey curve_key(const SweepRow& r) { return {r.d, r.k, r.m, r.sigma2, r.prior, r.ensemble, r.trials}; }

}  // namespace

std::string_view to_string(Normalization n) {
  switch (n) {
    case Normalization::None: return "none";
    case Normalization::KsqOverMsq: return "ksq_over_msq";
    case Normalization::NoiseAware: return "noise_aware";
    case Normalization::FanoLB: return "fano_lb";
  }
  return "none";
}

Normalization parse_normalization(std::string_view s) {
  if (s == "none") return Normalization::None;
  if (s == "ksq_over_msq" || s == "ksq") return Normalization::KsqOverMsq;
  if (s == "noise_aware" || s == "noise") return Normalization::NoiseAware;
  if (s == "fano_lb" || s == "fano") return Normalization::FanoLB;
  throw InvalidConfig("unknown normalization: " + std::string(s));
}

void SweepSpec::validate() const {
  base.validate();
  if (grid.empty()) throw InvalidConfig("sweep grid is empty");
  if (trials_per_point < 1) throw InvalidConfig("trials_per_point must be >= 1");
  if (!(op_budget > 0.0)) throw InvalidConfig("op_budget must be positive");
  for (const auto& axis : grid) {
    if (std::find(kSweepable.begin(), kSweepable.end(), axis.parameter) == kSweepable.end())
      throw InvalidConfig("parameter is not sweepable: " + axis.parameter);
    if (axis.values.empty()) throw InvalidConfig("grid axis has no values: " + axis.parameter);
  }
  for (const auto& point : expand_grid(*this)) {
    point.validate();
    if (normalization != Normalization::None) {
      normalization_denominator(normalization, point.k, point.m, point.d, point.sigma2);
    }
  }
}

nlohmann::json to_json(const SweepSpec& spec) {
  auto grid = nlohmann::json::array();
  for (const auto& axis : spec.grid) {
    auto values = nlohmann::json::array();
    for (const auto& v : axis.values) values.push_back(grid_value_to_json(v));
    grid.push_back({{"parameter", axis.parameter}, {"values", values}});
  }
  return nlohmann::json{{"base", to_json(spec.base)},
                        {"grid", grid},
                        {"trials_per_point", spec.trials_per_point},
                        {"normalization", to_string(spec.normalization)},
                        {"op_budget", spec.op_budget}};
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j, std::uint64_t default_seed) {
  if (!j.is_object()) throw InvalidConfig("sweep spec must be a JSON object");
  static const std::array known{"format_version", "base", "grid", "trials_per_point", "normalization", "op_budget"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) throw InvalidConfig("unknown field: " + key);
  }
  if (j.contains("format_version") && (!j["format_version"].is_number_integer() || j["format_version"].get<int>() != kFormatVersion))
    throw InvalidConfig("unsupported format_version");
  if (!j.contains("base")) throw InvalidConfig("missing field: base");
  if (!j.contains("grid") || !j["grid"].is_array()) throw InvalidConfig("missing or malformed field: grid");

  SweepSpec spec;
  spec.base = config_from_json(j["base"], default_seed);
  for (const auto& axis_json : j["grid"]) {
    if (!axis_json.is_object() || !axis_json.contains("parameter") || !axis_json.contains("values") ||
        !axis_json["parameter"].is_string() || !axis_json["values"].is_array()) {
      throw InvalidConfig("grid entries need a string 'parameter' and an array 'values'");
    }
    GridAxis axis;
    axis.parameter = axis_json["parameter"].get<std::string>();
    for (const auto& v : axis_json["values"]) axis.values.push_back(grid_value_from_json(axis.parameter, v));
    spec.grid.push_back(std::move(axis));
  }
  if (j.contains("trials_per_point")) {
    const auto& t = j["trials_per_point"];
    if (!t.is_number_integer() || t.get<std::int64_t>() < 1) throw InvalidConfig("trials_per_point must be a positive integer");
    spec.trials_per_point = t.get<std::size_t>();
  }
  if (j.contains("normalization")) {
    if (!j["normalization"].is_string()) throw InvalidConfig("normalization must be a string");
    spec.normalization = parse_normalization(j["normalization"].get<std::string>());
  }
  if (j.contains("op_budget")) {
    if (!j["op_budget"].is_number()) throw InvalidConfig("op_budget must be a number");
    spec.op_budget = j["op_budget"].get<double>();
  }
  spec.validate();
  return spec;
}

TrialResult run_trial(const ProblemConfig& cfg, std::uint64_t trial_index) {
  const auto start = std::chrono::steady_clock::now();
  const auto instance = generate_instance(cfg, trial_index);
  const auto estimate = topk_support(proxy_variance(instance.batch), cfg.k);

  TrialResult r;
  r.truth = instance.lambda.support.indices();
  r.estimated = estimate.indices;
  r.success = r.estimated == r.truth;
  r.trial_seed = derive_seed(cfg.master_seed, trial_index, StreamTag::Support);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<ProblemConfig> expand_grid(const SweepSpec& spec) {
  std::vector<ProblemConfig> points{spec.base};
  for (const auto& axis : spec.grid) {
    std::vector<ProblemConfig> next;
    next.reserve(points.size() * axis.values.size());
    for (const auto& p : points) {
      for (const auto& v : axis.values) {
        auto q = p;
        apply_grid_value(q, axis.parameter, v);
        next.push_back(q);
      }
    }
    points = std::move(next);
  }
  return points;
}

std::uint64_t grid_point_seed(std::uint64_t master_seed, const ProblemConfig& p) {
  std::uint64_t h = splitmix64(master_seed);
  for (std::uint64_t word : {static_cast<std::uint64_t>(p.d), static_cast<std::uint64_t>(p.k),
                             static_cast<std::uint64_t>(p.m), static_cast<std::uint64_t>(p.n),
                             std::bit_cast<std::uint64_t>(p.sigma2), static_cast<std::uint64_t>(p.prior),
                             static_cast<std::uint64_t>(p.ensemble), std::bit_cast<std::uint64_t>(p.lambda_min),
                             std::bit_cast<std::uint64_t>(p.lambda_max)}) {
    h = hash_combine(h, word);
  }
  return h;
}

double estimated_cost(const SweepSpec& spec) {
  double total = 0.0;
  for (const auto& p : expand_grid(spec)) {
    total += static_cast<double>(spec.trials_per_point) * static_cast<double>(p.d) * static_cast<double>(p.n) *
             static_cast<double>(p.m);
  }
  return total;
}

double normalization_denominator(Normalization mode, std::size_t k, std::size_t m, std::size_t d, double sigma2) {
  if (mode == Normalization::None) return 1.0;
  if (k < 1 || k >= d) throw InvalidConfig("normalized axes need 1 <= k < d");
  if (m < 1) throw InvalidConfig("m must be >= 1");
  const double kd = static_cast<double>(k);
  const double md = static_cast<double>(m);
  const double log_pairs = std::log(kd * static_cast<double>(d - k));
  double denom = 0.0;
  switch (mode) {
    case Normalization::KsqOverMsq: denom = (kd * kd) / (md * md) * log_pairs; break;
    case Normalization::NoiseAware: {
      const double core = kd / md + 1.0 + sigma2;
      denom = core * core * log_pairs;
      break;
    }
    case Normalization::FanoLB: denom = kd * kd * std::pow(1.0 - md / kd, 4) / (md * md) * log_pairs; break;
    case Normalization::None: break;
  }
  if (!(denom > 0.0)) throw InvalidConfig("normalization denominator is not positive for this point");
  return denom;
}

SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& options) {
  spec.validate();
  const double cost = estimated_cost(spec);
  if (cost > spec.op_budget && !options.force) {
    throw BudgetExceeded(fmt::format("sweep needs ~{:.3g} multiply-adds, budget is {:.3g}; pass --force to run anyway",
                                     cost, spec.op_budget));
  }

  auto points = expand_grid(spec);
  for (auto& p : points) p.master_seed = grid_point_seed(spec.base.master_seed, p);

  const std::size_t trials = spec.trials_per_point;
  std::vector<char> success(points.size() * trials, 0);
  parallel_for(success.size(), options.threads, [&](std::size_t item) {
    const auto& cfg = points[item / trials];
    success[item] = run_trial(cfg, item % trials).success ? 1 : 0;
  });

  SweepResult result;
  result.normalization = spec.normalization;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto& cfg = points[p];
    SweepRow row;
    row.d = cfg.d;
    row.k = cfg.k;
    row.m = cfg.m;
    row.n = cfg.n;
    row.sigma2 = cfg.sigma2;
    row.prior = cfg.prior;
    row.ensemble = cfg.ensemble;
    row.trials = trials;
    row.successes = static_cast<std::size_t>(
        std::count(success.begin() + static_cast<std::ptrdiff_t>(p * trials),
                   success.begin() + static_cast<std::ptrdiff_t>((p + 1) * trials), 1));
    row.success_rate = static_cast<double>(row.successes) / static_cast<double>(trials);
    const auto ci = wilson_interval(row.successes, trials);
    row.ci_low = ci.low;
    row.ci_high = ci.high;
    row.normalized_n =
        static_cast<double>(cfg.n) / normalization_denominator(spec.normalization, cfg.k, cfg.m, cfg.d, cfg.sigma2);
    row.master_seed = spec.base.master_seed;
    result.rows.push_back(row);
  }
  return result;
}

SweepResult normalize_axis(SweepResult result, Normalization mode) {
  for (auto& row : result.rows) {
    row.normalized_n = static_cast<double>(row.n) / normalization_denominator(mode, row.k, row.m, row.d, row.sigma2);
  }
  result.normalization = mode;
  return result;
}

std::vector<SweepResult> split_curves(const SweepResult& result) {
  std::vector<SweepResult> curves;
  std::map<CurveKey, std::size_t> slot;
  for (const auto& row : result.rows) {
    auto [it, inserted] = slot.try_emplace(curve_key(row), curves.size());
    if (inserted) curves.push_back(SweepResult{{}, result.normalization});
    curves[it->second].rows.push_back(row);
  }
  return curves;
}

std::optional<double> crossing_point(const SweepResult& curve, double level) {
  const auto& rows = curve.rows;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double r0 = rows[i].success_rate;
    const double r1 = rows[i + 1].success_rate;
    if (r0 < level && r1 >= level) {
      const double x0 = rows[i].normalized_n;
      const double x1 = rows[i + 1].normalized_n;
      return x0 + (level - r0) * (x1 - x0) / (r1 - r0);
    }
  }
  return std::nullopt;
}

std::string to_csv(const SweepResult& result) {
  std::string out = "d,k,m,n,sigma2,prior,ensemble,trials,successes,success_rate,ci_low,ci_high,normalized_n,master_seed\n";
  for (const auto& r : result.rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.d, r.k, r.m, r.n, r.sigma2, to_string(r.prior),
                       to_string(r.ensemble), r.trials, r.successes, r.success_rate, r.ci_low, r.ci_high,
                       r.normalized_n, r.master_seed);
  }
  return out;
}

nlohmann::json to_json(const SweepRow& r) {
  return nlohmann::json{{"d", r.d},
                        {"k", r.k},
                        {"m", r.m},
                        {"n", r.n},
                        {"sigma2", r.sigma2},
                        {"prior", to_string(r.prior)},
                        {"ensemble", to_string(r.ensemble)},
                        {"trials", r.trials},
                        {"successes", r.successes},
                        {"success_rate", r.success_rate},
                        {"ci_low", r.ci_low},
                        {"ci_high", r.ci_high},
                        {"normalized_n", r.normalized_n},
                        {"master_seed", r.master_seed}};
}

nlohmann::json to_json(const SweepResult& result) {
  auto rows = nlohmann::json::array();
  for (const auto& r : result.rows) rows.push_back(to_json(r));
  return nlohmann::json{{"normalization", to_string(result.normalization)}, {"rows", rows}};
}

nlohmann::json plot_series(const SweepResult& result) {
  auto series = nlohmann::json::array();
  for (const auto& curve : split_curves(result)) {
    const auto& first = curve.rows.front();
    nlohmann::json s{{"label",
                      {{"d", first.d},
                       {"k", first.k},
                       {"m", first.m},
                       {"sigma2", first.sigma2},
                       {"prior", to_string(first.prior)},
                       {"ensemble", to_string(first.ensemble)}}},
                     {"x", nlohmann::json::array()},
                     {"y", nlohmann::json::array()},
                     {"y_lo", nlohmann::json::array()},
                     {"y_hi", nlohmann::json::array()}};
    for (const auto& r : curve.rows) {
      s["x"].push_back(r.normalized_n);
      s["y"].push_back(r.success_rate);
      s["y_lo"].push_back(r.ci_low);
      s["y_hi"].push_back(r.ci_high);
    }
    series.push_back(std::move(s));
  }
  return nlohmann::json{{"normalization", to_string(result.normalization)}, {"series", series}};
}

}  // namespace suprec
