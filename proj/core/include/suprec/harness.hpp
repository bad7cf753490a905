#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "suprec/config.hpp"
#include "suprec/datagen.hpp"

namespace suprec {

enum class Normalization { None, KsqOverMsq, NoiseAware, FanoLB };

std::string_view to_string(Normalization n);
/// Accepts the canonical names and the short CLI aliases none/ksq/noise/fano.
Normalization parse_normalization(std::string_view s);

/// A sweepable value: numeric parameters or a prior.
using GridValue = std::variant<double, Prior>;

struct GridAxis {
  std::string parameter;  // n, sigma2, prior, m, k, d
  std::vector<GridValue> values;
};

struct SweepSpec {
  ProblemConfig base;
  std::vector<GridAxis> grid;
  std::size_t trials_per_point = 200;
  Normalization normalization = Normalization::None;
  double op_budget = 1e12;

  void validate() const;
};

nlohmann::json to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const nlohmann::json& j, std::uint64_t default_seed = 0);

struct TrialResult {
  bool success = false;
  std::vector<std::size_t> estimated;
  std::vector<std::size_t> truth;
  std::uint64_t trial_seed = 0;
  double wall_seconds = 0.0;
};

/// Generate, estimate with top-k, compare. Deterministic in (cfg.master_seed, trial_index).
TrialResult run_trial(const ProblemConfig& cfg, std::uint64_t trial_index);

struct SweepRow {
  std::size_t d = 0;
  std::size_t k = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  double sigma2 = 0.0;
  Prior prior = Prior::Gaussian;
  Ensemble ensemble = Ensemble::Gaussian;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double normalized_n = 0.0;
  std::uint64_t master_seed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  Normalization normalization = Normalization::None;
};

/// Grid axes expand as a cartesian product, first axis outermost.
std::vector<ProblemConfig> expand_grid(const SweepSpec& spec);

/// Seed for a grid point: depends on the sweep seed and the point's resolved parameters only,
/// so inserting, removing or reordering other points leaves it unchanged.
std::uint64_t grid_point_seed(std::uint64_t master_seed, const ProblemConfig& point);

/// Sum over points of trials * d * n * m scalar multiply-adds.
double estimated_cost(const SweepSpec& spec);

struct SweepOptions {
  std::size_t threads = 1;
  bool force = false;
};

/// Throws BudgetExceeded when the estimated cost exceeds spec.op_budget and !force.
SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& options = {});

/// Denominator for the normalized sample axis. Throws InvalidConfig when k >= d
/// for modes that take log(k(d-k)).
double normalization_denominator(Normalization mode, std::size_t k, std::size_t m, std::size_t d, double sigma2);

SweepResult normalize_axis(SweepResult result, Normalization mode);

/// Rows sharing every parameter except n, in input order.
std::vector<SweepResult> split_curves(const SweepResult& result);

/// First upward crossing of `level` by success_rate, linearly interpolated on normalized_n.
std::optional<double> crossing_point(const SweepResult& curve, double level);

std::string to_csv(const SweepResult& result);
nlohmann::json to_json(const SweepRow& row);
nlohmann::json to_json(const SweepResult& result);
/// One {x, y, y_lo, y_hi} series per curve.
nlohmann::json plot_series(const SweepResult& result);

}  // namespace suprec
