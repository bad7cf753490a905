#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace suprec {

inline constexpr int kFormatVersion = 1;

enum class Prior { Gaussian, Rademacher };
enum class Ensemble { Gaussian, Rademacher };
enum class VarianceMode { Binary, UniformRange };

std::string_view to_string(Prior p);
std::string_view to_string(Ensemble e);
Prior parse_prior(std::string_view s);
Ensemble parse_ensemble(std::string_view s);

/// Full description of the generative model: n samples in R^d sharing a
/// size-k support, each observed through its own m x d random matrix.
struct ProblemConfig {
  std::size_t d = 100;
  std::size_t k = 10;
  std::size_t m = 2;
  std::size_t n = 1000;
  double sigma2 = 0.0;
  Prior prior = Prior::Gaussian;
  Ensemble ensemble = Ensemble::Gaussian;
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  std::uint64_t master_seed = 0;

  /// Throws InvalidConfig when an invariant is violated.
  void validate() const;

  /// Binary when both lambda bounds are exactly 1.
  VarianceMode variance_mode() const;

  /// Feasibility constraint for nonbinary variances: lambda_min/lambda_max > k/(k+m-1).
  /// Violations are warnings, generation stays well defined.
  bool variance_ratio_feasible() const;

  /// Applies a "key=value" override. Throws InvalidConfig on unknown key or bad value.
  void apply_override(std::string_view assignment);

  friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

nlohmann::json to_json(const ProblemConfig& cfg);

/// Strict parse: d, k, m, n required; other fields default; unknown keys rejected.
/// `default_seed` is used when the document carries no master_seed.
ProblemConfig config_from_json(const nlohmann::json& j, std::uint64_t default_seed = 0);

/// SUPREC_SEED from the environment, if set and parseable.
std::optional<std::uint64_t> seed_from_environment();

}  // namespace suprec
