#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "suprec/concentration.hpp"
#include "suprec/stats.hpp"

namespace suprec {

enum class SuiteStatus { Pass, Fail, Skipped };

std::string_view to_string(SuiteStatus s);

struct SuiteReport {
  std::string name;
  SuiteStatus status = SuiteStatus::Pass;
  std::vector<CheckReport> checks;
  std::vector<std::string> warnings;
  nlohmann::json details = nlohmann::json::object();
};

/// Optional parameter overrides for the verification suites; unset fields use each
/// suite's built-in configuration.
struct SuiteOptions {
  std::size_t trials = 0;  // 0 = suite default (200 seeds for separation, 1e5 draws otherwise)
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t k = 0;  // 0 = suite default
  std::size_t m = 0;
  std::size_t d = 0;
  SeparationConstants separation{1.0, 1.0};
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"bias", "separation", "wishart", "klchain", "moments"};
  return names;
}

/// Bias of lambda~ against its closed-form expectation (binary and nonbinary variances).
SuiteReport verify_bias(const SuiteOptions& opt);
/// Frequency of the separation condition holding for all pairs.
SuiteReport verify_separation(const SuiteOptions& opt);
/// Wishart fourth inverse moment scaling plus the m = 1 chi-squared oracle.
SuiteReport verify_wishart(const SuiteOptions& opt);
/// KL inequality chain, trace inequality and scalar log inequality on random draws.
SuiteReport verify_klchain(const SuiteOptions& opt);
/// Column moment identities for Gaussian and Rademacher ensembles.
SuiteReport verify_moments(const SuiteOptions& opt);

/// Dispatches on name ("all" runs every suite). Throws InvalidInput for unknown names.
std::vector<SuiteReport> run_suites(std::string_view name, const SuiteOptions& opt);

nlohmann::json to_json(const SuiteReport& r);

}  // namespace suprec
