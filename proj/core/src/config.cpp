#include "suprec/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>

#include "suprec/errors.hpp"

namespace suprec {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, value);
  if (ec != std::errc{} || ptr != last)
    throw InvalidConfig("bad value for " + std::string(key) + ": " + std::string(text));
  return value;
}

constexpr std::array kFields{"d", "k", "m", "n", "sigma2", "prior", "ensemble", "lambda_min", "lambda_max", "master_seed"};

std::size_t required_size(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw InvalidConfig(std::string("missing field: ") + key);
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw InvalidConfig(std::string("field must be a nonnegative integer: ") + key);
  return v.get<std::size_t>();
}

double optional_real(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw InvalidConfig(std::string("field must be a number: ") + key);
  return v.get<double>();
}

}  // namespace

std::string_view to_string(Prior p) { return p == Prior::Gaussian ? "gaussian" : "rademacher"; }
std::string_view to_string(Ensemble e) { return e == Ensemble::Gaussian ? "gaussian" : "rademacher"; }

Prior parse_prior(std::string_view s) {
  const auto v = lower(s);
  if (v == "gaussian") return Prior::Gaussian;
  if (v == "rademacher") return Prior::Rademacher;
  throw InvalidConfig("unknown prior: " + std::string(s));
}

Ensemble parse_ensemble(std::string_view s) {
  const auto v = lower(s);
  if (v == "gaussian") return Ensemble::Gaussian;
  if (v == "rademacher") return Ensemble::Rademacher;
  throw InvalidConfig("unknown ensemble: " + std::string(s));
}

void ProblemConfig::validate() const {
  if (d < 1) throw InvalidConfig("d must be >= 1");
  if (k < 1 || k > d) throw InvalidConfig("k must satisfy 1 <= k <= d (k=" + std::to_string(k) + ", d=" + std::to_string(d) + ")");
  if (m < 1) throw InvalidConfig("m must be >= 1");
  if (n < 1) throw InvalidConfig("n must be >= 1");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw InvalidConfig("sigma2 must be finite and >= 0");
  if (!(lambda_min > 0.0) || !(lambda_min <= lambda_max) || !std::isfinite(lambda_max))
    throw InvalidConfig("need 0 < lambda_min <= lambda_max");
}

VarianceMode ProblemConfig::variance_mode() const {
  return (lambda_min == 1.0 && lambda_max == 1.0) ? VarianceMode::Binary : VarianceMode::UniformRange;
}

bool ProblemConfig::variance_ratio_feasible() const {
  if (variance_mode() == VarianceMode::Binary) return true;
  return lambda_min / lambda_max > static_cast<double>(k) / static_cast<double>(k + m - 1);
}

void ProblemConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw InvalidConfig("override must be key=value: " + std::string(assignment));
  const auto key = assignment.substr(0, eq);
  const auto value = assignment.substr(eq + 1);
  if (key == "d") d = parse_number<std::size_t>(key, value);
  else if (key == "k") k = parse_number<std::size_t>(key, value);
  else if (key == "m") m = parse_number<std::size_t>(key, value);
  else if (key == "n") n = parse_number<std::size_t>(key, value);
  else if (key == "sigma2") sigma2 = parse_number<double>(key, value);
  else if (key == "prior") prior = parse_prior(value);
  else if (key == "ensemble") ensemble = parse_ensemble(value);
  else if (key == "lambda_min") lambda_min = parse_number<double>(key, value);
  else if (key == "lambda_max") lambda_max = parse_number<double>(key, value);
  else if (key == "master_seed") master_seed = parse_number<std::uint64_t>(key, value);
  else throw InvalidConfig("unknown override key: " + std::string(key));
}

nlohmann::json to_json(const ProblemConfig& cfg) {
  return nlohmann::json{
      {"d", cfg.d},
      {"k", cfg.k},
      {"m", cfg.m},
      {"n", cfg.n},
      {"sigma2", cfg.sigma2},
      {"prior", to_string(cfg.prior)},
      {"ensemble", to_string(cfg.ensemble)},
      {"lambda_min", cfg.lambda_min},
      {"lambda_max", cfg.lambda_max},
      {"master_seed", cfg.master_seed},
  };
}

ProblemConfig config_from_json(const nlohmann::json& j, std::uint64_t default_seed) {
  if (!j.is_object()) throw InvalidConfig("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "format_version") {
      if (!value.is_number_integer() || value.get<int>() != kFormatVersion)
        throw InvalidConfig("unsupported format_version");
      continue;
    }
    if (std::find(kFields.begin(), kFields.end(), key) == kFields.end()) throw InvalidConfig("unknown field: " + key);
  }

  ProblemConfig cfg;
  cfg.d = required_size(j, "d");
  cfg.k = required_size(j, "k");
  cfg.m = required_size(j, "m");
  cfg.n = required_size(j, "n");
  cfg.sigma2 = optional_real(j, "sigma2", 0.0);
  if (j.contains("prior")) {
    if (!j["prior"].is_string()) throw InvalidConfig("prior must be a string");
    cfg.prior = parse_prior(j["prior"].get<std::string>());
  }
  if (j.contains("ensemble")) {
    if (!j["ensemble"].is_string()) throw InvalidConfig("ensemble must be a string");
    cfg.ensemble = parse_ensemble(j["ensemble"].get<std::string>());
  }
  cfg.lambda_min = optional_real(j, "lambda_min", 1.0);
  cfg.lambda_max = optional_real(j, "lambda_max", 1.0);
  if (j.contains("master_seed")) {
    const auto& s = j["master_seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
      throw InvalidConfig("master_seed must be a nonnegative integer");
    cfg.master_seed = s.get<std::uint64_t>();
  } else {
    cfg.master_seed = default_seed;
  }
  cfg.validate();
  return cfg;
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* raw = std::getenv("SUPREC_SEED");
  if (raw == nullptr) return std::nullopt;
  std::string_view text(raw);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace suprec
