#include "suprec_cli/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "suprec/config.hpp"
#include "suprec/datagen.hpp"
#include "suprec/errors.hpp"
#include "suprec/estimator.hpp"
#include "suprec/harness.hpp"
#include "suprec/lowerbound.hpp"
#include "suprec/verify.hpp"

namespace suprec::cli {

namespace {

using json = nlohmann::json;

constexpr const char* kPrecedence =
    "Parameter precedence, highest first: --seed, key=value overrides, the config file, "
    "SUPREC_SEED (seed only), built-in defaults.";

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(fmt::format("{}: {}", path, e.what()));
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
  if (!out) throw InvalidInput("write failed: " + path);
}

std::uint64_t default_seed() { return seed_from_environment().value_or(0); }

void warn_variance_ratio(const ProblemConfig& cfg, std::ostream& err) {
  if (!cfg.variance_ratio_feasible()) {
    err << fmt::format("warning: lambda_min/lambda_max = {} does not exceed k/(k+m-1) = {}\n",
                       cfg.lambda_min / cfg.lambda_max,
                       static_cast<double>(cfg.k) / static_cast<double>(cfg.k + cfg.m - 1));
  }
}

ProblemConfig resolve_config(const std::string& path, const std::vector<std::string>& overrides,
                             const std::optional<std::uint64_t>& seed) {
  ProblemConfig cfg;
  if (!path.empty()) {
    cfg = config_from_json(read_json_file(path), default_seed());
  } else {
    cfg.master_seed = default_seed();
  }
  for (const auto& o : overrides) cfg.apply_override(o);
  if (seed) cfg.master_seed = *seed;
  cfg.validate();
  return cfg;
}

json matrix_rows(const Eigen::MatrixXd& m) {
  auto rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json dataset_json(const ProblemConfig& cfg, const ProblemInstance& inst) {
  auto matrices = json::array();
  for (const auto& phi : inst.batch.matrices.matrices) matrices.push_back(matrix_rows(phi));
  auto observations = json::array();
  for (Eigen::Index j = 0; j < inst.batch.observations.cols(); ++j) {
    auto y = json::array();
    for (Eigen::Index r = 0; r < inst.batch.observations.rows(); ++r) y.push_back(inst.batch.observations(r, j));
    observations.push_back(std::move(y));
  }
  std::vector<double> lambda(inst.lambda.values.data(), inst.lambda.values.data() + inst.lambda.values.size());
  return json{{"format_version", kFormatVersion},
              {"kind", "dataset"},
              {"config", to_json(cfg)},
              {"seed", cfg.master_seed},
              {"support", inst.lambda.support.one_based()},
              {"lambda", lambda},
              {"matrices", matrices},
              {"observations", observations}};
}

struct Dataset {
  ProblemConfig config;
  ObservationBatch batch;
  std::optional<SupportSet> truth;
};

Eigen::MatrixXd parse_matrix(const json& rows, std::size_t r, std::size_t c, const char* what) {
  if (!rows.is_array() || rows.size() != r) throw InvalidInput(fmt::format("{}: expected {} rows", what, r));
  Eigen::MatrixXd out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < r; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || row.size() != c) throw InvalidInput(fmt::format("{}: expected {} columns", what, c));
    for (std::size_t j = 0; j < c; ++j) {
      if (!row[j].is_number()) throw InvalidInput(fmt::format("{}: non-numeric entry", what));
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
  }
  return out;
}

Dataset parse_dataset(const json& j) {
  if (!j.is_object()) throw InvalidInput("dataset must be a JSON object");
  if (!j.contains("format_version") || j["format_version"] != kFormatVersion)
    throw InvalidInput("dataset: missing or unsupported format_version");
  if (!j.contains("config")) throw InvalidInput("dataset: missing config");
  Dataset ds;
  try {
    ds.config = config_from_json(j["config"]);
  } catch (const InvalidConfig& e) {
    throw InvalidInput(std::string("dataset config: ") + e.what());
  }
  const auto& cfg = ds.config;
  if (!j.contains("matrices") || !j["matrices"].is_array() || j["matrices"].size() != cfg.n)
    throw InvalidInput(fmt::format("dataset: expected {} matrices", cfg.n));
  if (!j.contains("observations") || !j["observations"].is_array() || j["observations"].size() != cfg.n)
    throw InvalidInput(fmt::format("dataset: expected {} observations", cfg.n));

  ds.batch.matrices.matrices.reserve(cfg.n);
  for (const auto& phi : j["matrices"]) ds.batch.matrices.matrices.push_back(parse_matrix(phi, cfg.m, cfg.d, "matrix"));
  ds.batch.observations = parse_matrix(j["observations"], cfg.n, cfg.m, "observations").transpose();

  if (j.contains("support") && !j["support"].is_null()) {
    if (!j["support"].is_array()) throw InvalidInput("dataset: support must be an array");
    std::vector<std::int64_t> one_based;
    for (const auto& v : j["support"]) {
      if (!v.is_number_integer()) throw InvalidInput("dataset: support entries must be integers");
      one_based.push_back(v.get<std::int64_t>());
    }
    ds.truth = SupportSet::from_one_based(one_based, cfg.d);
  }
  return ds;
}

std::vector<std::size_t> one_based(const std::vector<std::size_t>& idx) {
  std::vector<std::size_t> out(idx);
  for (auto& i : out) ++i;
  return out;
}

int cmd_gen(const std::string& config_path, const std::string& out_path, const std::vector<std::string>& overrides,
            const std::optional<std::uint64_t>& seed, std::ostream& out, std::ostream& err) {
  const auto cfg = resolve_config(config_path, overrides, seed);
  warn_variance_ratio(cfg, err);
  const auto inst = generate_instance(cfg, 0);
  write_text_file(out_path, dataset_json(cfg, inst).dump() + "\n");
  out << json{{"format_version", kFormatVersion}, {"written", out_path}, {"config", to_json(cfg)}, {"seed", cfg.master_seed}}.dump(2)
      << "\n";
  return kOk;
}

int cmd_recover(const std::string& data_path, bool strict, const std::string& method, std::optional<double> tau,
                std::ostream& out) {
  const auto ds = parse_dataset(read_json_file(data_path));
  const auto& cfg = ds.config;
  const auto est = proxy_variance(ds.batch);
  SupportEstimate support;
  double tau_used = 0.0;
  if (method == "threshold") {
    tau_used = tau ? *tau : default_threshold(cfg.k, cfg.m, cfg.sigma2, cfg.lambda_min).tau;
    support = threshold_support(est, ThresholdSpec{tau_used});
  } else {
    support = topk_support(est, cfg.k);
  }

  std::string verdict = "unknown";
  if (ds.truth) verdict = support.indices == ds.truth->indices() ? "exact" : "mismatch";

  std::vector<double> sorted(est.values.data(), est.values.data() + est.values.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  json summary{{"min", est.values.minCoeff()},
               {"max", est.values.maxCoeff()},
               {"mean", est.values.mean()},
               {"expected_on_support", (cfg.m + 1.0) / cfg.m * cfg.lambda_max + static_cast<double>(cfg.k) / cfg.m + cfg.sigma2},
               {"expected_off_support", static_cast<double>(cfg.k) / cfg.m + cfg.sigma2}};
  if (cfg.k >= 1 && cfg.k < sorted.size()) summary["gap_k"] = sorted[cfg.k - 1] - sorted[cfg.k];

  json report{{"format_version", kFormatVersion},
              {"config", to_json(cfg)},
              {"seed", cfg.master_seed},
              {"method", method},
              {"lambda_tilde", to_json(est)},
              {"lambda_tilde_summary", summary},
              {"estimated_support", one_based(support.indices)},
              {"tie_broken", support.tie_broken},
              {"verdict", verdict}};
  if (method == "threshold") report["tau"] = tau_used;
  if (ds.truth) report["true_support"] = ds.truth->one_based();
  out << report.dump(2) << "\n";
  return strict && verdict == "mismatch" ? kMismatch : kOk;
}

struct SweepArgs {
  std::string spec_path;
  std::string csv_path;
  std::string json_path;
  std::string plot_path;
  std::string normalize;
  bool force = false;
  std::size_t threads = 1;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  auto spec = sweep_spec_from_json(read_json_file(a.spec_path), default_seed());
  for (const auto& o : a.overrides) spec.base.apply_override(o);
  if (a.seed) spec.base.master_seed = *a.seed;
  if (!a.normalize.empty()) spec.normalization = parse_normalization(a.normalize);
  spec.validate();
  for (const auto& point : expand_grid(spec)) warn_variance_ratio(point, err);

  const auto result = run_sweep(spec, SweepOptions{a.threads, a.force});
  const auto csv = to_csv(result);
  if (a.csv_path.empty()) out << csv;
  else write_text_file(a.csv_path, csv);

  if (!a.json_path.empty()) {
    auto j = to_json(result);
    j["format_version"] = kFormatVersion;
    j["spec"] = to_json(spec);
    j["seed"] = spec.base.master_seed;
    write_text_file(a.json_path, j.dump(2) + "\n");
  }
  if (!a.plot_path.empty()) {
    auto j = plot_series(result);
    j["format_version"] = kFormatVersion;
    j["spec"] = to_json(spec);
    j["seed"] = spec.base.master_seed;
    write_text_file(a.plot_path, j.dump(2) + "\n");
  }
  return kOk;
}

int cmd_bounds(const BoundParams& p, std::ostream& out) {
  const auto r = sample_bounds(p);
  out << json{{"format_version", kFormatVersion}, {"params", to_json(p)}, {"bounds", to_json(r)}}.dump(2) << "\n";
  return kOk;
}

int cmd_verify(const std::string& suite, const SuiteOptions& opt, const std::string& out_path, std::ostream& out,
               std::ostream& err) {
  const auto reports = run_suites(suite, opt);
  bool ok = true;
  auto arr = json::array();
  for (const auto& r : reports) {
    for (const auto& w : r.warnings) err << fmt::format("warning: {}: {}\n", r.name, w);
    if (r.status == SuiteStatus::Fail) ok = false;
    arr.push_back(to_json(r));
  }
  json doc{{"format_version", kFormatVersion},
           {"suite", suite},
           {"seed", opt.seed},
           {"trials", opt.trials},
           {"c1", opt.separation.c1},
           {"c2", opt.separation.c2},
           {"reports", arr},
           {"pass", ok}};
  const auto text = doc.dump(2) + "\n";
  if (out_path.empty()) out << text;
  else write_text_file(out_path, text);
  for (const auto& r : reports) err << fmt::format("{}: {}\n", r.name, to_string(r.status));
  return ok ? kOk : kMismatch;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Common-support recovery from compressed per-sample measurements.", "suprec"};
  app.require_subcommand(1);
  app.footer(std::string(kPrecedence) +
             "\nExit codes: 0 success, 1 strict recovery mismatch or failed verification, 2 invalid input, "
             "3 sweep budget refused.");

  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::size_t threads = 1;

  auto* gen = app.add_subcommand("gen", "Generate a dataset (observations, matrices, true support)");
  std::string gen_config;
  std::string gen_out;
  gen->add_option("--config", gen_config, "ProblemConfig JSON file")->check(CLI::ExistingFile);
  gen->add_option("--out", gen_out, "Dataset output path")->required();
  gen->add_option("--seed", seed, "Master seed");
  gen->add_option("overrides", overrides, "key=value overrides (d, k, m, n, sigma2, prior, ensemble, lambda_min, lambda_max, master_seed)");

  auto* recover = app.add_subcommand("recover", "Estimate the support of a dataset");
  std::string data_path;
  bool strict = false;
  std::string method = "topk";
  std::optional<double> tau;
  recover->add_option("--data", data_path, "Dataset JSON written by gen")->required()->check(CLI::ExistingFile);
  recover->add_flag("--strict", strict, "Exit 1 when the estimate differs from the stored support");
  recover->add_option("--method", method, "topk or threshold")->check(CLI::IsMember({"topk", "threshold"}));
  recover->add_option("--tau", tau, "Threshold (default k/m + sigma2 + (m+1)/(2m) lambda_min)");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep and write a CSV table");
  SweepArgs sa;
  sweep->add_option("--spec", sa.spec_path, "SweepSpec JSON file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", sa.csv_path, "CSV output path (stdout when omitted)");
  sweep->add_option("--json", sa.json_path, "JSON mirror output path");
  sweep->add_option("--plot", sa.plot_path, "Plot series output path");
  sweep->add_option("--normalize", sa.normalize, "none, ksq, noise or fano");
  sweep->add_flag("--force", sa.force, "Run even when the cost estimate exceeds the budget");
  sweep->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", seed, "Master seed");
  sweep->add_option("overrides", overrides, "key=value overrides applied to the base config");

  auto* bounds = app.add_subcommand("bounds", "Print the sample-complexity bounds");
  BoundParams bp;
  bounds->add_option("--m", bp.m, "Measurements per sample")->capture_default_str();
  bounds->add_option("--k", bp.k, "Support size")->capture_default_str();
  bounds->add_option("--d", bp.d, "Ambient dimension")->capture_default_str();
  bounds->add_option("--sigma2", bp.sigma2, "Noise variance")->capture_default_str();
  bounds->add_option("--delta", bp.delta, "Failure probability")->capture_default_str();
  bounds->add_option("--c-upper", bp.c_upper, "Upper-bound constant")->capture_default_str();
  bounds->add_option("--c-lower", bp.c_lower, "Lower-bound constant")->capture_default_str();
  bounds->add_option("--lambda-min", bp.lambda_min, "Smallest nonzero variance")->capture_default_str();
  bounds->add_option("--lambda-max", bp.lambda_max, "Largest variance")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Run Monte Carlo verification suites");
  std::string suite;
  SuiteOptions so;
  std::string verify_out;
  verify->add_option("suite", suite, "bias, separation, wishart, klchain, moments or all")->required();
  verify->add_option("--trials", so.trials, "Trials (0 = suite default)");
  verify->add_option("--seed", seed, "Master seed");
  verify->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  verify->add_option("--k", so.k, "Support size override");
  verify->add_option("--m", so.m, "Measurements override");
  verify->add_option("--d", so.d, "Dimension override");
  verify->add_option("--c1", so.separation.c1, "Separation constant c1")->capture_default_str();
  verify->add_option("--c2", so.separation.c2, "Separation constant c2")->capture_default_str();
  verify->add_option("--out", verify_out, "Report output path (stdout when omitted)");

  std::vector<const char*> argv{"suprec"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_config, gen_out, overrides, seed, out, err);
    if (recover->parsed()) return cmd_recover(data_path, strict, method, tau, out);
    if (sweep->parsed()) {
      sa.threads = threads;
      sa.seed = seed;
      sa.overrides = overrides;
      return cmd_sweep(sa, out, err);
    }
    if (bounds->parsed()) return cmd_bounds(bp, out);
    if (verify->parsed()) {
      so.seed = seed ? *seed : default_seed();
      so.threads = threads;
      return cmd_verify(suite, so, verify_out, out, err);
    }
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << " (use --force to run anyway)\n";
    return kBudget;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const DegenerateInput& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}

}  // namespace suprec::cli
