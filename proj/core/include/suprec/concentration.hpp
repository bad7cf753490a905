#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "suprec/config.hpp"
#include "suprec/datagen.hpp"
#include "suprec/stats.hpp"

namespace suprec {

/// Per-sample alpha^2_{ji} for one coordinate i: the conditional variance of
/// phi_ji^T y_j given the matrices.
struct AlphaStats {
  std::vector<double> values;
  std::size_t coordinate = 0;
  bool in_support = false;

  double mean() const;
  double sum_of_squares() const;
  double max() const;
};

/// alpha^2 for coordinate i (0-based):
///   i in S:     ||phi_ji||^4 + sum_{l in S\{i}} (phi_jl^T phi_ji)^2 + sigma2 ||phi_ji||^2
///   otherwise:  sum_{l in S} (phi_jl^T phi_ji)^2 + sigma2 ||phi_ji||^2
AlphaStats alpha_squared(const MeasurementMatrixBatch& matrices, const SupportSet& support, double sigma2,
                         std::size_t i);

/// alpha_squared for every coordinate at once, sharing the Gram products.
std::vector<AlphaStats> alpha_squared_all(const MeasurementMatrixBatch& matrices, const SupportSet& support,
                                          double sigma2);

struct SeparationConstants {
  double c1 = 256.0;  // 2 * 128
  double c2 = 16.0;   // 2 * 8
};

/// delta' = delta / (4 max{k, d-k}).
double default_delta_prime(double delta, std::size_t k, std::size_t d);

/// nu = max{ sqrt((c1/n^2) sum alpha^4 log(1/delta')), (c2/n) max alpha^2 log(1/delta') }.
double separation_radius(const AlphaStats& stats, double delta_prime, SeparationConstants c);

struct SeparationReport {
  std::size_t in_coordinate = 0;
  std::size_t out_coordinate = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double nu_in = 0.0;
  double nu_out = 0.0;
  bool holds = false;
  SeparationConstants constants;
  double delta_prime = 0.0;
};

/// Evaluates mean(alpha^2_i) - mean(alpha^2_i') >= nu_i + nu_i'.
/// Throws InvalidInput when the two arrays differ in length or are empty.
SeparationReport separation_holds(const AlphaStats& in_stats, const AlphaStats& out_stats, double delta_prime,
                                  double c1, double c2);

struct SeparationSummary {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  /// min over pairs of lhs - rhs.
  double worst_margin = 0.0;
  bool all_hold() const { return violations == 0; }
};

/// Checks every (i in S, i' not in S) pair.
SeparationSummary separation_all_pairs(std::span<const AlphaStats> stats, double delta_prime,
                                       SeparationConstants c);

struct SubexpParams {
  double v2 = 0.0;
  double b = 0.0;
};

/// min(1, 2 exp(-min{t^2/(2 v2), t/(2b)})); a zero parameter makes its ratio +inf.
double subexp_tail_bound(SubexpParams params, double t);

/// X ~ subG(sigma2), E X = 0  =>  X^2 ~ subexp(128 sigma2^2, 8 sigma2).
SubexpParams subgaussian_square_params(double sigma2);

/// Sum of independent parts is subexp(sum v2, max b); the sum is then scaled by `scale`:
/// (v2, b) -> (scale^2 v2, |scale| b).
SubexpParams subexp_combine(std::span<const SubexpParams> parts, double scale);

struct MomentReport {
  Ensemble ensemble = Ensemble::Gaussian;
  std::size_t m = 0;
  std::size_t trials = 0;
  CheckReport norm4;         // E||Z||^4
  CheckReport inner2;        // E(Z^T W)^2
  bool pass = false;
};

/// Monte Carlo estimates of E||Z||_2^4 and E(Z^T W)^2 for Z, W with i.i.d. ensemble
/// entries of variance 1/m. Gaussian: references 1 + 2/m and 1/m, pass within 4 s.e.
/// Rademacher: ||Z||^2 = 1 exactly, so E||Z||^4 must be 1 with zero spread.
MomentReport moment_suite(Ensemble ensemble, std::size_t m, std::size_t trials, Rng& rng);

nlohmann::json to_json(const SeparationReport& r);
nlohmann::json to_json(const MomentReport& r);

}  // namespace suprec
