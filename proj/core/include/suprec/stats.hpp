#pragma once

#include <cstddef>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

namespace suprec {

/// Welford accumulator with a deterministic pairwise merge.
class RunningStats {
 public:
  void push(double x);
  void merge(const RunningStats& other);

  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two observations.
  double variance() const;
  double std_error() const;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for a binomial proportion, clamped to [0, 1].
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = kZ95);

/// One Monte Carlo assertion: an estimate, its standard error, the reference value it is
/// compared against, and the verdict.
struct CheckReport {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool pass = false;
};

nlohmann::json to_json(const CheckReport& r);

}  // namespace suprec
