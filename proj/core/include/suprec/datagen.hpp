#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "suprec/config.hpp"
#include "suprec/rng.hpp"

namespace suprec {

/// Sorted set of distinct coordinates in [0, d). Serialized 1-based.
class SupportSet {
 public:
  SupportSet() = default;
  /// Sorts the indices; throws InvalidInput on duplicates or out-of-range entries.
  SupportSet(std::vector<std::size_t> indices, std::size_t d);

  static SupportSet from_one_based(std::span<const std::int64_t> indices, std::size_t d);

  const std::vector<std::size_t>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  std::size_t dimension() const { return d_; }
  bool contains(std::size_t i) const;
  std::vector<std::int64_t> one_based() const;
  /// Membership mask of length d.
  std::vector<bool> mask() const;

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<std::size_t> indices_;
  std::size_t d_ = 0;
};

/// The per-coordinate variances lambda; K_lambda = diag(values).
struct VarianceVector {
  Eigen::VectorXd values;
  SupportSet support;

  double trace() const { return values.sum(); }
};

/// n samples stored column-wise as a d x n matrix.
struct SignalBatch {
  Eigen::MatrixXd samples;

  std::size_t count() const { return static_cast<std::size_t>(samples.cols()); }
  std::size_t dimension() const { return static_cast<std::size_t>(samples.rows()); }
};

/// One m x d matrix per sample.
struct MeasurementMatrixBatch {
  std::vector<Eigen::MatrixXd> matrices;

  std::size_t count() const { return matrices.size(); }
  std::size_t rows() const { return matrices.empty() ? 0 : static_cast<std::size_t>(matrices.front().rows()); }
  std::size_t cols() const { return matrices.empty() ? 0 : static_cast<std::size_t>(matrices.front().cols()); }
};

/// Observations y_j (columns of an m x n matrix) together with the matrices that produced them.
struct ObservationBatch {
  Eigen::MatrixXd observations;
  MeasurementMatrixBatch matrices;

  std::size_t count() const { return static_cast<std::size_t>(observations.cols()); }
};

SupportSet sample_support(std::size_t d, std::size_t k, Rng& rng);

/// Binary mode needs lambda_min = lambda_max = 1 and ignores the stream.
VarianceVector make_variance_vector(const SupportSet& support, double lambda_min, double lambda_max,
                                    VarianceMode mode, Rng& rng);

SignalBatch sample_signals(const VarianceVector& lambda, Prior prior, std::size_t n, Rng& rng);

/// Gaussian entries are N(0, 1/m); Rademacher entries are +-1/sqrt(m).
MeasurementMatrixBatch sample_measurement_matrices(std::size_t m, std::size_t d, std::size_t n,
                                                   Ensemble ensemble, Rng& rng);

/// y_j = Phi_j x_j + w_j with w_j ~ N(0, sigma2 I). sigma2 = 0 draws no noise.
ObservationBatch observe(const SignalBatch& signals, MeasurementMatrixBatch matrices, double sigma2, Rng& rng);

/// Everything generated for one trial.
struct ProblemInstance {
  VarianceVector lambda;
  SignalBatch signals;
  ObservationBatch batch;
};

/// Full generative pipeline; each stage draws from its own stream derived from
/// (cfg.master_seed, trial_index, stage tag).
ProblemInstance generate_instance(const ProblemConfig& cfg, std::uint64_t trial_index);

}  // namespace suprec
