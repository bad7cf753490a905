#include "suprec/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "suprec/errors.hpp"

namespace suprec {

namespace {

double rademacher(Rng& rng) { return (rng() >> 63) != 0 ? 1.0 : -1.0; }

}  // namespace

SupportSet::SupportSet(std::vector<std::size_t> indices, std::size_t d) : indices_(std::move(indices)), d_(d) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
    throw InvalidInput("support indices must be distinct");
  if (!indices_.empty() && indices_.back() >= d_) throw InvalidInput("support index out of range");
}

SupportSet SupportSet::from_one_based(std::span<const std::int64_t> indices, std::size_t d) {
  std::vector<std::size_t> zero_based;
  zero_based.reserve(indices.size());
  for (auto i : indices) {
    if (i < 1 || static_cast<std::size_t>(i) > d) throw InvalidInput("support index out of range: " + std::to_string(i));
    zero_based.push_back(static_cast<std::size_t>(i - 1));
  }
  return SupportSet(std::move(zero_based), d);
}

bool SupportSet::contains(std::size_t i) const { return std::binary_search(indices_.begin(), indices_.end(), i); }

std::vector<std::int64_t> SupportSet::one_based() const {
  std::vector<std::int64_t> out;
  out.reserve(indices_.size());
  for (auto i : indices_) out.push_back(static_cast<std::int64_t>(i) + 1);
  return out;
}

std::vector<bool> SupportSet::mask() const {
  std::vector<bool> out(d_, false);
  for (auto i : indices_) out[i] = true;
  return out;
}

SupportSet sample_support(std::size_t d, std::size_t k, Rng& rng) {
  if (k == 0 || k > d) throw InvalidConfig("support size must satisfy 1 <= k <= d");
  std::vector<std::size_t> all(d);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  std::sample(all.begin(), all.end(), std::back_inserter(chosen), k, rng);
  return SupportSet(std::move(chosen), d);
}

VarianceVector make_variance_vector(const SupportSet& support, double lambda_min, double lambda_max,
                                    VarianceMode mode, Rng& rng) {
  if (!(lambda_min > 0.0) || !(lambda_min <= lambda_max)) throw InvalidConfig("need 0 < lambda_min <= lambda_max");
  VarianceVector out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(support.dimension())), support};
  if (mode == VarianceMode::Binary) {
    if (lambda_min != 1.0 || lambda_max != 1.0) throw InvalidConfig("binary variances require lambda_min = lambda_max = 1");
    for (auto i : support.indices()) out.values[static_cast<Eigen::Index>(i)] = 1.0;
    return out;
  }
  std::uniform_real_distribution<double> uniform(lambda_min, lambda_max);
  for (auto i : support.indices()) {
    out.values[static_cast<Eigen::Index>(i)] = lambda_min == lambda_max ? lambda_min : uniform(rng);
  }
  return out;
}

SignalBatch sample_signals(const VarianceVector& lambda, Prior prior, std::size_t n, Rng& rng) {
  const auto d = lambda.values.size();
  SignalBatch out{Eigen::MatrixXd::Zero(d, static_cast<Eigen::Index>(n))};
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j) {
    for (auto i : lambda.support.indices()) {
      const auto row = static_cast<Eigen::Index>(i);
      const double scale = std::sqrt(lambda.values[row]);
      out.samples(row, j) = scale * (prior == Prior::Gaussian ? normal(rng) : rademacher(rng));
    }
  }
  return out;
}

MeasurementMatrixBatch sample_measurement_matrices(std::size_t m, std::size_t d, std::size_t n, Ensemble ensemble,
                                                   Rng& rng) {
  if (m < 1 || d < 1 || n < 1) throw InvalidConfig("m, d, n must be >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  std::normal_distribution<double> normal(0.0, scale);
  MeasurementMatrixBatch out;
  out.matrices.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    Eigen::MatrixXd phi(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
    double* data = phi.data();
    const auto size = phi.size();
    if (ensemble == Ensemble::Gaussian) {
      for (Eigen::Index e = 0; e < size; ++e) data[e] = normal(rng);
    } else {
      for (Eigen::Index e = 0; e < size; ++e) data[e] = scale * rademacher(rng);
    }
    out.matrices.push_back(std::move(phi));
  }
  return out;
}

ObservationBatch observe(const SignalBatch& signals, MeasurementMatrixBatch matrices, double sigma2, Rng& rng) {
  const auto n = signals.count();
  if (matrices.count() != n) throw InvalidInput("signal and matrix batch sizes differ");
  if (n == 0) throw InvalidInput("empty batch");
  if (!(sigma2 >= 0.0)) throw InvalidInput("sigma2 must be >= 0");
  const auto m = static_cast<Eigen::Index>(matrices.rows());
  for (const auto& phi : matrices.matrices) {
    if (phi.rows() != m || phi.cols() != signals.samples.rows()) throw InvalidInput("matrix dimensions do not match signals");
  }

  ObservationBatch out;
  out.observations.resize(m, static_cast<Eigen::Index>(n));
  std::normal_distribution<double> noise(0.0, sigma2 > 0.0 ? std::sqrt(sigma2) : 1.0);
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j) {
    out.observations.col(j).noalias() = matrices.matrices[static_cast<std::size_t>(j)] * signals.samples.col(j);
    if (sigma2 > 0.0) {
      for (Eigen::Index r = 0; r < m; ++r) out.observations(r, j) += noise(rng);
    }
  }
  out.matrices = std::move(matrices);
  return out;
}

ProblemInstance generate_instance(const ProblemConfig& cfg, std::uint64_t trial_index) {
  cfg.validate();
  auto support_rng = make_stream(cfg.master_seed, trial_index, StreamTag::Support);
  auto variance_rng = make_stream(cfg.master_seed, trial_index, StreamTag::Variance);
  auto signal_rng = make_stream(cfg.master_seed, trial_index, StreamTag::Signals);
  auto matrix_rng = make_stream(cfg.master_seed, trial_index, StreamTag::Matrices);
  auto noise_rng = make_stream(cfg.master_seed, trial_index, StreamTag::Noise);

  auto support = sample_support(cfg.d, cfg.k, support_rng);
  auto lambda = make_variance_vector(support, cfg.lambda_min, cfg.lambda_max, cfg.variance_mode(), variance_rng);
  auto signals = sample_signals(lambda, cfg.prior, cfg.n, signal_rng);
  auto matrices = sample_measurement_matrices(cfg.m, cfg.d, cfg.n, cfg.ensemble, matrix_rng);
  auto batch = observe(signals, std::move(matrices), cfg.sigma2, noise_rng);
  return ProblemInstance{std::move(lambda), std::move(signals), std::move(batch)};
}

}  // namespace suprec
