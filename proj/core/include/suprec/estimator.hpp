#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "suprec/datagen.hpp"

namespace suprec {

/// Diagonal of A = (1/n) sum_j Phi_j^T y_j y_j^T Phi_j.
struct ProxyVarianceEstimate {
  Eigen::VectorXd values;
  std::size_t n_used = 0;
};

enum class SelectionMode { TopK, Threshold };

struct SupportEstimate {
  std::vector<std::size_t> indices;  // sorted, 0-based
  SelectionMode mode = SelectionMode::TopK;
  bool tie_broken = false;
};

struct ThresholdSpec {
  double tau = 0.0;
};

/// lambda~_i = (1/n) sum_j (phi_ji^T y_j)^2, accumulated one sample at a time in O(d) memory.
ProxyVarianceEstimate proxy_variance(const ObservationBatch& obs);

/// Indices of the k largest entries; equal values prefer the smaller index.
SupportEstimate topk_support(const ProxyVarianceEstimate& est, std::size_t k);

/// {i : lambda~_i >= tau}.
SupportEstimate threshold_support(const ProxyVarianceEstimate& est, ThresholdSpec tau);

/// E[lambda~_i] = ((m+1)/m) lambda_i + Tr(K_lambda)/m + sigma2 under Gaussian-moment ensembles.
Eigen::VectorXd expected_proxy(const VarianceVector& lambda, std::size_t m, double sigma2);

/// Midpoint between the expected on-support value at lambda_min and the off-support value:
/// k/m + sigma2 + ((m+1)/(2m)) lambda_min.
ThresholdSpec default_threshold(std::size_t k, std::size_t m, double sigma2, double lambda_min);

bool matches(const SupportEstimate& est, const SupportSet& truth);

nlohmann::json to_json(const ProxyVarianceEstimate& est);
nlohmann::json to_json(const SupportEstimate& est);

}  // namespace suprec
