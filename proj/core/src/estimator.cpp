#include "suprec/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "suprec/errors.hpp"

namespace suprec {

ProxyVarianceEstimate proxy_variance(const ObservationBatch& obs) {
  const auto n = obs.count();
  if (n == 0 || obs.matrices.count() != n) throw InvalidInput("proxy_variance needs a nonempty, consistent batch");
  const auto m = obs.observations.rows();
  const auto d = static_cast<Eigen::Index>(obs.matrices.cols());

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd proxy(d);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& phi = obs.matrices.matrices[j];
    if (phi.rows() != m || phi.cols() != d) throw InvalidInput("matrix dimensions vary across the batch");
    proxy.noalias() = phi.transpose() * obs.observations.col(static_cast<Eigen::Index>(j));
    acc += proxy.cwiseAbs2();
  }
  return ProxyVarianceEstimate{acc / static_cast<double>(n), n};
}

SupportEstimate topk_support(const ProxyVarianceEstimate& est, std::size_t k) {
  const auto d = static_cast<std::size_t>(est.values.size());
  if (k == 0 || k > d) throw InvalidInput("top-k selection needs 1 <= k <= d");

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& v = est.values;
  auto before = [&v](std::size_t a, std::size_t b) {
    const auto va = v[static_cast<Eigen::Index>(a)];
    const auto vb = v[static_cast<Eigen::Index>(b)];
    return va > vb || (va == vb && a < b);
  };
  if (k < d) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), before);
    // order[k] is now the (k+1)-th ranked entry; the first k are the selection.
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.begin() + static_cast<std::ptrdiff_t>(k) + 1, before);
  }

  SupportEstimate out;
  out.mode = SelectionMode::TopK;
  out.indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  if (k < d) {
    out.tie_broken = v[static_cast<Eigen::Index>(order[k - 1])] == v[static_cast<Eigen::Index>(order[k])];
  }
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

SupportEstimate threshold_support(const ProxyVarianceEstimate& est, ThresholdSpec tau) {
  if (!std::isfinite(tau.tau)) throw InvalidInput("threshold must be finite");
  SupportEstimate out;
  out.mode = SelectionMode::Threshold;
  for (Eigen::Index i = 0; i < est.values.size(); ++i) {
    if (est.values[i] >= tau.tau) out.indices.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

Eigen::VectorXd expected_proxy(const VarianceVector& lambda, std::size_t m, double sigma2) {
  if (m == 0) throw InvalidInput("m must be >= 1");
  const double md = static_cast<double>(m);
  const double bias = lambda.trace() / md + sigma2;
  return (((md + 1.0) / md) * lambda.values).array() + bias;
}

ThresholdSpec default_threshold(std::size_t k, std::size_t m, double sigma2, double lambda_min) {
  if (m == 0) throw InvalidInput("m must be >= 1");
  const double md = static_cast<double>(m);
  return ThresholdSpec{static_cast<double>(k) / md + sigma2 + ((md + 1.0) / (2.0 * md)) * lambda_min};
}

bool matches(const SupportEstimate& est, const SupportSet& truth) { return est.indices == truth.indices(); }

nlohmann::json to_json(const ProxyVarianceEstimate& est) {
  return nlohmann::json{{"values", std::vector<double>(est.values.data(), est.values.data() + est.values.size())},
                        {"n_used", est.n_used}};
}

nlohmann::json to_json(const SupportEstimate& est) {
  std::vector<std::int64_t> one_based;
  one_based.reserve(est.indices.size());
  for (auto i : est.indices) one_based.push_back(static_cast<std::int64_t>(i) + 1);
  return nlohmann::json{{"indices", one_based},
                        {"mode", est.mode == SelectionMode::TopK ? "topk" : "threshold"},
                        {"tie_broken", est.tie_broken}};
}

}  // namespace suprec
