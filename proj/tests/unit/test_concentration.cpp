#include <cmath>

#include <gtest/gtest.h>

#include "suprec/concentration.hpp"
#include "suprec/errors.hpp"
#include "suprec/stats.hpp"

using namespace suprec;

namespace {

AlphaStats constant_stats(double value, std::size_t n, bool in_support) {
  AlphaStats s;
  s.values.assign(n, value);
  s.in_support = in_support;
  return s;
}

}  // namespace

TEST(Alpha, SingleSupportColumnIsNormToTheFourth) {
  Rng rng(1);
  const auto b = sample_measurement_matrices(3, 6, 40, Ensemble::Gaussian, rng);
  const SupportSet s({2}, 6);
  const auto a = alpha_squared(b, s, 0.0, 2);
  ASSERT_EQ(a.values.size(), 40u);
  for (std::size_t j = 0; j < 40; ++j) {
    const double norm2 = b.matrices[j].col(2).squaredNorm();
    EXPECT_NEAR(a.values[j], norm2 * norm2, 1e-12);
  }
  EXPECT_TRUE(a.in_support);
}

TEST(Alpha, OrthogonalColumnIsZero) {
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(2, 3);
  phi(0, 0) = 1.0;  // support column
  phi(1, 2) = 1.0;  // orthogonal off-support column
  const MeasurementMatrixBatch b{{phi}};
  const auto a = alpha_squared(b, SupportSet({0}, 3), 0.0, 2);
  EXPECT_EQ(a.values[0], 0.0);
  EXPECT_FALSE(a.in_support);
}

TEST(Alpha, PerCoordinateAndBatchedRoutesAgree) {
  Rng rng(2);
  const auto b = sample_measurement_matrices(4, 15, 25, Ensemble::Gaussian, rng);
  const SupportSet s({1, 4, 9, 13}, 15);
  const auto all = alpha_squared_all(b, s, 0.3);
  ASSERT_EQ(all.size(), 15u);
  for (std::size_t i = 0; i < 15; ++i) {
    const auto one = alpha_squared(b, s, 0.3, i);
    EXPECT_EQ(all[i].in_support, s.contains(i));
    for (std::size_t j = 0; j < 25; ++j) EXPECT_NEAR(all[i].values[j], one.values[j], 1e-12);
  }
}

TEST(Alpha, OffSupportMeanIsKOverMPlusSigma2) {
  const std::size_t k = 5;
  const std::size_t m = 4;
  const double sigma2 = 0.5;
  Rng rng(3);
  const auto b = sample_measurement_matrices(m, 8, 40000, Ensemble::Gaussian, rng);
  const auto a = alpha_squared(b, SupportSet({0, 1, 2, 3, 4}, 8), sigma2, 7);
  RunningStats st;
  for (double v : a.values) st.push(v);
  EXPECT_NEAR(st.mean(), static_cast<double>(k) / m + sigma2, 3.0 * st.std_error());
}

TEST(Alpha, OutOfRange) {
  Rng rng(3);
  const auto b = sample_measurement_matrices(2, 4, 3, Ensemble::Gaussian, rng);
  EXPECT_THROW(alpha_squared(b, SupportSet({0}, 4), 0.0, 4), InvalidInput);
}

TEST(Separation, IdenticalStatsFail) {
  const auto s = constant_stats(2.0, 50, true);
  const auto r = separation_holds(s, s, 0.1, 1.0, 1.0);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_GT(r.rhs, 0.0);
  EXPECT_FALSE(r.holds);
}

TEST(Separation, LargeNLimitHolds) {
  const std::size_t n = 10000;
  const auto in = constant_stats(1.0, n, true);
  const auto out = constant_stats(0.0, n, false);
  const auto r = separation_holds(in, out, std::exp(-1.0), 1.0, 1.0);
  EXPECT_NEAR(r.nu_in, 1.0 / std::sqrt(static_cast<double>(n)), 1e-12);
  EXPECT_EQ(r.nu_out, 0.0);
  EXPECT_TRUE(r.holds);
}

TEST(Separation, RadiusFormula) {
  AlphaStats s;
  s.values = {1.0, 2.0, 3.0, 4.0};
  const double log_term = std::log(1.0 / 0.01);
  const double quad = std::sqrt(2.0 / 16.0 * 30.0 * log_term);
  const double lin = 3.0 / 4.0 * 4.0 * log_term;
  EXPECT_NEAR(separation_radius(s, 0.01, {2.0, 3.0}), std::max(quad, lin), 1e-12);
}

TEST(Separation, MismatchedLengths) {
  EXPECT_THROW(separation_holds(constant_stats(1, 3, true), constant_stats(1, 4, false), 0.1, 1, 1), InvalidInput);
}

TEST(Separation, AllPairsAgreesWithPairwise) {
  Rng rng(4);
  const auto b = sample_measurement_matrices(2, 12, 300, Ensemble::Gaussian, rng);
  const SupportSet s({0, 5, 7}, 12);
  const auto stats = alpha_squared_all(b, s, 0.0);
  for (double c : {0.05, 0.3, 1.0}) {
    const SeparationConstants constants{c, c};
    std::size_t violations = 0;
    std::size_t pairs = 0;
    for (const auto& in : stats) {
      if (!in.in_support) continue;
      for (const auto& out : stats) {
        if (out.in_support) continue;
        ++pairs;
        if (!separation_holds(in, out, 0.01, c, c).holds) ++violations;
      }
    }
    const auto summary = separation_all_pairs(stats, 0.01, constants);
    EXPECT_EQ(summary.pairs, pairs);
    EXPECT_EQ(summary.violations, violations);
  }
}

TEST(Separation, DefaultDeltaPrime) {
  EXPECT_NEAR(default_delta_prime(1.0 / 3.0, 10, 100), 1.0 / 3.0 / 360.0, 1e-15);
  EXPECT_NEAR(default_delta_prime(0.5, 80, 100), 0.5 / 320.0, 1e-15);
}

TEST(Subexp, TailBound) {
  EXPECT_EQ(subexp_tail_bound({1.0, 1.0}, 1.0), 1.0);  // 2 e^{-1/2} > 1
  EXPECT_EQ(subexp_tail_bound({1.0, 1.0}, 0.0), 1.0);
  EXPECT_EQ(subexp_tail_bound({0.0, 1.0}, 1.0), 1.0);
  EXPECT_NEAR(subexp_tail_bound({1.0, 1.0}, 4.0), 2.0 * std::exp(-2.0), 1e-15);
  EXPECT_NEAR(subexp_tail_bound({0.0, 1.0}, 4.0), 2.0 * std::exp(-2.0), 1e-15);
  EXPECT_NEAR(subexp_tail_bound({4.0, 0.0}, 6.0), 2.0 * std::exp(-4.5), 1e-15);
  EXPECT_THROW(subexp_tail_bound({1.0, 1.0}, -1.0), InvalidInput);
}

TEST(Subexp, SubgaussianSquare) {
  const auto p = subgaussian_square_params(1.0);
  EXPECT_EQ(p.v2, 128.0);
  EXPECT_EQ(p.b, 8.0);
  const auto z = subgaussian_square_params(0.0);
  EXPECT_EQ(z.v2, 0.0);
  EXPECT_EQ(z.b, 0.0);
  const auto q = subgaussian_square_params(0.25);
  EXPECT_EQ(q.v2, 8.0);
  EXPECT_EQ(q.b, 2.0);
}

TEST(Subexp, Combine) {
  const std::vector<SubexpParams> one{{4.0, 2.0}};
  const auto a = subexp_combine(one, 0.5);
  EXPECT_EQ(a.v2, 1.0);
  EXPECT_EQ(a.b, 1.0);
  const std::vector<SubexpParams> many(10, SubexpParams{3.0, 2.0});
  const auto b = subexp_combine(many, 0.1);
  EXPECT_NEAR(b.v2, 0.3, 1e-15);
  EXPECT_NEAR(b.b, 0.2, 1e-15);
  const auto c = subexp_combine(many, 0.0);
  EXPECT_EQ(c.v2, 0.0);
  EXPECT_EQ(c.b, 0.0);
  EXPECT_THROW(subexp_combine(std::vector<SubexpParams>{}, 1.0), InvalidInput);
}

TEST(Moments, GaussianM4) {
  Rng rng(5);
  const auto r = moment_suite(Ensemble::Gaussian, 4, 100000, rng);
  EXPECT_DOUBLE_EQ(r.norm4.bound, 1.5);
  EXPECT_DOUBLE_EQ(r.inner2.bound, 0.25);
  EXPECT_TRUE(r.pass);
}

TEST(Moments, GaussianM1) {
  Rng rng(6);
  const auto r = moment_suite(Ensemble::Gaussian, 1, 100000, rng);
  EXPECT_DOUBLE_EQ(r.norm4.bound, 3.0);
  EXPECT_NEAR(r.norm4.estimate, 3.0, 4.0 * r.norm4.std_error);
  EXPECT_TRUE(r.pass);
}

TEST(Moments, RademacherNormIsExactlyOne) {
  for (std::size_t m : {1, 3, 16}) {
    Rng rng(7);
    const auto r = moment_suite(Ensemble::Rademacher, m, 2000, rng);
    EXPECT_NEAR(r.norm4.estimate, 1.0, 1e-12);
    EXPECT_LE(r.norm4.std_error, 1e-12);
    EXPECT_TRUE(r.pass);
  }
}
