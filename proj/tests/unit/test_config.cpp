#include <cstdlib>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "suprec/config.hpp"
#include "suprec/errors.hpp"
#include "suprec/rng.hpp"

using namespace suprec;

TEST(Config, DefaultsValidate) {
  ProblemConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.variance_mode(), VarianceMode::Binary);
}

TEST(Config, RejectsBadValues) {
  ProblemConfig cfg;
  cfg.k = cfg.d + 1;
  EXPECT_THROW(cfg.validate(), InvalidConfig);
  cfg = {};
  cfg.k = 0;
  EXPECT_THROW(cfg.validate(), InvalidConfig);
  cfg = {};
  cfg.m = 0;
  EXPECT_THROW(cfg.validate(), InvalidConfig);
  cfg = {};
  cfg.sigma2 = -0.1;
  EXPECT_THROW(cfg.validate(), InvalidConfig);
  cfg = {};
  cfg.lambda_min = 2.0;
  cfg.lambda_max = 1.0;
  EXPECT_THROW(cfg.validate(), InvalidConfig);
}

TEST(Config, JsonRoundTrip) {
  ProblemConfig cfg;
  cfg.d = 40;
  cfg.k = 4;
  cfg.m = 3;
  cfg.n = 77;
  cfg.sigma2 = 0.25;
  cfg.prior = Prior::Rademacher;
  cfg.ensemble = Ensemble::Rademacher;
  cfg.lambda_min = 0.5;
  cfg.lambda_max = 2.0;
  cfg.master_seed = 123456789012345ULL;
  EXPECT_EQ(config_from_json(to_json(cfg)), cfg);
}

TEST(Config, JsonRequiredAndUnknownFields) {
  EXPECT_THROW(config_from_json(nlohmann::json{{"d", 10}, {"k", 2}, {"m", 1}}), InvalidConfig);
  EXPECT_THROW(config_from_json(nlohmann::json{{"d", 10}, {"k", 2}, {"m", 1}, {"n", 5}, {"bogus", 1}}), InvalidConfig);
  EXPECT_THROW(config_from_json(nlohmann::json{{"d", 10}, {"k", 2}, {"m", 1}, {"n", 5}, {"format_version", 99}}),
               InvalidConfig);
  const auto cfg = config_from_json(nlohmann::json{{"d", 10}, {"k", 2}, {"m", 1}, {"n", 5}}, 42);
  EXPECT_EQ(cfg.master_seed, 42u);
  EXPECT_EQ(cfg.prior, Prior::Gaussian);
}

TEST(Config, Overrides) {
  ProblemConfig cfg;
  cfg.apply_override("n=250");
  cfg.apply_override("sigma2=0.5");
  cfg.apply_override("prior=rademacher");
  EXPECT_EQ(cfg.n, 250u);
  EXPECT_DOUBLE_EQ(cfg.sigma2, 0.5);
  EXPECT_EQ(cfg.prior, Prior::Rademacher);
  EXPECT_THROW(cfg.apply_override("zeta=1"), InvalidConfig);
  EXPECT_THROW(cfg.apply_override("n"), InvalidConfig);
  EXPECT_THROW(cfg.apply_override("n=abc"), InvalidConfig);
}

TEST(Config, VarianceRatioFeasibility) {
  ProblemConfig cfg;
  cfg.k = 10;
  cfg.m = 2;
  cfg.lambda_min = 0.95;
  cfg.lambda_max = 1.0;
  EXPECT_TRUE(cfg.variance_ratio_feasible());  // 0.95 > 10/11
  cfg.lambda_min = 0.5;
  EXPECT_FALSE(cfg.variance_ratio_feasible());
}

TEST(Config, SeedFromEnvironment) {
  ::setenv("SUPREC_SEED", "987", 1);
  EXPECT_EQ(seed_from_environment(), std::optional<std::uint64_t>(987));
  ::setenv("SUPREC_SEED", "nope", 1);
  EXPECT_FALSE(seed_from_environment().has_value());
  ::unsetenv("SUPREC_SEED");
  EXPECT_FALSE(seed_from_environment().has_value());
}

TEST(Rng, SplitmixReferenceValues) {
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(splitmix64(1), 0x910a2dec89025cc1ULL);
}

TEST(Rng, DerivedStreamsDiffer) {
  EXPECT_EQ(derive_seed(1, 2, StreamTag::Noise), derive_seed(1, 2, StreamTag::Noise));
  EXPECT_NE(derive_seed(1, 2, StreamTag::Noise), derive_seed(1, 2, StreamTag::Signals));
  EXPECT_NE(derive_seed(1, 2, StreamTag::Noise), derive_seed(1, 3, StreamTag::Noise));
  EXPECT_NE(derive_seed(1, 2, StreamTag::Noise), derive_seed(2, 2, StreamTag::Noise));
  EXPECT_NE(hash_combine(1, 2), hash_combine(2, 1));
}
