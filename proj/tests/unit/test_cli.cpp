#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "suprec_cli/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = suprec::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("suprec_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const json& j) const {
    std::ofstream(path(name)) << j.dump();
    return path(name);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenWritesDatasetAndIsDeterministic) {
  const auto cfg = write("cfg.json", json{{"d", 20}, {"k", 3}, {"m", 2}, {"n", 50}});
  auto r = run({"gen", "--config", cfg, "--out", path("a.json"), "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run({"gen", "--config", cfg, "--out", path("b.json"), "--seed", "7"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  const auto ds = json::parse(slurp(path("a.json")));
  EXPECT_EQ(ds["format_version"], 1);
  EXPECT_EQ(ds["config"]["master_seed"], 7);
  EXPECT_EQ(ds["support"].size(), 3u);
  EXPECT_EQ(ds["matrices"].size(), 50u);
  EXPECT_EQ(ds["observations"].size(), 50u);
}

TEST_F(CliTest, GenRejectsKAboveD) {
  const auto cfg = write("cfg.json", json{{"d", 5}, {"k", 6}, {"m", 2}, {"n", 50}});
  EXPECT_EQ(run({"gen", "--config", cfg, "--out", path("a.json")}).code, 2);
}

TEST_F(CliTest, OverridesWinOverFileAndSeedFlagWins) {
  const auto cfg = write("cfg.json", json{{"d", 20}, {"k", 3}, {"m", 2}, {"n", 50}, {"master_seed", 1}});
  ASSERT_EQ(run({"gen", "--config", cfg, "--out", path("a.json"), "n=12", "master_seed=5", "--seed", "9"}).code, 0);
  const auto ds = json::parse(slurp(path("a.json")));
  EXPECT_EQ(ds["config"]["n"], 12);
  EXPECT_EQ(ds["config"]["master_seed"], 9);
}

TEST_F(CliTest, RecoverExactOnLargeN) {
  ASSERT_EQ(run({"gen", "--out", path("ds.json"), "d=20", "k=3", "m=2", "n=3000"}).code, 0);
  const auto r = run({"recover", "--data", path("ds.json"), "--strict"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["verdict"], "exact");
  EXPECT_EQ(j["config"]["n"], 3000);
  EXPECT_EQ(j["estimated_support"], j["true_support"]);
}

TEST_F(CliTest, RecoverStrictMismatchExitsOne) {
  ASSERT_EQ(run({"gen", "--out", path("ds.json"), "d=20", "k=3", "m=2", "n=3000"}).code, 0);
  auto ds = json::parse(slurp(path("ds.json")));
  const auto truth = ds["support"];
  int other = 1;
  while (std::find(truth.begin(), truth.end(), json(other)) != truth.end()) ++other;
  ds["support"][0] = other;
  std::sort(ds["support"].begin(), ds["support"].end());
  write("bad.json", ds);
  EXPECT_EQ(run({"recover", "--data", path("bad.json"), "--strict"}).code, 1);
  const auto lax = run({"recover", "--data", path("bad.json")});
  EXPECT_EQ(lax.code, 0);
  EXPECT_EQ(json::parse(lax.out)["verdict"], "mismatch");
}

TEST_F(CliTest, RecoverWithoutTruthIsUnknown) {
  ASSERT_EQ(run({"gen", "--out", path("ds.json"), "d=10", "k=2", "m=2", "n=30"}).code, 0);
  auto ds = json::parse(slurp(path("ds.json")));
  ds.erase("support");
  write("nt.json", ds);
  const auto r = run({"recover", "--data", path("nt.json"), "--strict"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["verdict"], "unknown");
}

TEST_F(CliTest, RecoverThresholdMethod) {
  ASSERT_EQ(run({"gen", "--out", path("ds.json"), "d=20", "k=3", "m=2", "n=3000"}).code, 0);
  const auto r = run({"recover", "--data", path("ds.json"), "--method", "threshold"});
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["tau"].get<double>(), 1.5 + 0.75);
}

TEST_F(CliTest, RecoverMalformedDataset) {
  write("junk.json", json{{"format_version", 1}, {"config", {{"d", 3}, {"k", 1}, {"m", 1}, {"n", 2}}}, {"matrices", 5}});
  EXPECT_EQ(run({"recover", "--data", path("junk.json")}).code, 2);
  std::ofstream(path("text.json")) << "not json";
  EXPECT_EQ(run({"recover", "--data", path("text.json")}).code, 2);
}

TEST_F(CliTest, SweepCsvNormalizeAndMirror) {
  const auto spec = write("spec.json", json{{"base", {{"d", 100}, {"k", 10}, {"m", 2}, {"n", 100}}},
                                            {"grid", {{{"parameter", "n"}, {"values", {200, 400}}}}},
                                            {"trials_per_point", 3}});
  const auto r = run({"sweep", "--spec", spec, "--out", path("a.csv"), "--json", path("a.json"), "--plot",
                      path("p.json"), "--normalize", "fano"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(path("a.csv"));
  EXPECT_NE(csv.find(",200,0,gaussian,gaussian,3,"), std::string::npos);
  const auto mirror = json::parse(slurp(path("a.json")));
  EXPECT_EQ(mirror["spec"]["normalization"], "fano_lb");
  EXPECT_NEAR(mirror["rows"][0]["normalized_n"].get<double>(), 200.0 / 69.65652237644096, 1e-9);
  EXPECT_EQ(json::parse(slurp(path("p.json")))["series"].size(), 1u);

  ASSERT_EQ(run({"sweep", "--spec", spec, "--out", path("b.csv"), "--normalize", "fano"}).code, 0);
  EXPECT_EQ(csv, slurp(path("b.csv")));
}

TEST_F(CliTest, SweepBudgetAndMissingSpec) {
  const auto spec = write("spec.json", json{{"base", {{"d", 100}, {"k", 10}, {"m", 2}, {"n", 100}}},
                                            {"grid", {{{"parameter", "n"}, {"values", {100}}}}},
                                            {"trials_per_point", 2},
                                            {"op_budget", 10}});
  EXPECT_EQ(run({"sweep", "--spec", spec, "--out", path("a.csv")}).code, 3);
  EXPECT_EQ(run({"sweep", "--spec", spec, "--out", path("a.csv"), "--force"}).code, 0);
  EXPECT_EQ(run({"sweep", "--spec", path("missing.json")}).code, 2);
}

TEST_F(CliTest, Bounds) {
  auto r = run({"bounds", "--m", "2", "--k", "10", "--d", "100"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out)["bounds"]["n_upper"].get<double>(), 284.436, 1e-3);
  r = run({"bounds", "--m", "6", "--k", "10", "--d", "100"});
  EXPECT_EQ(json::parse(r.out)["bounds"]["lower_in_regime"], false);
  EXPECT_EQ(run({"bounds", "--k", "10", "--d", "10"}).code, 2);
}

TEST_F(CliTest, VerifyExitCodes) {
  EXPECT_EQ(run({"verify", "nope"}).code, 2);
  const auto r = run({"verify", "wishart", "--k", "10", "--m", "5"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["reports"][0]["status"], "skipped");
  const auto m = run({"verify", "moments", "--trials", "5000", "--seed", "3"});
  EXPECT_EQ(m.code, 0);
  EXPECT_EQ(json::parse(m.out)["seed"], 3);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"gen"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}
