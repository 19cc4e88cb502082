#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "strata/cli.hpp"

using namespace strata;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("strata_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliOptions options(const std::string& config_body, const std::string& out = "out") {
    auto path = dir_ / "config.json";
    std::ofstream(path) << config_body;
    CliOptions o;
    o.config = path.string();
    o.out = dir_ / out;
    o.log = &log_;
    return o;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream log_;
};

const char* kSmallSuite = R"({
  "schema_version": 1, "seed": 99,
  "cases": [
    {"name": "d", "tag": "log-holder", "family": {"kind": "discrete", "count": 50}},
    {"name": "g", "tag": "gross", "group": "euclidean:1", "grid": {"half_width": 10, "points": 256},
     "family": {"kind": "gaussian-mixture", "count": 4, "components": 2, "width": [0.6, 1.4], "spread": 1.0}},
    {"name": "n", "tag": "nash", "group": "euclidean:2", "grid": {"half_width": 8, "points": 96},
     "family": {"kind": "gaussian-mixture", "count": 3}, "params": {"a": 1}}
  ]
})";

}  // namespace

TEST_F(CliTest, EmptySuite) {
  auto o = options(R"({"schema_version": 1, "cases": []})");
  EXPECT_EQ(cmd_verify(o), kExitOk);
  auto j = nlohmann::json::parse(slurp(o.out / "reports.json"));
  EXPECT_TRUE(j.is_array());
  EXPECT_TRUE(j.empty());
  EXPECT_EQ(slurp(o.out / "summary.csv"), "case,lhs,rhs,slack,verdict\n");
}

TEST_F(CliTest, LogHardyWindowRejected) {
  auto o = options(R"({"schema_version": 1, "cases": [
    {"name": "bad", "tag": "log-sobolev-weighted", "group": "euclidean:3",
     "grid": {"half_width": 5, "points": 24}, "family": {"kind": "gaussian-mixture"},
     "params": {"a": 1, "p": 2, "beta": 2.5}, "norm": {"kind": "lp", "p": 2}}]})");
  EXPECT_EQ(cmd_verify(o), kExitConfig);
  EXPECT_NE(log_.str().find("log-Hardy regime excluded"), std::string::npos);
  EXPECT_NE(log_.str().find("case 'bad'"), std::string::npos);
  EXPECT_FALSE(fs::exists(o.out / "reports.json"));
}

TEST_F(CliTest, UnknownKeysRejected) {
  EXPECT_EQ(cmd_verify(options(R"({"schema_version": 1, "cases": [], "extra": 1})")), kExitConfig);
  EXPECT_EQ(cmd_verify(options(R"({"schema_version": 1, "cases": [
    {"name": "x", "tag": "interp", "family": {"kind": "discrete", "colour": "red"}}]})")), kExitConfig);
  EXPECT_NE(log_.str().find("colour"), std::string::npos);
}

TEST_F(CliTest, MalformedConfigs) {
  EXPECT_EQ(cmd_verify(options("{not json")), kExitConfig);
  EXPECT_EQ(cmd_verify(options(R"({"schema_version": 7, "cases": []})")), kExitConfig);
  EXPECT_EQ(cmd_verify(options(R"({"schema_version": 1, "cases": [{"name": "x", "tag": "nope",
    "family": {"kind": "discrete"}}]})")), kExitConfig);
  EXPECT_EQ(cmd_verify(options(R"({"schema_version": 1, "cases": [
    {"name": "x", "tag": "interp", "family": {"kind": "discrete"}},
    {"name": "x", "tag": "interp", "family": {"kind": "discrete"}}]})")), kExitConfig);
}

TEST_F(CliTest, SmallSuiteDeterministic) {
  auto o = options(kSmallSuite, "a");
  EXPECT_EQ(cmd_verify(o), kExitOk);
  auto o2 = options(kSmallSuite, "b");
  o2.jobs = 4;
  EXPECT_EQ(cmd_verify(o2), kExitOk);
  EXPECT_EQ(slurp(o.out / "reports.json"), slurp(o2.out / "reports.json"));
  EXPECT_EQ(slurp(o.out / "summary.csv"), slurp(o2.out / "summary.csv"));
  auto j = nlohmann::json::parse(slurp(o.out / "reports.json"));
  ASSERT_EQ(j.size(), 57u);
  for (const auto& r : j) {
    EXPECT_EQ(r["verdict"], "holds");
    EXPECT_TRUE(r.contains("seed"));
  }
  EXPECT_EQ(j[50]["tag"], "gross");
  EXPECT_EQ(j[50]["constant"]["direction"], "exact");
}

TEST_F(CliTest, SeedOverrideChangesMembers) {
  auto o = options(kSmallSuite, "a");
  EXPECT_EQ(cmd_verify(o), kExitOk);
  auto o2 = options(kSmallSuite, "b");
  o2.seed = 7;
  EXPECT_EQ(cmd_verify(o2), kExitOk);
  EXPECT_NE(slurp(o.out / "reports.json"), slurp(o2.out / "reports.json"));
}

TEST_F(CliTest, ViolationExitsOne) {
  auto o = options(R"({"schema_version": 1, "cases": [
    {"name": "tiny-A", "tag": "log-sobolev", "group": "euclidean:1", "grid": {"half_width": 10, "points": 128},
     "family": {"kind": "gaussian-mixture", "count": 2}, "params": {"a": 1, "p": 2},
     "constant": {"value": 1e-3, "direction": "exact"}}]})");
  EXPECT_EQ(cmd_verify(o), kExitViolated);
  auto j = nlohmann::json::parse(slurp(o.out / "reports.json"));
  EXPECT_EQ(j[0]["verdict"], "violated");
}

TEST_F(CliTest, LowerBoundConstantRefinesInsteadOfViolating) {
  auto o = options(R"({"schema_version": 1, "cases": [
    {"name": "tiny-A", "tag": "log-sobolev", "group": "euclidean:1", "grid": {"half_width": 10, "points": 128},
     "family": {"kind": "gaussian-mixture", "count": 2}, "params": {"a": 1, "p": 2},
     "constant": {"value": 1e-3, "direction": "lower-bound"}}]})");
  EXPECT_EQ(cmd_verify(o), kExitOk);
  auto j = nlohmann::json::parse(slurp(o.out / "reports.json"));
  EXPECT_EQ(j[0]["verdict"], "constant-refined");
}

TEST_F(CliTest, ConstantsTable) {
  const char* cfg = R"({"schema_version": 1, "rows": [
    {"quantity": "A", "group": "euclidean:1"}, {"quantity": "A", "group": "euclidean:3"},
    {"quantity": "gamma", "group": "euclidean:2"},
    {"quantity": "d0", "group": "euclidean:2", "a": 1, "p": 2, "q": 3, "grid": {"half_width": 8, "points": 64}}]})";
  auto o = options(cfg, "a");
  EXPECT_EQ(cmd_constants(o), kExitOk);
  auto rows = read_constants_csv((o.out / "constants.csv").string());
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_DOUBLE_EQ(lookup_constant(rows, "A", "euclidean:1").value, 2.0 / (std::numbers::pi * std::numbers::e));
  EXPECT_DOUBLE_EQ(lookup_constant(rows, "A", "euclidean:3").value, 2.0 / (3.0 * std::numbers::pi * std::numbers::e));
  EXPECT_EQ(lookup_constant(rows, "A", "euclidean:3").provenance, "closed-form");
  EXPECT_EQ(lookup_constant(rows, "A", "euclidean:3").direction, BoundDirection::Exact);
  EXPECT_NEAR(lookup_constant(rows, "gamma", "euclidean:2").value, 1.0 / (2.0 * std::numbers::pi), 1e-15);
  EXPECT_EQ(lookup_constant(rows, "d0", "euclidean:2").direction, BoundDirection::UpperBoundOnD0);
  EXPECT_THROW(lookup_constant(rows, "A", "heisenberg:1"), InputError);
  auto o2 = options(cfg, "b");
  EXPECT_EQ(cmd_constants(o2), kExitOk);
  EXPECT_EQ(slurp(o.out / "constants.csv"), slurp(o2.out / "constants.csv"));
}

TEST_F(CliTest, ConstantFromTable) {
  auto o = options(R"({"schema_version": 1, "rows": [{"quantity": "A", "group": "euclidean:1"}]})", "tab");
  ASSERT_EQ(cmd_constants(o), kExitOk);
  std::string table = (o.out / "constants.csv").string();
  auto v = options(R"({"schema_version": 1, "cases": [
    {"name": "ls", "tag": "log-sobolev", "group": "euclidean:1", "grid": {"half_width": 10, "points": 128},
     "family": {"kind": "gaussian-mixture", "count": 2}, "params": {"a": 1, "p": 2},
     "constant": {"table": ")" + table + R"(", "name": "A"}}]})");
  EXPECT_EQ(cmd_verify(v), kExitOk);
  auto j = nlohmann::json::parse(slurp(v.out / "reports.json"));
  EXPECT_EQ(j[0]["constant"]["provenance"], "table:A:closed-form");
}

TEST_F(CliTest, HeatZeroRun) {
  auto o = options(R"({"schema_version": 1, "runs": [
    {"name": "zero", "group": "euclidean:1", "grid": {"half_width": 10, "points": 64},
     "initial": {"kind": "zero"}, "T": 1.0, "steps": 10}]})");
  EXPECT_EQ(cmd_heat(o), kExitOk);
  EXPECT_TRUE(fs::exists(o.out / "heat" / "zero.csv"));
  auto summary = slurp(o.out / "heat_summary.csv");
  EXPECT_NE(summary.find("zero,holds,1,"), std::string::npos);
}

TEST_F(CliTest, HeatGaussianOnPlane) {
  auto o = options(R"({"schema_version": 1, "runs": [
    {"name": "g", "group": "euclidean:2", "grid": {"half_width": 10, "points": 97},
     "initial": {"kind": "gaussian", "width": 1.0}, "T": 0.5, "steps": 20}]})");
  EXPECT_EQ(cmd_heat(o), kExitOk);
  EXPECT_TRUE(fs::exists(o.out / "heat" / "g.l2.dat"));
  EXPECT_TRUE(fs::exists(o.out / "heat" / "g.bound.dat"));
}

TEST_F(CliTest, HeatLeakWarnsOnly) {
  auto o = options(R"({"schema_version": 1, "runs": [
    {"name": "leaky", "group": "euclidean:1", "grid": {"half_width": 3, "points": 64},
     "initial": {"kind": "gaussian", "width": 1.0}, "T": 4.0, "steps": 10}]})");
  EXPECT_EQ(cmd_heat(o), kExitOk);
  EXPECT_NE(log_.str().find("leaks mass"), std::string::npos);
  EXPECT_NE(slurp(o.out / "heat_summary.csv").find("leaky,warning-leak"), std::string::npos);
}
