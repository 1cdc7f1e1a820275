#include "cli/commands.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "carefree/panel_io.hpp"

namespace carefree::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("carefree_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return path(name);
  }

  fs::path dir_;
};

TEST_F(CliTest, EbhSingleRejection) {
  const auto input = write("e.csv", "hypothesis,value\nh1,40\nh2,1\n");
  const Result r = invoke({"ebh", "--input", input, "--alpha", "0.05"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "k_star: 1\nrejected: h1\n");
}

TEST_F(CliTest, EbhAllAndNone) {
  const auto both = write("both.csv", "a,40\nb,40\n");
  EXPECT_EQ(invoke({"ebh", both}).out, "k_star: 2\nrejected: a,b\n");
  const auto none = write("none.csv", "a,39.9\nb,1\n");
  EXPECT_EQ(invoke({"ebh", none}).out, "k_star: 0\nrejected: \n");
  const auto inf = write("inf.csv", "a,inf\nb,0\n");
  EXPECT_EQ(invoke({"ebh", inf}).out, "k_star: 1\nrejected: a\n");
}

TEST_F(CliTest, EbhMalformedInputIsRuntimeFailure) {
  const auto bad = write("bad.csv", "hypothesis,value\na,1\nb,abc\n");
  const Result r = invoke({"ebh", bad});
  EXPECT_EQ(r.code, kRuntimeFailure);
  EXPECT_NE(r.err.find("line 3"), std::string::npos);
  const auto negative = write("neg.csv", "a,-1\n");
  EXPECT_EQ(invoke({"ebh", negative}).code, kRuntimeFailure);
  const auto extra = write("extra.csv", "a,1,2\n");
  EXPECT_EQ(invoke({"ebh", extra}).code, kRuntimeFailure);
  EXPECT_EQ(invoke({"ebh", path("missing.csv")}).code, kRuntimeFailure);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({}).code, kUsageError);
  EXPECT_EQ(invoke({"frobnicate"}).code, kUsageError);
  EXPECT_EQ(invoke({"counterexample", "--alpha", "0.6"}).code, kUsageError);
  EXPECT_EQ(invoke({"counterexample", "--alpha", "zero"}).code, kUsageError);
  EXPECT_EQ(invoke({"counterexample", "--horizon", "0"}).code, kUsageError);
  EXPECT_EQ(invoke({"check-adjuster", "--adjuster", "A9"}).code, kUsageError);
  EXPECT_EQ(invoke({"simulate", "--methods", "runmax,bogus", "--dry-run"}).code, kUsageError);
  EXPECT_EQ(invoke({"simulate", "--pi0", "0", "--dry-run"}).code, kUsageError);
  EXPECT_EQ(invoke({"ebh", "--alpha", "1.5", "x.csv"}).code, kUsageError);
  EXPECT_EQ(invoke({"--help"}).code, kSuccess);
}

TEST_F(CliTest, CheckAdjusterVerdicts) {
  for (const std::string name : {"A1", "A2"}) {
    const Result r = invoke({"check-adjuster", "--adjuster", name});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("adjuster: " + name + "\n"), std::string::npos);
    EXPECT_NE(r.out.find("integral: 1.0000000"), std::string::npos);
    EXPECT_NE(r.out.find("verdict: PASS\n"), std::string::npos);
  }
}

TEST_F(CliTest, CounterexampleJsonFields) {
  const Result r = invoke({"counterexample", "--horizon", "3", "--reps", "20000", "--seed", "3",
                           "--with-adjusted"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["alpha"].get<double>(), 0.05);
  EXPECT_EQ(j["horizon"].get<int>(), 3);
  EXPECT_EQ(j["reps"].get<int>(), 20000);
  EXPECT_DOUBLE_EQ(j["exhaustive_oracle"].get<double>(), 2.0 * 0.05 * 8.0 / 27.0);
  const double est = j["fdr_estimate"].get<double>();
  EXPECT_LE(std::abs(est - j["exhaustive_oracle"].get<double>()), 5.0 * j["fdr_se"].get<double>());
  EXPECT_DOUBLE_EQ(j["fdr_over_alpha"].get<double>(), est / 0.05);
  EXPECT_TRUE(j["adjusted"].contains("A1"));
  EXPECT_TRUE(j["adjusted"].contains("A2"));
  EXPECT_FALSE(Json::parse(invoke({"counterexample", "--horizon", "13", "--reps", "10"}).out)
                   .contains("exhaustive_oracle"));
}

TEST_F(CliTest, CounterexampleIndependentOfThreads) {
  const std::vector<std::string> base{"counterexample", "--horizon", "200", "--reps", "30000",
                                      "--seed", "9"};
  auto one = base;
  one.insert(one.end(), {"--threads", "1"});
  auto four = base;
  four.insert(four.end(), {"--threads", "4"});
  EXPECT_EQ(invoke(one).out, invoke(four).out);
}

TEST_F(CliTest, CounterexampleDumpPanelReadsBack) {
  const auto panel = path("panel.csv");
  const Result r = invoke({"counterexample", "--horizon", "15", "--reps", "10", "--dump-panel",
                           panel, "--dump-rep", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream values(panel);
  std::ifstream truth(path("panel.truth.csv"));
  const EProcessPanel read = read_panel_csv(values, truth);
  EXPECT_EQ(read.hypotheses(), 2U);
  EXPECT_EQ(read.horizon(), 15U);
  EXPECT_EQ(read.truth().k0(), 2U);
  const Json manifest = Json::parse(slurp(panel + ".manifest.json"));
  EXPECT_EQ(manifest["subcommand"], "counterexample");
  EXPECT_EQ(manifest["outputs"].size(), 2U);
}

TEST_F(CliTest, SimulateDryRunEchoesDefaults) {
  const Result r = invoke({"simulate", "--dry-run"});
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["k"].get<int>(), 200);
  EXPECT_EQ(j["t"].get<int>(), 2000);
  EXPECT_EQ(j["reps"].get<int>(), 10000);
  EXPECT_EQ(j["alpha"].get<double>(), 0.05);
  EXPECT_EQ(j["pi0"].get<double>(), 0.5);
  EXPECT_EQ(j["mu1"].get<double>(), 0.1);
  EXPECT_EQ(j["methods"], "standard,runmax,adjusted_A1,adjusted_A2");
  EXPECT_EQ(j["stride"].get<int>(), 10);
}

TEST_F(CliTest, SimulateZeroHorizonGivesZeros) {
  const auto out = path("zero.csv");
  const Result r = invoke({"simulate", "--k", "4", "--t", "0", "--reps", "5", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(slurp(out));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "time,method,metric,value");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.rfind(',')), ",0") << line;
  }
  EXPECT_EQ(rows, 12);
}

TEST_F(CliTest, SimulateUnwritablePathFails) {
  const Result r = invoke({"simulate", "--k", "4", "--t", "5", "--reps", "5", "--out",
                           path("no/such/dir/m.csv")});
  EXPECT_EQ(r.code, kRuntimeFailure);
  EXPECT_NE(r.err.find("cannot open"), std::string::npos);
}

Json without_runtime(Json manifest) {
  manifest.erase("runtime");
  return manifest;
}

TEST_F(CliTest, SimulateManifestReproducesOutput) {
  const auto out = path("m.csv");
  const Result first = invoke({"simulate", "--k", "6", "--t", "30", "--reps", "40", "--mu1",
                               "0.3", "--methods", "runmax,adjusted_A2", "--threads", "1",
                               "--out", out});
  ASSERT_EQ(first.code, 0) << first.err;
  const std::string csv = slurp(out);
  const Json manifest = Json::parse(slurp(out + ".manifest.json"));
  EXPECT_EQ(manifest["subcommand"], "simulate");
  EXPECT_EQ(manifest["seeds"]["corr_seed"].get<std::uint64_t>(), 20250611U);
  EXPECT_TRUE(manifest["runtime"].contains("wall_clock_seconds"));

  std::vector<std::string> argv = manifest["argv"].get<std::vector<std::string>>();
  argv.insert(argv.end(), {"--threads", "3"});
  fs::remove(out);
  ASSERT_EQ(invoke(argv).code, 0);
  EXPECT_EQ(slurp(out), csv);
  EXPECT_EQ(without_runtime(Json::parse(slurp(out + ".manifest.json"))),
            without_runtime(manifest));
}

}  // namespace
}  // namespace carefree::cli
