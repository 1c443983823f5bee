#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dualsrc/cli.hpp"
#include "dualsrc/config.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "dualsrc");
  std::ostringstream out, err;
  const int code = dualsrc::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dualsrc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& text) {
    const auto path = dir_ / "config.json";
    std::ofstream(path) << text;
    return path.string();
  }
  std::string read(const std::string& name) {
    std::ifstream f(dir_ / "out" / name);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
  }
  std::string out_dir() const { return (dir_ / "out").string(); }

  fs::path dir_;
};

const char* kTiny = R"({
  "seed": 11,
  "instance": {"p": 9, "h": 1, "c_e": 5, "l_e": 0, "l_r": 2,
               "demand": {"family": "empirical", "pmf": [0.2, 0.5, 0.3]}},
  "policy": {"family": "peip", "S_e": 2, "V": 0.5},
  "families": ["peip", "tbs"],
  "simulation": {"rel_halfwidth_target": 0.03},
  "dp": {"I_min": -6, "I_max": 6, "q_max": 4}
})";

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_F(CliTest, TestbedWritesFullGrid) {
  const auto r = run({"testbed", "--config", write_config("{}"), "--out-dir", out_dir()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(read("instances.csv")), 361u);
}

TEST_F(CliTest, BoundsPrintsJson) {
  const auto r = run({"bounds", "--config", write_config(kTiny), "--out-dir", out_dir()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = dualsrc::Json::parse(r.out);
  EXPECT_GT(j.at("lower_bound").get<double>(), 0);
  EXPECT_LT(j.at("lower_bound").get<double>(), j.at("single_regular_cost").get<double>());
  EXPECT_EQ(j.at("seed").get<int>(), 11);
  EXPECT_EQ(dualsrc::Json::parse(read("bounds.json")), j);
}

TEST_F(CliTest, EvaluateWithTrace) {
  const auto cfg = write_config(kTiny);
  const auto r = run({"evaluate", "--config", cfg, "--out-dir", out_dir(), "--trace"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(read("results.csv")), 2u);
  EXPECT_GT(lines(read("trace.csv")), 100u);
  const std::string first = read("results.csv");
  ASSERT_EQ(run({"evaluate", "--config", cfg, "--out-dir", out_dir()}).code, 0);
  EXPECT_EQ(read("results.csv"), first);
  ASSERT_EQ(run({"evaluate", "--config", cfg, "--out-dir", out_dir(), "--seed", "12"}).code, 0);
  EXPECT_NE(read("results.csv"), first);
}

TEST_F(CliTest, DpSolve) {
  const auto r = run({"dp-solve", "--config", write_config(kTiny), "--out-dir", out_dir()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = dualsrc::Json::parse(read("dp.json"));
  EXPECT_TRUE(j.at("converged").get<bool>());
  EXPECT_GT(j.at("g_star").get<double>(), 0);
}

TEST_F(CliTest, OptimizeWritesBest) {
  const auto r = run({"optimize", "--config", write_config(kTiny), "--out-dir", out_dir()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(read("results.csv")), 3u);
  const auto best = dualsrc::Json::parse(read("best.json"));
  EXPECT_FALSE(best.empty());
}

TEST_F(CliTest, Errors) {
  EXPECT_NE(run({"frobnicate"}).code, 0);
  EXPECT_NE(run({}).code, 0);
  EXPECT_NE(run({"bounds"}).code, 0);
  EXPECT_NE(run({"bounds", "--config", (dir_ / "missing.json").string()}).code, 0);
  const auto bad = run({"bounds", "--config", write_config("{\"instance\": "), "--out-dir", out_dir()});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("error:"), std::string::npos);
  const auto unknown = run({"bounds", "--config", write_config(R"({"instanse": {}})"), "--out-dir", out_dir()});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("instanse"), std::string::npos);
  EXPECT_EQ(run({"--help"}).code, 0);
}
