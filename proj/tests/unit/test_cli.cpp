// Command-line front end: exit codes, output files and determinism.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "cramerlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cramerlab::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

// Data rows of a CSV file (comment lines and header dropped), split on commas.
std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::vector<std::string>> out;
  bool header = true;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cramerlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, CoeffsRademacher) {
  auto r = run({"coeffs", "--model", "rademacher", "--n", "400", "--m", "5", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = load_json(dir_ / "coefficients.json");
  EXPECT_DOUBLE_EQ(doc["eps_m"].get<double>(), 0.25);
  EXPECT_DOUBLE_EQ(doc["gamma_m"].get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(doc["delta_m"].get<double>(), 0.0);
  EXPECT_EQ(doc["manifest"]["tool"], "cramerlab");
  EXPECT_EQ(doc["manifest"]["config_hash"].get<std::string>().size(), 16u);
}

TEST_F(CliTest, CoeffsTruncation) {
  auto r = run({"coeffs", "--model", "two_state:rho=0.4", "--n", "120", "--m", "6", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = load_json(dir_ / "coefficients.json");
  EXPECT_LT(doc["truncation"]["gamma_truncation_error"].get<double>(), 1e-10);
  EXPECT_GT(doc["gamma_m"].get<double>(), 0.0);
}

TEST_F(CliTest, AutomaticBlockSize) {
  auto r = run({"coeffs", "--model", "two_state:rho=0.4", "--n", "128", "--beta", "2", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_json(dir_ / "coefficients.json")["m"], 4);
  r = run({"coeffs", "--model", "two_state:rho=0.4", "--n", "1024", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_json(dir_ / "coefficients.json")["m"], 7);
}

TEST_F(CliTest, ExitCodes) {
  auto missing = run({"coeffs", "--model", (dir_ / "nope.model").string(), "--out", dir_.string()});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("nope.model"), std::string::npos);

  auto bogus = run({"frobnicate"});
  EXPECT_EQ(bogus.code, 2);
  EXPECT_NE((bogus.err + bogus.out).find("coeffs"), std::string::npos);

  EXPECT_EQ(run({"verify", "--C", "-1", "--out", dir_.string()}).code, 2);
  EXPECT_EQ(run({"coeffs", "--model", "two_state:rho=1.5", "--out", dir_.string()}).code, 3);
  EXPECT_EQ(run({"coeffs", "--model", "no_such_builtin", "--out", dir_.string()}).code, 3);
  EXPECT_EQ(run({"coeffs", "--n", "10", "--m", "20", "--out", dir_.string()}).code, 2);
  EXPECT_EQ(run({"coeffs", "--gate-mode", "sloppy", "--out", dir_.string()}).code, 2);
}

TEST_F(CliTest, ModelFile) {
  const auto path = dir_ / "chain.model";
  std::ofstream(path) << "states = a b\ntransition = 0.8 0.2\n 0.3 0.7\nf_num = 0 2\ndenom = 1\n";
  auto r = run({"coeffs", "--model", path.string(), "--n", "200", "--m", "4", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto bad = dir_ / "bad.model";
  std::ofstream(bad) << "states = a b\ntransition = 1 0 0 1\nf_num = 0 1\n";
  EXPECT_EQ(run({"coeffs", "--model", bad.string(), "--out", dir_.string()}).code, 3);
}

TEST_F(CliTest, ConfigFileOverrides) {
  const auto cfg = dir_ / "run.json";
  std::ofstream(cfg) << R"({"model": "rademacher", "n": 400, "m": 5})";
  auto r = run({"coeffs", "--config", cfg.string(), "--n", "100", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = load_json(dir_ / "coefficients.json");
  EXPECT_EQ(doc["n"], 400);
  EXPECT_DOUBLE_EQ(doc["eps_m"].get<double>(), 0.25);
  std::ofstream(cfg) << R"({"model": "rademacher", "colour": "blue"})";
  EXPECT_EQ(run({"coeffs", "--config", cfg.string(), "--out", dir_.string()}).code, 2);
}

TEST_F(CliTest, VerifyTwoState) {
  auto r = run({"verify", "--model", "two_state:rho=0.4", "--n", "1024", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"ratio.csv", "bounds.csv", "ks.json"}) {
    ASSERT_TRUE(fs::exists(dir_ / f)) << f;
    EXPECT_EQ(slurp(dir_ / f).find("\"tool\"") == std::string::npos &&
                  slurp(dir_ / f).find("# tool=cramerlab") == std::string::npos,
              false)
        << f;
  }
  auto ratio = rows(dir_ / "ratio.csv");
  ASSERT_EQ(ratio.size(), 31u);
  // the ratio deviates least near the origin and grows into the tail
  const double near = std::abs(std::stod(ratio[1][1]) - 1.0);
  const double far = std::abs(std::stod(ratio[30][1]) - 1.0);
  EXPECT_LT(near, far);
  auto bounds = rows(dir_ / "bounds.csv");
  for (const auto& row : bounds) {
    EXPECT_NE(row[3], "0");   // bernstein_ok
    EXPECT_NE(row[11], "0");  // sandwich_ok
  }
}

TEST_F(CliTest, VerifyRademacherRatio) {
  auto r = run({"verify", "--model", "rademacher", "--n", "100", "--m", "5", "--x-min", "0", "--x-max", "2",
                "--x-count", "21", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto ratio = rows(dir_ / "ratio.csv");
  ASSERT_EQ(ratio.size(), 21u);
  EXPECT_DOUBLE_EQ(std::stod(ratio[10][0]), 1.0);
  EXPECT_NEAR(std::stod(ratio[10][1]), 1.16, 0.005);
  auto bounds = rows(dir_ / "bounds.csv");
  for (const auto& row : bounds) {
    EXPECT_NE(row[5], "0");  // freedman_ok
    EXPECT_NE(row[7], "0");  // peligrad_ok
  }
}

TEST_F(CliTest, Mdp) {
  auto r = run({"mdp", "--model", "rademacher", "--a", "0.25", "--c", "1", "--n-grid", "1000000", "--out",
                dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto data = rows(dir_ / "mdp.csv");
  ASSERT_EQ(data.size(), 1u);
  EXPECT_NEAR(std::stod(data[0][1]), -0.5, 0.05);
  EXPECT_EQ(run({"mdp", "--a", "0.7", "--out", dir_.string()}).code, 2);
}

TEST_F(CliTest, Coupling) {
  auto r = run({"coupling", "--model", "two_state:rho=0.4", "--n", "1024", "--draws", "100000", "--seed", "3",
                "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = load_json(dir_ / "coupling.json");
  EXPECT_EQ(doc["m"], 7);
  EXPECT_LT(doc["lambda_hat"].get<double>(), 0.0);
  EXPECT_EQ(rows(dir_ / "pairs.csv").size(), 100000u);
}

TEST_F(CliTest, Report) {
  auto r = run({"report", "--model", "two_state:rho=0.4", "--n", "256", "--draws", "5000", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"coefficients.json", "ratio.csv", "bounds.csv", "ks.json", "coupling.json", "pairs.csv",
                        "certificate.json", "dedecker.json"})
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  auto sampled = run({"report", "--model", "moving_average:c=1,L_trunc=10", "--n", "256", "--chains", "20000",
                      "--out", (dir_ / "ma").string()});
  ASSERT_EQ(sampled.code, 0) << sampled.err;
  EXPECT_TRUE(fs::exists(dir_ / "ma" / "tails.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "ma" / "certificate.json"));
}

TEST_F(CliTest, VerifyMcDeterministicAcrossThreads) {
  const auto a = dir_ / "a", b = dir_ / "b";
  const std::vector<std::string> common{"verify", "--model", "two_state:rho=0.4", "--n", "512", "--mode", "mc",
                                        "--chains", "20000", "--seed", "11"};
  auto args_a = common, args_b = common;
  args_a.insert(args_a.end(), {"--threads", "1", "--out", a.string()});
  args_b.insert(args_b.end(), {"--threads", "4", "--out", b.string()});
  ASSERT_EQ(run(args_a).code, 0);
  ASSERT_EQ(run(args_b).code, 0);
  for (const char* f : {"ratio.csv", "bounds.csv", "tails.csv", "ks.json"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(CanonicalConfig, ExcludesThreadsAndOutput) {
  cramerlab::cli::RunConfig x, y;
  y.threads = 8;
  y.out = "/elsewhere";
  EXPECT_EQ(cramerlab::cli::canonical_config(x), cramerlab::cli::canonical_config(y));
  y.seed = 2;
  EXPECT_NE(cramerlab::cli::canonical_config(x), cramerlab::cli::canonical_config(y));
}
