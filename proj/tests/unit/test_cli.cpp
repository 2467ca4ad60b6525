#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "oracles.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = optdict::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("OPTDICT_SEED");
    cov = dir.write("cov.json", "[[6.7708, 3.1250], [3.1250, 4.5833]]");
    mean = dir.write("mean.json", "[-0.75, 0.5]");
  }
  void TearDown() override { unsetenv("OPTDICT_SEED"); }

  std::string r2_dictionary() {
    const auto path = dir.file("r2.json").string();
    const auto r = run({"optimize", "--cov", cov, "--mean", mean, "--lengths", "2,1,1", "--out", path});
    EXPECT_EQ(r.code, 0) << r.err;
    return path;
  }

  oracle::TempDir dir;
  std::string cov;
  std::string mean;
};

}  // namespace

TEST_F(Cli, OptimizeReportsWorkedExampleCost) {
  const auto out = dir.file("d.json").string();
  const auto r = run({"optimize", "--cov", cov, "--mean", mean, "--lengths", "2,1,1", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = r.report();
  EXPECT_NEAR(rep["cost"].get<double>(), 5.1444, 1e-3);
  EXPECT_EQ(rep["effective_rank"], 2);
  EXPECT_EQ(rep["partition"]["blocks"], json::parse("[[1,2]]"));
  EXPECT_EQ(rep["meta"]["version"], "1");
  const auto dict = json::parse(oracle::read_text(out));
  EXPECT_EQ(dict["vectors"].size(), 3u);
  EXPECT_EQ(dict["meta"]["version"], "1");
}

TEST_F(Cli, OptimizeUniformSphereIsTight) {
  const auto half = dir.write("half.json", "[[0.5, 0], [0, 0.5]]");
  const auto r = run({"optimize", "--cov", half, "--lengths", "1,1,1", "--out", dir.file("t.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.report()["tight_frame"].get<bool>());
  EXPECT_LE(r.report()["tight_frame_residual"].get<double>(), 1e-8);
}

TEST_F(Cli, OptimizeFromSamples) {
  const auto csv = dir.write("s.csv", "x,y\n1,0\n-1,0\n0,2\n0,-2\n");
  const auto r = run({"optimize", "--samples", csv, "--lengths", "1,1", "--out", dir.file("s.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["dimension"], 2);
}

TEST_F(Cli, TooFewVectorsIsInfeasible) {
  const auto r = run({"optimize", "--cov", cov, "--lengths", "5", "--out", dir.file("x.json").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("K=1 < effective rank m=2"), std::string::npos) << r.err;
}

TEST_F(Cli, UnsortedLengthsWarnAndSort) {
  const auto r = run({"optimize", "--cov", cov, "--lengths", "1,2,1", "--out", dir.file("u.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning: --lengths not in descending order; using 2,1,1"), std::string::npos)
      << r.err;
  EXPECT_EQ(r.report()["lengths"], json::parse("[2.0,1.0,1.0]"));
}

TEST_F(Cli, InputValidationExitsTwo) {
  const auto out = dir.file("x.json").string();
  const auto csv = dir.write("s.csv", "1,2\n3,4\n");
  const auto broken = dir.write("broken.json", "[[1, 2], [3");
  EXPECT_EQ(run({"optimize", "--lengths", "1,1", "--out", out}).code, 2);
  EXPECT_EQ(run({"optimize", "--samples", csv, "--cov", cov, "--lengths", "1,1", "--out", out}).code, 2);
  EXPECT_EQ(run({"optimize", "--cov", cov, "--lengths", "1,x", "--out", out}).code, 2);
  EXPECT_EQ(run({"optimize", "--cov", cov, "--lengths", "1,-1", "--out", out}).code, 2);
  EXPECT_EQ(run({"optimize", "--cov", broken, "--lengths", "1,1", "--out", out}).code, 2);
  EXPECT_EQ(run({"optimize", "--mean", mean, "--lengths", "1,1", "--out", out}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST_F(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("optimize"), std::string::npos);
}

TEST_F(Cli, IoFailuresExitFour) {
  EXPECT_EQ(run({"optimize", "--cov", dir.file("missing.json").string(), "--lengths", "1,1", "--out",
                 dir.file("x.json").string()})
                .code,
            4);
  EXPECT_EQ(run({"optimize", "--cov", cov, "--lengths", "1,1", "--out", "/nonexistent/dir/x.json"}).code,
            4);
  EXPECT_EQ(run({"verify", "--dict", dir.file("missing.json").string(), "--cov", cov}).code, 4);
}

TEST_F(Cli, VerifyPassesOnMatchedGaussianSamples) {
  const auto dict = r2_dictionary();
  const auto r = run({"verify", "--dict", dict, "--cov", cov, "--mean", mean, "--draws", "100000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = r.report();
  EXPECT_EQ(rep["status"], "PASS");
  EXPECT_LE(std::abs(rep["gap"].get<double>()), rep["bound"].get<double>());
  EXPECT_LE(std::abs(rep["trace_gap"].get<double>()), 1e-9 * rep["monte_carlo_cost"].get<double>());
}

TEST_F(Cli, VerifyOnSampleFile) {
  const auto dict = r2_dictionary();
  const auto path = dir.file("mix.csv").string();
  {
    std::ofstream f(path);
    f.precision(17);
    const auto rows = oracle::rect_mixture_sample(20000, 11);
    for (Eigen::Index j = 0; j < rows.rows(); ++j) f << rows(j, 0) << ',' << rows(j, 1) << '\n';
  }
  const auto r = run({"verify", "--dict", dict, "--samples", path, "--threads", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["samples"], 20000);
  EXPECT_EQ(r.report()["source"]["kind"], "samples");
}

TEST_F(Cli, VerifyDimensionMismatchExitsTwo) {
  const auto dict = r2_dictionary();
  const auto csv = dir.write("s3.csv", "1,2,3\n4,5,6\n");
  EXPECT_EQ(run({"verify", "--dict", dict, "--samples", csv}).code, 2);
}

TEST_F(Cli, VerifyTamperedDictionaryNamesInvariant) {
  const auto dict = r2_dictionary();
  auto j = json::parse(oracle::read_text(dict));
  j["vectors"][0][0] = j["vectors"][0][0].get<double>() + 0.25;
  const auto bad = dir.write("bad.json", j.dump(2));
  const auto r = run({"verify", "--dict", bad, "--cov", cov});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("squared length of vector 1"), std::string::npos) << r.err;
}

TEST_F(Cli, EncodeCenterAndSpanRows) {
  const auto dict = r2_dictionary();
  const auto input = dir.write("in.csv", "-0.75,0.5\n1,2\n-3,4\n");
  const auto out = dir.file("coef.csv").string();
  const auto r = run({"encode", "--dict", dict, "--input", input, "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["outside_span"], 0);
  EXPECT_TRUE(r.err.empty()) << r.err;

  std::istringstream lines(oracle::read_text(out));
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "r1,r2,r3,residual");
  std::getline(lines, line);
  std::istringstream fields(line);
  for (std::string f; std::getline(fields, f, ',');) EXPECT_EQ(std::stod(f), 0.0) << line;
  while (std::getline(lines, line)) {
    const double residual = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_LE(residual, 1e-9) << line;
  }
}

TEST_F(Cli, EncodeOutsideSpanWarns) {
  const auto flat = dir.write("flat.json", "[[1, 0], [0, 0]]");
  const auto dict = dir.file("flat_dict.json").string();
  ASSERT_EQ(run({"optimize", "--cov", flat, "--lengths", "1,1", "--out", dict}).code, 0);
  const auto input = dir.write("in.csv", "3,0\n0,1\n1,1\n");
  const auto r = run({"encode", "--dict", dict, "--input", input, "--out", dir.file("c.csv").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.report()["outside_span"], 2);
  EXPECT_NE(r.err.find("warning: 2 of 3 rows lie outside the dictionary span"), std::string::npos)
      << r.err;
}

TEST_F(Cli, RobustnessDefaultDeltasDecrease) {
  const auto r = run({"robustness", "--cov", cov, "--mean", mean, "--lengths", "2,1,1", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = r.report()["rows"];
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(rows[i]["delta"].get<double>(), rows[i - 1]["delta"].get<double>());
    EXPECT_LT(rows[i]["cost_gap"].get<double>(), rows[i - 1]["cost_gap"].get<double>());
  }
  EXPECT_NE(r.report()["perturbation_model"].get<std::string>().find("stand-in"), std::string::npos);
}

TEST_F(Cli, RobustnessZeroDelta) {
  const auto r = run({"robustness", "--cov", cov, "--mean", mean, "--lengths", "2,1,1", "--deltas", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\n0.000000e+00,0,"), std::string::npos) << r.out;
}

TEST_F(Cli, RobustnessNegativeDeltaExitsTwo) {
  EXPECT_EQ(run({"robustness", "--cov", cov, "--lengths", "2,1,1", "--deltas=-0.1"}).code, 2);
}

TEST_F(Cli, RobustnessIsByteIdenticalForASeed) {
  const std::vector<std::string> args = {"robustness", "--cov", cov, "--mean", mean,
                                         "--lengths", "2,1,1", "--seed", "9"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto other = args;
  other.back() = "10";
  EXPECT_NE(run(other).out, a.out);
}

TEST_F(Cli, SeedFromEnvironment) {
  const std::vector<std::string> base = {"robustness", "--cov", cov, "--lengths", "2,1,1"};
  auto explicit_seed = base;
  explicit_seed.insert(explicit_seed.end(), {"--seed", "7"});
  setenv("OPTDICT_SEED", "7", 1);
  EXPECT_EQ(run(base).out, run(explicit_seed).out);
  setenv("OPTDICT_SEED", "seven", 1);
  const auto bad = run(base);
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("OPTDICT_SEED"), std::string::npos);
}

TEST_F(Cli, BinaryExitCodes) {
  const std::string bin = OPTDICT_BINARY;
  const auto quiet = " >/dev/null 2>&1";
  auto status = [](const std::string& cmd) {
    const int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status(bin + " --help" + quiet), 0);
  EXPECT_EQ(status(bin + " optimize --cov " + cov + " --lengths 2,1,1 --out " +
                   dir.file("b.json").string() + quiet),
            0);
  EXPECT_EQ(status(bin + " optimize --cov " + cov + " --lengths 5 --out " +
                   dir.file("b.json").string() + quiet),
            3);
  EXPECT_EQ(status(bin + " bogus" + quiet), 2);
  EXPECT_EQ(status(bin + " verify --dict /nonexistent.json --cov " + cov + quiet), 4);
}
