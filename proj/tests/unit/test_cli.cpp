#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/csv.hpp"

namespace gridflex::cli {
namespace {

namespace fs = std::filesystem;

const fs::path kSource = GRIDFLEX_SOURCE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gridflex_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run_cli(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }
  std::string case_path(const std::string& name) const { return (kSource / "cases" / (name + ".gfcase")).string(); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST(Csv, NumberFormatting) {
  EXPECT_EQ(format_number(17.40452), "17.4045");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(1234567.0), "1.23457e+06");
  EXPECT_EQ(format_number(std::nan("")), "");
}

TEST(Csv, Rfc4180Quoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  CsvTable t({"x", "y"});
  t.add({"1", "a\nb"});
  EXPECT_EQ(t.str(), "x,y\n1,\"a\nb\"\n");
}

TEST_F(Cli, LrWritesSummaryAndEnvelope) {
  ASSERT_EQ(run_cli({"lr", case_path("pjm5"), "--strategy", "smart", "--capacity", "0.2", "--output-dir",
                     dir_.string()}),
            kOk)
      << err_.str();
  EXPECT_NE(out_.str().find("total LR"), std::string::npos);
  const std::string summary = slurp(dir_ / "lr_summary.csv");
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "bus,direction,LR_MW,degree");
  EXPECT_EQ(count_lines(summary), 1u + 2 * 3);
  const std::string env = slurp(dir_ / "envelope.csv");
  EXPECT_EQ(env.substr(0, env.find('\n')), "bus,alpha,forecast_lo,forecast_hi,achieved_lo,achieved_hi");
  EXPECT_EQ(count_lines(env), 1u + 3 * 21);
}

TEST_F(Cli, AlphaPointsFlag) {
  ASSERT_EQ(run_cli({"lr", case_path("pjm5"), "--alpha-points", "41", "--output-dir", dir_.string()}), kOk);
  const std::string env = slurp(dir_ / "envelope.csv");
  EXPECT_EQ(count_lines(env), 1u + 3 * 41);
  std::istringstream rows(env);
  std::string row;
  std::getline(rows, row);
  int bus2 = 0;
  while (std::getline(rows, row)) bus2 += row.rfind("2,", 0) == 0;
  EXPECT_EQ(bus2, 41);
}

TEST_F(Cli, UnrepressedDegreePrintsZero) {
  ASSERT_EQ(run_cli({"lr", case_path("pjm5"), "--strategy", "base", "--output-dir", dir_.string()}), kOk);
  EXPECT_NE(slurp(dir_ / "lr_summary.csv").find("3,reduction,0,0\n"), std::string::npos);
}

TEST_F(Cli, MissingFileIsInputError) {
  EXPECT_EQ(run_cli({"lr", "/no/such/case.gfcase", "--output-dir", dir_.string()}), kInputError);
  EXPECT_NE(err_.str().find("/no/such/case.gfcase"), std::string::npos);
}

TEST_F(Cli, BadArgumentsAreInputErrors) {
  EXPECT_EQ(run_cli({}), kInputError);
  EXPECT_EQ(run_cli({"frobnicate"}), kInputError);
  EXPECT_EQ(run_cli({"lr", case_path("pjm5"), "--strategy", "c9"}), kInputError);
  EXPECT_EQ(run_cli({"lr", case_path("pjm5"), "--alpha-points", "1"}), kInputError);
  EXPECT_EQ(run_cli({"sweep", case_path("pjm5"), "--capacities", "0.1,x"}), kInputError);
  EXPECT_EQ(run_cli({"contingency", case_path("pjm5"), "--only", "7-9", "--output-dir", dir_.string()}),
            kInputError);
  EXPECT_EQ(run_cli({"allocate", case_path("pjm5"), "--taus", "0.2,0.1", "--output-dir", dir_.string()}),
            kInputError);
  EXPECT_EQ(run_cli({"verify", case_path("pjm5"), "--direction", "up", "--output-dir", dir_.string()}),
            kInputError);
}

TEST_F(Cli, StrictAndLenientCaseParsing) {
  std::string text = slurp(case_path("pjm5"));
  text.insert(text.find('{') + 1, "\n  \"extra_field\": 1,");
  const fs::path odd = dir_ / "odd.gfcase";
  std::ofstream(odd) << text;
  EXPECT_EQ(run_cli({"lr", odd.string(), "--output-dir", dir_.string()}), kInputError);
  EXPECT_NE(err_.str().find("extra_field"), std::string::npos);
  EXPECT_EQ(run_cli({"lr", odd.string(), "--lenient", "--output-dir", dir_.string()}), kOk);
  EXPECT_NE(err_.str().find("warning"), std::string::npos);
}

TEST_F(Cli, InfeasibleLevelsExitTwo) {
  std::string text = slurp(case_path("pjm5"));
  // Shrink every generator so the forecast cannot be met.
  for (std::size_t pos = 0; (pos = text.find("\"p_max\": ", pos)) != std::string::npos; ++pos) {
    const std::size_t end = text.find_first_of(",\n}", pos + 9);
    text.replace(pos + 9, end - pos - 9, "200");
  }
  const fs::path weak = dir_ / "weak.gfcase";
  std::ofstream(weak) << text;
  EXPECT_EQ(run_cli({"lr", weak.string(), "--output-dir", dir_.string()}), kInfeasibleLevels);
  EXPECT_TRUE(fs::exists(dir_ / "lr_summary.csv"));
  EXPECT_NE(slurp(dir_ / "lr_summary.csv").find("\n4,increase,,\n"), std::string::npos);
}

TEST_F(Cli, SweepContract) {
  ASSERT_EQ(run_cli({"sweep", case_path("pjm5"), "--strategies", "c1,c4", "--capacities", "0,0.2", "--output-dir",
                     dir_.string()}),
            kOk);
  const std::string csv = slurp(dir_ / "sweep.csv");
  EXPECT_EQ(count_lines(csv), 5u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "strategy,capacity,total_LR_MW");
  EXPECT_NE(csv.find("\nsmart,0.2,"), std::string::npos);
}

TEST_F(Cli, ContingencyContract) {
  ASSERT_EQ(run_cli({"contingency", case_path("ieee24"), "--strategies", "base,smart", "--only", "7-8,15-24",
                     "--output-dir", dir_.string()}),
            kOk)
      << err_.str();
  const std::string csv = slurp(dir_ / "n1.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "outage,strategy,capacity,total_LR_MW,worst_bus,worst_bus_LR_MW");
  EXPECT_NE(csv.find("\n7-8,islanding,,,,\n"), std::string::npos);
  EXPECT_NE(csv.find("\nintact,base,0,0,,\n"), std::string::npos);
  EXPECT_EQ(count_lines(csv), 1u + 2 + 2 + 1);
}

TEST_F(Cli, AllocateContract) {
  ASSERT_EQ(run_cli({"allocate", case_path("pjm5"), "--taus", "0,0.4,1.2", "--output-dir", dir_.string()}), kOk);
  const std::string csv = slurp(dir_ / "alloc.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "tau,line,beta,total_LR_MW");
  EXPECT_EQ(count_lines(csv), 1u + 3 * 6);
  const std::string order = slurp(dir_ / "activation_order.txt");
  EXPECT_EQ(order.rfind("1 ", 0), 0u);
  EXPECT_NE(order.find("tau=0.4"), std::string::npos);
}

TEST_F(Cli, VerifyGapAndForcedFailure) {
  ASSERT_EQ(run_cli({"verify", case_path("pjm5"), "--strategy", "smart", "--output-dir", dir_.string()}), kOk);
  EXPECT_NE(out_.str().find("oracle"), std::string::npos);
  ASSERT_EQ(run_cli({"verify", case_path("pjm5"), "--strategy", "base", "--tolerance", "0", "--output-dir",
                     dir_.string()}),
            kOk);
  EXPECT_NE(out_.str().find("gap 0 MW"), std::string::npos);
  EXPECT_EQ(run_cli({"verify", case_path("pjm5"), "--strategy", "smart", "--tolerance", "0", "--output-dir",
                     dir_.string()}),
            kVerifyGapExceeded);
}

TEST_F(Cli, ThreadsEnvironmentDefault) {
  ::setenv("GRIDFLEX_THREADS", "abc", 1);
  EXPECT_EQ(run_cli({"lr", case_path("pjm5"), "--output-dir", dir_.string()}), kInputError);
  ::setenv("GRIDFLEX_THREADS", "3", 1);
  EXPECT_EQ(run_cli({"lr", case_path("pjm5"), "--output-dir", dir_.string()}), kOk);
  ::unsetenv("GRIDFLEX_THREADS");
}

TEST_F(Cli, ByteStableAcrossRunsAndThreads) {
  const fs::path a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(run_cli({"lr", case_path("pjm5"), "--strategy", "smart", "--seed", "9", "--output-dir", a.string()}), kOk);
  ASSERT_EQ(run_cli({"lr", case_path("pjm5"), "--strategy", "smart", "--seed", "9", "--threads", "8",
                     "--output-dir", b.string()}),
            kOk);
  EXPECT_EQ(slurp(a / "lr_summary.csv"), slurp(b / "lr_summary.csv"));
  EXPECT_EQ(slurp(a / "envelope.csv"), slurp(b / "envelope.csv"));
}

// Goldens come from tests/golden/regenerate.sh (--seed 0 --threads 1).
struct GoldenRun {
  std::string dir;
  std::vector<std::string> args;
  std::vector<std::string> files;
};

TEST_F(Cli, GoldensRegenerateBitwise) {
  const std::vector<GoldenRun> runs = {
      {"pjm5_lr_smart", {"lr", "cases/pjm5.gfcase", "--strategy", "smart"}, {"lr_summary.csv", "envelope.csv"}},
      {"pjm5_lr_base", {"lr", "cases/pjm5.gfcase", "--strategy", "base"}, {"lr_summary.csv", "envelope.csv"}},
      {"pjm5_sweep", {"sweep", "cases/pjm5.gfcase"}, {"sweep.csv"}},
      {"pjm5_allocate", {"allocate", "cases/pjm5.gfcase", "--tau-points", "7"}, {"alloc.csv", "activation_order.txt"}},
      {"ieee24_n1", {"contingency", "cases/ieee24.gfcase", "--only", "3-24,15-24,7-8,11-13"}, {"n1.csv"}},
  };
  for (const GoldenRun& g : runs) {
    std::vector<std::string> args = g.args;
    args[1] = (kSource / args[1]).string();
    const fs::path out = dir_ / g.dir;
    for (const char* extra : {"--seed", "0", "--threads", "1", "--output-dir"}) args.push_back(extra);
    args.push_back(out.string());
    ASSERT_EQ(run_cli(args), kOk) << g.dir << ": " << err_.str();
    for (const std::string& f : g.files) {
      const fs::path golden = kSource / "tests" / "golden" / g.dir / f;
      ASSERT_TRUE(fs::exists(golden)) << golden;
      EXPECT_EQ(slurp(out / f), slurp(golden)) << g.dir << "/" << f;
    }
  }
}

}  // namespace
}  // namespace gridflex::cli
