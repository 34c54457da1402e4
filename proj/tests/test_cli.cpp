#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "qsylv/cli.hpp"

using namespace qsylv;
using namespace qsylv::cli;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    rows.push_back(f);
  }
  return rows;
}

RunConfig small(const std::string& problem, std::vector<std::string> methods, Index n) {
  RunConfig rc;
  rc.problem = problem;
  rc.methods = std::move(methods);
  rc.sizes = {n};
  rc.block_size = 32;
  return rc;
}

int shell(const std::string& args, std::string* out = nullptr) {
  const auto tmp = std::filesystem::temp_directory_path() / "qsylv_cli_test.out";
  const std::string cmd = std::string(QSYLV_CLI) + " " + args + " > " + tmp.string() + " 2>/dev/null";
  const int st = std::system(cmd.c_str());
  if (out) {
    std::ifstream is(tmp);
    *out = std::string(std::istreambuf_iterator<char>(is), {});
  }
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST(Csv, HeaderAndNumberFormat) {
  EXPECT_EQ(csv_header(), "problem,n,method,time_s,residual,qs_rank,iterations,memory_bytes,flops,oracle_error,status");
  EXPECT_EQ(num(0.1), "0.10000000000000001");
  Row r;
  r.problem = "heat";
  r.n = 12;
  r.method = "sign";
  r.time_s = 0.5;
  r.residual = 1e-15;
  r.qs_rank = 6;
  r.iterations = 7;
  r.memory_bytes = 96;
  r.flops = 1000;
  EXPECT_EQ(format_row(r), "heat,12,sign,0.5,1.0000000000000001e-15,6,7,96,1000,,ok");
  r.status = "divergence";
  EXPECT_EQ(format_row(r), "heat,12,sign,0.5,,,,,,,divergence");
}

TEST(Sweep, FitExponentRecoversModel) {
  std::vector<double> n, y;
  for (double x : {512.0, 1024.0, 2048.0, 4096.0}) {
    n.push_back(x);
    const double l = std::log(x);
    y.push_back(7.0 * std::pow(x, 1.1) * l * l * l);
  }
  EXPECT_NEAR(fit_exponent(n, y, 3), 1.1, 1e-12);
  EXPECT_GT(fit_exponent(n, y, 0), 1.1);
  EXPECT_THROW(fit_exponent({512.0}, {1.0}, 0), InvalidInput);
}

TEST(Sweep, DoublingGrid) {
  EXPECT_EQ(doubling_grid(512, 4096), (std::vector<Index>{512, 1024, 2048, 4096}));
  EXPECT_TRUE(doubling_grid(600, 500).empty());
  RunConfig rc = small("laplace-log", {"sign"}, 64);
  rc.sizes.clear();
  std::ostringstream os;
  EXPECT_THROW(execute(rc, true, os), UsageError);
}

TEST(Validate, UsageErrors) {
  EXPECT_THROW(small("bogus", {"sign"}, 64).validate(), UsageError);
  EXPECT_THROW(small("laplace-log", {"lu"}, 64).validate(), UsageError);
  EXPECT_THROW(small("heat", {"smw"}, 4).validate(), UsageError);
  EXPECT_THROW(small("integro", {"sign"}, 16).validate(), UsageError);
  EXPECT_NO_THROW(small("integro", {"dense", "smw", "neumann"}, 16).validate());
}

TEST(Run, RowsPerMethodWithOracle) {
  RunConfig rc = small("laplace-log", {"sign", "expint", "dense"}, 128);
  rc.oracle = true;
  std::ostringstream os;
  EXPECT_EQ(execute(rc, false, os), 0);
  auto rows = parse_csv(os.str());
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 11u);
    EXPECT_EQ(rows[i][10], "ok");
    EXPECT_LE(std::stod(rows[i][4]), 1e-8);
  }
  EXPECT_LE(std::stod(rows[1][9]), 1e-8);  // sign vs oracle
}

TEST(Run, HeatThreeMethods) {
  RunConfig rc = small("heat", {"sign", "expint", "cg"}, 8);
  std::ostringstream os;
  EXPECT_EQ(execute(rc, false, os), 0);
  auto rows = parse_csv(os.str());
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1][1], "48");
}

TEST(Run, FailureRowAndExitCode) {
  RunConfig rc = small("test2", {"sign", "dense"}, 64);
  std::ostringstream os;
  EXPECT_EQ(execute(rc, false, os), 2);
  auto rows = parse_csv(os.str());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][10], "numerical-failure");
  EXPECT_EQ(rows[2][10], "ok");
}

TEST(Run, DeterministicExceptTimeAndMemory) {
  RunConfig rc = small("random-spd", {"sign", "expint"}, 96);
  rc.seed = 4;
  std::ostringstream a, b;
  execute(rc, false, a);
  execute(rc, false, b);
  auto ra = parse_csv(a.str()), rb = parse_csv(b.str());
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i)
    for (std::size_t j = 0; j < ra[i].size(); ++j)
      if (j != 3 && j != 7) EXPECT_EQ(ra[i][j], rb[i][j]) << i << "," << j;
}

TEST(Run, ExplicitQuadratureDefaultsMatch) {
  RunConfig rc = small("laplace-log", {"expint"}, 96);
  RunConfig rd = rc;
  rd.quad_points = 32;
  rd.quad_L = 100.0;
  const Row x = run_cell(rc, 96, "expint"), y = run_cell(rd, 96, "expint");
  EXPECT_EQ(num(x.residual), num(y.residual));
  EXPECT_EQ(x.qs_rank, y.qs_rank);
}

TEST(Run, DumpAndLoad) {
  const auto path = (std::filesystem::temp_directory_path() / "qsylv_cli_dump.qsh").string();
  RunConfig rc = small("laplace-log", {"sign"}, 80);
  rc.dump = path;
  const Row a = run_cell(rc, 80, "sign");
  RunConfig rl = small("laplace-log", {"sign"}, 80);
  rl.load = path;
  const Row b = run_cell(rl, 80, "sign");
  EXPECT_EQ(b.status, "loaded");
  EXPECT_EQ(num(a.residual), num(b.residual));
  EXPECT_EQ(a.qs_rank, b.qs_rank);
  std::filesystem::remove(path);
}

TEST(Binary, ExitCodes) {
  std::string out;
  EXPECT_EQ(shell("run --problem laplace-log --n 64 --block-size 16 --method sign", &out), 0);
  EXPECT_EQ(parse_csv(out).size(), 2u);
  EXPECT_EQ(shell("run --problem bogus --n 64 --method sign"), 64);
  EXPECT_EQ(shell("run --problem laplace-log --n 64 --method sign --no-such-flag"), 64);
  EXPECT_EQ(shell("sweep --problem laplace-log --method sign --n-min 600 --n-max 500"), 64);
  EXPECT_EQ(shell("run --problem test2 --n 32 --method sign"), 2);
}

TEST(Binary, SweepFitRow) {
  std::string out;
  EXPECT_EQ(shell("sweep --problem laplace-log --method sign --n-min 64 --n-max 256 --block-size 16", &out), 0);
  auto rows = parse_csv(out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[4][1], "fit");
  EXPECT_EQ(rows[4][6], "3");
  EXPECT_GT(std::stod(rows[4][8]), 0.0);
}
