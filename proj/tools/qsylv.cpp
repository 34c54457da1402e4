#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "qsylv/cli.hpp"

using qsylv::Index;
using qsylv::cli::RunConfig;

namespace {

constexpr int exit_usage = 64;

void add_common(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--problem", rc.problem, "laplace-log, heat, integro, test1..test4, random-spd")
      ->required()
      ->check(CLI::IsMember(qsylv::cli::problem_names()));
  sub->add_option("--method", rc.methods, "sign, expint, cg, dense, smw, neumann (repeatable)")
      ->required()
      ->check(CLI::IsMember(qsylv::cli::method_names()));
  sub->add_option("--threshold", rc.threshold, "relative truncation threshold")->capture_default_str();
  sub->add_option("--block-size", rc.block_size, "HODLR leaf size")->capture_default_str();
  sub->add_option("--quad-points", rc.quad_points, "Gauss-Legendre nodes for expint")->capture_default_str();
  sub->add_option("--quad-L", rc.quad_L, "cot^2 map parameter for expint")->capture_default_str();
  sub->add_option("--tau", rc.tau, "laplace-log kernel shift")->capture_default_str();
  sub->add_option("--seed", rc.seed, "generator seed")->capture_default_str();
  sub->add_option("--inner", rc.inner, "standard solver inside smw/neumann")
      ->check(CLI::IsMember({"sign", "expint"}))
      ->capture_default_str();
  sub->add_flag("--parallel", rc.parallel, "evaluate quadrature terms concurrently");
  sub->add_flag("--oracle", rc.oracle, "add the dense-oracle relative error for small sizes");
  sub->add_option("--dump", rc.dump, "write solutions (path, or prefix for several cells)");
  sub->add_option("--load", rc.load, "read solutions instead of solving");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank-structured Sylvester and Lyapunov solvers"};
  app.require_subcommand(1);
  RunConfig rc;
  std::string output;
  std::vector<Index> sizes;
  Index n_min = 0, n_max = 0;

  auto* run = app.add_subcommand("run", "solve each (size, method) cell and print CSV rows");
  add_common(run, rc);
  run->add_option("--n,--m", sizes, "size (n, or cell count m for heat); repeatable")->required();
  run->add_option("--output", output, "CSV path (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "doubling size grid plus fitted complexity exponents");
  add_common(sweep, rc);
  sweep->add_option("--n,--m", sizes, "explicit size grid; repeatable");
  sweep->add_option("--n-min", n_min, "first size of the doubling grid");
  sweep->add_option("--n-max", n_max, "last size bound of the doubling grid");
  sweep->add_option("--output", output, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  const bool is_sweep = sweep->parsed();
  rc.sizes = sizes;
  if (is_sweep && rc.sizes.empty()) rc.sizes = qsylv::cli::doubling_grid(n_min, n_max);

  try {
    rc.validate();
    if (output.empty()) return qsylv::cli::execute(rc, is_sweep, std::cout);
    std::ofstream os(output);
    if (!os) {
      std::cerr << "qsylv: cannot write " << output << "\n";
      return exit_usage;
    }
    return qsylv::cli::execute(rc, is_sweep, os);
  } catch (const qsylv::cli::UsageError& e) {
    std::cerr << "qsylv: " << e.what() << "\n" << app.help();
    return exit_usage;
  }
}
