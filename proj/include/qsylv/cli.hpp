#pragma once

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "qsylv/bounds.hpp"
#include "qsylv/hodlr_io.hpp"
#include "qsylv/problems.hpp"
#include "qsylv/solvers/cg.hpp"
#include "qsylv/solvers/dense_oracle.hpp"
#include "qsylv/solvers/generalized.hpp"
#include "qsylv/solvers/integral.hpp"
#include "qsylv/solvers/sign.hpp"

namespace qsylv::cli {

struct UsageError : Error {
  explicit UsageError(const std::string& m) : Error(m) {}
};

inline const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> v{"laplace-log", "heat", "integro", "test1", "test2",
                                          "test3",       "test4", "random-spd"};
  return v;
}

inline const std::vector<std::string>& method_names() {
  static const std::vector<std::string> v{"sign", "expint", "cg", "dense", "smw", "neumann"};
  return v;
}

inline bool is_generalized(const std::string& problem) { return problem == "integro"; }

inline bool applicable(const std::string& problem, const std::string& method) {
  if (method == "dense") return true;
  const bool gen_method = method == "smw" || method == "neumann";
  return gen_method == is_generalized(problem);
}

// Largest size for which the dense oracle column is filled.
inline constexpr Index oracle_max_sylvester = 256;
inline constexpr Index oracle_max_generalized = 64;
inline constexpr Index dense_max = 4096;

struct RunConfig {
  std::string problem;
  std::vector<Index> sizes;  // n, or the cell count m for heat
  std::vector<std::string> methods;
  double threshold = 1e-12;
  Index block_size = 256;
  int quad_points = 32;
  double quad_L = 100.0;
  double tau = 1.0;
  std::uint64_t seed = 0;
  bool parallel = false;
  bool oracle = false;
  std::string inner = "sign";  // standard solver inside smw / neumann
  std::string dump;  // path prefix
  std::string load;  // path prefix

  HodlrConfig hodlr() const {
    HodlrConfig c;
    c.threshold = threshold;
    c.block_size = block_size;
    return c;
  }

  void validate() const {
    if (std::find(problem_names().begin(), problem_names().end(), problem) == problem_names().end())
      throw UsageError("unknown problem '" + problem + "'");
    if (sizes.empty()) throw UsageError("empty size grid");
    if (methods.empty()) throw UsageError("no method given");
    for (const auto& m : methods) {
      if (std::find(method_names().begin(), method_names().end(), m) == method_names().end())
        throw UsageError("unknown method '" + m + "'");
      if (!applicable(problem, m)) throw UsageError("method '" + m + "' does not apply to problem '" + problem + "'");
    }
    for (Index s : sizes)
      if (s < 1) throw UsageError("sizes must be positive");
    if (inner != "sign" && inner != "expint") throw UsageError("inner solver must be sign or expint");
    if (!(threshold >= 0) || block_size < 2 || quad_points < 1 || !(quad_L > 0) || !(tau > 0))
      throw UsageError("invalid numeric option");
  }
};

struct Row {
  std::string problem;
  Index n = 0;
  std::string method;
  double time_s = 0.0;
  double residual = 0.0;
  Index qs_rank = 0;
  Index iterations = 0;
  std::size_t memory_bytes = 0;
  double flops = 0.0;
  std::optional<double> oracle_error;
  std::string status = "ok";
  bool ok() const { return status == "ok" || status == "loaded"; }
};

using AnyProblem = std::variant<SylvesterProblem, GeneralizedProblem>;

inline AnyProblem make_problem(const RunConfig& rc, Index size) {
  const HodlrConfig cfg = rc.hodlr();
  const std::string& p = rc.problem;
  if (p == "laplace-log") return laplace_log(size, rc.tau, cfg);
  if (p == "heat") return heat_haber(size, cfg);
  if (p == "integro") return integro_pde(size, cfg);
  if (p == "random-spd") return random_spd(size, rc.seed, cfg);
  if (p.size() == 5 && p.rfind("test", 0) == 0) return structure_tests(p[4] - '0', size, rc.seed, 1, cfg);
  throw UsageError("unknown problem '" + p + "'");
}

inline std::string cell_path(const std::string& prefix, const Row& r, bool single) {
  if (single) return prefix;
  return prefix + "." + r.problem + "." + std::to_string(r.n) + "." + r.method + ".qsh";
}

inline std::string status_of(const std::exception& e) {
  if (dynamic_cast<const InvalidInput*>(&e)) return "invalid-input";
  if (dynamic_cast<const SingularMatrix*>(&e)) return "singular";
  if (dynamic_cast<const DivergenceError*>(&e)) return "divergence";
  if (dynamic_cast<const ConvergenceFailure*>(&e)) return "no-convergence";
  if (dynamic_cast<const NumericalFailure*>(&e)) return "numerical-failure";
  if (dynamic_cast<const FormatError*>(&e)) return "format-error";
  return "error";
}

namespace detail {

inline void fill(Row& r, const SolverReport& rep) {
  r.time_s = rep.elapsed_s;
  r.residual = rep.residual;
  r.qs_rank = rep.qs_rank;
  r.iterations = rep.iterations;
  r.memory_bytes = rep.memory_bytes;
  r.flops = rep.flops;
}

inline Hodlr solve_sylvester(const SylvesterProblem& p, const RunConfig& rc, const std::string& method, Row& row) {
  const HodlrConfig cfg = rc.hodlr();
  if (method == "sign") {
    auto r = sign_solve(p, cfg);
    fill(row, r.report);
    return std::move(r.X);
  }
  if (method == "expint") {
    IntegralOptions o;
    o.quad_points = rc.quad_points;
    o.L = rc.quad_L;
    o.parallel = rc.parallel;
    auto r = integral_solve(p, cfg, o);
    fill(row, r.report);
    return std::move(r.X);
  }
  if (method == "cg") {
    CgOptions o;
    // banded coefficients keep banded iterates; everything else iterates in HODLR form
    o.truncation = rc.problem == "heat" ? CgTruncation::band(-1) : CgTruncation::hodlr_format(cfg);
    auto r = cg_matrix_solve(p, cfg, o);
    fill(row, r.report);
    return std::move(r.X);
  }
  // dense
  const Index n = p.size();
  if (n > dense_max) throw InvalidInput("dense: n exceeds " + std::to_string(dense_max));
  qsylv::detail::Stopwatch sw;
  flops::Scope fl;
  const DenseMatrix a = to_dense(p.A);
  const DenseMatrix x = p.lyapunov ? dense_sylvester_oracle(a, a, to_dense(p.C))
                                   : dense_sylvester_oracle(a, to_dense(p.B), to_dense(p.C));
  Hodlr h = from_dense(x, cfg);
  row.flops = fl.elapsed();
  row.time_s = sw.seconds();
  row.memory_bytes = std::size_t(4 * n * n) * sizeof(double);
  row.qs_rank = hodlr_rank(h);
  row.residual = residual_sylvester(p, h);
  return h;
}

inline Hodlr solve_generalized(const GeneralizedProblem& p, const RunConfig& rc, const std::string& method,
                               Row& row) {
  const HodlrConfig cfg = rc.hodlr();
  if (method == "dense") {
    qsylv::detail::Stopwatch sw;
    flops::Scope fl;
    Hodlr h = from_dense(kronecker_generalized_oracle(p), cfg);
    const double n2 = double(p.size()) * double(p.size());
    row.flops = fl.elapsed();
    row.time_s = sw.seconds();
    row.memory_bytes = std::size_t(n2 * n2) * sizeof(double);
    row.qs_rank = hodlr_rank(h);
    row.residual = residual_generalized(p, h).value;
    return h;
  }
  GeneralizedOptions o;
  o.inner = rc.inner == "expint" ? InnerSolver::Expint : InnerSolver::Sign;
  o.expint.quad_points = rc.quad_points;
  o.expint.L = rc.quad_L;
  o.expint.parallel = rc.parallel;
  auto r = method == "smw" ? smw_generalized_solve(p, cfg, o) : neumann_generalized_solve(p, cfg, o);
  fill(row, r.report);
  return std::move(r.X);
}

inline double oracle_error(const AnyProblem& ap, const Hodlr& x) {
  DenseMatrix ref;
  if (auto* s = std::get_if<SylvesterProblem>(&ap)) {
    const DenseMatrix a = to_dense(s->A);
    ref = s->lyapunov ? dense_sylvester_oracle(a, a, to_dense(s->C))
                      : dense_sylvester_oracle(a, to_dense(s->B), to_dense(s->C));
  } else {
    ref = kronecker_generalized_oracle(std::get<GeneralizedProblem>(ap));
  }
  return (to_dense(x) - ref).norm() / ref.norm();
}

}  // namespace detail

inline Row run_cell(const RunConfig& rc, Index size, const std::string& method, bool single_cell = true) {
  Row row;
  row.problem = rc.problem;
  row.method = method;
  row.n = rc.problem == "heat" ? 6 * size : size;
  qsylv::detail::Stopwatch sw;
  try {
    const AnyProblem ap = make_problem(rc, size);
    const bool gen = std::holds_alternative<GeneralizedProblem>(ap);
    Hodlr x;
    if (!rc.load.empty()) {
      std::ifstream is(cell_path(rc.load, row, single_cell), std::ios::binary);
      if (!is) throw InvalidInput("cannot open " + cell_path(rc.load, row, single_cell));
      x = deserialize(is);
      if (x.rows() != row.n) throw InvalidInput("loaded solution has the wrong size");
      row.qs_rank = hodlr_rank(x);
      row.memory_bytes = x.storage_bytes();
      row.residual = gen ? residual_generalized(std::get<GeneralizedProblem>(ap), x).value
                         : residual_sylvester(std::get<SylvesterProblem>(ap), x);
      row.status = "loaded";
    } else if (gen) {
      x = detail::solve_generalized(std::get<GeneralizedProblem>(ap), rc, method, row);
    } else {
      x = detail::solve_sylvester(std::get<SylvesterProblem>(ap), rc, method, row);
    }
    if (rc.oracle && row.n <= (gen ? oracle_max_generalized : oracle_max_sylvester))
      row.oracle_error = detail::oracle_error(ap, x);
    if (!rc.dump.empty()) {
      std::ofstream os(cell_path(rc.dump, row, single_cell), std::ios::binary);
      if (!os) throw Error("cannot write " + cell_path(rc.dump, row, single_cell));
      serialize(x, os, rc.hodlr());
    }
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    row.status = status_of(e);
    row.time_s = sw.seconds();
    std::fprintf(stderr, "qsylv: %s n=%" PRId64 " %s: %s\n", row.problem.c_str(), std::int64_t(row.n),
                 method.c_str(), e.what());
  }
  return row;
}

// ------------------------------------------------------------------ CSV

inline std::string csv_header() {
  return "problem,n,method,time_s,residual,qs_rank,iterations,memory_bytes,flops,oracle_error,status";
}

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_row(const Row& r) {
  std::string s = r.problem + "," + std::to_string(r.n) + "," + r.method + "," + num(r.time_s) + ",";
  if (r.ok()) {
    s += num(r.residual) + "," + std::to_string(r.qs_rank) + "," + std::to_string(r.iterations) + "," +
         std::to_string(r.memory_bytes) + "," + num(r.flops) + ",";
  } else {
    s += ",,,,,";
  }
  if (r.oracle_error) s += num(*r.oracle_error);
  return s + "," + r.status;
}

// ------------------------------------------------------------------ sweep

// log power of the method's complexity model c n^alpha log^beta n
inline int log_power(const std::string& method) {
  if (method == "sign") return 3;
  if (method == "expint") return 2;
  return 0;
}

// Least-squares alpha in log y - beta log log n = log c + alpha log n.
inline double fit_exponent(const std::vector<double>& n, const std::vector<double>& y, int beta) {
  if (n.size() != y.size() || n.size() < 2) throw InvalidInput("fit_exponent: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = double(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(n[i] > 1.0) || !(y[i] > 0.0)) throw InvalidInput("fit_exponent: non-positive data");
    const double lx = std::log(n[i]);
    const double ly = std::log(y[i]) - beta * std::log(lx);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = k * sxx - sx * sx;
  if (!(den > 0)) throw InvalidInput("fit_exponent: degenerate grid");
  return (k * sxy - sx * sy) / den;
}

// Fit row: time_s and flops hold the fitted exponents, iterations holds beta.
inline std::string format_fit(const std::string& problem, const std::string& method, const std::vector<Row>& rows) {
  std::vector<double> n, t, f;
  for (const Row& r : rows)
    if (r.method == method && r.ok()) {
      n.push_back(double(r.n));
      t.push_back(std::max(r.time_s, 1e-9));
      f.push_back(std::max(r.flops, 1.0));
    }
  const int beta = log_power(method);
  if (n.size() < 2) return problem + ",fit," + method + ",,,," + std::to_string(beta) + ",,,,fit-insufficient";
  return problem + ",fit," + method + "," + num(fit_exponent(n, t, beta)) + ",,," + std::to_string(beta) + ",," +
         num(fit_exponent(n, f, beta)) + ",,fit";
}

inline std::vector<Index> doubling_grid(Index lo, Index hi) {
  std::vector<Index> g;
  if (lo < 1) return g;
  for (Index n = lo; n <= hi; n *= 2) g.push_back(n);
  return g;
}

// Returns the exit code: 0 all cells ok, 2 any failure.
inline int execute(const RunConfig& rc, bool sweep, std::ostream& out) {
  rc.validate();
  out << csv_header() << '\n';
  std::vector<Row> rows;
  const bool single = rc.sizes.size() == 1 && rc.methods.size() == 1;
  for (Index s : rc.sizes)
    for (const auto& m : rc.methods) {
      rows.push_back(run_cell(rc, s, m, single));
      out << format_row(rows.back()) << '\n';
      out.flush();
    }
  if (sweep)
    for (const auto& m : rc.methods) out << format_fit(rc.problem, m, rows) << '\n';
  for (const Row& r : rows)
    if (!r.ok()) return 2;
  return 0;
}

}  // namespace qsylv::cli
