#pragma once

#include <chrono>
#include <string>
#include <variant>
#include <vector>

#include "qsylv/hodlr.hpp"

namespace qsylv {

// A X + X B = C
struct SylvesterProblem {
  Hodlr A;
  Hodlr B;
  Hodlr C;
  std::string name;
  bool lyapunov = false;  // B is A

  Index size() const { return A.rows(); }
};

// Term U V^T, applied as (U V^T) X (U V^T)^T.
struct LowRankTerm {
  DenseMatrix U;
  DenseMatrix V;
  Index rank() const { return U.cols(); }
};

// Term M, applied as M X M^T.
struct QsTerm {
  Hodlr M;
};

using GeneralizedTerm = std::variant<LowRankTerm, QsTerm>;

// A X + X A + sum_j M_j X M_j^T = C
struct GeneralizedProblem {
  Hodlr A;
  Hodlr C;
  std::vector<GeneralizedTerm> terms;
  std::string name;

  Index size() const { return A.rows(); }
  SylvesterProblem base() const { return {A, A, C, name, true}; }
};

struct SolverReport {
  std::string method;
  Index iterations = 0;  // iterations, quadrature nodes or series terms
  double residual = 0.0;
  bool residual_warning = false;
  Index qs_rank = 0;
  double elapsed_s = 0.0;
  std::size_t memory_bytes = 0;
  double flops = 0.0;
  std::vector<double> history;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

inline bool is_same_matrix(const Hodlr& a, const Hodlr& b) { return &a == &b || a == b; }

// 1 / ||A^{-1}||_2, A SPD
inline double smallest_eigenvalue(const Hodlr& a, const HodlrConfig& cfg) {
  const double ni = two_norm_estimate(invert(a, cfg), 1e-6);
  if (!(ni > 0) || !std::isfinite(ni)) throw NumericalFailure("cannot estimate smallest eigenvalue");
  return 1.0 / ni;
}

}  // namespace detail

}  // namespace qsylv
