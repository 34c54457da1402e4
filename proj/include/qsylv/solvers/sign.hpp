#pragma once

#include "qsylv/bounds.hpp"
#include "qsylv/solvers/problem.hpp"

namespace qsylv {

struct SignOptions {
  double eps = 1e-12;  // stop when the relative increments sum to <= sqrt(eps)
  Index max_iter = 100;
  bool scale_first = true;
  bool compute_residual = true;
};

struct SignResult {
  Hodlr X;
  SolverReport report;
};

// Coupled Newton iteration for sign([A, -C; 0, -B]); X = lim C_i / 2.
inline SignResult sign_solve(const SylvesterProblem& prob, const HodlrConfig& cfg, const SignOptions& opt = {}) {
  cfg.validate();
  if (prob.A.rows() != prob.A.cols() || prob.B.rows() != prob.B.cols() || prob.C.rows() != prob.A.rows() ||
      prob.C.cols() != prob.B.rows())
    throw InvalidInput("sign_solve: dimension mismatch");
  if (!(opt.eps > 0)) throw InvalidInput("sign_solve: eps must be positive");
  detail::Stopwatch sw;
  flops::Scope fl;
  const bool lyap = prob.lyapunov || detail::is_same_matrix(prob.A, prob.B);

  Hodlr a = prob.A, b, c = prob.C;
  if (!lyap) b = prob.B;
  SolverReport rep;
  rep.method = "sign";
  const double tol = std::sqrt(opt.eps);
  double incr = std::numeric_limits<double>::infinity();
  Index it = 0;
  for (; it < opt.max_iter; ++it) {
    Hodlr ai, bi;
    try {
      ai = invert(a, cfg);
      if (!lyap) bi = invert(b, cfg);
    } catch (const SingularMatrix& e) {
      throw NumericalFailure(std::string("sign_solve: iterate became singular: ") + e.what());
    }
    const Hodlr& bref = lyap ? a : b;
    const Hodlr& biref = lyap ? ai : bi;
    double alpha = 1.0;
    if (it == 0 && opt.scale_first) {
      // alpha = sqrt(||S0^{-1}|| / ||S0||) with block-diagonal norm estimates
      const double ns = std::max(two_norm_estimate(a), lyap ? 0.0 : two_norm_estimate(b));
      const double nsi = std::max(two_norm_estimate(ai), lyap ? 0.0 : two_norm_estimate(bi));
      if (ns > 0 && nsi > 0) alpha = std::sqrt(nsi / ns);
    }
    // C' = (alpha C + A^{-1} C B^{-1} / alpha) / 2
    Hodlr cn = combine(0.5 * alpha, c, 0.5 / alpha, multiply(multiply(ai, c, cfg), biref, cfg), cfg);
    Hodlr an = combine(0.5 * alpha, a, 0.5 / alpha, ai, cfg);
    Hodlr bn;
    if (!lyap) bn = combine(0.5 * alpha, bref, 0.5 / alpha, biref, cfg);

    auto rel = [&](const Hodlr& nw, const Hodlr& old) {
      const double d = frobenius_norm(subtract(nw, old, cfg));
      const double s = frobenius_norm(nw);
      return s > 0 ? d / s : d;
    };
    incr = rel(an, a) + (lyap ? rel(an, a) : rel(bn, b)) + rel(cn, c);
    rep.history.push_back(incr);
    rep.memory_bytes = std::max(rep.memory_bytes, a.storage_bytes() + ai.storage_bytes() + c.storage_bytes() +
                                                      an.storage_bytes() + cn.storage_bytes() +
                                                      (lyap ? 0 : b.storage_bytes() + bi.storage_bytes()));
    a = std::move(an);
    if (!lyap) b = std::move(bn);
    c = std::move(cn);
    if (!std::isfinite(incr)) throw NumericalFailure("sign_solve: non-finite iterate");
    if (incr <= tol) {
      ++it;
      break;
    }
  }
  if (!(incr <= tol)) throw ConvergenceFailure("sign_solve: no convergence within max_iter", incr);
  // sign(A) = I only for a positive definite A; an indefinite one still converges
  auto off_identity = [&](const Hodlr& s) { return frobenius_norm(shift(s, -1.0)) / std::sqrt(double(s.rows())); };
  if (off_identity(a) > 1e-2 || (!lyap && off_identity(b) > 1e-2))
    throw NumericalFailure("sign_solve: coefficients are not positive definite (sign limit is not the identity)");
  scale_inplace(c, 0.5);
  rep.iterations = it;
  rep.qs_rank = hodlr_rank(c);
  rep.flops = fl.elapsed();
  if (opt.compute_residual) rep.residual = residual_sylvester(prob, c);
  rep.elapsed_s = sw.seconds();
  return {std::move(c), std::move(rep)};
}

}  // namespace qsylv
