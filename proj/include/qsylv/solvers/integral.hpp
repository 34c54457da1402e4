#pragma once

#include <future>
#include <thread>

#include "qsylv/bounds.hpp"
#include "qsylv/expm.hpp"
#include "qsylv/quadrature.hpp"
#include "qsylv/solvers/problem.hpp"

namespace qsylv {

struct IntegralOptions {
  Index quad_points = 32;
  double L = 100.0;
  // Rule window, in units of L * rate after rescaling: the slowest rate lands at
  // clamp(top_rate / spread, low_rate, top_rate), spread = fastest / slowest.
  double top_rate = 80.0;
  double low_rate = 0.4;
  bool parallel = false;
  int cheb_degree = 14;
  PadeConfig pade;
  bool compute_residual = true;
};

struct IntegralResult {
  Hodlr X;
  SolverReport report;
  int pade_terms = 0;
  int chebyshev_terms = 0;
};

namespace detail {

struct IntegralContext {
  const Hodlr& a;
  const Hodlr& b;
  const Hodlr& c;
  bool lyap;
  double na, nb;  // 2-norms of the rescaled coefficients
  const HodlrConfig& cfg;
  HodlrConfig exp_cfg;
  const IntegralOptions& opt;
  const ChebyshevExpTable& table;
};

inline Hodlr integral_term(const IntegralContext& ctx, double f, double w, ExpStrategy* used) {
  ExpmInfo info;
  const Hodlr ea = expm_neg(f, ctx.a, ctx.na, ctx.exp_cfg, ctx.opt.pade, ctx.table, &info);
  if (used) *used = info.strategy;
  Hodlr t = multiply(ea, ctx.c, ctx.cfg);
  if (ctx.lyap) {
    t = multiply(t, ea, ctx.cfg);
  } else {
    const Hodlr eb = expm_neg(f, ctx.b, ctx.nb, ctx.exp_cfg, ctx.opt.pade, ctx.table);
    t = multiply(t, eb, ctx.cfg);
  }
  scale_inplace(t, w);
  return t;
}

}  // namespace detail

// X = int_0^inf e^{-At} C e^{-Bt} dt with t = L cot(theta/2)^2 and Gauss-Legendre in theta.
inline IntegralResult integral_solve(const SylvesterProblem& prob, const HodlrConfig& cfg,
                                     const IntegralOptions& opt = {}) {
  cfg.validate();
  if (opt.quad_points < 1) throw InvalidInput("integral_solve: need at least one quadrature point");
  if (!(opt.L > 0)) throw InvalidInput("integral_solve: L must be positive");
  if (!(opt.low_rate > 0 && opt.top_rate >= opt.low_rate))
    throw InvalidInput("integral_solve: need 0 < low_rate <= top_rate");
  if (prob.A.rows() != prob.A.cols() || prob.B.rows() != prob.B.cols() || prob.C.rows() != prob.A.rows() ||
      prob.C.cols() != prob.B.rows())
    throw InvalidInput("integral_solve: dimension mismatch");
  detail::Stopwatch sw;
  flops::Scope fl;
  const bool lyap = prob.lyapunov || detail::is_same_matrix(prob.A, prob.B);

  const double na = two_norm_estimate(prob.A);
  const double nb = lyap ? na : two_norm_estimate(prob.B);
  if (!(na > 0 && nb > 0)) throw InvalidInput("integral_solve: zero coefficient");
  const double ma = detail::smallest_eigenvalue(prob.A, cfg);
  const double mb = lyap ? ma : detail::smallest_eigenvalue(prob.B, cfg);
  // solve with A/s, B/s; X = X_hat / s
  const double spread = (na + nb) / (ma + mb);
  const double slow = std::clamp(opt.top_rate / spread, opt.low_rate, opt.top_rate);
  const double s = (ma + mb) * opt.L / slow;
  const Hodlr as = scale(prob.A, 1.0 / s);
  const Hodlr bs = lyap ? Hodlr() : scale(prob.B, 1.0 / s);
  const QuadratureRule q = mapped_rule(opt.quad_points, opt.L);

  detail::IntegralContext ctx{as, lyap ? as : bs, prob.C, lyap, na / s, nb / s, cfg,
                              cfg.with_absolute(std::max(cfg.absolute, cfg.threshold)), opt,
                              builtin_cheb_table(opt.cheb_degree)};
  IntegralResult res;
  const Index m = q.size();
  std::vector<ExpStrategy> used(std::size_t(m), ExpStrategy::Pade);
  Hodlr x;
  if (!opt.parallel) {
    for (Index j = 0; j < m; ++j) {
      Hodlr t = detail::integral_term(ctx, q.f(j), q.omega(j), &used[std::size_t(j)]);
      x = j == 0 ? std::move(t) : add(x, t, cfg);
      res.report.memory_bytes = std::max(res.report.memory_bytes, x.storage_bytes() + 4 * prob.A.storage_bytes());
    }
  } else {
    std::vector<Hodlr> terms(static_cast<std::size_t>(m));
    const unsigned nthreads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<void>> pool;
    for (unsigned w = 0; w < nthreads; ++w) {
      pool.push_back(std::async(std::launch::async, [&, w] {
        for (Index j = Index(w); j < m; j += Index(nthreads))
          terms[std::size_t(j)] =
              detail::integral_term(ctx, q.f(j), q.omega(j), &used[std::size_t(j)]);
      }));
    }
    for (auto& f : pool) f.get();
    std::size_t bytes = 0;
    for (const auto& t : terms) bytes += t.storage_bytes();
    res.report.memory_bytes = bytes + 4 * prob.A.storage_bytes();
    // fixed pairwise reduction
    for (std::size_t stride = 1; stride < terms.size(); stride *= 2)
      for (std::size_t i = 0; i + stride < terms.size(); i += 2 * stride)
        terms[i] = add(terms[i], terms[i + stride], cfg);
    x = std::move(terms[0]);
  }
  scale_inplace(x, 1.0 / s);
  for (ExpStrategy e : used) (e == ExpStrategy::Pade ? res.pade_terms : res.chebyshev_terms)++;
  res.report.method = "expint";
  res.report.iterations = m;
  res.report.qs_rank = hodlr_rank(x);
  res.report.flops = fl.elapsed();
  if (opt.compute_residual) res.report.residual = residual_sylvester(prob, x);
  res.report.elapsed_s = sw.seconds();
  res.X = std::move(x);
  return res;
}

}  // namespace qsylv
