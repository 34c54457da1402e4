#pragma once

#include <map>

#include "qsylv/bounds.hpp"
#include "qsylv/solvers/extended_krylov.hpp"
#include "qsylv/solvers/integral.hpp"
#include "qsylv/solvers/sign.hpp"

namespace qsylv {

enum class InnerSolver { Sign, Expint };

struct GeneralizedOptions {
  InnerSolver inner = InnerSolver::Sign;
  SignOptions sign;
  IntegralOptions expint;
  double krylov_tol = 1e-10;  // rank-1 solves; the residual floor is about kappa(A) eps
  double series_tol = 1e-12;  // Neumann: stop when ||Z_l|| <= series_tol ||X_l||
  Index max_terms = 100;
  bool compute_residual = true;
};

struct GeneralizedResult {
  Hodlr X;
  SolverReport report;
  Index standard_solves = 0;  // quasiseparable Lyapunov solves
  Index lowrank_solves = 0;   // extended Krylov pair solves
};

namespace detail {

inline Hodlr inner_solve(const SylvesterProblem& p, const HodlrConfig& cfg, const GeneralizedOptions& opt) {
  if (opt.inner == InnerSolver::Sign) {
    SignOptions o = opt.sign;
    o.compute_residual = false;
    return sign_solve(p, cfg, o).X;
  }
  IntegralOptions o = opt.expint;
  o.compute_residual = false;
  return integral_solve(p, cfg, o).X;
}

inline void check_generalized(const GeneralizedProblem& p) {
  const Index n = p.A.rows();
  if (p.A.cols() != n || p.C.rows() != n || p.C.cols() != n) throw InvalidInput("generalized: dimension mismatch");
  for (const auto& t : p.terms) {
    if (auto* l = std::get_if<LowRankTerm>(&t)) {
      if (l->U.rows() != n || l->V.rows() != n || l->U.cols() != l->V.cols())
        throw InvalidInput("generalized: low-rank term dimension mismatch");
    } else if (std::get<QsTerm>(t).M.rows() != n || std::get<QsTerm>(t).M.cols() != n) {
      throw InvalidInput("generalized: term dimension mismatch");
    }
  }
}

inline void finish_report(GeneralizedResult& res, const GeneralizedProblem& p, const GeneralizedOptions& opt,
                          const Stopwatch& sw, const flops::Scope& fl) {
  res.report.qs_rank = hodlr_rank(res.X);
  res.report.flops = fl.elapsed();
  res.report.memory_bytes = std::max(res.report.memory_bytes, res.X.storage_bytes() + 3 * p.A.storage_bytes());
  if (opt.compute_residual) {
    const GeneralizedResidual r = residual_generalized(p, res.X);
    res.report.residual = r.value;
    res.report.residual_warning = r.warning;
  }
  res.report.elapsed_s = sw.seconds();
}

}  // namespace detail

// Sherman-Morrison-Woodbury: X = Xh - sum z_(a,b) Z_ab with A Xh + Xh A = C and
// A Z_ab + Z_ab A = u_b u_a^T for every pair of columns of each U_j.
inline GeneralizedResult smw_generalized_solve(const GeneralizedProblem& prob, const HodlrConfig& cfg,
                                               const GeneralizedOptions& opt = {}) {
  cfg.validate();
  detail::check_generalized(prob);
  detail::Stopwatch sw;
  flops::Scope fl;
  GeneralizedResult res;
  res.report.method = "smw";

  struct Col {
    std::size_t term;
    Index a, b;
  };
  std::vector<Col> cols;
  std::vector<const LowRankTerm*> lr;
  for (const auto& t : prob.terms) {
    const auto* l = std::get_if<LowRankTerm>(&t);
    if (!l) throw InvalidInput("smw_generalized_solve: quasiseparable terms need the Neumann solver");
    lr.push_back(l);
  }
  for (std::size_t j = 0; j < lr.size(); ++j)
    for (Index a = 0; a < lr[j]->rank(); ++a)
      for (Index b = 0; b < lr[j]->rank(); ++b) cols.push_back({j, a, b});

  Hodlr xh = detail::inner_solve(prob.base(), cfg, opt);
  res.standard_solves = 1;
  const Index r = Index(cols.size());
  if (r == 0) {
    res.X = std::move(xh);
    res.report.iterations = 1;
    detail::finish_report(res, prob, opt, sw, fl);
    return res;
  }

  // one extended Krylov basis per generating column u
  const Hodlr ainv = invert(prob.A, cfg);
  std::map<std::pair<std::size_t, Index>, ExtendedKrylov> bases;
  auto basis = [&](std::size_t j, Index a) -> ExtendedKrylov& {
    auto key = std::make_pair(j, a);
    auto it = bases.find(key);
    if (it == bases.end()) it = bases.emplace(key, ExtendedKrylov(prob.A, ainv, Vector(lr[j]->U.col(a)))).first;
    return it->second;
  };
  std::vector<LowRank<double>> z(std::size_t(r), LowRank<double>(prob.A.rows(), prob.A.rows()));
  for (Index k = 0; k < r; ++k) {
    const Col& c = cols[std::size_t(k)];
    const Vector ua = lr[c.term]->U.col(c.a), ub = lr[c.term]->U.col(c.b);
    if (!(ua.norm() > 0 && ub.norm() > 0)) continue;  // zero column: Z = 0
    EkSolution s = ek_solve_pair(basis(c.term, c.b), basis(c.term, c.a), ub, ua, opt.krylov_tol);
    z[std::size_t(k)] = std::move(s.Z);
    ++res.lowrank_solves;
  }

  // capacitance system (I + K) zhat = g, K_(c,d),(a,b) = v_d^T Z_ab v_c, g_(c,d) = v_d^T Xh v_c
  DenseMatrix kmat = DenseMatrix::Identity(r, r);
  Vector g(r);
  std::vector<DenseMatrix> xv(lr.size());
  for (std::size_t j = 0; j < lr.size(); ++j) xv[j] = prod(lr[j]->V.transpose(), matmat(xh, lr[j]->V));
  for (Index row = 0; row < r; ++row) {
    const Col& cd = cols[std::size_t(row)];
    const Vector vc = lr[cd.term]->V.col(cd.a), vd = lr[cd.term]->V.col(cd.b);
    g(row) = xv[cd.term](cd.b, cd.a);
    for (Index k = 0; k < r; ++k) {
      const LowRank<double>& zk = z[std::size_t(k)];
      if (zk.rank() == 0) continue;
      kmat(row, k) += (vd.transpose() * zk.U).dot(zk.V.transpose() * vc);
    }
  }
  // K is accurate to about krylov_tol relative to its own entries
  Eigen::FullPivLU<DenseMatrix> lu(kmat);
  const double scale = 1.0 + (kmat - DenseMatrix::Identity(r, r)).cwiseAbs().maxCoeff();
  const double pmin = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(pmin > 10.0 * opt.krylov_tol * scale))
    throw SingularMatrix("smw_generalized_solve: singular correction system", lu.rank());
  flops::add(2.0 / 3.0 * double(r) * double(r) * double(r));
  const Vector zhat = lu.solve(g);
  Hodlr x = std::move(xh);
  for (Index k = 0; k < r; ++k) {
    const LowRank<double>& zk = z[std::size_t(k)];
    if (zk.rank() == 0 || zhat(k) == 0.0) continue;
    add_lowrank_inplace(x, DenseMatrix(-zhat(k) * zk.U), zk.V, cfg);
  }
  res.X = std::move(x);
  res.report.iterations = 1 + res.lowrank_solves;
  Index maxdim = 0;
  for (const auto& [key, b] : bases) maxdim = std::max(maxdim, b.dim());
  res.report.memory_bytes = std::size_t(bases.size()) * std::size_t(2 * maxdim * prob.A.rows()) * sizeof(double);
  detail::finish_report(res, prob, opt, sw, fl);
  return res;
}

// Neumann series: A Z_0 + Z_0 A = C, A Z_{i+1} + Z_{i+1} A = -sum M_j Z_i M_j^T, X = sum Z_i.
inline GeneralizedResult neumann_generalized_solve(const GeneralizedProblem& prob, const HodlrConfig& cfg,
                                                   const GeneralizedOptions& opt = {}) {
  cfg.validate();
  detail::check_generalized(prob);
  if (opt.max_terms < 1) throw InvalidInput("neumann_generalized_solve: max_terms must be positive");
  detail::Stopwatch sw;
  flops::Scope fl;
  GeneralizedResult res;
  res.report.method = "neumann";

  SylvesterProblem sp = prob.base();
  Hodlr zi = detail::inner_solve(sp, cfg, opt);
  Hodlr x = zi;
  Index terms = 1, growth = 0;
  double nz = frobenius_norm(zi);
  res.standard_solves = 1;
  while (nz > opt.series_tol * frobenius_norm(x)) {
    if (terms >= opt.max_terms)
      throw ConvergenceFailure("neumann_generalized_solve: series did not converge within max_terms", nz, res.report.history);
    Hodlr rhs = scale(prob.C, 0.0);
    truncate_inplace(rhs, cfg);
    for (const auto& t : prob.terms) detail::add_term_product(rhs, t, zi, cfg);
    scale_inplace(rhs, -1.0);
    if (frobenius_norm(rhs) == 0.0) break;
    sp.C = std::move(rhs);
    Hodlr zn = detail::inner_solve(sp, cfg, opt);
    ++res.standard_solves;
    const double nn = frobenius_norm(zn);
    const double ratio = nz > 0 ? nn / nz : 0.0;
    res.report.history.push_back(ratio);
    growth = ratio >= 1.0 ? growth + 1 : 0;
    if (growth >= 3) throw DivergenceError("neumann_generalized_solve: series diverges (ratio >= 1 three times)", ratio);
    x = add(x, zn, cfg);
    zi = std::move(zn);
    nz = nn;
    ++terms;
    res.report.memory_bytes = std::max(res.report.memory_bytes, x.storage_bytes() + zi.storage_bytes());
  }
  res.X = std::move(x);
  res.report.iterations = terms;
  detail::finish_report(res, prob, opt, sw, fl);
  return res;
}

// Dense reference: (I (x) A + A (x) I + sum M_j (x) M_j) vec X = vec C.
inline DenseMatrix kronecker_generalized_oracle(const GeneralizedProblem& p) {
  const Index n = p.A.rows();
  if (n > 64) throw InvalidInput("kronecker_generalized_oracle: n too large for the n^2 x n^2 system");
  const DenseMatrix a = to_dense(p.A), id = DenseMatrix::Identity(n, n);
  auto kron = [n](const DenseMatrix& x, const DenseMatrix& y) {
    DenseMatrix k(n * n, n * n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) k.block(i * n, j * n, n, n) = x(i, j) * y;
    return k;
  };
  DenseMatrix s = kron(id, a) + kron(a, id);
  for (const auto& t : p.terms) {
    DenseMatrix m;
    if (auto* l = std::get_if<LowRankTerm>(&t))
      m = l->U * l->V.transpose();
    else
      m = to_dense(std::get<QsTerm>(t).M);
    s += kron(m, m);
  }
  const DenseMatrix c = to_dense(p.C);
  const Vector x = solve_dense<double>(s, DenseMatrix(Eigen::Map<const Vector>(c.data(), n * n)));
  return Eigen::Map<const DenseMatrix>(x.data(), n, n);
}

}  // namespace qsylv
