#pragma once

#include "qsylv/band.hpp"
#include "qsylv/bounds.hpp"
#include "qsylv/hodlr_build.hpp"
#include "qsylv/solvers/problem.hpp"

namespace qsylv {

struct CgTruncation {
  enum class Kind { None, Band, Hodlr };
  Kind kind = Kind::None;
  Index bandwidth = -1;  // Band: cap on the iterate bandwidth
  HodlrConfig hodlr;     // Hodlr: iterate format

  static CgTruncation none() { return {}; }
  static CgTruncation band(Index k) { return {Kind::Band, k, {}}; }
  static CgTruncation hodlr_format(const HodlrConfig& cfg) { return {Kind::Hodlr, -1, cfg}; }
};

struct CgOptions {
  double tol = 1e-10;   // ||C - L(X)||_F <= tol ||C||_F
  Index max_iter = -1;  // < 0: derived from the condition number
  CgTruncation truncation;
  bool compute_residual = true;
};

struct CgResult {
  Hodlr X;
  SolverReport report;
  Index final_bandwidth = -1;  // Band mode only
};

namespace detail {

struct DenseSpace {
  using M = DenseMatrix;
  const Hodlr& a;
  const Hodlr& b;
  M apply(const M& x) const { return matmat(a, x) + matmat_t(b, DenseMatrix(x.transpose())).transpose(); }
  M axpby(double al, const M& x, double be, const M& y) const { return al * x + be * y; }
  double dot(const M& x, const M& y) const { return x.cwiseProduct(y).sum(); }
  std::size_t bytes(const M& x) const { return std::size_t(x.size()) * sizeof(double); }
};

struct BandSpace {
  using M = BandMatrix;
  BandMatrix a, b;
  Index cap;
  M apply(const M& x) const {
    return BandMatrix::combine(1.0, a.multiply(x, cap), 1.0, x.multiply(b, cap));
  }
  M axpby(double al, const M& x, double be, const M& y) const {
    M r = BandMatrix::combine(al, x, be, y);
    return cap >= 0 && r.bandwidth() > cap ? r.rebanded(cap) : r;
  }
  double dot(const M& x, const M& y) const { return x.dot(y); }
  std::size_t bytes(const M& x) const { return x.storage_bytes(); }
};

struct HodlrSpace {
  using M = Hodlr;
  const Hodlr& a;
  const Hodlr& b;
  HodlrConfig cfg;
  M apply(const M& x) const { return add(multiply(a, x, cfg), multiply(x, b, cfg), cfg); }
  M axpby(double al, const M& x, double be, const M& y) const { return combine(al, x, be, y, cfg); }
  double dot(const M& x, const M& y) const { return frobenius_dot(x, y); }
  std::size_t bytes(const M& x) const { return x.storage_bytes(); }
};

template <typename Space>
typename Space::M cg_core(const Space& sp, const typename Space::M& c, typename Space::M x, double tol, Index max_iter,
                          SolverReport& rep) {
  using M = typename Space::M;
  const double nc = std::sqrt(sp.dot(c, c));
  if (nc == 0.0) return x;
  M r = sp.axpby(1.0, c, -1.0, sp.apply(x));
  M p = r;
  double rr = sp.dot(r, r);
  rep.history.push_back(std::sqrt(rr) / nc);
  Index it = 0;
  while (std::sqrt(rr) > tol * nc) {
    if (it >= max_iter)
      throw ConvergenceFailure("cg_matrix_solve: no convergence within max_iter", rep.history.back(), rep.history);
    const M q = sp.apply(p);
    const double pq = sp.dot(p, q);
    if (!(pq > 0)) throw NumericalFailure("cg_matrix_solve: operator not positive definite");
    const double al = rr / pq;
    x = sp.axpby(1.0, x, al, p);
    r = sp.axpby(1.0, r, -al, q);
    const double rr_new = sp.dot(r, r);
    p = sp.axpby(1.0, r, rr_new / rr, p);
    rr = rr_new;
    ++it;
    rep.history.push_back(std::sqrt(rr) / nc);
    rep.memory_bytes = std::max(rep.memory_bytes, sp.bytes(x) + sp.bytes(r) + sp.bytes(p) + sp.bytes(q));
  }
  rep.iterations = it;
  return x;
}

}  // namespace detail

// Condition number of X -> AX + XB for SPD A, B.
inline double sylvester_condition(const SylvesterProblem& prob, const HodlrConfig& cfg) {
  const bool lyap = prob.lyapunov || detail::is_same_matrix(prob.A, prob.B);
  const double na = two_norm_estimate(prob.A), nb = lyap ? na : two_norm_estimate(prob.B);
  const double ma = detail::smallest_eigenvalue(prob.A, cfg);
  const double mb = lyap ? ma : detail::smallest_eigenvalue(prob.B, cfg);
  return (na + nb) / (ma + mb);
}

// Conjugate gradients on vec(X) with <X, Y> = trace(X^T Y), iterates kept in matrix form.
inline CgResult cg_matrix_solve(const SylvesterProblem& prob, const HodlrConfig& cfg, const CgOptions& opt = {}) {
  cfg.validate();
  if (prob.A.rows() != prob.A.cols() || prob.B.rows() != prob.B.cols() || prob.C.rows() != prob.A.rows() ||
      prob.C.cols() != prob.B.rows())
    throw InvalidInput("cg_matrix_solve: dimension mismatch");
  if (!(opt.tol > 0)) throw InvalidInput("cg_matrix_solve: tol must be positive");
  detail::Stopwatch sw;
  flops::Scope fl;
  Index max_iter = opt.max_iter;
  if (max_iter < 0) {
    // 10 sqrt(kappa), raised to the CG bound sqrt(kappa)/2 ln(2/tol) with a factor 2 margin
    const double sk = std::sqrt(sylvester_condition(prob, cfg));
    max_iter = std::max<Index>(10, Index(std::ceil(sk * std::max(10.0, std::log(2.0 / opt.tol)))));
  }

  CgResult res;
  SolverReport& rep = res.report;
  rep.method = "cg";
  const Index m = prob.A.rows(), n = prob.B.rows();
  switch (opt.truncation.kind) {
    case CgTruncation::Kind::None: {
      detail::DenseSpace sp{prob.A, prob.B};
      DenseMatrix x = detail::cg_core(sp, to_dense(prob.C), DenseMatrix(DenseMatrix::Zero(m, n)), opt.tol, max_iter, rep);
      res.X = from_dense(x, cfg);
      break;
    }
    case CgTruncation::Kind::Band: {
      if (m != n) throw InvalidInput("cg_matrix_solve: band mode needs square X");
      detail::BandSpace sp{BandMatrix::from_dense(to_dense(prob.A)), BandMatrix::from_dense(to_dense(prob.B)),
                           opt.truncation.bandwidth};
      const BandMatrix c = BandMatrix::from_dense(to_dense(prob.C));
      BandMatrix x = detail::cg_core(sp, c, BandMatrix(n, 0), opt.tol, max_iter, rep);
      res.final_bandwidth = x.effective_bandwidth();
      res.X = from_dense(x.to_dense(), cfg);
      break;
    }
    case CgTruncation::Kind::Hodlr: {
      const HodlrConfig& hc = opt.truncation.hodlr;
      hc.validate();
      detail::HodlrSpace sp{prob.A, prob.B, hc};
      // iterates share the tree of C; hc only sets the truncation
      Hodlr x0 = scale(prob.C, 0.0);
      truncate_inplace(x0, hc);
      res.X = detail::cg_core(sp, prob.C, std::move(x0), opt.tol, max_iter, rep);
      break;
    }
  }
  rep.qs_rank = hodlr_rank(res.X);
  rep.flops = fl.elapsed();
  if (opt.compute_residual) rep.residual = residual_sylvester(prob, res.X);
  rep.elapsed_s = sw.seconds();
  return res;
}

}  // namespace qsylv
