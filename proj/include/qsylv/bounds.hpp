#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "qsylv/hodlr.hpp"
#include "qsylv/solvers/problem.hpp"

namespace qsylv {

// Complete elliptic integral of the first kind, modulus lambda, by the AGM.
inline double elliptic_K(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidInput("elliptic_K: modulus must lie in (0, 1)");
  double a = 1.0, g = std::sqrt((1.0 - lambda) * (1.0 + lambda));
  for (int i = 0; i < 64 && std::abs(a - g) > 1e-16 * a; ++i) {
    const double an = 0.5 * (a + g);
    g = std::sqrt(a * g);
    a = an;
  }
  return std::numbers::pi / (2.0 * a);
}

inline double grotzsch_mu(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidInput("grotzsch_mu: argument must lie in (0, 1)");
  const double comp = std::sqrt((1.0 - lambda) * (1.0 + lambda));
  return std::numbers::pi / 2.0 * elliptic_K(comp) / elliptic_K(lambda);
}

struct SpectralInterval {
  double a = 1.0;
  double b = 1.0;
  void validate() const {
    if (!(a > 0.0)) throw InvalidInput("SpectralInterval: a must be positive");
    if (!(b >= a)) throw InvalidInput("SpectralInterval: need b >= a");
  }
};

struct ZolotarevRho {
  double elliptic = 0.0;
  double weak = 0.0;
};

inline ZolotarevRho zolotarev_rho(const SpectralInterval& iv) {
  iv.validate();
  const double pi2 = std::numbers::pi * std::numbers::pi;
  ZolotarevRho r;
  r.weak = std::exp(pi2 / (2.0 * std::log(4.0 * iv.b / iv.a)));
  r.elliptic = iv.a == iv.b ? std::numeric_limits<double>::infinity()
                            : std::exp(pi2 / (2.0 * grotzsch_mu(iv.a / iv.b)));
  return r;
}

enum class RankStructure { General, Banded, Generalized };

struct DecayBound {
  double rho = 0.0;
  Index block_rank_k = 0;

  // 4 rho^{-2l}
  double predicted(Index l) const {
    if (std::isinf(rho)) return l == 0 ? 4.0 : 0.0;
    return 4.0 * std::pow(rho, -2.0 * double(l));
  }
  // smallest l with predicted(l) <= eps
  Index ell_for(double eps) const {
    if (std::isinf(rho)) return 1;
    return std::max<Index>(0, Index(std::ceil(std::log(4.0 / eps) / (2.0 * std::log(rho)))));
  }
  Index rank_bound(double eps) const { return block_rank_k * ell_for(eps); }
};

inline DecayBound offdiag_decay_bound(Index kA, Index kB, Index kC, const SpectralInterval& iv,
                                      RankStructure structure = RankStructure::General,
                                      const std::vector<Index>& term_ranks = {}) {
  if (kA < 0 || kB < 0 || kC < 0) throw InvalidInput("offdiag_decay_bound: negative rank");
  DecayBound d;
  d.rho = zolotarev_rho(iv).elliptic;
  switch (structure) {
    case RankStructure::General: d.block_rank_k = kA + kB + kC; break;
    case RankStructure::Banded: d.block_rank_k = std::max(kA + kB, kC); break;
    case RankStructure::Generalized: {
      Index r = 0;
      for (Index x : term_ranks) r += x;
      d.block_rank_k = 2 * kA + kC + r;
      break;
    }
  }
  return d;
}

namespace detail {
inline Index block_eps_rank(const DenseMatrix& y, double eps) {
  if (y.size() == 0) return 0;
  // eps below roundoff still treats rounding-level values as zero
  return truncated_svd(y, std::max(eps, 4.0 * std::numeric_limits<double>::epsilon())).S.size();
}

inline Index eps_qs_rank_impl(const DenseMatrix& a, Index off, Index n, double eps) {
  if (n < 2) return 0;
  const Index n1 = n / 2, n2 = n - n1;
  const Index lo = block_eps_rank(a.block(off + n1, off, n2, n1), eps);
  const Index up = block_eps_rank(a.block(off, off + n1, n1, n2), eps);
  return std::max({lo, up, eps_qs_rank_impl(a, off, n1, eps), eps_qs_rank_impl(a, off + n1, n2, eps)});
}
}  // namespace detail

// Max epsilon-rank over the split-aligned off-diagonal blocks, relative to each block's sigma_1.
inline Index eps_qs_rank(const DenseMatrix& a, double eps) {
  if (a.rows() != a.cols()) throw InvalidInput("eps_qs_rank: matrix not square");
  return detail::eps_qs_rank_impl(a, 0, a.rows(), eps);
}

// ---------------------------------------------------------------- residuals

namespace detail {
inline HodlrConfig exact_cfg() {
  HodlrConfig c;
  c.threshold = 0.0;
  return c;
}
}  // namespace detail

// ||AX + XB - C||_F / (sqrt(n (||A||_F^2 + ||B||_F^2)) ||X||_F)
inline double residual_sylvester(const Hodlr& a, const Hodlr& b, const Hodlr& c, const Hodlr& x) {
  const double nx = frobenius_norm(x);
  if (!(nx > 0.0)) throw InvalidInput("residual_sylvester: undefined for X = 0");
  const HodlrConfig ex = detail::exact_cfg();
  Hodlr r = add(multiply(a, x, ex), multiply(x, b, ex), ex);
  r = subtract(r, c, ex);
  const double na = frobenius_norm(a), nb = frobenius_norm(b);
  const double n = double(a.rows());
  return frobenius_norm(r) / (std::sqrt(n * (na * na + nb * nb)) * nx);
}

inline double residual_sylvester(const SylvesterProblem& p, const Hodlr& x) {
  return residual_sylvester(p.A, p.B, p.C, x);
}

struct GeneralizedResidual {
  double value = 0.0;
  bool warning = false;  // denominator bound not positive: value is unnormalized
};

namespace detail {
inline double term_frobenius(const GeneralizedTerm& t) {
  if (auto* l = std::get_if<LowRankTerm>(&t)) return LowRank<double>(l->U, l->V).frobenius();
  return frobenius_norm(std::get<QsTerm>(t).M);
}

// r += M X M^T
inline void add_term_product(Hodlr& r, const GeneralizedTerm& t, const Hodlr& x, const HodlrConfig& cfg) {
  if (auto* l = std::get_if<LowRankTerm>(&t)) {
    if (l->rank() == 0) return;
    const DenseMatrix g = prod(l->V.transpose(), matmat(x, l->V));  // V^T X V
    add_lowrank_inplace(r, prod(l->U, g), l->U, cfg);
    return;
  }
  const Hodlr& m = std::get<QsTerm>(t).M;
  r = add(r, multiply(multiply(m, x, cfg), transpose(m), cfg), cfg);
}
}  // namespace detail

inline GeneralizedResidual residual_generalized(const GeneralizedProblem& p, const Hodlr& x) {
  const double nx = frobenius_norm(x);
  if (!(nx > 0.0)) throw InvalidInput("residual_generalized: undefined for X = 0");
  const HodlrConfig ex = detail::exact_cfg();
  Hodlr r = add(multiply(p.A, x, ex), multiply(x, p.A, ex), ex);
  for (const auto& t : p.terms) detail::add_term_product(r, t, x, ex);
  r = subtract(r, p.C, ex);
  const double na = frobenius_norm(p.A);
  double bound = std::sqrt(2.0 * double(p.size())) * na;
  for (const auto& t : p.terms) {
    const double f = detail::term_frobenius(t);
    bound -= f * f;
  }
  const double num = frobenius_norm(r);
  if (!(bound > 0.0)) return {num, true};
  return {num / (bound * nx), false};
}

}  // namespace qsylv
