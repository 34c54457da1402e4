#pragma once

#include <random>

#include "qsylv/hodlr_build.hpp"
#include "qsylv/solvers/problem.hpp"

namespace qsylv {

enum class Domain { Unit, Symmetric };  // [0, 1] or [-1, 1]

inline Vector uniform_grid(Index n, Domain d) {
  return d == Domain::Unit ? Vector::LinSpaced(n, 0.0, 1.0) : Vector::LinSpaced(n, -1.0, 1.0);
}

// (n-1)^2 trid(-1, 2, -1)
inline Hodlr scaled_laplacian(Index n, const HodlrConfig& cfg) {
  BandMatrix t = toeplitz_band(n, {-1.0, 2.0, -1.0});
  Hodlr a = from_banded(t, cfg);
  scale_inplace(a, double(n - 1) * double(n - 1));
  return a;
}

inline SylvesterProblem laplace_log(Index n, double tau = 1.0, const HodlrConfig& cfg = {},
                                    Domain domain = Domain::Unit) {
  if (n < 3) throw InvalidInput("laplace_log: need n >= 3");
  if (!(tau > 0)) throw InvalidInput("laplace_log: tau must be positive");
  SylvesterProblem p;
  p.A = scaled_laplacian(n, cfg);
  p.B = p.A;
  p.lyapunov = true;
  const Vector x = uniform_grid(n, domain);
  p.C = from_function([tau](double a, double b) { return std::log(tau + std::abs(a - b)); }, x, x, cfg, true);
  p.name = "laplace-log";
  return p;
}

inline BandMatrix heat_coefficient(Index m) {
  const double a = 1.36, e = -0.34;
  const Index n = 6 * m;
  BandMatrix A(n, std::min<Index>(6, n - 1));
  for (Index blk = 0; blk < m; ++blk) {
    for (Index i = 0; i < 6; ++i) {
      const Index r = 6 * blk + i;
      A.at(r, r) = a;
      if (i + 1 < 6) A.at(r, r + 1) = A.at(r + 1, r) = e;
      if (blk + 1 < m) A.at(r, r + 6) = A.at(r + 6, r) = e;
    }
  }
  return A;
}

inline BandMatrix heat_rhs(Index m) {
  const Index n = 6 * m;
  BandMatrix C(n, std::min<Index>(11, n - 1));
  for (Index blk = 0; blk < m; ++blk)
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 6; ++j) {
        const Index r = 6 * blk + i, c = 6 * blk + j;
        C.at(r, c) = 0.2 + (i == j ? 0.8 : 0.0);
        if (blk + 1 < m) C.at(r, c + 6) = C.at(r + 6, c) = 0.1;
      }
  return C;
}

// A = I_m (x) (a I_6 + e S_6) + e S_m (x) I_6, C = I_m (x) (0.2 11^T + 0.8 I) + 0.1 S_m (x) 11^T
inline SylvesterProblem heat_haber(Index m, const HodlrConfig& cfg = {}) {
  if (m < 2) throw InvalidInput("heat_haber: need m >= 2");
  SylvesterProblem p;
  p.A = from_banded(heat_coefficient(m), cfg);
  p.B = p.A;
  p.lyapunov = true;
  p.C = from_banded(heat_rhs(m), cfg);
  p.name = "heat";
  return p;
}

// A X + X A + M X M^T = C with M = U V^T, U = sin(3x)/(n-1), V = trapezoid-weighted sin(3x).
inline GeneralizedProblem integro_pde(Index n, const HodlrConfig& cfg = {}) {
  if (n < 3) throw InvalidInput("integro_pde: need n >= 3");
  GeneralizedProblem p;
  p.A = scaled_laplacian(n, cfg);
  const Vector x = uniform_grid(n, Domain::Unit);
  p.C = from_function([](double a, double b) { return std::log(1.0 + std::abs(a - b)); }, x, x, cfg, true);
  LowRankTerm t;
  t.U = (x.array() * 3.0).sin().matrix() / double(n - 1);
  t.V = (x.array() * 3.0).sin().matrix();
  t.V(0, 0) *= 0.5;
  t.V(n - 1, 0) *= 0.5;
  p.terms.emplace_back(std::move(t));
  p.name = "integro";
  return p;
}

namespace detail {

inline DenseMatrix trid_dense(Index n, double lo, double d, double up) {
  DenseMatrix a = DenseMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = d;
    if (i > 0) a(i, i - 1) = lo;
    if (i + 1 < n) a(i, i + 1) = up;
  }
  return a;
}

// symmetric, quasiseparable rank 1: C_ij = u_max(i,j) v_min(i,j)
inline DenseMatrix semiseparable_rhs(Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Vector u(n), v(n);
  for (Index i = 0; i < n; ++i) u(i) = nd(gen);
  for (Index i = 0; i < n; ++i) v(i) = nd(gen);
  DenseMatrix c(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) c(i, j) = u(std::max(i, j)) * v(std::min(i, j));
  return c;
}

inline DenseMatrix random_sym_trid(Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  DenseMatrix c = DenseMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    c(i, i) = nd(gen);
    if (i + 1 < n) c(i, i + 1) = c(i + 1, i) = nd(gen);
  }
  return c;
}

inline DenseMatrix random_diag(Index n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  DenseMatrix c = DenseMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) c(i, i) = ud(gen);
  return c;
}

}  // namespace detail

// Structure tests 1..4. rhs selects the banded (1) or dense quasiseparable (2) right-hand side of tests 1 and 3.
//   1: A = trid(-1, 2.2, -1), spectrum in [0.2, 4.2]; B = A
//   2: A = trid(-1, 2, -1) - 1.99 I (indefinite); B = A; C random diagonal
//   3: A = 0.2 I + 3.45 T in [0.2, 14], B = -(0.5 I + 3.375 T) with -B in [0.5, 14]
//   4: A = trid(-1, 2, -1); B = A; C random diagonal
inline SylvesterProblem structure_tests(int test_case, Index n, std::uint64_t seed = 0, int rhs = 1,
                                        const HodlrConfig& cfg = {}) {
  if (n < 8) throw InvalidInput("structure_tests: need n >= 8");
  if (rhs != 1 && rhs != 2) throw InvalidInput("structure_tests: rhs variant must be 1 or 2");
  std::mt19937_64 gen(seed);
  const DenseMatrix t = detail::trid_dense(n, -1.0, 2.0, -1.0);
  const DenseMatrix id = DenseMatrix::Identity(n, n);
  DenseMatrix a, b, c;
  bool lyap = true;
  switch (test_case) {
    case 1:
      a = t + 0.2 * id;
      c = rhs == 1 ? detail::random_sym_trid(n, gen) : detail::semiseparable_rhs(n, gen);
      break;
    case 2:
      a = t - 1.99 * id;
      c = detail::random_diag(n, gen);
      break;
    case 3:
      a = 0.2 * id + 3.45 * t;
      b = -(0.5 * id + 3.375 * t);
      lyap = false;
      c = rhs == 1 ? detail::random_sym_trid(n, gen) : detail::semiseparable_rhs(n, gen);
      break;
    case 4:
      a = t;
      c = detail::random_diag(n, gen);
      break;
    default:
      throw InvalidInput("structure_tests: case must be 1..4");
  }
  SylvesterProblem p;
  p.A = from_dense(a, cfg);
  p.B = lyap ? p.A : from_dense(b, cfg);
  p.lyapunov = lyap;
  p.C = from_dense(c, cfg);
  p.name = "test" + std::to_string(test_case);
  return p;
}

// Random SPD tridiagonal A and B (diagonally dominant), C = semiseparable rank-1 plus a positive diagonal.
inline SylvesterProblem random_spd(Index n, std::uint64_t seed = 0, const HodlrConfig& cfg = {}) {
  if (n < 2) throw InvalidInput("random_spd: need n >= 2");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  auto spd = [&] {
    BandMatrix m(n, 1);
    for (Index i = 0; i + 1 < n; ++i) m.at(i, i + 1) = m.at(i + 1, i) = -ud(gen);
    for (Index i = 0; i < n; ++i) m.at(i, i) = 2.0 + ud(gen);
    return m;
  };
  SylvesterProblem p;
  p.A = from_banded(spd(), cfg);
  p.B = from_banded(spd(), cfg);
  p.lyapunov = false;
  DenseMatrix c = detail::semiseparable_rhs(n, gen);
  for (Index i = 0; i < n; ++i) c(i, i) += 1.0 + ud(gen);
  p.C = from_dense(c, cfg);
  p.name = "random-spd";
  return p;
}

}  // namespace qsylv
