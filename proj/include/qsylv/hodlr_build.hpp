#pragma once

#include <functional>
#include <random>

#include "qsylv/band.hpp"
#include "qsylv/hodlr.hpp"

namespace qsylv {

namespace detail {

inline bool is_leaf_size(Index rows, Index cols, const HodlrConfig& cfg) {
  return std::min(rows, cols) <= cfg.block_size;
}

template <typename T>
LowRank<T> compress_dense(const Matrix<T>& blk, const HodlrConfig& cfg) {
  const auto tr = cfg.truncation();
  SvdResult<T> s = truncated_svd<T>(blk, tr.relative, tr.max_rank, tr.absolute);
  return LowRank<T>(s.U * s.S.asDiagonal(), s.V);
}

template <typename T>
HodlrMatrix<T> from_dense_impl(const Eigen::Ref<const Matrix<T>>& a, const HodlrConfig& cfg) {
  const Index m = a.rows(), n = a.cols();
  if (is_leaf_size(m, n, cfg)) return HodlrMatrix<T>(Matrix<T>(a));
  const Index m1 = m / 2, n1 = n / 2;
  return HodlrMatrix<T>(from_dense_impl<T>(a.topLeftCorner(m1, n1), cfg),
                        from_dense_impl<T>(a.bottomRightCorner(m - m1, n - n1), cfg),
                        compress_dense<T>(Matrix<T>(a.bottomLeftCorner(m - m1, n1)), cfg),
                        compress_dense<T>(Matrix<T>(a.topRightCorner(m1, n - n1)), cfg));
}

}  // namespace detail

template <typename T>
HodlrMatrix<T> from_dense(const Matrix<T>& a, const HodlrConfig& cfg = {}) {
  cfg.validate();
  if (!a.allFinite()) throw InvalidInput("from_dense: non-finite input");
  return detail::from_dense_impl<T>(a, cfg);
}

inline Hodlr from_dense(const DenseMatrix& a, const HodlrConfig& cfg = {}) { return from_dense<double>(a, cfg); }

// Same tree with every off-diagonal block empty.
template <typename T>
HodlrMatrix<T> zeros(Index n, const HodlrConfig& cfg = {}) {
  cfg.validate();
  if (detail::is_leaf_size(n, n, cfg)) return HodlrMatrix<T>(Matrix<T>::Zero(n, n));
  const Index n1 = n / 2, n2 = n - n1;
  return HodlrMatrix<T>(zeros<T>(n1, cfg), zeros<T>(n2, cfg), LowRank<T>(n2, n1), LowRank<T>(n1, n2));
}

template <typename T>
HodlrMatrix<T> diagonal_matrix(const Vec<T>& d, const HodlrConfig& cfg = {}) {
  const Index n = d.size();
  if (detail::is_leaf_size(n, n, cfg)) return HodlrMatrix<T>(Matrix<T>(d.asDiagonal()));
  const Index n1 = n / 2, n2 = n - n1;
  return HodlrMatrix<T>(diagonal_matrix<T>(Vec<T>(d.head(n1)), cfg), diagonal_matrix<T>(Vec<T>(d.tail(n2)), cfg),
                        LowRank<T>(n2, n1), LowRank<T>(n1, n2));
}

template <typename T = double>
HodlrMatrix<T> identity(Index n, const HodlrConfig& cfg = {}) {
  return diagonal_matrix<T>(Vec<T>::Ones(n), cfg);
}

// ---------------------------------------------------------------- banded

namespace detail {

// Corner block of a band restricted to rows [r0, r0+m) x cols [c0, c0+n).
inline LowRank<double> band_block(const BandMatrix& a, Index r0, Index m, Index c0, Index n) {
  const Index b = a.bandwidth();
  // nonzero rows/cols of the block lie within distance b of the diagonal
  Index rlo = std::max(r0, c0 - b), rhi = std::min(r0 + m, c0 + n + b);
  Index clo = std::max(c0, r0 - b), chi = std::min(c0 + n, r0 + m + b);
  if (rlo >= rhi || clo >= chi) return LowRank<double>(m, n);
  DenseMatrix core(rhi - rlo, chi - clo);
  for (Index i = rlo; i < rhi; ++i)
    for (Index j = clo; j < chi; ++j) core(i - rlo, j - clo) = a(i, j);
  if (core.isZero(0.0)) return LowRank<double>(m, n);
  SvdResult<double> s = truncated_svd<double>(core, 64.0 * eps_mach);
  DenseMatrix u = DenseMatrix::Zero(m, s.rank()), v = DenseMatrix::Zero(n, s.rank());
  u.middleRows(rlo - r0, rhi - rlo) = s.U * s.S.asDiagonal();
  v.middleRows(clo - c0, chi - clo) = s.V;
  return LowRank<double>(std::move(u), std::move(v));
}

inline Hodlr from_banded_impl(const BandMatrix& a, Index off, Index n, const HodlrConfig& cfg) {
  if (is_leaf_size(n, n, cfg)) {
    DenseMatrix l(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) l(i, j) = a(off + i, off + j);
    return Hodlr(std::move(l));
  }
  const Index n1 = n / 2, n2 = n - n1;
  return Hodlr(from_banded_impl(a, off, n1, cfg), from_banded_impl(a, off + n1, n2, cfg),
               band_block(a, off + n1, n2, off, n1), band_block(a, off, n1, off + n1, n2));
}

}  // namespace detail

// Exact HODLR form of a banded matrix; off-diagonal ranks never exceed the bandwidth.
inline Hodlr from_banded(const BandMatrix& a, const HodlrConfig& cfg = {}) {
  cfg.validate();
  if (a.size() > 0 && a.bandwidth() >= a.size()) throw InvalidInput("from_banded: bandwidth must be below n");
  return detail::from_banded_impl(a, 0, a.size(), cfg);
}

// Banded matrix given by its diagonals: diags[k] holds diagonal offset k - bandwidth.
inline Hodlr from_banded(const std::vector<Vector>& diags, Index n, const HodlrConfig& cfg = {}) {
  if (diags.size() % 2 == 0) throw InvalidInput("from_banded: need 2*bandwidth+1 diagonals");
  const Index b = Index(diags.size() / 2);
  if (n > 0 && b >= n) throw InvalidInput("from_banded: bandwidth must be below n");
  BandMatrix m(n, b);
  for (Index k = 0; k < Index(diags.size()); ++k) {
    const Index d = k - b;
    const Index len = n - (d < 0 ? -d : d);
    if (diags[k].size() != len) throw InvalidInput("from_banded: diagonal length mismatch");
    for (Index t = 0; t < len; ++t) {
      const Index i = d < 0 ? t - d : t;
      m.at(i, i + d) = diags[k](t);
    }
  }
  return from_banded(m, cfg);
}

// Constant-diagonal banded matrix, e.g. trid(-1, 2, -1) = toeplitz_band(n, {-1, 2, -1}).
inline BandMatrix toeplitz_band(Index n, const std::vector<double>& coeffs) {
  const Index b = Index(coeffs.size() / 2);
  BandMatrix m(n, std::min(b, std::max<Index>(n - 1, 0)));
  for (Index i = 0; i < n; ++i)
    for (Index d = -b; d <= b; ++d)
      if (i + d >= 0 && i + d < n && (d <= m.bandwidth() && -d <= m.bandwidth())) m.at(i, i + d) = coeffs[std::size_t(d + b)];
  return m;
}

// ---------------------------------------------------------------- function sampling

using Sampler = std::function<double(double, double)>;

namespace detail {

struct AcaBlock {
  const Sampler& f;
  const Vector& x;
  const Vector& y;
  Index r0, c0, m, n;
  double operator()(Index i, Index j) const { return f(x(r0 + i), y(c0 + j)); }
};

inline DenseMatrix sample_dense(const AcaBlock& b) {
  DenseMatrix a(b.m, b.n);
  for (Index j = 0; j < b.n; ++j)
    for (Index i = 0; i < b.m; ++i) a(i, j) = b(i, j);
  return a;
}

// Partial-pivot ACA; returns false when it did not converge cleanly.
inline bool aca(const AcaBlock& blk, double tol, Index max_rank, DenseMatrix& U, DenseMatrix& V) {
  const Index m = blk.m, n = blk.n;
  std::vector<Vector> us, vs;
  std::vector<char> used_row(std::size_t(m), 0);
  double approx_sq = 0.0;
  Index row = 0;
  Index zero_rows = 0;
  bool converged = false;
  while (Index(us.size()) < max_rank) {
    Vector r(n);
    for (Index j = 0; j < n; ++j) r(j) = blk(row, j);
    for (std::size_t l = 0; l < us.size(); ++l) r -= us[l](row) * vs[l];
    used_row[std::size_t(row)] = 1;
    Index jp;
    const double piv = r.cwiseAbs().maxCoeff(&jp);
    if (piv == 0.0 || piv <= 1e-300) {
      // zero residual row; move on to the next unused row
      ++zero_rows;
      Index next = -1;
      for (Index i = 0; i < m; ++i)
        if (!used_row[std::size_t(i)]) {
          next = i;
          break;
        }
      if (next < 0 || zero_rows > 8) {
        converged = !us.empty() || zero_rows >= std::min<Index>(m, 8);
        break;
      }
      row = next;
      continue;
    }
    zero_rows = 0;
    Vector v = r / r(jp);
    Vector u(m);
    for (Index i = 0; i < m; ++i) u(i) = blk(i, jp);
    for (std::size_t l = 0; l < us.size(); ++l) u -= vs[l](jp) * us[l];
    double cross = 0.0;
    for (std::size_t l = 0; l < us.size(); ++l) cross += us[l].dot(u) * vs[l].dot(v);
    const double nu = u.norm(), nv = v.norm();
    approx_sq += nu * nu * nv * nv + 2.0 * cross;
    us.push_back(u);
    vs.push_back(v);
    flops::add(4.0 * double(m + n) * double(us.size()));
    if (nu * nv <= tol * std::sqrt(std::max(approx_sq, 0.0))) {
      converged = true;
      break;
    }
    Index next = -1;
    double best = -1.0;
    for (Index i = 0; i < m; ++i)
      if (!used_row[std::size_t(i)] && std::abs(u(i)) > best) {
        best = std::abs(u(i));
        next = i;
      }
    if (next < 0) {
      converged = true;
      break;
    }
    row = next;
  }
  U.resize(m, Index(us.size()));
  V.resize(n, Index(vs.size()));
  for (std::size_t l = 0; l < us.size(); ++l) {
    U.col(Index(l)) = us[l];
    V.col(Index(l)) = vs[l];
  }
  return converged;
}

// Spot-check an approximation on random entries.
inline bool aca_verify(const AcaBlock& blk, const DenseMatrix& U, const DenseMatrix& V, double tol) {
  std::mt19937_64 gen(std::uint64_t(blk.r0) * 1000003u + std::uint64_t(blk.c0));
  std::uniform_int_distribution<Index> ri(0, blk.m - 1), ci(0, blk.n - 1);
  const double scale = U.cols() > 0 ? LowRank<double>(U, V).frobenius() / std::sqrt(double(blk.m) * double(blk.n)) : 0.0;
  double err = 0.0, mag = scale;
  for (int s = 0; s < 64; ++s) {
    const Index i = ri(gen), j = ci(gen);
    const double exact = blk(i, j);
    const double approx = U.cols() > 0 ? U.row(i).dot(V.row(j)) : 0.0;
    err = std::max(err, std::abs(exact - approx));
    mag = std::max(mag, std::abs(exact));
  }
  return err <= std::max(1e3 * tol, 1e-14) * mag || (err == 0.0);
}

inline LowRank<double> compress_sampled(const AcaBlock& blk, const HodlrConfig& cfg) {
  const Index small = 64;
  if (std::min(blk.m, blk.n) > small) {
    DenseMatrix U, V;
    const double tol = std::max(cfg.threshold, 1e-15);
    const Index cap = std::min({blk.m, blk.n, Index(200)});
    if (aca(blk, tol * 0.1, cap, U, V) && aca_verify(blk, U, V, tol)) {
      return recompress<double>(U, V, cfg.truncation());
    }
  }
  return compress_dense<double>(sample_dense(blk), cfg);
}

inline LowRank<double> sample_lowrank_block(const Sampler& f, const Vector& x, const Vector& y, Index r0, Index m,
                                            Index c0, Index n, const HodlrConfig& cfg) {
  AcaBlock blk{f, x, y, r0, c0, m, n};
  return compress_sampled(blk, cfg);
}

inline Hodlr from_function_impl(const Sampler& f, const Vector& x, const Vector& y, Index r0, Index m, Index c0,
                                Index n, const HodlrConfig& cfg, bool symmetric) {
  if (is_leaf_size(m, n, cfg)) {
    AcaBlock blk{f, x, y, r0, c0, m, n};
    return Hodlr(sample_dense(blk));
  }
  const Index m1 = m / 2, n1 = n / 2;
  LowRank<double> a21 = sample_lowrank_block(f, x, y, r0 + m1, m - m1, c0, n1, cfg);
  LowRank<double> a12 = symmetric ? a21.transposed() : sample_lowrank_block(f, x, y, r0, m1, c0 + n1, n - n1, cfg);
  return Hodlr(from_function_impl(f, x, y, r0, m1, c0, n1, cfg, symmetric),
               from_function_impl(f, x, y, r0 + m1, m - m1, c0 + n1, n - n1, cfg, symmetric), std::move(a21),
               std::move(a12));
}

}  // namespace detail

// Entry (i, j) = f(x_i, y_j). With symmetric = true the upper blocks mirror the lower ones.
inline Hodlr from_function(const Sampler& f, const Vector& x, const Vector& y, const HodlrConfig& cfg = {},
                           bool symmetric = false) {
  cfg.validate();
  if (symmetric && (x.size() != y.size() || x != y)) throw InvalidInput("from_function: symmetric needs equal grids");
  return detail::from_function_impl(f, x, y, 0, x.size(), 0, y.size(), cfg, symmetric);
}

// HODLR form of u v^T.
template <typename T>
HodlrMatrix<T> from_lowrank(const Matrix<T>& u, const Matrix<T>& v, const HodlrConfig& cfg = {}) {
  if (u.cols() != v.cols()) throw InvalidInput("from_lowrank: factor ranks differ");
  const Index m = u.rows(), n = v.rows();
  if (detail::is_leaf_size(m, n, cfg)) return HodlrMatrix<T>(prod(u, v.transpose()));
  const Index m1 = m / 2, n1 = n / 2;
  const Matrix<T> ut = u.topRows(m1), ub = u.bottomRows(m - m1), vt = v.topRows(n1), vb = v.bottomRows(n - n1);
  return HodlrMatrix<T>(from_lowrank<T>(ut, vt, cfg), from_lowrank<T>(ub, vb, cfg),
                        recompress<T>(ub, vt, cfg.truncation()), recompress<T>(ut, vb, cfg.truncation()));
}

}  // namespace qsylv
