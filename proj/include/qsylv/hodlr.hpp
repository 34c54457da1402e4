#pragma once

#include <memory>
#include <optional>
#include <random>

#include "qsylv/dense.hpp"
#include "qsylv/lanczos.hpp"
#include "qsylv/lowrank.hpp"

namespace qsylv {

struct HodlrConfig {
  double threshold = 1e-12;  // relative to sigma_1 of each off-diagonal block
  Index block_size = 256;    // leaf when size <= block_size
  std::optional<Index> max_rank;
  double absolute = 0.0;     // optional absolute floor on kept singular values

  void validate() const {
    if (!(threshold >= 0)) throw InvalidInput("HodlrConfig: threshold must be >= 0");
    if (block_size < 2) throw InvalidInput("HodlrConfig: block_size must be >= 2");
    if (!(absolute >= 0)) throw InvalidInput("HodlrConfig: absolute floor must be >= 0");
    if (max_rank && *max_rank < 0) throw InvalidInput("HodlrConfig: max_rank must be >= 0");
  }
  Truncation truncation() const { return {threshold, absolute, max_rank.value_or(-1)}; }
  HodlrConfig with_absolute(double a) const {
    HodlrConfig c = *this;
    c.absolute = a;
    return c;
  }
};

template <typename T>
class HodlrMatrix {
 public:
  using Scalar = T;

  HodlrMatrix() = default;
  explicit HodlrMatrix(Matrix<T> leaf) : rows_(leaf.rows()), cols_(leaf.cols()), leaf_(std::move(leaf)) {}
  HodlrMatrix(HodlrMatrix a11, HodlrMatrix a22, LowRank<T> a21, LowRank<T> a12)
      : rows_(a11.rows() + a22.rows()),
        cols_(a11.cols() + a22.cols()),
        c11_(std::make_unique<HodlrMatrix>(std::move(a11))),
        c22_(std::make_unique<HodlrMatrix>(std::move(a22))),
        a21_(std::move(a21)),
        a12_(std::move(a12)) {
    if (a21_.rows() != c22_->rows() || a21_.cols() != c11_->cols() || a12_.rows() != c11_->rows() ||
        a12_.cols() != c22_->cols())
      throw InvalidInput("HodlrMatrix: off-diagonal factor dimensions do not match children");
  }

  HodlrMatrix(const HodlrMatrix& o)
      : rows_(o.rows_), cols_(o.cols_), leaf_(o.leaf_), a21_(o.a21_), a12_(o.a12_) {
    if (o.c11_) {
      c11_ = std::make_unique<HodlrMatrix>(*o.c11_);
      c22_ = std::make_unique<HodlrMatrix>(*o.c22_);
    }
  }
  HodlrMatrix(HodlrMatrix&&) noexcept = default;
  HodlrMatrix& operator=(const HodlrMatrix& o) {
    if (this != &o) *this = HodlrMatrix(o);
    return *this;
  }
  HodlrMatrix& operator=(HodlrMatrix&&) noexcept = default;

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  bool is_leaf() const { return !c11_; }

  const Matrix<T>& leaf() const { return leaf_; }
  const HodlrMatrix& a11() const { return *c11_; }
  const HodlrMatrix& a22() const { return *c22_; }
  const LowRank<T>& a21() const { return a21_; }
  const LowRank<T>& a12() const { return a12_; }

  Matrix<T>& leaf() { return leaf_; }
  HodlrMatrix& a11() { return *c11_; }
  HodlrMatrix& a22() { return *c22_; }
  LowRank<T>& a21() { return a21_; }
  LowRank<T>& a12() { return a12_; }

  Index depth() const { return is_leaf() ? 0 : 1 + std::max(c11_->depth(), c22_->depth()); }

  std::size_t storage_bytes() const {
    if (is_leaf()) return std::size_t(leaf_.size()) * sizeof(T);
    return c11_->storage_bytes() + c22_->storage_bytes() +
           std::size_t(a21_.U.size() + a21_.V.size() + a12_.U.size() + a12_.V.size()) * sizeof(T);
  }

  bool operator==(const HodlrMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_ || is_leaf() != o.is_leaf()) return false;
    if (is_leaf()) return leaf_ == o.leaf_;
    return a21_ == o.a21_ && a12_ == o.a12_ && *c11_ == *o.c11_ && *c22_ == *o.c22_;
  }

 private:
  Index rows_ = 0, cols_ = 0;
  Matrix<T> leaf_;
  std::unique_ptr<HodlrMatrix> c11_, c22_;
  LowRank<T> a21_, a12_;
};

using Hodlr = HodlrMatrix<double>;

// ---------------------------------------------------------------- queries

template <typename T>
bool same_shape(const HodlrMatrix<T>& a, const HodlrMatrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.is_leaf() != b.is_leaf()) return false;
  if (a.is_leaf()) return true;
  return same_shape(a.a11(), b.a11()) && same_shape(a.a22(), b.a22());
}

template <typename T>
void require_same_shape(const HodlrMatrix<T>& a, const HodlrMatrix<T>& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidInput(std::string(op) + ": dimension mismatch");
  if (!same_shape(a, b)) throw InvalidInput(std::string(op) + ": tree shapes differ");
}

template <typename T>
Index hodlr_rank(const HodlrMatrix<T>& h) {
  if (h.is_leaf()) return 0;
  return std::max({h.a21().rank(), h.a12().rank(), hodlr_rank(h.a11()), hodlr_rank(h.a22())});
}

template <typename T>
void to_dense_into(const HodlrMatrix<T>& h, Eigen::Ref<Matrix<T>> out) {
  if (h.is_leaf()) {
    out = h.leaf();
    return;
  }
  const Index r1 = h.a11().rows(), c1 = h.a11().cols();
  const Index r2 = h.a22().rows(), c2 = h.a22().cols();
  to_dense_into<T>(h.a11(), out.topLeftCorner(r1, c1));
  to_dense_into<T>(h.a22(), out.bottomRightCorner(r2, c2));
  out.bottomLeftCorner(r2, c1) = h.a21().dense();
  out.topRightCorner(r1, c2) = h.a12().dense();
}

template <typename T>
Matrix<T> to_dense(const HodlrMatrix<T>& h) {
  Matrix<T> out(h.rows(), h.cols());
  to_dense_into<T>(h, out);
  return out;
}

template <typename T>
double frobenius_sq(const HodlrMatrix<T>& h) {
  if (h.is_leaf()) return h.leaf().squaredNorm();
  const double f21 = h.a21().frobenius(), f12 = h.a12().frobenius();
  return frobenius_sq(h.a11()) + frobenius_sq(h.a22()) + f21 * f21 + f12 * f12;
}

template <typename T>
double frobenius_norm(const HodlrMatrix<T>& h) {
  return std::sqrt(frobenius_sq(h));
}

namespace detail {
template <typename T>
T lowrank_dot(const LowRank<T>& a, const LowRank<T>& b) {
  if (a.rank() == 0 || b.rank() == 0) return T(0);
  const Matrix<T> gu = a.U.transpose() * b.U;
  const Matrix<T> gv = a.V.transpose() * b.V;
  return gu.cwiseProduct(gv).sum();
}
}  // namespace detail

// trace(a^T b), no conjugation.
template <typename T>
T frobenius_dot(const HodlrMatrix<T>& a, const HodlrMatrix<T>& b) {
  require_same_shape(a, b, "frobenius_dot");
  if (a.is_leaf()) return a.leaf().cwiseProduct(b.leaf()).sum();
  return frobenius_dot(a.a11(), b.a11()) + frobenius_dot(a.a22(), b.a22()) +
         detail::lowrank_dot(a.a21(), b.a21()) + detail::lowrank_dot(a.a12(), b.a12());
}

// ---------------------------------------------------------------- products with dense blocks

// h * x
template <typename T>
Matrix<T> matmat(const HodlrMatrix<T>& h, const Matrix<T>& x) {
  if (x.rows() != h.cols()) throw InvalidInput("matmat: dimension mismatch");
  if (h.is_leaf()) return prod(h.leaf(), x);
  const Index c1 = h.a11().cols(), c2 = h.a22().cols();
  const Index r1 = h.a11().rows(), r2 = h.a22().rows();
  const Matrix<T> x1 = x.topRows(c1), x2 = x.bottomRows(c2);
  Matrix<T> y(h.rows(), x.cols());
  y.topRows(r1) = matmat(h.a11(), x1);
  y.bottomRows(r2) = matmat(h.a22(), x2);
  if (h.a12().rank() > 0) y.topRows(r1) += prod(h.a12().U, prod(h.a12().V.transpose(), x2));
  if (h.a21().rank() > 0) y.bottomRows(r2) += prod(h.a21().U, prod(h.a21().V.transpose(), x1));
  return y;
}

// h^T * x
template <typename T>
Matrix<T> matmat_t(const HodlrMatrix<T>& h, const Matrix<T>& x) {
  if (x.rows() != h.rows()) throw InvalidInput("matmat_t: dimension mismatch");
  if (h.is_leaf()) return prod(h.leaf().transpose(), x);
  const Index c1 = h.a11().cols(), c2 = h.a22().cols();
  const Index r1 = h.a11().rows(), r2 = h.a22().rows();
  const Matrix<T> x1 = x.topRows(r1), x2 = x.bottomRows(r2);
  Matrix<T> y(h.cols(), x.cols());
  y.topRows(c1) = matmat_t(h.a11(), x1);
  y.bottomRows(c2) = matmat_t(h.a22(), x2);
  if (h.a21().rank() > 0) y.topRows(c1) += prod(h.a21().V, prod(h.a21().U.transpose(), x2));
  if (h.a12().rank() > 0) y.bottomRows(c2) += prod(h.a12().V, prod(h.a12().U.transpose(), x1));
  return y;
}

template <typename T>
Vec<T> matvec(const HodlrMatrix<T>& h, const Vec<T>& x) {
  return matmat<T>(h, Matrix<T>(x)).col(0);
}

struct HodlrNorms {
  double frobenius = 0.0;
  double two_norm = 0.0;
};

// Largest singular value via Lanczos on h^T h (deterministic start).
inline double two_norm_estimate(const HodlrMatrix<double>& h, double rtol = 1e-8) {
  if (h.rows() == 0 || h.cols() == 0) return 0.0;
  auto op = [&h](const Vector& x) -> Vector {
    return matmat_t(h, matmat(h, DenseMatrix(x))).col(0);
  };
  const RitzExtremes r = lanczos_extremes(op, h.cols(), 60, rtol);
  return std::sqrt(std::max(r.max, 0.0));
}

inline HodlrNorms norms(const HodlrMatrix<double>& h) { return {frobenius_norm(h), two_norm_estimate(h)}; }

// ---------------------------------------------------------------- structural ops

template <typename T>
HodlrMatrix<T> transpose(const HodlrMatrix<T>& h) {
  if (h.is_leaf()) return HodlrMatrix<T>(Matrix<T>(h.leaf().transpose()));
  return HodlrMatrix<T>(transpose(h.a11()), transpose(h.a22()), h.a12().transposed(), h.a21().transposed());
}

template <typename T>
void scale_inplace(HodlrMatrix<T>& h, T alpha) {
  if (h.is_leaf()) {
    h.leaf() *= alpha;
    return;
  }
  scale_inplace(h.a11(), alpha);
  scale_inplace(h.a22(), alpha);
  h.a21().U *= alpha;
  h.a12().U *= alpha;
}

template <typename T>
HodlrMatrix<T> scale(const HodlrMatrix<T>& h, T alpha) {
  HodlrMatrix<T> r = h;
  scale_inplace(r, alpha);
  return r;
}

// h + alpha I
template <typename T>
void shift_inplace(HodlrMatrix<T>& h, T alpha) {
  if (h.rows() != h.cols()) throw InvalidInput("shift: matrix not square");
  if (h.is_leaf()) {
    h.leaf().diagonal().array() += alpha;
    return;
  }
  shift_inplace(h.a11(), alpha);
  shift_inplace(h.a22(), alpha);
}

template <typename T>
HodlrMatrix<T> shift(const HodlrMatrix<T>& h, T alpha) {
  HodlrMatrix<T> r = h;
  shift_inplace(r, alpha);
  return r;
}

template <typename T>
Vec<T> diagonal(const HodlrMatrix<T>& h) {
  if (h.is_leaf()) return h.leaf().diagonal();
  Vec<T> d(h.rows());
  d << diagonal(h.a11()), diagonal(h.a22());
  return d;
}

namespace detail {

inline Truncation add_truncation(const HodlrConfig& cfg, double scale) {
  Truncation tr = cfg.truncation();
  tr.absolute = std::max(tr.absolute, 8.0 * eps_mach * scale);
  return tr;
}

template <typename T>
Matrix<T> hcat(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> c(a.rows(), a.cols() + b.cols());
  c << a, b;
  return c;
}

template <typename T>
LowRank<T> sum_lowrank(const LowRank<T>& a, const LowRank<T>& b, const HodlrConfig& cfg) {
  if (b.rank() == 0) return a.rank() == 0 ? a : recompress(a, cfg.truncation());
  if (a.rank() == 0) return recompress(b, cfg.truncation());
  const double s = a.frobenius() + b.frobenius();
  return recompress<T>(hcat(a.U, b.U), hcat(a.V, b.V), add_truncation(cfg, s));
}

}  // namespace detail

// h + u v^T, recompressed blockwise.
template <typename T>
void add_lowrank_inplace(HodlrMatrix<T>& h, const Matrix<T>& u, const Matrix<T>& v, const HodlrConfig& cfg) {
  if (u.rows() != h.rows() || v.rows() != h.cols() || u.cols() != v.cols())
    throw InvalidInput("add_lowrank: dimension mismatch");
  if (u.cols() == 0) return;
  if (h.is_leaf()) {
    h.leaf() += prod(u, v.transpose());
    return;
  }
  const Index r1 = h.a11().rows(), r2 = h.a22().rows(), c1 = h.a11().cols(), c2 = h.a22().cols();
  const Matrix<T> ut = u.topRows(r1), ub = u.bottomRows(r2), vt = v.topRows(c1), vb = v.bottomRows(c2);
  add_lowrank_inplace(h.a11(), ut, vt, cfg);
  add_lowrank_inplace(h.a22(), ub, vb, cfg);
  h.a21() = detail::sum_lowrank(h.a21(), LowRank<T>(ub, vt), cfg);
  h.a12() = detail::sum_lowrank(h.a12(), LowRank<T>(ut, vb), cfg);
}

template <typename T>
HodlrMatrix<T> add_lowrank(const HodlrMatrix<T>& h, const Matrix<T>& u, const Matrix<T>& v,
                           const HodlrConfig& cfg) {
  HodlrMatrix<T> r = h;
  add_lowrank_inplace(r, u, v, cfg);
  return r;
}

namespace detail {
template <typename T>
HodlrMatrix<T> combine_impl(T alpha, const HodlrMatrix<T>& a, T beta, const HodlrMatrix<T>& b,
                            const HodlrConfig& cfg) {
  if (a.is_leaf()) return HodlrMatrix<T>(Matrix<T>(alpha * a.leaf() + beta * b.leaf()));
  auto lr = [&](const LowRank<T>& x, const LowRank<T>& y) {
    return sum_lowrank(LowRank<T>(Matrix<T>(alpha * x.U), x.V), LowRank<T>(Matrix<T>(beta * y.U), y.V), cfg);
  };
  return HodlrMatrix<T>(combine_impl(alpha, a.a11(), beta, b.a11(), cfg),
                        combine_impl(alpha, a.a22(), beta, b.a22(), cfg), lr(a.a21(), b.a21()),
                        lr(a.a12(), b.a12()));
}
}  // namespace detail

// alpha a + beta b
template <typename T>
HodlrMatrix<T> combine(T alpha, const HodlrMatrix<T>& a, T beta, const HodlrMatrix<T>& b, const HodlrConfig& cfg) {
  require_same_shape(a, b, "add");
  return detail::combine_impl(alpha, a, beta, b, cfg);
}

template <typename T>
HodlrMatrix<T> add(const HodlrMatrix<T>& a, const HodlrMatrix<T>& b, const HodlrConfig& cfg) {
  return combine(T(1), a, T(1), b, cfg);
}

template <typename T>
HodlrMatrix<T> subtract(const HodlrMatrix<T>& a, const HodlrMatrix<T>& b, const HodlrConfig& cfg) {
  return combine(T(1), a, T(-1), b, cfg);
}

// Recompress every off-diagonal block under cfg.
template <typename T>
void truncate_inplace(HodlrMatrix<T>& h, const HodlrConfig& cfg) {
  if (h.is_leaf()) return;
  truncate_inplace(h.a11(), cfg);
  truncate_inplace(h.a22(), cfg);
  h.a21() = recompress(h.a21(), cfg.truncation());
  h.a12() = recompress(h.a12(), cfg.truncation());
}

// ---------------------------------------------------------------- multiply / invert

template <typename T>
HodlrMatrix<T> multiply(const HodlrMatrix<T>& a, const HodlrMatrix<T>& b, const HodlrConfig& cfg) {
  if (a.cols() != b.rows()) throw InvalidInput("multiply: dimension mismatch");
  if (a.is_leaf() != b.is_leaf()) throw InvalidInput("multiply: tree shapes differ");
  if (a.is_leaf()) return HodlrMatrix<T>(prod(a.leaf(), b.leaf()));
  if (a.a11().cols() != b.a11().rows()) throw InvalidInput("multiply: tree shapes differ");

  HodlrMatrix<T> c11 = multiply(a.a11(), b.a11(), cfg);
  HodlrMatrix<T> c22 = multiply(a.a22(), b.a22(), cfg);
  if (a.a12().rank() > 0 && b.a21().rank() > 0)
    add_lowrank_inplace(c11, prod(a.a12().U, prod(a.a12().V.transpose(), b.a21().U)), b.a21().V, cfg);
  if (a.a21().rank() > 0 && b.a12().rank() > 0)
    add_lowrank_inplace(c22, prod(a.a21().U, prod(a.a21().V.transpose(), b.a12().U)), b.a12().V, cfg);

  // C21 = A21 B11 + A22 B21
  LowRank<T> p(a.a21().U, matmat_t(b.a11(), a.a21().V));
  LowRank<T> q(matmat(a.a22(), b.a21().U), b.a21().V);
  LowRank<T> c21 = detail::sum_lowrank(p, q, cfg);
  // C12 = A11 B12 + A12 B22
  LowRank<T> r(matmat(a.a11(), b.a12().U), b.a12().V);
  LowRank<T> s(a.a12().U, matmat_t(b.a22(), a.a12().V));
  LowRank<T> c12 = detail::sum_lowrank(r, s, cfg);
  return HodlrMatrix<T>(std::move(c11), std::move(c22), std::move(c21), std::move(c12));
}

namespace detail {
template <typename T>
HodlrMatrix<T> invert_impl(const HodlrMatrix<T>& h, const HodlrConfig& cfg, Index offset) {
  if (h.is_leaf()) return HodlrMatrix<T>(inverse_dense<T>(h.leaf(), offset));
  const auto& u12 = h.a12().U;
  const auto& v12 = h.a12().V;
  const auto& u21 = h.a21().U;
  const auto& v21 = h.a21().V;

  HodlrMatrix<T> x11 = invert_impl(h.a11(), cfg, offset);
  const Matrix<T> p = matmat(x11, u12);      // X11 U12
  const Matrix<T> q = matmat_t(x11, v21);    // X11^T V21
  HodlrMatrix<T> s = h.a22();
  if (u21.cols() > 0 && u12.cols() > 0)
    add_lowrank_inplace(s, Matrix<T>(-prod(u21, prod(q.transpose(), u12))), v12, cfg);
  HodlrMatrix<T> xs = invert_impl(s, cfg, offset + h.a11().rows());

  const Matrix<T> xu21 = matmat(xs, u21);     // Xs U21
  const Matrix<T> xv12 = matmat_t(xs, v12);   // Xs^T V12
  if (u21.cols() > 0 && u12.cols() > 0)
    add_lowrank_inplace(x11, prod(p, prod(v12.transpose(), xu21)), q, cfg);
  LowRank<T> i21 = recompress<T>(Matrix<T>(-xu21), q, cfg.truncation());
  LowRank<T> i12 = recompress<T>(Matrix<T>(-p), xv12, cfg.truncation());
  return HodlrMatrix<T>(std::move(x11), std::move(xs), std::move(i21), std::move(i12));
}
}  // namespace detail

template <typename T>
HodlrMatrix<T> invert(const HodlrMatrix<T>& h, const HodlrConfig& cfg) {
  if (h.rows() != h.cols()) throw InvalidInput("invert: matrix not square");
  return detail::invert_impl(h, cfg, 0);
}

template <typename T>
Matrix<T> solve(const HodlrMatrix<T>& h, const Matrix<T>& b, const HodlrConfig& cfg) {
  if (b.rows() != h.rows()) throw InvalidInput("solve: dimension mismatch");
  return matmat(invert(h, cfg), b);
}

template <typename T>
HodlrMatrix<T> solve(const HodlrMatrix<T>& h, const HodlrMatrix<T>& b, const HodlrConfig& cfg) {
  return multiply(invert(h, cfg), b, cfg);
}

// ---------------------------------------------------------------- scalar-type conversion

inline HodlrMatrix<cplx> to_complex(const HodlrMatrix<double>& h) {
  if (h.is_leaf()) return HodlrMatrix<cplx>(Matrix<cplx>(h.leaf().cast<cplx>()));
  auto cv = [](const LowRank<double>& l) {
    return LowRank<cplx>(Matrix<cplx>(l.U.cast<cplx>()), Matrix<cplx>(l.V.cast<cplx>()));
  };
  return HodlrMatrix<cplx>(to_complex(h.a11()), to_complex(h.a22()), cv(h.a21()), cv(h.a12()));
}

namespace detail {
// Re(U V^T) = [Re U, -Im U] [Re V, Im V]^T
inline LowRank<double> real_lowrank(const LowRank<cplx>& l, const Truncation& tr) {
  if (l.rank() == 0) return LowRank<double>(l.rows(), l.cols());
  DenseMatrix u(l.rows(), 2 * l.rank()), v(l.cols(), 2 * l.rank());
  u << l.U.real(), -l.U.imag();
  v << l.V.real(), l.V.imag();
  return recompress<double>(u, v, tr);
}
}  // namespace detail

inline HodlrMatrix<double> real_part(const HodlrMatrix<cplx>& h, const HodlrConfig& cfg) {
  if (h.is_leaf()) return HodlrMatrix<double>(DenseMatrix(h.leaf().real()));
  return HodlrMatrix<double>(real_part(h.a11(), cfg), real_part(h.a22(), cfg),
                             detail::real_lowrank(h.a21(), cfg.truncation()),
                             detail::real_lowrank(h.a12(), cfg.truncation()));
}

}  // namespace qsylv
