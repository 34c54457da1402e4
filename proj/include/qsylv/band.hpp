#pragma once

#include <algorithm>
#include <vector>

#include "qsylv/dense.hpp"

namespace qsylv {

// Square matrix with equal lower/upper bandwidth b; stored by diagonals.
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(Index n, Index bandwidth) : n_(n), b_(bandwidth) {
    if (n < 0 || bandwidth < 0) throw InvalidInput("BandMatrix: negative size");
    if (n > 0 && bandwidth >= n) throw InvalidInput("BandMatrix: bandwidth must be below n");
    data_.assign(std::size_t((2 * b_ + 1) * n_), 0.0);
  }

  Index size() const { return n_; }
  Index bandwidth() const { return b_; }

  double operator()(Index i, Index j) const {
    const Index d = j - i;
    if (d < -b_ || d > b_) return 0.0;
    return data_[std::size_t((d + b_) * n_ + i)];
  }
  double& at(Index i, Index j) {
    const Index d = j - i;
    if (d < -b_ || d > b_) throw InvalidInput("BandMatrix: entry outside band");
    return data_[std::size_t((d + b_) * n_ + i)];
  }
  void set(Index i, Index j, double v) { at(i, j) = v; }

  DenseMatrix to_dense() const {
    DenseMatrix a = DenseMatrix::Zero(n_, n_);
    for (Index i = 0; i < n_; ++i)
      for (Index j = std::max<Index>(0, i - b_); j <= std::min(n_ - 1, i + b_); ++j) a(i, j) = (*this)(i, j);
    return a;
  }

  static Index detect_bandwidth(const DenseMatrix& a) {
    Index b = 0;
    for (Index j = 0; j < a.cols(); ++j)
      for (Index i = 0; i < a.rows(); ++i)
        if (a(i, j) != 0.0) b = std::max(b, i > j ? i - j : j - i);
    return b;
  }

  static BandMatrix from_dense(const DenseMatrix& a, Index bandwidth = -1) {
    if (a.rows() != a.cols()) throw InvalidInput("BandMatrix: matrix not square");
    const Index b = bandwidth < 0 ? detect_bandwidth(a) : bandwidth;
    BandMatrix m(a.rows(), std::min(b, std::max<Index>(a.rows() - 1, 0)));
    for (Index i = 0; i < m.n_; ++i)
      for (Index j = std::max<Index>(0, i - m.b_); j <= std::min(m.n_ - 1, i + m.b_); ++j) m.at(i, j) = a(i, j);
    return m;
  }

  static BandMatrix identity(Index n) {
    BandMatrix m(n, 0);
    for (Index i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  // Copy into a band of width new_b, dropping entries outside it.
  BandMatrix rebanded(Index new_b) const {
    new_b = std::min(new_b, std::max<Index>(n_ - 1, 0));
    BandMatrix m(n_, new_b);
    const Index b = std::min(b_, new_b);
    for (Index i = 0; i < n_; ++i)
      for (Index j = std::max<Index>(0, i - b); j <= std::min(n_ - 1, i + b); ++j) m.at(i, j) = (*this)(i, j);
    return m;
  }

  // this * o, kept in bandwidth min(b + o.b, cap) (cap < 0: exact).
  BandMatrix multiply(const BandMatrix& o, Index cap = -1) const {
    if (o.n_ != n_) throw InvalidInput("BandMatrix: dimension mismatch");
    Index nb = b_ + o.b_;
    if (cap >= 0) nb = std::min(nb, cap);
    BandMatrix c(n_, std::min(nb, std::max<Index>(n_ - 1, 0)));
    for (Index i = 0; i < n_; ++i) {
      for (Index k = std::max<Index>(0, i - b_); k <= std::min(n_ - 1, i + b_); ++k) {
        const double aik = (*this)(i, k);
        if (aik == 0.0) continue;
        const Index jlo = std::max({Index(0), k - o.b_, i - c.b_});
        const Index jhi = std::min({n_ - 1, k + o.b_, i + c.b_});
        for (Index j = jlo; j <= jhi; ++j) c.at(i, j) += aik * o(k, j);
      }
    }
    flops::add(2.0 * double(n_) * double(2 * b_ + 1) * double(2 * o.b_ + 1));
    return c;
  }

  // alpha * this + beta * o
  static BandMatrix combine(double alpha, const BandMatrix& a, double beta, const BandMatrix& o) {
    if (o.n_ != a.n_) throw InvalidInput("BandMatrix: dimension mismatch");
    BandMatrix c(a.n_, std::max(a.b_, o.b_));
    for (Index i = 0; i < c.n_; ++i)
      for (Index j = std::max<Index>(0, i - c.b_); j <= std::min(c.n_ - 1, i + c.b_); ++j)
        c.at(i, j) = alpha * a(i, j) + beta * o(i, j);
    flops::add(3.0 * double(c.data_.size()));
    return c;
  }

  double dot(const BandMatrix& o) const {
    double s = 0.0;
    const Index b = std::min(b_, o.b_);
    for (Index i = 0; i < n_; ++i)
      for (Index j = std::max<Index>(0, i - b); j <= std::min(n_ - 1, i + b); ++j) s += (*this)(i, j) * o(i, j);
    flops::add(2.0 * double(n_) * double(2 * b + 1));
    return s;
  }

  double frobenius() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  // Effective bandwidth: largest |i - j| of a nonzero entry.
  Index effective_bandwidth() const {
    Index e = 0;
    for (Index d = -b_; d <= b_; ++d)
      for (Index i = 0; i < n_; ++i)
        if (data_[std::size_t((d + b_) * n_ + i)] != 0.0) {
          e = std::max(e, d < 0 ? -d : d);
          break;
        }
    return e;
  }

  std::size_t storage_bytes() const { return data_.size() * sizeof(double); }

 private:
  Index n_ = 0, b_ = 0;
  std::vector<double> data_;
};

}  // namespace qsylv
