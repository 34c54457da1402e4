#pragma once

#include <algorithm>

#include "qsylv/dense.hpp"

namespace qsylv {

// Keep singular values above max(relative * sigma_1, absolute), at most max_rank.
struct Truncation {
  double relative = 1e-12;
  double absolute = 0.0;
  Index max_rank = -1;
};

// U * V^T with U (rows x k), V (cols x k).
template <typename T>
struct LowRank {
  Matrix<T> U;
  Matrix<T> V;

  LowRank() = default;
  LowRank(Index rows, Index cols) : U(rows, 0), V(cols, 0) {}
  LowRank(Matrix<T> u, Matrix<T> v) : U(std::move(u)), V(std::move(v)) {
    if (U.cols() != V.cols()) throw InvalidInput("LowRank: factor ranks differ");
  }

  Index rows() const { return U.rows(); }
  Index cols() const { return V.rows(); }
  Index rank() const { return U.cols(); }
  Matrix<T> dense() const {
    if (rank() == 0) return Matrix<T>::Zero(rows(), cols());
    return prod(U, V.transpose());
  }
  LowRank transposed() const { return LowRank(V, U); }
  double frobenius() const {
    if (rank() == 0) return 0.0;
    // ||U V^T||_F^2 = trace((U^H U)(V^H V)^T)
    const Matrix<T> gu = U.adjoint() * U;
    const Matrix<T> gv = V.adjoint() * V;
    return std::sqrt(std::max(0.0, std::real(gu.cwiseProduct(gv).sum())));
  }
  bool operator==(const LowRank& o) const {
    return U.rows() == o.U.rows() && U.cols() == o.U.cols() && V.rows() == o.V.rows() && U == o.U &&
           V == o.V;
  }
};

// Recompress U V^T by QR of both factors and an SVD of the small core.
template <typename T>
LowRank<T> recompress(const Matrix<T>& u, const Matrix<T>& v, const Truncation& tr) {
  const Index m = u.rows(), n = v.rows(), k = u.cols();
  if (k == 0 || m == 0 || n == 0) return LowRank<T>(m, n);
  SvdResult<T> s;
  Matrix<T> qu, qv;
  if (2 * k >= std::min(m, n)) {
    s = truncated_svd<T>(prod(u, v.transpose()), tr.relative, tr.max_rank, tr.absolute);
    return LowRank<T>(s.U * s.S.asDiagonal(), s.V);
  }
  Matrix<T> ru, rv;
  thin_qr<T>(u, qu, ru);
  thin_qr<T>(v, qv, rv);
  s = truncated_svd<T>(prod(ru, rv.transpose()), tr.relative, tr.max_rank, tr.absolute);
  return LowRank<T>(prod(qu, Matrix<T>(s.U * s.S.asDiagonal())), prod(qv, s.V));
}

template <typename T>
LowRank<T> recompress(const LowRank<T>& a, const Truncation& tr) {
  return recompress<T>(a.U, a.V, tr);
}

}  // namespace qsylv
