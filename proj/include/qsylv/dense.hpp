#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <type_traits>

#include "qsylv/error.hpp"
#include "qsylv/flops.hpp"

namespace qsylv {

using Index = Eigen::Index;
template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
using DenseMatrix = Matrix<double>;
using Vector = Vec<double>;
using cplx = std::complex<double>;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

template <typename T>
inline constexpr double flop_weight = is_complex<T>::value ? 4.0 : 1.0;

inline constexpr double eps_mach = std::numeric_limits<double>::epsilon();

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
  return a.allFinite();
}

// Counted product a*b.
template <typename DA, typename DB>
Matrix<typename DA::Scalar> prod(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  using T = typename DA::Scalar;
  Matrix<T> c(a.rows(), b.cols());
  if (a.cols() == 0 || a.rows() == 0 || b.cols() == 0) {
    c.setZero();
    return c;
  }
  flops::add(flop_weight<T> * 2.0 * double(a.rows()) * double(a.cols()) * double(b.cols()));
  c.noalias() = a * b;
  return c;
}

template <typename T>
struct SvdResult {
  Matrix<T> U;
  Vector S;
  Matrix<T> V;
  Index rank() const { return S.size(); }
};

// Keeps sigma_i > max(tol * sigma_1, abs_floor), at most max_rank (negative = no cap).
namespace detail {

// Eigen 3.4 BDCSVD can return a wrong factorization for some rank-deficient
// inputs, so small matrices go to Jacobi and large ones are checked.
template <typename T>
bool svd_into(const Matrix<T>& a, Matrix<T>& u, Vector& s, Matrix<T>& v) {
  const Index p = std::min(a.rows(), a.cols());
  if (p <= 64) return false;
  Eigen::BDCSVD<Matrix<T>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  u = svd.matrixU();
  s = svd.singularValues();
  v = svd.matrixV();
  const double na = a.norm();
  const double err = (prod(a, v) - u * s.asDiagonal()).norm();
  return err <= 64.0 * eps_mach * std::sqrt(double(p)) * na;
}

}  // namespace detail

template <typename T>
SvdResult<T> truncated_svd(const Matrix<T>& a, double tol, Index max_rank = -1, double abs_floor = 0.0) {
  if (tol < 0 || !(abs_floor >= 0)) throw InvalidInput("truncated_svd: negative tolerance");
  if (!a.allFinite()) throw InvalidInput("truncated_svd: non-finite input");
  const Index m = a.rows(), n = a.cols(), p = std::min(m, n);
  SvdResult<T> out;
  if (p == 0) {
    out.U.resize(m, 0);
    out.V.resize(n, 0);
    out.S.resize(0);
    return out;
  }
  const double mx = double(std::max(m, n)), mn = double(p);
  flops::add(flop_weight<T> * (4.0 * mx * mn * mn + 8.0 * mn * mn * mn));
  Matrix<T> u, v;
  Vector s;
  if (!detail::svd_into(a, u, s, v)) {
    Eigen::JacobiSVD<Matrix<T>> jc(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u = jc.matrixU();
    s = jc.singularValues();
    v = jc.matrixV();
  }
  const double cut = std::max(tol * s(0), abs_floor);
  Index k = 0;
  while (k < p && s(k) > cut) ++k;
  if (max_rank >= 0) k = std::min(k, max_rank);
  out.U = u.leftCols(k);
  out.S = s.head(k);
  out.V = v.leftCols(k);
  if constexpr (is_complex<T>::value) out.V = out.V.conjugate().eval();
  return out;
}

namespace detail {

template <typename T>
void check_pivots(const Eigen::PartialPivLU<Matrix<T>>& lu, Index offset) {
  const auto& f = lu.matrixLU();
  for (Index i = 0; i < f.rows(); ++i) {
    if (f(i, i) == T(0)) throw SingularMatrix("singular matrix", offset + i);
  }
  if (!f.allFinite()) throw NumericalFailure("non-finite LU factor");
}

}  // namespace detail

template <typename T>
Matrix<T> inverse_dense(const Matrix<T>& a, Index pivot_offset = 0) {
  if (a.rows() != a.cols()) throw InvalidInput("inverse_dense: matrix not square");
  if (a.rows() == 0) return a;
  const double n = double(a.rows());
  flops::add(flop_weight<T> * 2.0 * n * n * n);
  Eigen::PartialPivLU<Matrix<T>> lu(a);
  detail::check_pivots(lu, pivot_offset);
  return lu.inverse();
}

template <typename T>
Matrix<T> solve_dense(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) throw InvalidInput("solve_dense: dimension mismatch");
  if (!a.allFinite() || !b.allFinite()) throw InvalidInput("solve_dense: non-finite input");
  if (a.rows() == 0) return b;
  const double n = double(a.rows());
  flops::add(flop_weight<T> * (2.0 / 3.0 * n * n * n + 2.0 * n * n * double(b.cols())));
  Eigen::PartialPivLU<Matrix<T>> lu(a);
  detail::check_pivots(lu, 0);
  return lu.solve(b);
}

struct SymEig {
  Vector values;
  DenseMatrix Q;
};

inline SymEig sym_eig(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidInput("sym_eig: matrix not square");
  if (!a.allFinite()) throw InvalidInput("sym_eig: non-finite input");
  const double nrm = a.norm();
  if ((a - a.transpose()).norm() > 1e-12 * nrm) throw InvalidInput("sym_eig: matrix not symmetric");
  const double n = double(a.rows());
  flops::add(9.0 * n * n * n);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(a);
  if (es.info() != Eigen::Success) throw NumericalFailure("sym_eig: no convergence");
  return {es.eigenvalues(), es.eigenvectors()};
}

// Thin QR: a = Q R with Q (m x k), R (k x n), k = min(m, n).
template <typename T>
void thin_qr(const Matrix<T>& a, Matrix<T>& q, Matrix<T>& r) {
  const Index m = a.rows(), n = a.cols(), k = std::min(m, n);
  flops::add(flop_weight<T> * 4.0 * double(m) * double(n) * double(k));
  Eigen::HouseholderQR<Matrix<T>> qr(a);
  q = qr.householderQ() * Matrix<T>::Identity(m, k);
  r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
}

// 2-norm estimate by power iteration on a^T a with a fixed start vector.
inline double two_norm_estimate(const DenseMatrix& a, int max_iter = 200, double rtol = 1e-4) {
  if (a.size() == 0) return 0.0;
  Vector x = Vector::LinSpaced(a.cols(), 1.0, 2.0);
  x.normalize();
  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector y = a.transpose() * (a * x);
    const double lam = y.norm();
    if (lam == 0.0) return 0.0;
    x = y / lam;
    const double nrm = std::sqrt(lam);
    if (std::abs(nrm - est) <= rtol * nrm) return nrm;
    est = nrm;
  }
  return est;
}

}  // namespace qsylv
