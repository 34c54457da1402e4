#pragma once

#include "qsylv/hodlr.hpp"
#include "qsylv/solvers/dense_oracle.hpp"

namespace qsylv {

// Orthonormal basis of span{u, A^{-1}u, Au, A^{-2}u, ...}, grown two vectors at a time.
class ExtendedKrylov {
 public:
  ExtendedKrylov(const Hodlr& a, const Hodlr& ainv, const Vector& u) : a_(a), ainv_(ainv), n_(u.size()) {
    if (a.rows() != n_ || ainv.rows() != n_) throw InvalidInput("ExtendedKrylov: dimension mismatch");
    if (!(u.norm() > 0)) throw InvalidInput("ExtendedKrylov: zero starting vector");
    v_.resize(n_, 0);
    av_.resize(n_, 0);
    append(u);
    plus_ = dim() - 1;
    append(matvec(ainv_, u));
    minus_ = dim() - 1;
  }

  Index dim() const { return v_.cols(); }
  const DenseMatrix& V() const { return v_; }
  const DenseMatrix& AV() const { return av_; }
  bool exhausted() const { return exhausted_; }

  // Adds A v_+ and A^{-1} v_- from the last block; false if both deflate.
  bool expand() {
    if (exhausted_) return false;
    Vector wp = plus_ >= 0 ? Vector(av_.col(plus_)) : Vector();
    Vector wm = minus_ >= 0 ? matvec(ainv_, Vector(v_.col(minus_))) : Vector();
    const Index before = dim();
    plus_ = wp.size() && append(wp) ? dim() - 1 : -1;
    minus_ = wm.size() && append(wm) ? dim() - 1 : -1;
    if (dim() == before) exhausted_ = true;
    return !exhausted_;
  }

 private:
  bool append(Vector w) {
    const double nw = w.norm();
    if (nw == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass) w -= v_ * (v_.transpose() * w);
    const double nr = w.norm();
    if (nr <= 1e-10 * nw || dim() >= n_) return false;
    w /= nr;
    v_.conservativeResize(Eigen::NoChange, dim() + 1);
    v_.col(dim() - 1) = w;
    av_.conservativeResize(Eigen::NoChange, av_.cols() + 1);
    av_.col(av_.cols() - 1) = matvec(a_, w);
    return true;
  }

  const Hodlr& a_;
  const Hodlr& ainv_;
  Index n_;
  DenseMatrix v_, av_;
  Index plus_ = -1, minus_ = -1;
  bool exhausted_ = false;
};

struct EkSolution {
  LowRank<double> Z;  // Z = Vb Y Va^T stored as (Vb Y, Va)
  double residual = 0.0;  // ||A Z + Z A - ub ua^T||_F / (||ub|| ||ua||)
  Index dim = 0;
};

namespace detail {

// Galerkin solve on the current bases and its true residual norm.
inline EkSolution ek_project(const ExtendedKrylov& kb, const ExtendedKrylov& ka, const Vector& ub, const Vector& ua) {
  const DenseMatrix& vb = kb.V();
  const DenseMatrix& va = ka.V();
  const DenseMatrix tb = vb.transpose() * kb.AV();
  const DenseMatrix ta = va.transpose() * ka.AV();
  const Vector cb = vb.transpose() * ub, ca = va.transpose() * ua;
  const DenseMatrix y = dense_sylvester_oracle(0.5 * (tb + tb.transpose()), 0.5 * (ta + ta.transpose()),
                                               DenseMatrix(cb * ca.transpose()));
  // R = [A Vb, Vb, ub] diag(Y, Y, -1) [Va, A Va, ua]^T
  const Index kb_ = vb.cols(), ka_ = va.cols();
  DenseMatrix w1(vb.rows(), 2 * kb_ + 1), w2(va.rows(), 2 * ka_ + 1);
  w1 << kb.AV(), vb, ub;
  w2 << va, ka.AV(), ua;
  DenseMatrix m = DenseMatrix::Zero(2 * kb_ + 1, 2 * ka_ + 1);
  m.topLeftCorner(kb_, ka_) = y;
  m.block(kb_, ka_, kb_, ka_) = y;
  m(2 * kb_, 2 * ka_) = -1.0;
  Eigen::HouseholderQR<DenseMatrix> q1(w1), q2(w2);
  const Index r1 = std::min(w1.rows(), w1.cols()), r2 = std::min(w2.rows(), w2.cols());
  const DenseMatrix R1 = q1.matrixQR().topRows(r1).triangularView<Eigen::Upper>();
  const DenseMatrix R2 = q2.matrixQR().topRows(r2).triangularView<Eigen::Upper>();
  flops::add(4.0 * double(vb.rows()) * double(w1.cols() * w1.cols() + w2.cols() * w2.cols()));
  EkSolution s;
  s.residual = (R1 * m * R2.transpose()).norm() / (ub.norm() * ua.norm());
  s.Z = LowRank<double>(DenseMatrix(vb * y), va);
  s.dim = std::max(kb_, ka_);
  return s;
}

}  // namespace detail

// A Z + Z A = ub ua^T on extended Krylov spaces of ub and ua (which may be the same object).
inline EkSolution ek_solve_pair(ExtendedKrylov& kb, ExtendedKrylov& ka, const Vector& ub, const Vector& ua, double tol,
                                Index max_dim = -1) {
  // n/2, but small problems may use the whole space
  if (max_dim < 0) max_dim = std::max(ub.size() / 2, std::min<Index>(ub.size(), 32));
  for (;;) {
    EkSolution s = detail::ek_project(kb, ka, ub, ua);
    if (s.residual <= tol) return s;
    const bool gb = kb.dim() < max_dim && kb.expand();
    const bool ga = &ka == &kb ? gb : ka.dim() < max_dim && ka.expand();
    if (!gb && !ga) {
      if (kb.exhausted() && ka.exhausted())
        throw ConvergenceFailure("extended Krylov: space became invariant without convergence", s.residual);
      throw ConvergenceFailure("extended Krylov: space dimension reached n/2", s.residual);
    }
  }
}

// A Z + Z A = u u^T.
inline EkSolution ek_lowrank_lyap(const Hodlr& a, const Vector& u, double tol, const HodlrConfig& cfg = {}) {
  const Hodlr ainv = invert(a, cfg);
  ExtendedKrylov k(a, ainv, u);
  return ek_solve_pair(k, k, u, u, tol);
}

}  // namespace qsylv
