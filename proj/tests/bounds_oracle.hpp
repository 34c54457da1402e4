#pragma once

// Independent reference computations for the bounds module.

#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <random>

#include "qsylv/bounds.hpp"
#include "qsylv/solvers/dense_oracle.hpp"

namespace qsylv::oracle {

// K(lambda) = int_0^{pi/2} dtheta / sqrt(1 - lambda^2 sin^2 theta), trapezoid rule on the
// smooth periodic integrand (spectrally accurate).
inline double elliptic_K_quad(double lambda, int n = 400) {
  const double h = std::numbers::pi / 2.0 / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double st = std::sin(i * h);
    const double f = 1.0 / std::sqrt(1.0 - lambda * lambda * st * st);
    s += (i == 0 || i == n) ? 0.5 * f : f;
  }
  return s * h;
}

inline double grotzsch_mu_quad(double lambda) {
  return std::numbers::pi / 2.0 * elliptic_K_quad(std::sqrt(1.0 - lambda * lambda)) / elliptic_K_quad(lambda);
}

// A = M M^T with M unit lower bidiagonal, subdiagonal U(0,1); C random diagonal.
struct DecayExperiment {
  DenseMatrix a, c, x;
};

inline DecayExperiment decay_problem(Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DenseMatrix m = DenseMatrix::Identity(n, n);
  for (Index i = 1; i < n; ++i) m(i, i - 1) = u(gen);
  DecayExperiment e;
  e.a = m * m.transpose();
  e.c = DenseMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) e.c(i, i) = u(gen);
  e.x = dense_sylvester_oracle(e.a, e.a, e.c);
  return e;
}

struct DecayCheck {
  Index violations = 0;
  Index checked = 0;
  double worst_ratio = 0.0;  // max over l of measured / predicted
  double gap_l5 = 0.0;       // measured / predicted at l = 5, worst block
};

// Compares sigma_{1+kl}(Y) / sigma_1(Y) with 4 rho^{-2l} on the two maximal off-diagonal
// blocks. Singular values below floor * sigma_1(X) are roundoff in the reference solution.
inline DecayCheck check_decay(const DenseMatrix& x, const DecayBound& bound, double floor) {
  DecayCheck r;
  const Index n = x.rows(), n1 = n / 2;
  const double sx = Eigen::JacobiSVD<DenseMatrix>(x).singularValues()(0);
  for (const DenseMatrix& y : {DenseMatrix(x.block(n1, 0, n - n1, n1)), DenseMatrix(x.block(0, n1, n1, n - n1))}) {
    const Vector s = Eigen::JacobiSVD<DenseMatrix>(y).singularValues();
    for (Index l = 1; 1 + bound.block_rank_k * l <= n / 2; ++l) {
      const Index idx = bound.block_rank_k * l;  // zero-based sigma_{1+kl}
      if (idx >= s.size()) break;
      const double pred = bound.predicted(l) * s(0);
      ++r.checked;
      if (s(idx) > pred + floor * sx) ++r.violations;
      r.worst_ratio = std::max(r.worst_ratio, s(idx) / pred);
      if (l == 5) r.gap_l5 = std::max(r.gap_l5, s(idx) / pred);
    }
  }
  return r;
}

// Sorted eigenvalue extremes of a symmetric matrix.
inline SpectralInterval spectrum(const DenseMatrix& a) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(a, Eigen::EigenvaluesOnly);
  return {es.eigenvalues()(0), es.eigenvalues()(a.rows() - 1)};
}

}  // namespace qsylv::oracle
