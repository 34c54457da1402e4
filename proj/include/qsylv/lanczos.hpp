#pragma once

#include <functional>
#include <random>

#include "qsylv/dense.hpp"

namespace qsylv {

struct RitzExtremes {
  double min = 0.0;
  double max = 0.0;
  Index steps = 0;
};

// Lanczos with full reorthogonalization on a symmetric operator; fixed seed.
inline RitzExtremes lanczos_extremes(const std::function<Vector(const Vector&)>& op, Index n, Index max_steps = 60,
                                     double rtol = 1e-10, std::uint64_t seed = 20240607) {
  RitzExtremes out;
  if (n == 0) return out;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  const Index kmax = std::min(max_steps, n);
  DenseMatrix Q(n, kmax);
  Vector q(n);
  for (Index i = 0; i < n; ++i) q(i) = nd(gen);
  q.normalize();
  std::vector<double> alpha, beta;
  double prev_min = 0.0, prev_max = 0.0;
  for (Index k = 0; k < kmax; ++k) {
    Q.col(k) = q;
    Vector w = op(q);
    const double a = q.dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(k + 1) * (Q.leftCols(k + 1).transpose() * w);
    const double b = w.norm();
    DenseMatrix t = DenseMatrix::Zero(k + 1, k + 1);
    for (Index i = 0; i <= k; ++i) {
      t(i, i) = alpha[std::size_t(i)];
      if (i < k) t(i, i + 1) = t(i + 1, i) = beta[std::size_t(i)];
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(t, Eigen::EigenvaluesOnly);
    out.min = es.eigenvalues()(0);
    out.max = es.eigenvalues()(k);
    out.steps = k + 1;
    const double scale = std::max(std::abs(out.max), std::abs(out.min));
    if (k > 0 && std::abs(out.max - prev_max) <= rtol * scale && std::abs(out.min - prev_min) <= rtol * scale) break;
    if (b <= 1e-14 * std::max(scale, 1e-300)) break;  // invariant subspace
    prev_min = out.min;
    prev_max = out.max;
    beta.push_back(b);
    q = w / b;
  }
  return out;
}

}  // namespace qsylv
