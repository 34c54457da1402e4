#pragma once

#include <cmath>
#include <numbers>

#include "qsylv/dense.hpp"

namespace qsylv {

struct GaussLegendre {
  Vector nodes;    // ascending on [-1, 1]
  Vector weights;
};

inline GaussLegendre gauss_legendre(Index m) {
  if (m < 1) throw InvalidInput("gauss_legendre: need at least one node");
  GaussLegendre rule{Vector(m), Vector(m)};
  const double pi = std::numbers::pi;
  for (Index i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(pi * (double(i) + 0.75) / (double(m) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (Index k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / double(k);
        p0 = p1;
        p1 = p2;
      }
      dp = double(m) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = x;
    for (Index k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / double(k);
      p0 = p1;
      p1 = p2;
    }
    dp = double(m) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes(m - 1 - i) = x;
    rule.nodes(i) = -x;
    rule.weights(i) = w;
    rule.weights(m - 1 - i) = w;
  }
  if (m % 2 == 1) rule.nodes(m / 2) = 0.0;
  return rule;
}

// Gauss-Legendre rule on [0, pi] for the substitution x = L cot(theta/2)^2.
struct QuadratureRule {
  Vector theta;    // nodes on [0, pi]
  Vector weights;  // weights on [0, pi]
  Vector f;        // f(theta_j) = L cot(theta_j/2)^2
  Vector omega;    // 2 L w_j sin(theta_j) / (1 - cos(theta_j))^2
  double L = 100.0;
  Index size() const { return theta.size(); }
};

inline QuadratureRule mapped_rule(Index m, double L) {
  if (!(L > 0)) throw InvalidInput("mapped_rule: L must be positive");
  const GaussLegendre gl = gauss_legendre(m);
  const double pi = std::numbers::pi;
  QuadratureRule q;
  q.L = L;
  q.theta = (gl.nodes.array() + 1.0) * (pi / 2);
  q.weights = gl.weights * (pi / 2);
  q.f.resize(m);
  q.omega.resize(m);
  for (Index j = 0; j < m; ++j) {
    const double th = q.theta(j);
    const double c = 1.0 / std::tan(th / 2);
    const double omc = 1.0 - std::cos(th);
    q.f(j) = L * c * c;
    q.omega(j) = 2.0 * L * q.weights(j) * std::sin(th) / (omc * omc);
  }
  return q;
}

}  // namespace qsylv
