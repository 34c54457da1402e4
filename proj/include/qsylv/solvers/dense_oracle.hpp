#pragma once

#include "qsylv/dense.hpp"

namespace qsylv {

// Bartels-Stewart for symmetric A, B via eigendecompositions.
inline DenseMatrix dense_sylvester_oracle(const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& c) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || c.rows() != a.rows() || c.cols() != b.rows())
    throw InvalidInput("dense_sylvester_oracle: dimension mismatch");
  const SymEig ea = sym_eig(a);
  const SymEig eb = (&a == &b) ? ea : sym_eig(b);
  DenseMatrix y = prod(ea.Q.transpose(), prod(c, eb.Q));
  const double scale = ea.values.cwiseAbs().maxCoeff() + eb.values.cwiseAbs().maxCoeff();
  for (Index j = 0; j < y.cols(); ++j)
    for (Index i = 0; i < y.rows(); ++i) {
      const double d = ea.values(i) + eb.values(j);
      if (std::abs(d) <= 1e-14 * scale) throw SingularMatrix("dense_sylvester_oracle: singular pencil", i);
      y(i, j) /= d;
    }
  return prod(ea.Q, prod(y, eb.Q.transpose()));
}

}  // namespace qsylv
