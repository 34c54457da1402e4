#include <gtest/gtest.h>

#include <random>

#include "qsylv/problems.hpp"
#include "qsylv/solvers/generalized.hpp"

using namespace qsylv;

namespace {

HodlrConfig small_cfg() {
  HodlrConfig cfg;
  cfg.block_size = 8;
  return cfg;
}

GeneralizedProblem laplacian_with_term(Index n, double scale, const HodlrConfig& cfg) {
  GeneralizedProblem p;
  p.A = from_banded(toeplitz_band(n, {-1.0, 2.0, -1.0}), cfg);
  const Vector x = Vector::LinSpaced(n, 0.0, 1.0);
  p.C = from_function([](double a, double b) { return std::log(1.0 + std::abs(a - b)); }, x, x, cfg, true);
  BandMatrix m = toeplitz_band(n, {1.0, 0.0, 1.0});
  Hodlr mh = from_banded(m, cfg);
  scale_inplace(mh, scale);
  p.terms.push_back(QsTerm{mh});
  return p;
}

// spectral radius of L^{-1} M by power iteration on the Kronecker operator
double kron_spectral_radius(const GeneralizedProblem& p) {
  const Index n = p.A.rows();
  GeneralizedProblem base = p;
  base.terms.clear();
  DenseMatrix a = to_dense(p.A), id = DenseMatrix::Identity(n, n);
  DenseMatrix l = DenseMatrix::Zero(n * n, n * n), mm = DenseMatrix::Zero(n * n, n * n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      l.block(i * n, j * n, n, n) += id(i, j) * a + a(i, j) * id;
    }
  const DenseMatrix m = to_dense(std::get<QsTerm>(p.terms[0]).M);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) mm.block(i * n, j * n, n, n) = m(i, j) * m;
  const DenseMatrix k = l.partialPivLu().solve(mm);
  Vector v = Vector::Ones(n * n);
  double rho = 0;
  for (int it = 0; it < 500; ++it) {
    Vector w = k * v;
    rho = w.norm() / v.norm();
    v = w / w.norm();
  }
  return rho;
}

}  // namespace

TEST(ExtendedKrylov, IdentityOneStep) {
  HodlrConfig cfg = small_cfg();
  Vector u = Vector::LinSpaced(32, -1.0, 2.0);
  auto s = ek_lowrank_lyap(identity(32, cfg), u, 1e-12, cfg);
  EXPECT_EQ(s.dim, 1);
  EXPECT_LE((s.Z.dense() - 0.5 * u * u.transpose()).norm(), 1e-14);
}

TEST(ExtendedKrylov, DecoupledDiagonal) {
  HodlrConfig cfg = small_cfg();
  Vector d = Vector::LinSpaced(16, 1, 16);
  Vector e1 = Vector::Zero(16);
  e1(0) = 1;
  auto s = ek_lowrank_lyap(diagonal_matrix<double>(d, cfg), e1, 1e-12, cfg);
  DenseMatrix ref = DenseMatrix::Zero(16, 16);
  ref(0, 0) = 0.5;
  EXPECT_LE((s.Z.dense() - ref).norm(), 1e-14);
}

TEST(ExtendedKrylov, LaplacianMatchesOracle) {
  HodlrConfig cfg;
  cfg.block_size = 64;
  auto p = laplace_log(256, 1.0, cfg);
  std::mt19937_64 gen(4);
  std::normal_distribution<double> nd;
  Vector u(256);
  for (Index i = 0; i < 256; ++i) u(i) = nd(gen);
  auto s = ek_lowrank_lyap(p.A, u, 1e-10, cfg);
  DenseMatrix a = to_dense(p.A);
  DenseMatrix ref = dense_sylvester_oracle(a, a, u * u.transpose());
  DenseMatrix z = s.Z.dense();
  EXPECT_LE((a * z + z * a - u * u.transpose()).norm() / (u.squaredNorm()), 1e-10);
  EXPECT_LE(s.residual, 1e-10);
  EXPECT_LE((z - ref).norm() / ref.norm(), 1e-8);
  EXPECT_LT(s.dim, 128);
}

TEST(ExtendedKrylov, NonsymmetricPair) {
  HodlrConfig cfg = small_cfg();
  auto p = random_spd(40, 2, cfg);
  Vector ua = Vector::LinSpaced(40, 0.0, 1.0), ub = Vector::LinSpaced(40, 1.0, -1.0);
  const Hodlr ainv = invert(p.A, cfg);
  ExtendedKrylov ka(p.A, ainv, ua), kb(p.A, ainv, ub);
  auto s = ek_solve_pair(kb, ka, ub, ua, 1e-12);
  DenseMatrix a = to_dense(p.A);
  DenseMatrix ref = dense_sylvester_oracle(a, a, ub * ua.transpose());
  EXPECT_LE((s.Z.dense() - ref).norm() / ref.norm(), 1e-10);
}

TEST(Smw, ZeroTermsGivePlainLyapunov) {
  HodlrConfig cfg;
  cfg.block_size = 32;
  auto p = integro_pde(128, cfg);
  auto& t = std::get<LowRankTerm>(p.terms[0]);
  t.U.setZero();
  t.V.setZero();
  auto g = smw_generalized_solve(p, cfg);
  auto s = sign_solve(p.base(), cfg);
  EXPECT_LE((to_dense(g.X) - to_dense(s.X)).norm() / to_dense(s.X).norm(), 1e-14);
  auto r = residual_generalized(p, g.X);
  EXPECT_NEAR(r.value, residual_sylvester(p.base(), g.X), 1e-20);
}

TEST(Smw, RandomTridiagonalMatchesKronecker) {
  HodlrConfig cfg = small_cfg();
  auto sp = random_spd(16, 11, cfg);
  GeneralizedProblem p;
  p.A = sp.A;
  p.C = sp.C;
  LowRankTerm t;
  t.U = Vector::LinSpaced(16, 0.1, 0.9);
  t.V = Vector::LinSpaced(16, 0.5, -0.3);
  p.terms.push_back(t);
  auto g = smw_generalized_solve(p, cfg);
  DenseMatrix ref = kronecker_generalized_oracle(p);
  EXPECT_LE((to_dense(g.X) - ref).norm() / ref.norm(), 1e-9);
  EXPECT_LE(g.report.residual, 1e-10);
  EXPECT_EQ(g.lowrank_solves, 1);
}

TEST(Smw, RankTwoTermMatchesKronecker) {
  HodlrConfig cfg = small_cfg();
  auto sp = random_spd(16, 12, cfg);
  GeneralizedProblem p;
  p.A = sp.A;
  p.C = sp.C;
  LowRankTerm t;
  t.U.resize(16, 2);
  t.V.resize(16, 2);
  t.U << Vector::LinSpaced(16, 0.1, 0.9), Vector::LinSpaced(16, -0.4, 0.2);
  t.V << Vector::LinSpaced(16, 0.5, -0.3), Vector::LinSpaced(16, 0.2, 0.3);
  p.terms.push_back(t);
  auto g = smw_generalized_solve(p, cfg);
  DenseMatrix ref = kronecker_generalized_oracle(p);
  EXPECT_LE((to_dense(g.X) - ref).norm() / ref.norm(), 1e-9);
  EXPECT_EQ(g.lowrank_solves, 4);
}

TEST(Smw, IntegroSmallMatchesKronecker) {
  HodlrConfig cfg = small_cfg();
  auto p = integro_pde(16, cfg);
  DenseMatrix ref = kronecker_generalized_oracle(p);
  for (InnerSolver inner : {InnerSolver::Sign, InnerSolver::Expint}) {
    GeneralizedOptions opt;
    opt.inner = inner;
    opt.expint.quad_points = 96;
    auto g = smw_generalized_solve(p, cfg, opt);
    EXPECT_LE((to_dense(g.X) - ref).norm() / ref.norm(), 1e-9);
  }
}

TEST(Smw, IntegroResidual) {
  HodlrConfig cfg;
  auto p = integro_pde(512, cfg);
  auto g = smw_generalized_solve(p, cfg);
  EXPECT_FALSE(g.report.residual_warning);
  EXPECT_LE(g.report.residual, 1e-8);
  EXPECT_EQ(g.report.method, "smw");
}

TEST(Smw, RejectsQsTerms) {
  HodlrConfig cfg = small_cfg();
  EXPECT_THROW(smw_generalized_solve(laplacian_with_term(16, 0.01, cfg), cfg), InvalidInput);
}

TEST(Smw, SingularCapacitance) {
  // rank-1 terms keep I + K >= 1; a rotation term M = c(e1 e2^T - e2 e1^T) with A = I
  // gives the operator eigenvalue 2 - c^2, singular at c = sqrt(2)
  HodlrConfig cfg = small_cfg();
  const Index n = 16;
  GeneralizedProblem p;
  p.A = from_dense(DenseMatrix::Identity(n, n), cfg);
  p.C = from_dense(DenseMatrix::Ones(n, n), cfg);
  LowRankTerm t;
  const double c = std::sqrt(2.0);
  t.U = DenseMatrix::Zero(n, 2);
  t.V = DenseMatrix::Zero(n, 2);
  t.U(0, 0) = c;
  t.V(1, 0) = 1.0;
  t.U(1, 1) = c;
  t.V(0, 1) = -1.0;
  p.terms.push_back(t);
  EXPECT_THROW(smw_generalized_solve(p, cfg), SingularMatrix);
  t.U *= 0.5;
  p.terms[0] = t;
  auto g = smw_generalized_solve(p, cfg);
  const DenseMatrix ref = kronecker_generalized_oracle(p);
  EXPECT_LE((to_dense(g.X) - ref).norm(), 1e-10 * ref.norm());
}

TEST(Neumann, ZeroTermsOneSolve) {
  HodlrConfig cfg = small_cfg();
  auto p = laplacian_with_term(32, 0.0, cfg);
  auto r = neumann_generalized_solve(p, cfg);
  EXPECT_EQ(r.report.iterations, 1);
  auto s = sign_solve(p.base(), cfg);
  EXPECT_LE((to_dense(r.X) - to_dense(s.X)).norm(), 1e-14 * to_dense(s.X).norm());
}

TEST(Neumann, ConvergentMatchesKronecker) {
  HodlrConfig cfg = small_cfg();
  auto p = laplacian_with_term(32, 0.01, cfg);
  auto r = neumann_generalized_solve(p, cfg);
  DenseMatrix ref = kronecker_generalized_oracle(p);
  EXPECT_LE((to_dense(r.X) - ref).norm() / ref.norm(), 1e-9);
  EXPECT_GT(r.report.iterations, 1);
  for (double ratio : r.report.history) EXPECT_LT(ratio, 1.0);
}

TEST(Neumann, DivergentRaises) {
  HodlrConfig cfg = small_cfg();
  auto unit = laplacian_with_term(16, 1.0, cfg);
  const double rho1 = kron_spectral_radius(unit);
  const double c = std::sqrt(1.5 / rho1);
  auto p = laplacian_with_term(16, c, cfg);
  EXPECT_NEAR(kron_spectral_radius(p), 1.5, 1e-6);
  try {
    neumann_generalized_solve(p, cfg);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.ratio, 1.0);
  }
}

TEST(Neumann, MaxTermsRaises) {
  HodlrConfig cfg = small_cfg();
  auto p = laplacian_with_term(32, 0.3, cfg);
  GeneralizedOptions opt;
  opt.max_terms = 2;
  EXPECT_THROW(neumann_generalized_solve(p, cfg, opt), ConvergenceFailure);
}

TEST(GeneralizedResidual, WarningWhenBoundNegative) {
  HodlrConfig cfg = small_cfg();
  auto p = laplacian_with_term(16, 10.0, cfg);
  auto r = residual_generalized(p, p.C);
  EXPECT_TRUE(r.warning);
  EXPECT_GT(r.value, 0.0);
}
