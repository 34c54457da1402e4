#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "qsylv/hodlr.hpp"
#include "qsylv/hodlr_build.hpp"
#include "qsylv/hodlr_io.hpp"

using namespace qsylv;

namespace {

HodlrConfig small_cfg(Index bs = 32, double thr = 1e-12) {
  HodlrConfig c;
  c.block_size = bs;
  c.threshold = thr;
  return c;
}

double two_norm(const DenseMatrix& a) {
  Eigen::JacobiSVD<DenseMatrix> s(a);
  return s.singularValues()(0);
}

BandMatrix random_band(Index n, Index b, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BandMatrix m(n, b);
  for (Index i = 0; i < n; ++i)
    for (Index j = std::max<Index>(0, i - b); j <= std::min(n - 1, i + b); ++j) m.at(i, j) = u(gen);
  return m;
}

DenseMatrix log_kernel(Index n, double tau) {
  DenseMatrix c(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) c(i, j) = std::log(tau + std::abs(double(i - j) / double(n - 1)));
  return c;
}

void check_splits(const Hodlr& h) {
  if (h.is_leaf()) return;
  EXPECT_EQ(h.a11().rows(), h.rows() / 2);
  EXPECT_EQ(h.a22().rows(), h.rows() - h.rows() / 2);
  EXPECT_LE(h.a21().rank(), std::min(h.a21().rows(), h.a21().cols()));
  check_splits(h.a11());
  check_splits(h.a22());
}

}  // namespace

TEST(HodlrBuild, IdentityHasRankZero) {
  Hodlr h = from_dense(DenseMatrix::Identity(1024, 1024));
  EXPECT_EQ(hodlr_rank(h), 0);
  EXPECT_EQ(h.depth(), 2);
  check_splits(h);
}

TEST(HodlrBuild, SplitRuleOddSizes) {
  Hodlr h = from_dense(DenseMatrix::Identity(301, 301), small_cfg(20));
  check_splits(h);
  EXPECT_EQ(to_dense(h), DenseMatrix::Identity(301, 301));
}

TEST(HodlrBuild, LeafRuleInclusive) {
  EXPECT_TRUE(identity(256).is_leaf());
  EXPECT_FALSE(identity(257).is_leaf());
}

TEST(HodlrBuild, TridiagonalFromDenseHasRankOne) {
  Hodlr h = from_dense(toeplitz_band(300, {-1, 2, -1}).to_dense(), small_cfg(16));
  EXPECT_EQ(hodlr_rank(h), 1);
}

TEST(HodlrBuild, LogKernelRankAtTightThreshold) {
  Hodlr h = from_dense(log_kernel(300, 1e-4), small_cfg(32, 1e-14));
  EXPECT_LE(hodlr_rank(h), 20);
}

TEST(HodlrBuild, FromDenseErrorBound) {
  DenseMatrix a = log_kernel(256, 1.0);
  for (double thr : {1e-6, 1e-10}) {
    Hodlr h = from_dense(a, small_cfg(16, thr));
    EXPECT_LE(two_norm(to_dense(h) - a), double(h.depth()) * thr * two_norm(a));
  }
}

TEST(HodlrBuild, BandedLaplacianExact) {
  BandMatrix t = toeplitz_band(2048, {-1, 2, -1});
  Hodlr h = from_banded(t);
  EXPECT_EQ(hodlr_rank(h), 1);
  EXPECT_EQ((to_dense(h) - t.to_dense()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(HodlrBuild, BandwidthBound) {
  for (Index b = 1; b <= 6; ++b) {
    for (Index n : {100, 513, 1024}) {
      BandMatrix m = random_band(n, b, std::uint64_t(b * 1000 + n));
      Hodlr h = from_banded(m, small_cfg(16));
      EXPECT_LE(hodlr_rank(h), b);
      EXPECT_LE((to_dense(h) - m.to_dense()).norm(), 1e-14 * m.frobenius());
    }
  }
}

TEST(HodlrBuild, PentadiagonalRankTwo) {
  Hodlr h = from_banded(random_band(512, 2, 9), small_cfg(32));
  EXPECT_LE(hodlr_rank(h), 2);
}

TEST(HodlrBuild, BandedRejectsWideBand) {
  std::vector<Vector> diags(7, Vector::Ones(1));
  EXPECT_THROW(from_banded(diags, 3), InvalidInput);
}

TEST(HodlrBuild, FromDiagonals) {
  const Index n = 40;
  std::vector<Vector> d = {Vector::Constant(n - 1, -1.0), Vector::Constant(n, 2.0), Vector::Constant(n - 1, -1.0)};
  Hodlr h = from_banded(d, n, small_cfg(8));
  EXPECT_EQ(to_dense(h), toeplitz_band(n, {-1, 2, -1}).to_dense());
}

TEST(HodlrBuild, SeparableFunctionRankOne) {
  Vector x = Vector::LinSpaced(1000, 0.0, 1.0);
  Hodlr h = from_function([](double a, double b) { return a * b; }, x, x, small_cfg(64));
  EXPECT_EQ(hodlr_rank(h), 1);
  DenseMatrix exact = x * x.transpose();
  EXPECT_LE((to_dense(h) - exact).norm(), 1e-12 * exact.norm());
}

TEST(HodlrBuild, FunctionMatchesDenseCompression) {
  const Index n = 2048;
  Vector x = Vector::LinSpaced(n, 0.0, 1.0);
  auto f = [](double a, double b) { return std::log(1.0 + std::abs(a - b)); };
  Hodlr h = from_function(f, x, x, HodlrConfig{}, true);
  DenseMatrix c(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) c(i, j) = f(x(i), x(j));
  EXPECT_GT(hodlr_rank(h), 0);
  EXPECT_LE(hodlr_rank(h), 20);
  EXPECT_LE((to_dense(h) - c).norm(), 1e-10 * c.norm());
  Hodlr hd = from_dense(c);
  EXPECT_LE(std::abs(hodlr_rank(h) - hodlr_rank(hd)), 1);
}

TEST(HodlrBuild, FunctionZeroRowsFallBack) {
  // the first rows of every lower block vanish, ACA has to skip them
  Vector x = Vector::LinSpaced(600, 0.0, 1.0);
  auto f = [](double a, double b) { return a < 0.8 ? 0.0 : std::exp(-a * b); };
  Hodlr h = from_function(f, x, x, small_cfg(64));
  DenseMatrix c(600, 600);
  for (Index j = 0; j < 600; ++j)
    for (Index i = 0; i < 600; ++i) c(i, j) = f(x(i), x(j));
  EXPECT_LE((to_dense(h) - c).norm(), 1e-10 * c.norm());
}

TEST(HodlrBuild, TauSweepRankDecreases) {
  Vector x = Vector::LinSpaced(300, 0.0, 1.0);
  Index prev = 1000;
  for (double tau : {1.0, 1e2, 1e4, 1e6}) {
    Hodlr h = from_function([tau](double a, double b) { return std::log(tau + std::abs(a - b)); }, x, x,
                            small_cfg(32, 1e-14), true);
    EXPECT_LE(hodlr_rank(h), prev);
    prev = hodlr_rank(h);
  }
  EXPECT_EQ(prev, 1);
}

TEST(HodlrArith, AddNegationIsZero) {
  Hodlr h = from_dense(log_kernel(200, 1.0), small_cfg(16));
  Hodlr z = add(h, scale(h, -1.0), small_cfg(16));
  EXPECT_EQ(hodlr_rank(z), 0);
  EXPECT_EQ(to_dense(z).cwiseAbs().maxCoeff(), 0.0);
}

TEST(HodlrArith, MultiplyByIdentity) {
  auto cfg = small_cfg(16);
  Hodlr h = from_dense(log_kernel(200, 1.0), cfg);
  Hodlr p = multiply(h, identity(200, cfg), cfg);
  EXPECT_LE((to_dense(p) - to_dense(h)).norm(), 1e-12 * to_dense(h).norm());
}

TEST(HodlrArith, MultiplyTridiagonalsMatchesDense) {
  auto cfg = small_cfg(32);
  Hodlr a = from_banded(random_band(256, 1, 1), cfg), b = from_banded(random_band(256, 1, 2), cfg);
  DenseMatrix exact = to_dense(a) * to_dense(b);
  EXPECT_LE((to_dense(multiply(a, b, cfg)) - exact).norm(), 1e-11 * exact.norm());
}

TEST(HodlrArith, DenseEquivalence) {
  const double thr = 1e-12;
  auto cfg = small_cfg(16, thr);
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd;
  DenseMatrix a = log_kernel(256, 0.5), b = log_kernel(256, 2.0);
  for (Index i = 0; i < 256; ++i) b(i, i) += 10.0 + nd(gen);
  Hodlr ha = from_dense(a, cfg), hb = from_dense(b, cfg);
  const double depth = double(ha.depth());
  DenseMatrix da = to_dense(ha), db = to_dense(hb);
  DenseMatrix s = da + db, p = da * db;
  EXPECT_LE((to_dense(add(ha, hb, cfg)) - s).norm(), 50 * depth * thr * (da.norm() + db.norm()));
  EXPECT_LE((to_dense(multiply(ha, hb, cfg)) - p).norm(), 50 * depth * thr * da.norm() * db.norm());
  DenseMatrix inv = db.inverse();
  EXPECT_LE((to_dense(invert(hb, cfg)) - inv).norm(), 50 * depth * thr * inv.norm() * db.norm());
  Vector x = Vector::LinSpaced(256, -1, 1);
  EXPECT_LE((matvec(ha, x) - da * x).norm(), 1e-14 * da.norm() * x.norm());
}

TEST(HodlrArith, RanksSubadditive) {
  auto cfg = small_cfg(16, 0.0);
  Hodlr a = from_banded(random_band(300, 2, 3), cfg), b = from_banded(random_band(300, 3, 4), cfg);
  EXPECT_LE(hodlr_rank(add(a, b, cfg)), 5);
  EXPECT_LE(hodlr_rank(multiply(a, b, cfg)), 5);
}

TEST(HodlrArith, SymmetryClosureOfAdd) {
  auto cfg = small_cfg(16);
  Vector x = Vector::LinSpaced(300, 0, 1);
  Hodlr a = from_function([](double p, double q) { return std::log(1 + std::abs(p - q)); }, x, x, cfg, true);
  Hodlr b = from_banded(toeplitz_band(300, {-1, 2, -1}), cfg);
  DenseMatrix s = to_dense(add(a, b, cfg));
  EXPECT_LE((s - s.transpose()).norm(), 1e-15 * s.norm());
}

TEST(HodlrArith, ShapeMismatchRejected) {
  EXPECT_THROW(add(identity(100, small_cfg(16)), identity(100, small_cfg(32)), small_cfg(16)), InvalidInput);
  EXPECT_THROW(add(identity(100, small_cfg(16)), identity(101, small_cfg(16)), small_cfg(16)), InvalidInput);
}

TEST(HodlrSolve, IdentitySolve) {
  auto cfg = small_cfg(16);
  DenseMatrix b = log_kernel(64, 1.0).leftCols(3);
  EXPECT_LE((solve(identity(64, cfg), b, cfg) - b).norm(), 0.0);
}

TEST(HodlrSolve, DiagonalInverse) {
  auto cfg = small_cfg(16);
  Vector d = Vector::LinSpaced(100, 1.0, 5.0);
  DenseMatrix inv = to_dense(invert(diagonal_matrix<double>(d, cfg), cfg));
  EXPECT_LE((inv - DenseMatrix(d.cwiseInverse().asDiagonal())).norm(), 1e-15);
}

TEST(HodlrSolve, LaplacianInverseTimesMatrix) {
  const Index n = 512;
  auto cfg = small_cfg(64);
  BandMatrix t = toeplitz_band(n, {-1, 2, -1});
  Hodlr a = from_banded(t, cfg);
  scale_inplace(a, double((n - 1) * (n - 1)));
  Hodlr p = multiply(a, invert(a, cfg), cfg);
  EXPECT_LE((to_dense(p) - DenseMatrix::Identity(n, n)).norm(), 1e-8);
}

TEST(HodlrSolve, SingularLeafReported) {
  Vector d = Vector::Ones(100);
  d(70) = 0.0;
  EXPECT_THROW(invert(diagonal_matrix<double>(d, small_cfg(16)), small_cfg(16)), SingularMatrix);
}

TEST(HodlrSolve, HodlrRightHandSide) {
  auto cfg = small_cfg(32);
  Hodlr a = from_banded(toeplitz_band(200, {-1, 4, -1}), cfg);
  Hodlr b = from_dense(log_kernel(200, 1.0), cfg);
  Hodlr x = solve(a, b, cfg);
  EXPECT_LE((to_dense(a) * to_dense(x) - to_dense(b)).norm(), 1e-10 * to_dense(b).norm());
}

TEST(HodlrNormsTest, IdentityAndDiagonal) {
  auto n1 = norms(identity(100, small_cfg(16)));
  EXPECT_NEAR(n1.frobenius, 10.0, 1e-13);
  EXPECT_NEAR(n1.two_norm, 1.0, 1e-3);
  const Index n = 100;
  Vector d = Vector::LinSpaced(n, 1.0, double(n));
  auto n2 = norms(diagonal_matrix<double>(d, small_cfg(16)));
  EXPECT_NEAR(n2.frobenius, std::sqrt(d.squaredNorm()), 1e-12);
  EXPECT_NEAR(n2.two_norm, double(n), 1e-3 * double(n));
}

TEST(HodlrNormsTest, RandomAgainstDense) {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> nd;
  DenseMatrix a(128, 128);
  for (Index j = 0; j < 128; ++j)
    for (Index i = 0; i < 128; ++i) a(i, j) = nd(gen);
  Hodlr h = from_dense(a, small_cfg(16, 0.0));
  auto nr = norms(h);
  EXPECT_NEAR(nr.frobenius, a.norm(), 1e-12 * a.norm());
  EXPECT_NEAR(nr.two_norm, two_norm(a), 1e-2 * two_norm(a));
}

TEST(HodlrNormsTest, StorageScalesNLogN) {
  std::vector<double> ratio;
  for (Index n : {512, 1024, 2048, 4096}) {
    Hodlr h = from_banded(toeplitz_band(n, {-1, 2, -1}), small_cfg(32));
    ratio.push_back(double(h.storage_bytes()) / (double(n) * std::log2(double(n)) * double(std::max<Index>(1, hodlr_rank(h)))));
  }
  for (std::size_t i = 1; i < ratio.size(); ++i) EXPECT_LE(ratio[i], ratio[0] * 1.05);
}

TEST(HodlrIo, RoundTripIdentity) {
  Hodlr h = identity(64, small_cfg(8));
  std::stringstream ss;
  serialize(h, ss, small_cfg(8));
  Hodlr g = deserialize(ss);
  EXPECT_TRUE(g == h);
}

TEST(HodlrIo, RoundTripBitExact) {
  auto cfg = small_cfg(32);
  Hodlr h = from_dense(log_kernel(300, 1e-2), cfg);
  std::stringstream ss;
  serialize(h, ss, cfg);
  const std::string bytes = ss.str();
  Hodlr g = deserialize(ss);
  EXPECT_TRUE(g == h);
  std::stringstream again;
  serialize(g, again, cfg);
  EXPECT_EQ(again.str(), bytes);
}

TEST(HodlrIo, HeaderLayout) {
  std::stringstream ss;
  serialize(identity(4), ss);
  const std::string b = ss.str();
  ASSERT_GE(b.size(), 4u + 8 + 8 + 4 + 1 + 16 + 16 * 8);
  EXPECT_EQ(b.substr(0, 4), "QSH1");
  EXPECT_EQ(std::uint8_t(b[4]), 4);
  EXPECT_EQ(std::uint8_t(b[20]), 0);  // block size 256 little-endian low byte
  EXPECT_EQ(std::uint8_t(b[21]), 1);
  EXPECT_EQ(std::uint8_t(b[24]), 0);  // leaf tag
}

TEST(HodlrIo, CorruptedMagic) {
  std::stringstream ss;
  serialize(identity(16), ss);
  std::string b = ss.str();
  b[1] = 'X';
  std::stringstream bad(b);
  EXPECT_THROW(deserialize(bad), FormatError);
}

TEST(HodlrIo, TruncatedStream) {
  std::stringstream ss;
  serialize(from_dense(log_kernel(100, 1.0), small_cfg(16)), ss);
  std::string b = ss.str();
  std::stringstream bad(b.substr(0, b.size() - 5));
  try {
    deserialize(bad);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_GT(e.offset, 24u);
  }
}
