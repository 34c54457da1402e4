#pragma once

#include <array>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>

#include "qsylv/cheb_tables_data.hpp"
#include "qsylv/hodlr.hpp"
#include "qsylv/hodlr_build.hpp"

namespace qsylv {

// e^x ~ sum_i r_i / (x - s_i) on (-inf, 0]
struct ChebyshevExpTable {
  int degree = 0;
  std::vector<cplx> poles;
  std::vector<cplx> residues;

  cplx eval(double x) const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < poles.size(); ++i) s += residues[i] / (x - poles[i]);
    return s;
  }

  // Accepted uniform error for a shipped table of this degree.
  static double tolerance(int d) { return std::max(3.0 * std::pow(9.28903, -double(d)), 3e-14); }

  double max_error_on_samples() const {
    double err = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double x = -std::pow(10.0, -8.0 + 16.0 * k / 999.0);
      err = std::max(err, std::abs(eval(x).real() - std::exp(x)));
    }
    return err;
  }

  void validate() const {
    if (degree < 1 || int(poles.size()) != degree || int(residues.size()) != degree)
      throw InvalidInput("ChebyshevExpTable: degree does not match entries");
    for (std::size_t i = 0; i < poles.size(); ++i) {
      bool found = false;
      for (std::size_t j = 0; j < poles.size() && !found; ++j)
        found = poles[j] == std::conj(poles[i]) && residues[j] == std::conj(residues[i]);
      if (!found) throw InvalidInput("ChebyshevExpTable: entries not closed under conjugation");
    }
    if (max_error_on_samples() > tolerance(degree))
      throw NumericalFailure("ChebyshevExpTable: approximation error above tolerance");
  }
};

inline ChebyshevExpTable parse_cheb_table(std::istream& is) {
  ChebyshevExpTable t;
  std::string line;
  auto next = [&](std::string& out) {
    while (std::getline(is, out)) {
      const auto p = out.find_first_not_of(" \t\r");
      if (p == std::string::npos || out[p] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next(line)) throw InvalidInput("Chebyshev table: missing degree");
  t.degree = std::stoi(line);
  if (t.degree < 1 || t.degree > 64) throw InvalidInput("Chebyshev table: bad degree");
  for (int i = 0; i < t.degree; ++i) {
    if (!next(line)) throw InvalidInput("Chebyshev table: missing entries");
    std::istringstream ls(line);
    double sr, si, rr, ri;
    if (!(ls >> sr >> si >> rr >> ri)) throw InvalidInput("Chebyshev table: malformed line");
    t.poles.emplace_back(sr, si);
    t.residues.emplace_back(rr, ri);
  }
  return t;
}

inline ChebyshevExpTable load_cheb_table(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open Chebyshev table " + path);
  ChebyshevExpTable t = parse_cheb_table(is);
  t.validate();
  return t;
}

inline std::string format_cheb_table(const ChebyshevExpTable& t) {
  std::ostringstream os;
  os << t.degree << "\n";
  char buf[128];
  for (std::size_t i = 0; i < t.poles.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", t.poles[i].real(), t.poles[i].imag(),
                  t.residues[i].real(), t.residues[i].imag());
    os << buf;
  }
  return os.str();
}

// Shipped tables, d in {8, 12, 14, 16}; validated on first use.
inline const ChebyshevExpTable& builtin_cheb_table(int d = 14) {
  static std::mutex mu;
  static std::map<int, ChebyshevExpTable> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(d);
  if (it != cache.end()) return it->second;
  std::string_view text;
  switch (d) {
    case 8: text = detail::cf_exp_d8; break;
    case 12: text = detail::cf_exp_d12; break;
    case 14: text = detail::cf_exp_d14; break;
    case 16: text = detail::cf_exp_d16; break;
    default: throw InvalidInput("no shipped Chebyshev table of degree " + std::to_string(d));
  }
  std::istringstream is{std::string(text)};
  ChebyshevExpTable t = parse_cheb_table(is);
  t.validate();
  return cache.emplace(d, std::move(t)).first->second;
}

struct PadeConfig {
  int degree = 13;
  double crossover = 64.0;  // Pade iff t * ||H||_2 <= crossover
};

enum class ExpStrategy { Pade, Chebyshev };

inline ExpStrategy choose_strategy(double t, double two_norm, double crossover = 64.0) {
  return t * two_norm <= crossover ? ExpStrategy::Pade : ExpStrategy::Chebyshev;
}

struct ExpmInfo {
  ExpStrategy strategy = ExpStrategy::Pade;
  int squarings = 0;
  int solves = 0;  // inversions performed
};

namespace detail {

inline std::vector<double> pade_coefficients(int d) {
  std::vector<double> c(std::size_t(d) + 1);
  c[0] = 1.0;
  for (int j = 1; j <= d; ++j) c[std::size_t(j)] = c[std::size_t(j - 1)] * double(d - j + 1) / (double(j) * double(2 * d - j + 1));
  return c;
}

// p(X) = V + U, q(X) = V - U with U odd and V even.
inline void pade_parts(const Hodlr& x, int d, const HodlrConfig& cfg, Hodlr& u, Hodlr& v) {
  const std::vector<double> c = pade_coefficients(d);
  auto lin = [&](std::initializer_list<std::pair<double, const Hodlr*>> terms, double id) {
    Hodlr acc = scale(x, 0.0);  // zero with the tree of x
    truncate_inplace(acc, cfg);
    for (auto& [w, m] : terms)
      if (w != 0.0) acc = combine(1.0, acc, w, *m, cfg);
    shift_inplace(acc, id);
    return acc;
  };
  const Hodlr x2 = multiply(x, x, cfg);
  if (d == 13) {
    const Hodlr x4 = multiply(x2, x2, cfg);
    const Hodlr x6 = multiply(x4, x2, cfg);
    const Hodlr w1 = lin({{c[13], &x6}, {c[11], &x4}, {c[9], &x2}}, 0.0);
    const Hodlr w2 = lin({{c[7], &x6}, {c[5], &x4}, {c[3], &x2}}, c[1]);
    const Hodlr z1 = lin({{c[12], &x6}, {c[10], &x4}, {c[8], &x2}}, 0.0);
    const Hodlr z2 = lin({{c[6], &x6}, {c[4], &x4}, {c[2], &x2}}, c[0]);
    u = multiply(x, add(multiply(x6, w1, cfg), w2, cfg), cfg);
    v = add(multiply(x6, z1, cfg), z2, cfg);
    return;
  }
  // Horner in x^2
  auto horner = [&](int first) {
    int top = d;
    if ((top - first) % 2) --top;
    Hodlr acc = lin({}, c[std::size_t(top)]);
    for (int j = top - 2; j >= first; j -= 2) {
      acc = multiply(acc, x2, cfg);
      shift_inplace(acc, c[std::size_t(j)]);
    }
    return acc;
  };
  v = horner(0);
  u = d >= 1 ? multiply(x, horner(1), cfg) : scale(x, 0.0);
}

}  // namespace detail

// e^H by scaling and squaring; two_norm < 0 means estimate it.
inline Hodlr expm_pade(const Hodlr& h, const HodlrConfig& cfg, const PadeConfig& pc = {}, double two_norm = -1.0,
                       ExpmInfo* info = nullptr) {
  if (h.rows() != h.cols()) throw InvalidInput("expm_pade: matrix not square");
  if (pc.degree < 1) throw InvalidInput("expm_pade: degree must be >= 1");
  if (two_norm < 0) two_norm = two_norm_estimate(h);
  const int k = two_norm > 1.0 ? int(std::ceil(std::log2(two_norm))) : 0;
  const Hodlr x = scale(h, std::ldexp(1.0, -k));
  Hodlr u, v;
  detail::pade_parts(x, pc.degree, cfg, u, v);
  const Hodlr p = add(v, u, cfg), q = subtract(v, u, cfg);
  Hodlr r;
  try {
    r = multiply(invert(q, cfg), p, cfg);
  } catch (const SingularMatrix& e) {
    throw NumericalFailure(std::string("expm_pade: singular denominator: ") + e.what());
  }
  for (int i = 0; i < k; ++i) r = multiply(r, r, cfg);
  if (info) *info = {ExpStrategy::Pade, k, 1};
  return r;
}

// Checks x^T H x > 0 on a few fixed probes.
inline void require_spd_probe(const Hodlr& h, const char* who) {
  if (h.rows() != h.cols()) throw InvalidInput(std::string(who) + ": matrix not square");
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  DenseMatrix x(h.rows(), 4);
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i) x(i, j) = nd(gen);
  x.col(0).setOnes();
  const DenseMatrix hx = matmat(h, x);
  for (Index j = 0; j < x.cols(); ++j)
    if (!(x.col(j).dot(hx.col(j)) > 0)) throw InvalidInput(std::string(who) + ": matrix is not positive definite");
}

// e^{-tH} ~ sum_i r_i (-tH - s_i I)^{-1}, one complex inverse per conjugate pair.
inline Hodlr expm_chebyshev(double t, const Hodlr& h, const ChebyshevExpTable& table, const HodlrConfig& cfg,
                            ExpmInfo* info = nullptr) {
  if (!(t > 0)) throw InvalidInput("expm_chebyshev: t must be positive");
  require_spd_probe(h, "expm_chebyshev");
  HodlrMatrix<cplx> base = to_complex(h);
  scale_inplace(base, cplx(-t));
  Hodlr acc;
  bool first = true;
  int solves = 0;
  std::vector<char> done(table.poles.size(), 0);
  for (std::size_t i = 0; i < table.poles.size(); ++i) {
    if (done[i]) continue;
    done[i] = 1;
    double weight = 1.0;
    if (table.poles[i].imag() != 0.0) {
      for (std::size_t j = i + 1; j < table.poles.size(); ++j)
        if (!done[j] && table.poles[j] == std::conj(table.poles[i])) {
          done[j] = 1;
          weight = 2.0;
          break;
        }
    }
    HodlrMatrix<cplx> m = shift(base, -table.poles[i]);
    HodlrMatrix<cplx> inv = invert(m, cfg);
    ++solves;
    scale_inplace(inv, weight * table.residues[i]);
    Hodlr term = real_part(inv, cfg);
    acc = first ? std::move(term) : add(acc, term, cfg);
    first = false;
  }
  if (info) *info = {ExpStrategy::Chebyshev, 0, solves};
  return acc;
}

// e^{-tH} for SPD H, picking the strategy from t * ||H||_2.
inline Hodlr expm_neg(double t, const Hodlr& h, double two_norm, const HodlrConfig& cfg, const PadeConfig& pc = {},
                      const ChebyshevExpTable& table = builtin_cheb_table(14), ExpmInfo* info = nullptr) {
  if (choose_strategy(t, two_norm, pc.crossover) == ExpStrategy::Pade)
    return expm_pade(scale(h, -t), cfg, pc, t * two_norm, info);
  return expm_chebyshev(t, h, table, cfg, info);
}

}  // namespace qsylv
