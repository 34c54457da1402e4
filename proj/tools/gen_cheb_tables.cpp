// Generates partial-fraction rational approximations of e^x on (-inf, 0]
// by the Caratheodory-Fejer method (Trefethen, Weideman, Schmelzer).
//
//   gen_cheb_tables <data-dir> <header-path>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <vector>

// Extended precision keeps the degree-16 Hankel singular vector above roundoff.
using real = long double;
using cplx = std::complex<real>;
using CVec = std::vector<cplx>;
using RMat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic>;
using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

namespace {

constexpr int kVersion = 1;

// Highest degree first, as in MATLAB polyval.
cplx polyval(const CVec& p, cplx x) {
  cplx r = 0.0;
  for (const cplx& c : p) r = r * x + c;
  return r;
}

CVec polyder(const CVec& p) {
  CVec d;
  const std::size_t n = p.size() - 1;
  for (std::size_t i = 0; i < n; ++i) d.push_back(p[i] * real(n - i));
  return d;
}

CVec poly_from_roots(const CVec& roots) {
  CVec p{1.0};
  for (const cplx& r : roots) {
    CVec q(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i] += p[i];
      q[i + 1] -= r * p[i];
    }
    p = q;
  }
  return p;
}

CVec roots(CVec p) {
  while (!p.empty() && std::abs(p.front()) == 0.0) p.erase(p.begin());
  const int n = int(p.size()) - 1;
  CMat comp = CMat::Zero(n, n);
  for (int j = 0; j < n; ++j) comp(0, j) = -p[std::size_t(j + 1)] / p[0];
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<CMat> es(comp, false);
  CVec r;
  for (int i = 0; i < n; ++i) r.push_back(es.eigenvalues()(i));
  return r;
}

// Forward DFT, X_k = sum_j x_j exp(-2 pi i jk/N).
CVec dft(const CVec& x) {
  const std::size_t n = x.size();
  CVec y(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      s += x[j] * std::polar(real(1), -2 * std::numbers::pi_v<real> * real((j * k) % n) / real(n));
    y[k] = s;
  }
  return y;
}

struct Table {
  int d;
  CVec poles, residues;
  real r_inf;
};

Table cf(int n) {
  const int K = 75, nf = 1024;
  const real scl = 9;
  CVec w(nf), F(nf);
  for (int j = 0; j < nf; ++j) {
    w[std::size_t(j)] = std::polar(real(1), 2 * std::numbers::pi_v<real> * j / nf);
    const real t = w[std::size_t(j)].real();
    F[std::size_t(j)] = std::exp(scl * (t - 1.0) / (t + 1 + real(1e-16)));
  }
  CVec Fh = dft(F);
  std::vector<real> c(nf);
  for (int j = 0; j < nf; ++j) c[std::size_t(j)] = Fh[std::size_t(j)].real() / nf;

  CVec cp;  // c(K+1:-1:1)
  for (int j = K; j >= 0; --j) cp.push_back(c[std::size_t(j)]);
  CVec f(nf);
  for (int j = 0; j < nf; ++j) f[std::size_t(j)] = polyval(cp, w[std::size_t(j)]);

  RMat H = RMat::Zero(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j + i < K; ++j) H(i, j) = c[std::size_t(i + j + 1)];
  Eigen::JacobiSVD<RMat> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const real s = svd.singularValues()(n);
  CVec u(K), v(K);
  for (int i = 0; i < K; ++i) {
    u[std::size_t(i)] = svd.matrixU()(K - 1 - i, n);
    v[std::size_t(i)] = svd.matrixV()(i, n);
  }
  CVec uz(nf, 0.0), vz(nf, 0.0);
  std::copy(u.begin(), u.end(), uz.begin());
  std::copy(v.begin(), v.end(), vz.begin());
  CVec fu = dft(uz), fv = dft(vz);
  CVec rt(nf);
  for (int j = 0; j < nf; ++j) {
    const cplx b = fu[std::size_t(j)] / fv[std::size_t(j)];
    rt[std::size_t(j)] = f[std::size_t(j)] - s * std::pow(w[std::size_t(j)], K) * b;
  }
  CVec zr = roots(v), qj;
  for (const cplx& z : zr)
    if (std::abs(z) > 1.0) qj.push_back(z);
  if (int(qj.size()) != n) throw std::runtime_error("unexpected number of exterior roots");
  CVec qc = poly_from_roots(qj);
  CVec pt(nf);
  for (int j = 0; j < nf; ++j) pt[std::size_t(j)] = rt[std::size_t(j)] * polyval(qc, w[std::size_t(j)]);
  CVec pth = dft(pt);
  CVec ptc;
  for (int j = n; j >= 0; --j) ptc.push_back(pth[std::size_t(j)].real() / nf);
  CVec dq = polyder(qc);
  Table t{n, {}, {}, 0.0};
  cplx acc = 0.0;
  for (const cplx& q : qj) {
    cplx ci = polyval(ptc, q) / polyval(dq, q);
    const cplx zi = scl * (q - real(1)) * (q - real(1)) / ((q + real(1)) * (q + real(1)));
    ci = real(4) * ci * zi / (q * q - real(1));
    t.poles.push_back(zi);
    t.residues.push_back(ci);
    acc += ci / zi;
  }
  t.r_inf = (real(0.5) * (real(1) + acc)).real();
  // order by imaginary part, then real part, so conjugate pairs sit together
  std::vector<std::size_t> idx(t.poles.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const real ia = std::abs(t.poles[a].imag()), ib = std::abs(t.poles[b].imag());
    if (ia != ib) return ia < ib;
    return t.poles[a].imag() > t.poles[b].imag();
  });
  Table o{n, {}, {}, t.r_inf};
  for (std::size_t i : idx) {
    o.poles.push_back(t.poles[i]);
    o.residues.push_back(t.residues[i]);
  }
  // enforce exact conjugate symmetry
  for (std::size_t i = 0; i + 1 < o.poles.size(); i += 2) {
    const cplx p = real(0.5) * (o.poles[i] + std::conj(o.poles[i + 1]));
    const cplx r = real(0.5) * (o.residues[i] + std::conj(o.residues[i + 1]));
    o.poles[i] = p;
    o.poles[i + 1] = std::conj(p);
    o.residues[i] = r;
    o.residues[i + 1] = std::conj(r);
  }
  return o;
}

std::string format_table(const Table& t) {
  std::ostringstream os;
  char buf[160];
  os << "# cf-exp v" << kVersion << " r_inf " << std::scientific;
  std::snprintf(buf, sizeof buf, "%.17g", double(t.r_inf));
  os << buf << "\n" << t.d << "\n";
  for (std::size_t i = 0; i < t.poles.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", double(t.poles[i].real()),
                  double(t.poles[i].imag()), double(t.residues[i].real()), double(t.residues[i].imag()));
    os << buf;
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: gen_cheb_tables <data-dir> <header-path>\n";
    return 64;
  }
  const std::string dir = argv[1];
  std::ofstream hdr(argv[2]);
  hdr << "#pragma once\n\n// Generated by tools/gen_cheb_tables. Do not edit.\n\n"
      << "#include <string_view>\n\nnamespace qsylv::detail {\n\n";
  for (int d : {8, 12, 14, 16}) {
    const Table t = cf(d);
    const std::string text = format_table(t);
    std::ofstream(dir + "/cf_exp_d" + std::to_string(d) + ".txt") << text;
    hdr << "inline constexpr std::string_view cf_exp_d" << d << " = R\"(" << text << ")\";\n\n";
    // error of the shipped (double, no r_inf) table
    double err = 0.0;
    for (int k = 0; k <= 2000; ++k) {
      const double x = -std::pow(10.0, -8.0 + 16.0 * k / 2000.0);
      std::complex<double> r = 0.0;
      for (std::size_t i = 0; i < t.poles.size(); ++i)
        r += std::complex<double>(t.residues[i]) / (x - std::complex<double>(t.poles[i]));
      err = std::max(err, std::abs(r.real() - std::exp(x)));
    }
    std::cerr << "d = " << d << "  max |r - exp| = " << err << "\n";
  }
  hdr << "}  // namespace qsylv::detail\n";
  return 0;
}
