#pragma once

#include <array>
#include <numeric>
#include <string>

#include "falsetheta/common.hpp"
#include "falsetheta/maass.hpp"

namespace falsetheta {

struct ModularMatrix {
  long a = 1, b = 0, c = 0, d = 1;

  ModularMatrix() = default;
  ModularMatrix(long a_, long b_, long c_, long d_) : a(a_), b(b_), c(c_), d(d_) {
    require(a * d - b * c == 1, "matrix must have determinant 1");
  }
  static ModularMatrix S() { return {0, -1, 1, 0}; }
  static ModularMatrix T() { return {1, 1, 0, 1}; }
  friend ModularMatrix operator*(const ModularMatrix& x, const ModularMatrix& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend bool operator==(const ModularMatrix&, const ModularMatrix&) = default;
};

// (h, k, h') with h h' = -1 mod k, and M_{h,k} = (h, -(h h'+1)/k; k, -h')
struct ModularTriple {
  long h = 0, k = 1, h_prime = 0;
  ModularMatrix matrix = ModularMatrix::S();

  static ModularTriple make(long h, long k) {
    require(k >= 1, "k must be >= 1");
    require(h >= 0 && h < k, "need 0 <= h < k");
    require(std::gcd(h, k) == 1, "h and k must be coprime");
    ModularTriple t;
    t.h = h;
    t.k = k;
    t.h_prime = 0;
    if (k > 1) {
      // h' = -h^{-1} mod k
      long x = 0, y = 0;
      long g = ext_gcd(h, k, x, y);
      check(g == 1, "modular inverse failed");
      t.h_prime = mod_floor(-x, k);
    }
    check(mod_floor(h * t.h_prime + 1, k) == 0, "h h' != -1 mod k");
    t.matrix = ModularMatrix(h, -(h * t.h_prime + 1) / k, k, -t.h_prime);
    return t;
  }

 private:
  static long ext_gcd(long a, long b, long& x, long& y) {
    if (b == 0) {
      x = 1;
      y = 0;
      return a;
    }
    long x1, y1;
    long g = ext_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
  }
};

template <class R>
using MultiplierMatrix = std::array<std::array<Cplx<R>, 3>, 3>;

template <class R>
MultiplierMatrix<R> matmul(const MultiplierMatrix<R>& x, const MultiplierMatrix<R>& y) {
  MultiplierMatrix<R> z{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Cplx<R> s;
      for (int l = 0; l < 3; ++l) s += x[i][l] * y[l][j];
      z[i][j] = s;
    }
  return z;
}

template <class R>
double max_abs_diff(const MultiplierMatrix<R>& x, const MultiplierMatrix<R>& y) {
  double m = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m = std::max(m, to_double((x[i][j] - y[i][j]).abs()));
  return m;
}

// |sum_{x mod |c|} e(num(x)/(48c))| style sums are reduced to phase-index histograms mod 48|c|
template <class R>
Cplx<R> histogram_sum(const std::vector<long>& hist, long modulus) {
  Cplx<R> s;
  for (long i = 0; i < modulus; ++i)
    if (hist[static_cast<std::size_t>(i)]) s += unit_root<R>(i, modulus) * real_from<R>(hist[static_cast<std::size_t>(i)], 1);
  return s;
}

// psi_{M,Q}(mu, nu); Q(n) = 12 n1^2 - 2 n2^2, B(n, m) = 24 n1 m1 - 4 n2 m2, |det A| = 96
template <class R>
Cplx<R> gauss_multiplier(const ModularMatrix& M, const ShiftVector& mu, const ShiftVector& nu) {
  if (M.c == 0) {
    ShiftVector target = M.d > 0 ? nu : -nu;
    if (!(mu == target)) return Cplx<R>(R(0), R(0));
    // e(a b Q(mu)), Q(mu) = q48/48
    return unit_root<R>(M.a * M.b * q48(mu.a, mu.b), 48);
  }
  const long c = M.c, ac = std::labs(c), mod = 48 * ac;
  // m + mu = ((24 m1 + mu.a)/24, (4 m2 + mu.b)/4); the phase splits into x1 and x2 parts over 48c
  std::vector<long> h1(static_cast<std::size_t>(mod), 0), h2(static_cast<std::size_t>(mod), 0);
  const long sgn = c > 0 ? 1 : -1;
  for (long m = 0; m < ac; ++m) {
    long x = 24 * m + mu.a;
    long p = M.a * x * x - 2 * x * nu.a + M.d * nu.a * nu.a;
    ++h1[static_cast<std::size_t>(mod_floor(sgn * p, mod))];
    long y = 4 * m + mu.b;
    long q = -6 * M.a * y * y + 12 * y * nu.b - 6 * M.d * nu.b * nu.b;
    ++h2[static_cast<std::size_t>(mod_floor(sgn * q, mod))];
  }
  Cplx<R> s = histogram_sum<R>(h1, mod) * histogram_sum<R>(h2, mod);
  using std::sqrt;
  return s / (real_from<R>(ac, 1) * sqrt(real_from<R>(96, 1)));
}

// all 96 classes of A^-1 Z^2 / Z^2
inline std::vector<ShiftVector> all_shift_classes() {
  std::vector<ShiftVector> v;
  for (int a = 0; a < 24; ++a)
    for (int b = 0; b < 4; ++b) v.emplace_back(a, b);
  return v;
}

template <class R>
Cplx<R> psi_entry(const ModularMatrix& M, int j, const ShiftVector& nu) {
  const auto& f = shift_family(j);
  Cplx<R> s;
  for (const auto& mu : f.plus) s += gauss_multiplier<R>(M, mu, nu);
  for (const auto& mu : f.minus) s -= gauss_multiplier<R>(M, mu, nu);
  return s;
}

// Psi_M(j, l) with nu the first element of S_l^+; the other three representatives must agree
template <class R>
MultiplierMatrix<R> psi_vector(const ModularMatrix& M, bool check_representatives = true) {
  MultiplierMatrix<R> P{};
  for (int j = 0; j < 3; ++j)
    for (int l = 0; l < 3; ++l) {
      const auto& reps = shift_family(l).plus;
      P[j][l] = psi_entry<R>(M, j, reps[0]);
      if (check_representatives) {
        for (std::size_t i = 1; i < reps.size(); ++i) {
          double diff = to_double((psi_entry<R>(M, j, reps[i]) - P[j][l]).abs());
          check(diff <= 1e-12, "psi_vector: entry (" + std::to_string(j) + "," + std::to_string(l) +
                                   ") depends on the representative nu");
        }
      }
    }
  return P;
}

// s(h', k) = sum_{r=1}^{k-1} (r/k)(h' r/k - floor(h' r/k) - 1/2)
inline Rational dedekind_sum(long h_prime, long k) {
  require(k >= 1, "k must be positive");
  Rational s = 0;
  for (long r = 1; r < k; ++r) {
    long num = h_prime * r;
    Rational fr = ratio(mod_floor(num, k), k);
    s += ratio(r, k) * (fr - ratio(1, 2));
  }
  s.canonicalize();
  return s;
}

// exponent x with nu_eta(M) = e^{pi i x}
inline Rational eta_multiplier_exponent(const ModularMatrix& M) {
  require(M.c > 0, "eta multiplier needs c > 0");
  Rational x = ratio(M.a + M.d, 12 * M.c) - ratio(1, 4) + dedekind_sum(-M.d, M.c);
  x.canonicalize();
  return x;
}

template <class R>
Cplx<R> eta_multiplier(const ModularMatrix& M) {
  return unit_root<R>(eta_multiplier_exponent(M) / 2);
}

// psi_{h,k}(j, l) = e^{-pi i/4} Psi_{M_{h,k}}(j, l) / nu_eta(M_{h,k})
template <class R>
MultiplierMatrix<R> circle_multiplier(const ModularTriple& t) {
  MultiplierMatrix<R> P = psi_vector<R>(t.matrix);
  // e^{-pi i/4} / nu_eta = e(-1/8 - x/2), kept exact on the rational exponent
  Cplx<R> ph = unit_root<R>(ratio(-1, 8) - eta_multiplier_exponent(t.matrix) / 2);
  for (auto& row : P)
    for (auto& z : row) z = z * ph;
  return P;
}

// eta(tau) = q^{1/24} prod (1 - q^n), q = e(tau)
inline std::complex<double> eta_numeric(std::complex<double> tau) {
  require(tau.imag() > 0, "eta: Im tau must be positive");
  const std::complex<double> I(0, 1);
  std::complex<double> q = std::exp(2.0 * std::numbers::pi * I * tau);
  std::complex<double> p = 1, qn = q;
  for (int n = 1; n < 100000 && std::abs(qn) > 1e-18; ++n) {
    p *= 1.0 - qn;
    qn *= q;
  }
  return std::exp(2.0 * std::numbers::pi * I * tau / 24.0) * p;
}

}  // namespace falsetheta
