#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>

#include "falsetheta/common.hpp"

namespace falsetheta {

// mu = (a/24, b/4) with 0 <= a < 24, 0 <= b < 4
struct ShiftVector {
  int a = 0;
  int b = 0;

  ShiftVector() = default;
  ShiftVector(long a24, long b4) : a(static_cast<int>(mod_floor(a24, 24))), b(static_cast<int>(mod_floor(b4, 4))) {}

  static ShiftVector from_rational(const Rational& mu1, const Rational& mu2) {
    Rational x = mu1 * 24, y = mu2 * 4;
    require(x.get_den() == 1 && y.get_den() == 1, "shift vector must lie in A^-1 Z^2");
    return ShiftVector(x.get_num().get_si(), y.get_num().get_si());
  }
  Rational mu1() const { return ratio(a, 24); }
  Rational mu2() const { return ratio(b, 4); }
  ShiftVector operator-() const { return ShiftVector(-a, -b); }
  friend bool operator==(const ShiftVector&, const ShiftVector&) = default;
  friend auto operator<=>(const ShiftVector&, const ShiftVector&) = default;
};

// Q(mu) in units of 1/48: Q = 12 mu1^2 - 2 mu2^2 = (a^2 - 6 b^2)/48
inline long q48(long a, long b) { return a * a - 6 * b * b; }

struct ShiftFamily {
  int j = 0;
  std::array<ShiftVector, 4> plus;
  std::array<ShiftVector, 4> minus;
};

inline const ShiftFamily& shift_family(int j) {
  static const std::array<ShiftFamily, 3> fam = {{
      {0, {{{7, 0}, {17, 0}, {11, 2}, {13, 2}}}, {{{1, 0}, {23, 0}, {5, 2}, {19, 2}}}},
      {1, {{{11, 0}, {13, 0}, {7, 2}, {17, 2}}}, {{{5, 0}, {19, 0}, {1, 2}, {23, 2}}}},
      {2, {{{10, 1}, {14, 1}, {10, 3}, {14, 3}}}, {{{2, 1}, {22, 1}, {2, 3}, {22, 3}}}},
  }};
  require(j >= 0 && j <= 2, "j must be 0, 1 or 2");
  return fam[j];
}

inline void require_j(int j) { require(j >= 0 && j <= 2, "j must be 0, 1 or 2"); }

// exponent grids: u_j lives on Z + beta_j, alpha_j(n) is the coefficient of q^(n + Delta_j)
inline Rational beta(int j) {
  require_j(j);
  static const Rational b[3] = {ratio(1, 48), ratio(25, 48), ratio(23, 24)};
  return b[j];
}
inline Rational Delta(int j) {
  require_j(j);
  static const Rational d[3] = {ratio(-1, 48), ratio(23, 48), ratio(11, 12)};
  return d[j];
}
inline long beta48(int j) { return Rational(beta(j) * 48).get_num().get_si(); }

// gamma = (5 2; 12 5) acting on shifts
inline ShiftVector apply_gamma(const ShiftVector& s) {
  // (n1, n2) -> (5 n1 + 2 n2, 12 n1 + 5 n2) in units a/24, b/4
  Rational m1 = 5 * s.mu1() + 2 * s.mu2();
  Rational m2 = 12 * s.mu1() + 5 * s.mu2();
  return ShiftVector::from_rational(m1, m2);
}

// weights doubled: 2 inside a cone, 1 on a boundary ray, 0 outside
inline int positive_weight2(long a, long b) {
  long A = std::labs(a), B3 = 3 * std::labs(b);
  return B3 < A ? 2 : (B3 == A ? 1 : 0);
}
inline int negative_weight2(long a, long b) {
  long A = std::labs(a), B2 = 2 * std::labs(b);
  return B2 > A ? 2 : (B2 == A ? 1 : 0);
}

inline long isqrt_floor(long v) {
  if (v <= 0) return 0;
  long r = static_cast<long>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

// 2 a_mu(n) for n = N48/48, restricted to lattice points congruent to mu + r (mod c) when c > 1
inline long twice_count(const ShiftVector& mu, long N48, long c = 1, long r1 = 0, long r2 = 0) {
  require(N48 != 0, "n must be nonzero");
  // lattice point n = (a/24, b/4); class condition (n - mu) = r (mod c)
  auto in_class = [&](long a, long b) {
    if (c == 1) return true;
    long m1 = (a - mu.a) / 24, m2 = (b - mu.b) / 4;
    return mod_floor(m1, c) == r1 && mod_floor(m2, c) == r2;
  };
  long total = 0;
  if (N48 > 0) {
    long lo = isqrt_floor(N48 - 1) + 1, hi = isqrt_floor(3 * N48);
    for (long aa = lo; aa <= hi; ++aa) {
      for (long a : {aa, -aa}) {
        if (mod_floor(a - mu.a, 24) != 0) continue;
        long t = a * a - N48;
        if (t % 6) continue;
        long s = isqrt_floor(t / 6);
        if (s * s * 6 != t) continue;
        for (long b : {s, -s}) {
          if (mod_floor(b - mu.b, 4) != 0) continue;
          if (in_class(a, b)) total += positive_weight2(a, b);
          if (s == 0) break;
        }
      }
    }
  } else {
    long M = -N48;
    long lo = isqrt_floor((M + 5) / 6 - 1) + 1, hi = isqrt_floor(M / 2);
    for (long bb = lo; bb <= hi; ++bb) {
      for (long b : {bb, -bb}) {
        if (mod_floor(b - mu.b, 4) != 0) continue;
        long t = 6 * b * b - M;
        if (t < 0) continue;
        long s = isqrt_floor(t);
        if (s * s != t) continue;
        for (long a : {s, -s}) {
          if (mod_floor(a - mu.a, 24) != 0) continue;
          if (in_class(a, b)) total += negative_weight2(a, b);
          if (s == 0) break;
        }
      }
    }
  }
  return total;
}

// 4 d_j(N48/48)
inline long d_quadruple(int j, long N48) {
  const auto& f = shift_family(j);
  long s = 0;
  for (const auto& mu : f.plus) s += twice_count(mu, N48);
  for (const auto& mu : f.minus) s -= twice_count(mu, N48);
  return s;
}

inline Rational d_coefficient(int j, const Rational& n) {
  require_j(j);
  require(n != 0, "d_coefficient: n must be nonzero");
  Rational m = n - beta(j);
  require(m.get_den() == 1, "d_coefficient: n must lie in Z + beta_j");
  long N48 = Rational(n * 48).get_num().get_si();
  return ratio(d_quadruple(j, N48), 4);
}

// all d_j(n) with |n| <= X, from one sweep over both cones
class CoefficientTable {
 public:
  CoefficientTable(int j, long X) : j_(j), X_(X) {
    require_j(j);
    require(X >= 1, "table bound must be >= 1");
    const long L = 48 * X;
    const long b48 = beta48(j);
    m_lo_ = -((L + b48) / 48);
    m_hi_ = (L - b48) / 48;
    quad_.assign(static_cast<std::size_t>(m_hi_ - m_lo_ + 1), 0);
    const auto& f = shift_family(j);
    for (int sgn : {1, -1}) {
      for (const auto& mu : (sgn > 0 ? f.plus : f.minus)) sweep(mu, sgn, L);
    }
  }

  int j() const { return j_; }
  long X() const { return X_; }
  long m_lo() const { return m_lo_; }
  long m_hi() const { return m_hi_; }
  // n = beta_j + m
  long quad(long m) const {
    require(m >= m_lo_ && m <= m_hi_, "coefficient table: index out of range");
    return quad_[static_cast<std::size_t>(m - m_lo_)];
  }
  Rational d(long m) const { return ratio(quad(m), 4); }
  Rational n_of(long m) const { return beta(j_) + m; }
  long N48_of(long m) const { return beta48(j_) + 48 * m; }

 private:
  void add(long N, long w) {
    long m = (N - beta48(j_)) / 48;
    quad_[static_cast<std::size_t>(m - m_lo_)] += w;
  }
  void sweep(const ShiftVector& mu, int sgn, long L) {
    long amax = isqrt_floor(3 * L) + 24;
    long a0 = mu.a - 24 * ((amax + 24) / 24);
    for (long a = a0; a <= amax; a += 24) {
      long bm = std::labs(a) / 3;
      long b0 = mu.b - 4 * ((bm + 4) / 4);
      for (long b = b0; b <= bm; b += 4) {
        long N = q48(a, b);
        if (N <= 0 || N > L) continue;
        if (int w = positive_weight2(a, b)) add(N, sgn * w);
      }
    }
    long bmax = isqrt_floor(L / 2) + 4;
    long bs = mu.b - 4 * ((bmax + 4) / 4);
    for (long b = bs; b <= bmax; b += 4) {
      long am = 2 * std::labs(b);
      long as = mu.a - 24 * ((am + 24) / 24);
      for (long a = as; a <= am; a += 24) {
        long N = q48(a, b);
        if (N >= 0 || N < -L) continue;
        if (int w = negative_weight2(a, b)) add(N, sgn * w);
      }
    }
  }

  int j_;
  long X_;
  long m_lo_ = 0, m_hi_ = 0;
  std::vector<long> quad_;
};

// shared tables; grown on demand, never shrunk
inline std::shared_ptr<const CoefficientTable> coefficient_table(int j, long X) {
  require_j(j);
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const CoefficientTable>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(j);
  if (it != cache.end() && it->second->X() >= X) return it->second;
  auto t = std::make_shared<const CoefficientTable>(j, X);
  cache[j] = t;
  return t;
}

inline double density_constant() {
  return std::log(std::sqrt(2.0) + std::sqrt(3.0)) / std::sqrt(6.0);
}

// number of (r1, r2) mod c with Q(mu + r) = r + beta_j (mod c), signed over S_j^+-
inline long density_class_count(int j, long r, long c) {
  require(c >= 1 && r >= 0 && r < c, "need c >= 1 and 0 <= r < c");
  const auto& f = shift_family(j);
  long count = 0;
  for (int sgn : {1, -1}) {
    for (const auto& mu : (sgn > 0 ? f.plus : f.minus)) {
      for (long r1 = 0; r1 < c; ++r1) {
        for (long r2 = 0; r2 < c; ++r2) {
          long a = mu.a + 24 * r1, b = mu.b + 4 * r2;
          Rational diff = ratio(q48(a, b), 48) - r - beta(j);
          if (diff.get_den() == 1 && mod_floor(diff.get_num().get_si(), c) == 0) count += sgn;
        }
      }
    }
  }
  return count;
}

inline double density_class_constant(int j, long r, long c) {
  return density_constant() / (2.0 * c * c) * static_cast<double>(density_class_count(j, r, c));
}

struct DensityReport {
  Rational sum;          // sum of d_j(n) over 0 < n <= X in the class
  double prediction;     // A_{j,r,c} X
  Rational negative_sum; // same over -X <= n < 0
  double negative_prediction;
};

inline DensityReport partial_sum_density(int j, long r, long c, long X) {
  require_j(j);
  require(c >= 1 && r >= 0 && r < c, "need c >= 1 and 0 <= r < c");
  require(X >= 0, "X must be >= 0");
  DensityReport rep{Rational(0), 0.0, Rational(0), 0.0};
  if (X == 0) return rep;
  auto tab = coefficient_table(j, X);
  long pos = 0, neg = 0;
  for (long m = tab->m_lo(); m <= tab->m_hi(); ++m) {
    Rational n = tab->n_of(m);
    if (abs(n) > X) continue;
    Rational cls = n - r - beta(j);
    if (mod_floor(cls.get_num().get_si(), c) != 0) continue;
    (n > 0 ? pos : neg) += tab->quad(m);
  }
  rep.sum = ratio(pos, 4);
  rep.negative_sum = ratio(neg, 4);
  rep.prediction = density_class_constant(j, r, c) * static_cast<double>(X);
  rep.negative_prediction = rep.prediction;
  return rep;
}

// sum of a_mu(n) over 0 < n <= X (sign > 0) or -X <= n < 0 (sign < 0), per single shift
inline Rational shift_partial_sum(const ShiftVector& mu, long X, int sign) {
  const long L = 48 * X;
  long twice = 0;
  long amax = isqrt_floor(3 * L) + 24;
  for (long a = mu.a - 24 * ((amax + 24) / 24); a <= amax; a += 24) {
    if (sign > 0) {
      long bm = std::labs(a) / 3;
      for (long b = mu.b - 4 * ((bm + 4) / 4); b <= bm; b += 4) {
        long N = q48(a, b);
        if (N > 0 && N <= L) twice += positive_weight2(a, b);
      }
    }
  }
  if (sign < 0) {
    long bmax = isqrt_floor(L / 2) + 4;
    for (long b = mu.b - 4 * ((bmax + 4) / 4); b <= bmax; b += 4) {
      long am = 2 * std::labs(b);
      for (long a = mu.a - 24 * ((am + 24) / 24); a <= am; a += 24) {
        long N = q48(a, b);
        if (N < 0 && N >= -L) twice += negative_weight2(a, b);
      }
    }
  }
  return ratio(twice, 2);
}

struct UEvaluation {
  std::complex<double> value;
  double tail_bound;  // crude bound on the dropped terms
  long n_cut;
};

inline long default_n_cut(double y) {
  require(y > 0, "Im tau must be positive");
  long N = 1;
  while (std::sqrt(static_cast<double>(N)) * std::exp(-2 * std::numbers::pi * N * y) >= 1e-16) ++N;
  return N;
}

// U_j(tau) = sqrt(y) sum d_j(n) K_0(2 pi |n| y) e(n x); there is no constant term
inline UEvaluation evaluate_U(int j, std::complex<double> tau, long n_cut = 0, double tol = 1e-12) {
  require_j(j);
  double x = tau.real(), y = tau.imag();
  require(y > 0, "evaluate_U: Im tau must be positive");
  if (n_cut <= 0) n_cut = default_n_cut(y);
  auto tab = coefficient_table(j, n_cut);
  std::complex<double> s = 0;
  for (long m = tab->m_lo(); m <= tab->m_hi(); ++m) {
    long q = tab->quad(m);
    if (!q) continue;
    double n = tab->n_of(m).get_d();
    if (std::abs(n) > n_cut) continue;
    double k0 = std::cyl_bessel_k(0.0, 2 * std::numbers::pi * std::abs(n) * y);
    double ph = 2 * std::numbers::pi * n * x;
    s += (q / 4.0) * k0 * std::complex<double>(std::cos(ph), std::sin(ph));
  }
  // |d| <= C sqrt|n| with C ~ 2, K_0(z) <= sqrt(pi/(2z)) e^-z
  double z = 2 * std::numbers::pi * n_cut * y;
  double tail = 4.0 * std::sqrt(static_cast<double>(n_cut)) * std::sqrt(std::numbers::pi / (2 * z)) * std::exp(-z) /
                (1 - std::exp(-2 * std::numbers::pi * y));
  UEvaluation out{std::sqrt(y) * s, std::sqrt(y) * tail, n_cut};
  if (out.tail_bound > tol) std::fprintf(stderr, "warning: evaluate_U tail bound %.3g exceeds %.3g\n", out.tail_bound, tol);
  return out;
}

}  // namespace falsetheta
