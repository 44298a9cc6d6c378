#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "falsetheta/maass.hpp"
#include "falsetheta/modular.hpp"

namespace falsetheta {

inline BigInt factorial(long n) {
  static std::mutex mu;
  static std::vector<BigInt> f = {1};
  std::lock_guard<std::mutex> lk(mu);
  while (static_cast<long>(f.size()) <= n) f.push_back(f.back() * static_cast<unsigned long>(f.size()));
  return f[static_cast<std::size_t>(n)];
}

inline BigInt binomial(long n, long k) {
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

// B_0..B_n with B_1 = -1/2
inline std::vector<Rational> bernoulli_numbers(int n) {
  static std::mutex mu;
  static std::vector<Rational> B = {Rational(1)};
  std::lock_guard<std::mutex> lk(mu);
  while (static_cast<int>(B.size()) <= n) {
    long m = static_cast<long>(B.size());
    Rational s = 0;
    for (long k = 0; k < m; ++k) s += Rational(binomial(m + 1, k)) * B[static_cast<std::size_t>(k)];
    Rational b = -s / (m + 1);
    b.canonicalize();
    B.push_back(b);
  }
  return {B.begin(), B.begin() + n + 1};
}

// ascending coefficients of B_n(x)
inline std::vector<Rational> bernoulli_poly(int n) {
  require(n >= 0, "Bernoulli degree must be >= 0");
  static std::mutex mu;
  static std::map<int, std::vector<Rational>> cache;
  {
    std::lock_guard<std::mutex> lk(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  auto B = bernoulli_numbers(n);
  std::vector<Rational> c(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) c[static_cast<std::size_t>(k)] = Rational(binomial(n, k)) * B[static_cast<std::size_t>(n - k)];
  std::lock_guard<std::mutex> lk(mu);
  cache[n] = c;
  return c;
}

// B_n(x - floor x); B~_1 jumps at the integers, so integral arguments are rejected there
class PeriodicBernoulli {
 public:
  explicit PeriodicBernoulli(int n) : n_(n), coeffs_(bernoulli_poly(n)) {}
  int degree() const { return n_; }

  Rational operator()(const Rational& x) const {
    Rational f = frac(x);
    if (n_ == 1) check(f != 0, "periodic B_1 evaluated at an integer");
    Rational v = 0;
    for (int k = n_; k >= 0; --k) v = v * f + coeffs_[static_cast<std::size_t>(k)];
    return v;
  }
  double operator()(double x) const {
    double f = x - std::floor(x);
    if (n_ == 1) check(f != 0, "periodic B_1 evaluated at an integer");
    double v = 0;
    for (int k = n_; k >= 0; --k) v = v * f + coeffs_[static_cast<std::size_t>(k)].get_d();
    return v;
  }

 private:
  int n_;
  std::vector<Rational> coeffs_;
};

// P_{n1,n2} with d1^n1 d2^n2 f = P f for f = exp(-x1^2 - 10 x1 x2 - x2^2)
class GaussianDerivative {
 public:
  using Poly = std::map<std::pair<int, int>, BigInt>;  // (i, j) -> coefficient of x1^i x2^j

  static Poly poly(int n1, int n2) {
    require(n1 >= 0 && n2 >= 0, "derivative orders must be >= 0");
    Poly p = {{{0, 0}, BigInt(1)}};
    for (int i = 0; i < n1; ++i) p = d1(p);
    for (int i = 0; i < n2; ++i) p = d2(p);
    return p;
  }
  static BigInt at_zero(int n1, int n2) {
    auto p = poly(n1, n2);
    auto it = p.find({0, 0});
    return it == p.end() ? BigInt(0) : it->second;
  }
  static double evaluate(int n1, int n2, double x1, double x2) {
    double s = 0;
    for (const auto& [e, c] : poly(n1, n2)) s += c.get_d() * std::pow(x1, e.first) * std::pow(x2, e.second);
    return s * std::exp(-x1 * x1 - 10 * x1 * x2 - x2 * x2);
  }

 private:
  // d1 (P f) = (d1 P - (2 x1 + 10 x2) P) f
  static Poly d1(const Poly& p) {
    Poly q;
    for (const auto& [e, c] : p) {
      auto [i, j] = e;
      if (i > 0) q[{i - 1, j}] += c * i;
      q[{i + 1, j}] -= 2 * c;
      q[{i, j + 1}] -= 10 * c;
    }
    return prune(q);
  }
  static Poly d2(const Poly& p) {
    Poly q;
    for (const auto& [e, c] : p) {
      auto [i, j] = e;
      if (j > 0) q[{i, j - 1}] += c * j;
      q[{i, j + 1}] -= 2 * c;
      q[{i + 1, j}] -= 10 * c;
    }
    return prune(q);
  }
  static Poly prune(Poly q) {
    for (auto it = q.begin(); it != q.end();) it = it->second == 0 ? q.erase(it) : std::next(it);
    return q;
  }
};

// f^{(a,b)}(0) = a! b! (-1)^{(a+b)/2} sum_j 10^j / (i! j! l!), a = 2i + j, b = 2l + j
inline BigInt gaussian_derivative_at_zero(int a, int b) {
  if ((a + b) % 2) return 0;
  Rational s = 0;
  for (int j = 0; j <= std::min(a, b); ++j) {
    if ((a - j) % 2) continue;
    int i = (a - j) / 2, l = (b - j) / 2;
    BigInt p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(j));
    s += Rational(p10) / Rational(factorial(i) * factorial(j) * factorial(l));
  }
  s *= Rational(factorial(a) * factorial(b));
  if (((a + b) / 2) % 2) s = -s;
  s.canonicalize();
  check(s.get_den() == 1, "non-integral Gaussian derivative");
  return s.get_num();
}

// int_0^inf f^{(2r+1,0)}(0, x) dx through half-Gaussian moments int_0^inf x^m e^{-x^2} dx = Gamma((m+1)/2)/2
inline Rational gaussian_boundary_integral(int r) {
  const int n = 2 * r + 1;
  Rational s = 0;
  for (int j = 1; j <= n; j += 2) {
    int i = (n - j) / 2;
    BigInt p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(j));
    Rational term = Rational(p10) / Rational(factorial(i) * factorial(j));
    term *= Rational(factorial((j - 1) / 2), 2);
    if ((i + j) % 2) term = -term;
    s += term;
  }
  s *= Rational(factorial(n));
  s.canonicalize();
  return s;
}

// same integral from the recurrence polynomial, for cross-checking
inline Rational gaussian_boundary_integral_from_poly(int r) {
  Rational s = 0;
  for (const auto& [e, c] : GaussianDerivative::poly(2 * r + 1, 0)) {
    if (e.first != 0) continue;
    int m = e.second;
    check(m % 2 == 1, "even moment in an odd boundary integrand");
    s += Rational(c) * Rational(factorial((m - 1) / 2), 2);
  }
  s.canonicalize();
  return s;
}

// Bernoulli-pair arguments x = X/(48k), y = Y/(48k) and the phase index p of e(p/(48k)), with multiplicities
struct TaylorWeights {
  long k = 1;
  long modulus = 48;
  struct Cell {
    long X, Y;
    std::vector<std::pair<long, long>> phases;  // (phase index, signed count)
  };
  std::vector<Cell> cells;
};

inline TaylorWeights taylor_weights(int j, long h, long k) {
  require_j(j);
  require(k >= 1 && h >= 0 && h < k, "need 0 <= h < k");
  TaylorWeights w;
  w.k = k;
  const long M = 48 * k;
  w.modulus = M;
  std::map<std::pair<long, long>, std::map<long, long>> acc;
  const auto& f = shift_family(j);
  for (int sg : {1, -1})
    for (const auto& mu : (sg > 0 ? f.plus : f.minus))
      for (long alpha = 0; alpha < 4; ++alpha)
        for (long r1 = 0; r1 < k; ++r1)
          for (long r2 = 0; r2 < k; ++r2) {
            long a = mu.a + 24 * r1, b = mu.b + 4 * r2;
            long X = mod_floor(a - 3 * b - 12 * k * alpha, M);
            long Y = mod_floor(a + 3 * b + 12 * k * alpha, M);
            check(X != 0 && Y != 0, "integral Bernoulli argument");
            long p = mod_floor(h * q48(a, b), M);
            acc[{X, Y}][p] += sg;
          }
  for (auto& [xy, ph] : acc) {
    TaylorWeights::Cell c{xy.first, xy.second, {}};
    for (auto& [p, n] : ph)
      if (n) c.phases.emplace_back(p, n);
    if (!c.phases.empty()) w.cells.push_back(std::move(c));
  }
  return w;
}

// exact aggregated Taylor coefficients at k = 1: sum_l Psi_S(j,l) Phi_l^{(r)}(0) = q_r pi^{2r+2}
inline Rational aggregated_taylor_k1_exact(int j, int r) {
  require(r >= 0, "r must be >= 0");
  auto w = taylor_weights(j, 0, 1);
  PeriodicBernoulli top(2 * r + 2);
  const Rational fint = gaussian_boundary_integral(r);
  std::vector<PeriodicBernoulli> Bs;
  for (int p = 0; p <= 2 * r + 1; ++p) Bs.emplace_back(p);
  Rational total = 0;
  for (const auto& c : w.cells) {
    long cnt = 0;
    for (auto [p, n] : c.phases) {
      check(p == 0, "nontrivial phase at k = 1");
      cnt += n;
    }
    Rational x = ratio(c.X, 48), y = ratio(c.Y, 48);
    Rational t = -(top(x) + top(y)) / Rational(factorial(2 * r + 2)) * fint;
    for (int n1 = 0; n1 <= 2 * r; ++n1) {
      int n2 = 2 * r - n1;
      t += Bs[static_cast<std::size_t>(n1 + 1)](x) * Bs[static_cast<std::size_t>(n2 + 1)](y) /
           Rational(factorial(n1 + 1) * factorial(n2 + 1)) * Rational(gaussian_derivative_at_zero(n1, n2));
    }
    total += cnt * t;
  }
  BigInt p4;
  mpz_ui_pow_ui(p4.get_mpz_t(), 4, static_cast<unsigned long>(2 * r + 2));
  total *= Rational(p4, 8);
  total.canonicalize();
  return total;
}

// tabulated aggregated values for k = 1, as multiples of pi^{2r+2}; rows r = 0..4, columns j
inline Rational tabulated_aggregated(int j, int r) {
  require_j(j);
  require(r >= 0 && r <= 4, "tabulated values cover r <= 4");
  static const std::array<std::array<Rational, 3>, 5> t = {{
      {Rational(0), Rational(4), Rational(4)},
      {Rational(16), ratio(23, 3), ratio(50, 3)},
      {ratio(284, 3), ratio(9745, 72), ratio(2929, 18)},
      {ratio(32881, 18), ratio(3965831, 2592), ratio(769033, 324)},
      {ratio(20222423, 648), ratio(4241759521L, 124416), ratio(359054305, 7776)},
  }};
  return t[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
}

// a + b sqrt(2)
struct Surd2 {
  Rational a, b;
  double value() const { return a.get_d() + b.get_d() * std::sqrt(2.0); }
  template <class R>
  R value_as() const {
    using std::sqrt;
    return real_from<R>(a) + real_from<R>(b) * sqrt(real_from<R>(2, 1));
  }
  std::string str() const {
    std::string s;
    if (a != 0) s = rational_str(a);
    if (b != 0) {
      std::string bs = rational_str(abs(b));
      if (s.empty())
        s = (b < 0 ? "-" : "") + bs + "*sqrt(2)";
      else
        s += (b < 0 ? " - " : " + ") + bs + "*sqrt(2)";
    }
    return s.empty() ? "0" : s;
  }
};

// individual Phi_l^{(r)}(0) at k = 1 as (a + b sqrt 2) pi^{2r+2}, via Psi_S^2 = I
inline Surd2 phi_taylor_k1_exact(int l, int r) {
  require_j(l);
  Rational q0 = aggregated_taylor_k1_exact(0, r), q1 = aggregated_taylor_k1_exact(1, r),
           q2 = aggregated_taylor_k1_exact(2, r);
  Surd2 s;
  if (l == 0) s = {(q0 + q1) / 2, q2 / 2};
  if (l == 1) s = {(q0 + q1) / 2, -q2 / 2};
  if (l == 2) s = {Rational(0), (q0 - q1) / 2};
  s.a.canonicalize();
  s.b.canonicalize();
  return s;
}

// sum_l Psi_{M_{h,k}}(j,l) Phi^{(r)}_{l,h'/k}(0) for r = 0..r_max, in working precision R
template <class R>
std::vector<Cplx<R>> aggregated_taylor(int j, const ModularTriple& t, int r_max) {
  require(r_max >= 0, "r_max must be >= 0");
  const auto w = taylor_weights(j, t.h, t.k);
  const long M = w.modulus;
  const int P = 2 * r_max + 2;

  std::vector<Cplx<R>> roots(static_cast<std::size_t>(M));
  for (long p = 0; p < M; ++p) roots[static_cast<std::size_t>(p)] = unit_root<R>(p, M);

  // B~_p(X/M)/p! for every argument that occurs
  std::vector<char> used(static_cast<std::size_t>(M), 0);
  for (const auto& c : w.cells) used[static_cast<std::size_t>(c.X)] = used[static_cast<std::size_t>(c.Y)] = 1;
  std::vector<std::vector<R>> B(static_cast<std::size_t>(P + 1), std::vector<R>(static_cast<std::size_t>(M)));
  for (int p = 1; p <= P; ++p) {
    auto co = bernoulli_poly(p);
    Rational inv = Rational(1) / Rational(factorial(p));
    std::vector<R> cr;
    for (auto& q : co) cr.push_back(real_from<R>(Rational(q * inv)));
    for (long X = 0; X < M; ++X) {
      if (!used[static_cast<std::size_t>(X)]) continue;
      R x = real_from<R>(X, M), v = 0;
      for (int d = p; d >= 0; --d) v = v * x + cr[static_cast<std::size_t>(d)];
      B[static_cast<std::size_t>(p)][static_cast<std::size_t>(X)] = v;
    }
  }

  // complex cell weights, grouped by X
  std::map<long, std::vector<std::pair<long, Cplx<R>>>> rows;
  for (const auto& c : w.cells) {
    Cplx<R> z;
    for (auto [p, n] : c.phases) z += roots[static_cast<std::size_t>(p)] * real_from<R>(n, 1);
    rows[c.X].emplace_back(c.Y, z);
  }
  // V[X][q] = sum_Y W(X,Y) B~_q(Y)/q!,  S[X] = sum_Y W(X,Y)
  std::vector<long> xs;
  std::vector<std::vector<Cplx<R>>> V;
  std::vector<Cplx<R>> colsum;
  std::map<long, Cplx<R>> rowsum_y;
  for (auto& [X, ys] : rows) {
    xs.push_back(X);
    std::vector<Cplx<R>> v(static_cast<std::size_t>(P + 1));
    Cplx<R> s;
    for (auto& [Y, z] : ys) {
      s += z;
      rowsum_y[Y] += z;
      for (int q = 1; q < P; ++q) v[static_cast<std::size_t>(q)] += z * B[static_cast<std::size_t>(q)][static_cast<std::size_t>(Y)];
    }
    V.push_back(std::move(v));
    colsum.push_back(s);
  }

  std::vector<Cplx<R>> out;
  const R pi = pi_v<R>();
  for (int r = 0; r <= r_max; ++r) {
    const int top = 2 * r + 2;
    Cplx<R> t1;
    for (std::size_t i = 0; i < xs.size(); ++i) t1 += colsum[i] * B[static_cast<std::size_t>(top)][static_cast<std::size_t>(xs[i])];
    for (auto& [Y, z] : rowsum_y) t1 += z * B[static_cast<std::size_t>(top)][static_cast<std::size_t>(Y)];
    Cplx<R> total = t1 * (-real_from<R>(gaussian_boundary_integral(r)));
    for (int n1 = 0; n1 <= 2 * r; ++n1) {
      int n2 = 2 * r - n1;
      Cplx<R> s;
      for (std::size_t i = 0; i < xs.size(); ++i)
        s += V[i][static_cast<std::size_t>(n2 + 1)] * B[static_cast<std::size_t>(n1 + 1)][static_cast<std::size_t>(xs[i])];
      total += s * real_from<R>(Rational(gaussian_derivative_at_zero(n1, n2)));
    }
    using std::pow;
    R pref = pow(4 * pi, top) / real_from<R>(8 * t.k, 1);
    out.push_back(total * pref);
  }
  return out;
}

// Same aggregated values in double, with the h-independent part tabulated per phase class:
// A_r[p] = sum over cells with h-free phase index p, so the value at h is sum_p e(h p/M) A_r[p].
class AggregatedTaylorTable {
 public:
  AggregatedTaylorTable(int j, long k, int r_max) : k_(k), r_max_(r_max) {
    require_j(j);
    require(k >= 1 && r_max >= 0, "need k >= 1 and r_max >= 0");
    const long M = 48 * k;
    const int P = 2 * r_max + 2;
    std::vector<std::vector<double>> B(static_cast<std::size_t>(P + 1), std::vector<double>(static_cast<std::size_t>(M)));
    for (int p = 1; p <= P; ++p) {
      auto co = bernoulli_poly(p);
      std::vector<double> cr;
      for (auto& q : co) cr.push_back(Rational(q / Rational(factorial(p))).get_d());
      for (long X = 0; X < M; ++X) {
        double x = static_cast<double>(X) / static_cast<double>(M), v = 0;
        for (int d = p; d >= 0; --d) v = v * x + cr[static_cast<std::size_t>(d)];
        B[static_cast<std::size_t>(p)][static_cast<std::size_t>(X)] = v;
      }
    }
    std::vector<double> gbi;
    for (int r = 0; r <= r_max; ++r) gbi.push_back(gaussian_boundary_integral(r).get_d());
    A_.assign(static_cast<std::size_t>(r_max + 1), std::vector<double>(static_cast<std::size_t>(M), 0.0));
    const auto& f = shift_family(j);
    for (int sg : {1, -1})
      for (const auto& mu : (sg > 0 ? f.plus : f.minus))
        for (long alpha = 0; alpha < 4; ++alpha)
          for (long r1 = 0; r1 < k; ++r1)
            for (long r2 = 0; r2 < k; ++r2) {
              long a = mu.a + 24 * r1, b = mu.b + 4 * r2;
              auto X = static_cast<std::size_t>(mod_floor(a - 3 * b - 12 * k * alpha, M));
              auto Y = static_cast<std::size_t>(mod_floor(a + 3 * b + 12 * k * alpha, M));
              check(X != 0 && Y != 0, "integral Bernoulli argument");
              auto q = static_cast<std::size_t>(mod_floor(q48(a, b), M));
              for (int r = 0; r <= r_max; ++r) {
                const auto top = static_cast<std::size_t>(2 * r + 2);
                double v = -gbi[static_cast<std::size_t>(r)] * (B[top][X] + B[top][Y]);
                for (int n1 = 0; n1 <= 2 * r; ++n1)
                  v += B[static_cast<std::size_t>(n1 + 1)][X] * B[static_cast<std::size_t>(2 * r - n1 + 1)][Y] *
                       gd_(n1, 2 * r - n1);
                A_[static_cast<std::size_t>(r)][q] += sg * v;
              }
            }
    const double pi = std::numbers::pi;
    for (int r = 0; r <= r_max; ++r) {
      double pref = std::pow(4 * pi, 2 * r + 2) / (8.0 * static_cast<double>(k));
      for (auto& x : A_[static_cast<std::size_t>(r)]) x *= pref;
    }
  }

  std::vector<std::complex<double>> at(long h) const {
    const long M = 48 * k_;
    std::vector<std::complex<double>> out(static_cast<std::size_t>(r_max_ + 1));
    for (long p = 0; p < M; ++p) {
      auto idx = static_cast<std::size_t>(p);
      bool any = false;
      for (const auto& row : A_) any = any || row[idx] != 0;
      if (!any) continue;
      std::complex<double> e = unit_root<double>(h * p, M).to_std();
      for (int r = 0; r <= r_max_; ++r) out[static_cast<std::size_t>(r)] += e * A_[static_cast<std::size_t>(r)][idx];
    }
    return out;
  }

 private:
  static double gd_(int a, int b) {
    static std::map<std::pair<int, int>, double> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find({a, b});
    if (it != cache.end()) return it->second;
    return cache[{a, b}] = gaussian_derivative_at_zero(a, b).get_d();
  }

  long k_;
  int r_max_;
  std::vector<std::vector<double>> A_;
};

// C-infinity cutoff: 1 on [0, 1/2], 0 on [1, inf)
inline double smooth_cutoff(double x) {
  if (x <= 0.5) return 1.0;
  if (x >= 1.0) return 0.0;
  double y = 2 * (1 - x);
  auto g = [](double z) { return z > 0 ? std::exp(-1 / z) : 0.0; };
  return g(y) / (g(y) + g(1 - y));
}

struct SumEstimate {
  std::complex<double> value;
  double error;
};

// smoothed symmetric sum  sum* d_l(m) e(h' m/k) / m^{r+1}; error from halving the window
inline SumEstimate symmetric_sum(int l, int r, const ModularTriple& t, long X = 40000) {
  require_j(l);
  require(r >= 0 && X >= 16, "bad symmetric-sum parameters");
  auto tab = coefficient_table(l, X);
  const long M = 48 * t.k;
  std::vector<std::complex<double>> roots(static_cast<std::size_t>(M));
  for (long p = 0; p < M; ++p) roots[static_cast<std::size_t>(p)] = unit_root<double>(t.h_prime * p, M).to_std();
  auto at = [&](double Xc) {
    std::complex<double> s = 0;
    for (long m = tab->m_lo(); m <= tab->m_hi(); ++m) {
      long q = tab->quad(m);
      if (!q) continue;
      long N = tab->N48_of(m);
      double n = N / 48.0;
      double w = smooth_cutoff(std::abs(n) / Xc);
      if (w == 0) continue;
      s += roots[static_cast<std::size_t>(mod_floor(N, M))] * (w * q / 4.0 / std::pow(n, r + 1));
    }
    return s;
  };
  auto full = at(static_cast<double>(X)), half = at(X / 2.0);
  return {full, std::abs(full - half)};
}

struct KernelValue {
  std::complex<double> value;
  double error;
};

namespace detail {

// Taylor data below order p of Phi_{l,h'/k} at 0, and the bound on their error
inline std::vector<std::complex<double>> individual_taylor(int l, const ModularTriple& t, int p, double& err) {
  std::vector<std::complex<double>> c;
  err = 0;
  if (t.k == 1) {
    const double pi = std::numbers::pi;
    for (int r = 0; r < p; ++r)
      c.emplace_back(phi_taylor_k1_exact(l, r).value() * std::pow(pi, 2 * r + 2) / factorial(r).get_d());
  } else {
    for (int r = 0; r < p; ++r) {
      auto s = symmetric_sum(l, r, t);
      c.push_back(-s.value);
      err += s.error;
    }
  }
  return c;
}

}  // namespace detail

// Phi_{l,h'/k}(t) or, with remove_pole, Phi* (the t = 1/48 pole of l = 0 taken out)
inline KernelValue phi_eval_impl(int l, const ModularTriple& t, double x, double tol, bool remove_pole) {
  require_j(l);
  const int p = t.k == 1 ? 3 : 1;
  double err = 0;
  auto c = detail::individual_taylor(l, t, p, err);
  const long M = 48 * t.k;
  const Rational m0 = ratio(1, 48);
  const bool has_pole = l == 0;
  auto eval = [&](long X) {
    auto tab = coefficient_table(l, X);
    std::complex<double> s = 0;
    for (long m = tab->m_lo(); m <= tab->m_hi(); ++m) {
      long q = tab->quad(m);
      if (!q) continue;
      long N = tab->N48_of(m);
      double n = N / 48.0;
      if (std::abs(n) > X) continue;
      auto ph = unit_root<double>(t.h_prime * mod_floor(N, M), M).to_std();
      if (remove_pole && has_pole && N == 1) continue;
      if (!remove_pole) check(x != n, "phi_eval at a pole");
      s += ph * (q / 4.0) / (std::pow(n, p) * (x - n));
    }
    std::complex<double> v = 0;
    for (int r = p - 1; r >= 0; --r) v = v * x + c[static_cast<std::size_t>(r)];
    v += std::pow(x, p) * s;
    if (remove_pole && has_pole) {
      auto res = unit_root<double>(t.h_prime, M).to_std() * d_coefficient(0, m0).get_d();
      for (int i = 0; i < p; ++i) v += res * std::pow(x, i) / std::pow(1.0 / 48, i + 1);
    }
    return v;
  };
  const long X_max = 160000;
  long X = 10000;
  auto prev = eval(X / 2);
  for (;;) {
    auto cur = eval(X);
    double e = std::abs(cur - prev) + err;
    if (e <= tol) return {cur, e};
    if (X >= X_max) throw ConvergenceError("phi_eval: tolerance not reached", e);
    prev = cur;
    X *= 2;
  }
}

inline KernelValue phi_eval(int l, const ModularTriple& t, double x, double tol = 1e-8) {
  return phi_eval_impl(l, t, x, tol, false);
}
inline KernelValue phi_star(int l, const ModularTriple& t, double x, double tol = 1e-8) {
  return phi_eval_impl(l, t, x, tol, l == 0);
}

struct KernelTaylorTable {
  // (l, r, h', k) -> Phi^{(r)}_{l,h'/k}(0)
  std::map<std::tuple<int, int, long, long>, std::complex<double>> entries;
  // (j, r) -> sum_l Psi_S(j,l) Phi^{(r)}_{l,0}(0), exact multiple of pi^{2r+2}
  std::map<std::pair<int, int>, Rational> aggregated;

  double aggregated_value(int j, int r) const {
    return aggregated.at({j, r}).get_d() * std::pow(std::numbers::pi, 2 * r + 2);
  }
};

inline KernelTaylorTable kernel_taylor_table(int r_max) {
  KernelTaylorTable tab;
  const double pi = std::numbers::pi;
  for (int r = 0; r <= r_max; ++r)
    for (int j = 0; j < 3; ++j) {
      tab.aggregated[{j, r}] = aggregated_taylor_k1_exact(j, r);
      tab.entries[{j, r, 0L, 1L}] = phi_taylor_k1_exact(j, r).value() * std::pow(pi, 2 * r + 2);
    }
  return tab;
}

// Class sums for the far arcs: for each residue N mod 48k and node t,
// sum over m != 1/48 of d_l(m) / (m^p (t - m)).  Independent of h and n.
class ArcClassSums {
 public:
  static constexpr int p = 3;

  ArcClassSums(long k, const std::vector<double>& nodes, long X) : k_(k), nodes_(nodes) {
    const long M = 48 * k;
    for (int l = 0; l < 3; ++l) {
      auto tab = coefficient_table(l, X);
      // residues N mod 48k reachable from this grid class: 48 beta_l + 48 i, i < k
      auto& S = sums_[l];
      S.assign(static_cast<std::size_t>(k), std::vector<double>(nodes.size(), 0.0));
      for (long m = tab->m_lo(); m <= tab->m_hi(); ++m) {
        long q = tab->quad(m);
        if (!q) continue;
        long N = tab->N48_of(m);
        if (std::labs(N) > 48 * X) continue;
        if (l == 0 && N == 1) continue;
        long cls = mod_floor(N, M) / 48;
        double n = N / 48.0;
        double a = q / 4.0 / (n * n * n);
        auto& row = S[static_cast<std::size_t>(cls)];
        for (std::size_t i = 0; i < nodes.size(); ++i) row[i] += a / (nodes[i] - n);
      }
    }
  }

  long k() const { return k_; }
  const std::vector<double>& nodes() const { return nodes_; }
  // phased(l, h', node) for every node at once
  std::vector<std::complex<double>> phased_all(int l, long h_prime) const {
    const long M = 48 * k_;
    const long base = beta48(l);
    std::vector<std::complex<double>> out(nodes_.size());
    for (long c = 0; c < k_; ++c) {
      std::complex<double> e = unit_root<double>(h_prime * (base + 48 * c), M).to_std();
      const auto& row = sums_[l][static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < row.size(); ++i) out[i] += e * row[i];
    }
    return out;
  }

  // sum over classes with phase e(h' N/(48k)) for grid class l
  std::complex<double> phased(int l, long h_prime, std::size_t node) const {
    const long M = 48 * k_;
    const long base = beta48(l);
    std::complex<double> s = 0;
    for (long c = 0; c < k_; ++c) {
      long idx = base + 48 * c;
      s += unit_root<double>(h_prime * idx, M).to_std() * sums_[l][static_cast<std::size_t>(c)][node];
    }
    return s;
  }

 private:
  long k_;
  std::vector<double> nodes_;
  std::array<std::vector<std::vector<double>>, 3> sums_;
};

}  // namespace falsetheta
