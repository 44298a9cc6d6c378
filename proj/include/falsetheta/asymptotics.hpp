#pragma once

#include <functional>
#include <optional>

#include "falsetheta/kernel.hpp"
#include "falsetheta/qseries.hpp"

namespace falsetheta {

inline double bessel_I_half(double x) {
  require(x > 0, "Bessel argument must be positive");
  const double pi = std::numbers::pi;
  if (x < 0.5) {
    // (x/2)^{1/2} sum (x^2/4)^m / (m! Gamma(m + 3/2))
    double s = 0, term = 1 / std::tgamma(1.5), y = x * x / 4;
    for (int m = 0; m < 30; ++m) {
      s += term;
      term *= y / ((m + 1) * (m + 1.5));
    }
    return std::sqrt(x / 2) * s;
  }
  return std::sqrt(2 / (pi * x)) * std::sinh(x);
}

inline double bessel_I_threehalves(double x) {
  require(x > 0, "Bessel argument must be positive");
  const double pi = std::numbers::pi;
  if (x < 1.0) {
    double s = 0, term = 1 / std::tgamma(2.5), y = x * x / 4;
    for (int m = 0; m < 40; ++m) {
      s += term;
      term *= y / ((m + 1) * (m + 2.5));
    }
    return std::pow(x / 2, 1.5) * s;
  }
  return std::sqrt(2 / (pi * x)) * (std::cosh(x) - std::sinh(x) / x);
}

// A_k(n) = sum_{h mod k, (h,k)=1} e^{pi i s(h,k) - 2 pi i n h/k}
template <class R = double>
Cplx<R> kloosterman_A(long k, long n) {
  Cplx<R> s;
  for (long h = 0; h < k; ++h) {
    if (std::gcd(h, k) != 1) continue;
    Rational x = dedekind_sum(h, k) / 2 - ratio(mod_floor(n * h, k), k);
    s += unit_root<R>(x);
  }
  return s;
}

// evaluated in 30 digits so that p(n) near 1e12 still rounds cleanly
inline double rademacher_p(long n, long k_max) {
  require(n >= 1, "n must be >= 1");
  require(k_max >= 1, "k_max must be >= 1");
  using R = MpReal<30>;
  const R pi = pi_v<R>();
  const R m = R(24 * n - 1);
  R s = 0;
  for (long k = 1; k <= k_max; ++k) {
    R x = pi * sqrt(m) / (6 * k);
    R i32 = sqrt(2 / (pi * x)) * (cosh(x) - sinh(x) / x);
    if (x < 1) i32 = R(bessel_I_threehalves(to_double(x)));
    s += kloosterman_A<R>(k, n).re / k * i32;
  }
  return to_double(R(2 * pi / pow(m, R(0.75)) * s));
}

// Gauss-Legendre nodes and weights on [-1, 1], cached per (precision, N)
template <class R>
struct GaussLegendre {
  std::vector<R> x, w;

  static const GaussLegendre& get(int N) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussLegendre>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto& slot = cache[N];
    if (!slot) slot = std::make_unique<GaussLegendre>(N);
    return *slot;
  }

  explicit GaussLegendre(int N) {
    require(N >= 1, "need at least one node");
    using std::abs;
    using std::cos;
    x.resize(static_cast<std::size_t>(N));
    w.resize(static_cast<std::size_t>(N));
    const R pi = pi_v<R>();
    const double eps = std::pow(10.0, -static_cast<double>(RealTraits<R>::digits10) + 3);
    for (int i = 0; i < (N + 1) / 2; ++i) {
      R z = cos(pi * (i + R(0.75)) / (N + R(0.5)));
      R dp = 0;
      for (int it = 0; it < 200; ++it) {
        R p0 = 1, p1 = z;
        for (int n = 2; n <= N; ++n) {
          R p2 = ((2 * n - 1) * z * p1 - (n - 1) * p0) / n;
          p0 = p1;
          p1 = p2;
        }
        if (N == 1) p0 = 1;
        dp = N * (z * p1 - p0) / (z * z - 1);
        R dz = p1 / dp;
        z -= dz;
        if (to_double(abs(dz)) < eps) break;
      }
      // refresh the derivative at the converged root
      R p0 = 1, p1 = z;
      for (int n = 2; n <= N; ++n) {
        R p2 = ((2 * n - 1) * z * p1 - (n - 1) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      dp = N * (z * p1 - p0) / (z * z - 1);
      R wt = 2 / ((1 - z * z) * dp * dp);
      x[static_cast<std::size_t>(i)] = -z;
      x[static_cast<std::size_t>(N - 1 - i)] = z;
      w[static_cast<std::size_t>(i)] = wt;
      w[static_cast<std::size_t>(N - 1 - i)] = wt;
    }
  }
};

template <class R, class V, class F>
V gauss_legendre(F&& f, const R& a, const R& b, int N) {
  const auto& g = GaussLegendre<R>::get(N);
  R half = (b - a) / 2, mid = (a + b) / 2;
  V s{};
  for (std::size_t i = 0; i < g.x.size(); ++i) s += f(mid + half * g.x[i]) * g.w[i];
  return s * half;
}

// PV int_a^b g(t)/(t - p) dt = int (g(t) - g(p))/(t - p) dt + g(p) log((b - p)/(p - a))
template <class R, class V, class F>
V pv_integral(F&& g, const R& a, const R& b, const R& p, int N) {
  require(a < p && p < b, "pole must be interior");
  using std::log;
  V gp = g(p);
  auto h = [&](const R& t) { return (g(t) - gp) / (t - p); };
  V s = gauss_legendre<R, V>(h, a, p, N) + gauss_legendre<R, V>(h, p, b, N);
  return s + gp * R(log((b - p) / (p - a)));
}

struct MainSumOptions {
  int quad_nodes = 64;       // starting Gauss-Legendre nodes per panel
  double tol = 1e-30;        // relative agreement between node counts on near arcs
  long k_max = 0;            // 0 means floor(sqrt n)
  double far_digits = 15;    // arcs needing at most this many digits use double precision
  long class_sum_X = 20000;  // window for far-arc class sums
  int force_route = 0;       // 1 near (multiprecision Taylor), 2 far (class sums)
};

using Acc = MpReal<320>;

struct AsymptoticReport {
  int j = 0;
  long n = 0;
  Acc main_sum_mp = 0;
  double main_sum = 0;
  double imag_ratio = 0;
  std::optional<BigInt> exact;
  double residual = 0;
  double residual_over_n34 = 0;
  long k_max = 0;
};

namespace detail {

inline const std::array<Rational, 2>& pole_points(int l) {
  static const std::array<std::array<Rational, 2>, 3> pts = {{
      {ratio(1, 48), ratio(-47, 48)},
      {ratio(25, 48), ratio(-23, 48)},
      {ratio(23, 24), ratio(-1, 24)},
  }};
  return pts[static_cast<std::size_t>(l)];
}

// digits of the arc's exponential size e^{cU}, plus headroom for the absolute target
inline double arc_digits(double cU) { return cU / std::log(10.0) + 8; }

template <class R>
struct ArcData {
  std::vector<Cplx<R>> gs;                       // pole-free Taylor coefficients
  std::vector<std::pair<R, Cplx<R>>> far_poles;  // (m0, residue) for poles off [0, 1/24]
  Cplx<R> R0;                                    // residue at t = 1/48
};

template <class R>
ArcData<R> near_arc_data(int j, const ModularTriple& t, int terms) {
  ArcData<R> a;
  auto agg = aggregated_taylor<R>(j, t, terms - 1);
  auto P = psi_vector<R>(t.matrix, false);
  a.gs.resize(static_cast<std::size_t>(terms));
  for (int r = 0; r < terms; ++r) a.gs[static_cast<std::size_t>(r)] = agg[static_cast<std::size_t>(r)] / real_from<R>(Rational(factorial(r)));
  for (int l = 0; l < 3; ++l)
    for (const auto& m0 : pole_points(l)) {
      Rational d = d_coefficient(l, m0);
      if (d == 0) continue;
      Cplx<R> res = P[j][static_cast<std::size_t>(l)] * unit_root<R>(t.h_prime * m0 / t.k) * real_from<R>(d);
      R m = real_from<R>(m0);
      R pw = m;
      for (int r = 0; r < terms; ++r) {
        a.gs[static_cast<std::size_t>(r)] += res / pw;
        pw *= m;
      }
      if (m0 == ratio(1, 48))
        a.R0 = res;
      else
        a.far_poles.emplace_back(m, res);
    }
  return a;
}

// u-variable integral of G*(1/24 - u^2) 2u sinh(cu) plus the PV pole term, without the sqrt(2/(pi c)) factor
template <class R, class GStar>
Cplx<R> arc_integral(GStar&& gstar, const Cplx<R>& R0, const R& c, int N) {
  using std::sinh;
  using std::sqrt;
  const R U = 1 / sqrt(R(24)), u0 = 1 / sqrt(R(48));
  const R t0 = 1 / R(24);
  auto regular = [&](const R& u) { return gstar(t0 - u * u) * (2 * u * sinh(c * u)); };
  auto F = [&](const R& u) { return R0 * (-2 * u * sinh(c * u) / (u + u0)); };
  Cplx<R> s = gauss_legendre<R, Cplx<R>>(regular, R(0), u0, N) + gauss_legendre<R, Cplx<R>>(regular, u0, U, N);
  return s + pv_integral<R, Cplx<R>>(F, R(0), U, u0, N);
}

template <unsigned D>
Cplx<Acc> near_arc(int j, const ModularTriple& t, const Rational& nD, int terms, const MainSumOptions& opt) {
  using R = MpReal<D>;
  using std::abs;
  using std::sqrt;
  auto a = near_arc_data<R>(j, t, terms);
  const R pi = pi_v<R>();
  const R c = 4 * pi / t.k * sqrt(real_from<R>(nD));
  const R t0 = 1 / R(24);
  auto gstar = [&](const R& x) {
    Cplx<R> v;
    for (int r = terms - 1; r >= 0; --r) v = v * Cplx<R>(x) + a.gs[static_cast<std::size_t>(r)];
    for (const auto& [m, res] : a.far_poles) v += res / (x - m);
    return v;
  };
  // truncation of the Taylor part at t = 1/24
  {
    using std::pow;
    R last = a.gs.back().abs() * pow(t0, terms - 1), scale = 0;
    for (int r = 0; r < terms; ++r) scale = std::max(scale, R(a.gs[static_cast<std::size_t>(r)].abs() * pow(t0, r)));
    double rel = to_double(last / scale);
    if (rel > std::pow(10.0, -arc_digits(to_double(c / sqrt(R(24))))))
      throw ConvergenceError("main sum: Taylor truncation too coarse on arc k=" + std::to_string(t.k), rel);
  }
  int N = opt.quad_nodes;
  Cplx<R> prev = arc_integral<R>(gstar, a.R0, c, N);
  for (;;) {
    N *= 2;
    Cplx<R> cur = arc_integral<R>(gstar, a.R0, c, N);
    double diff = to_double((cur - prev).abs() / std::max(R(cur.abs()), R(1e-300)));
    if (diff <= opt.tol) {
      prev = cur;
      break;
    }
    if (N >= 2048) throw ConvergenceError("main sum: quadrature did not converge on arc k=" + std::to_string(t.k), diff);
    prev = cur;
  }
  Cplx<R> ph = unit_root<R>(ratio(-1, 8) - eta_multiplier_exponent(t.matrix) / 2 - (Rational(t.h_prime, 24) + nD * t.h) / t.k);
  Cplx<R> v = prev * ph * sqrt(2 / (pi * c));
  return cplx_cast<Acc>(v);
}

inline Cplx<Acc> near_arc_dispatch(int j, const ModularTriple& t, const Rational& nD, const MainSumOptions& opt) {
  const double pi = std::numbers::pi;
  const double cU = 4 * pi / t.k * std::sqrt(nD.get_d()) / std::sqrt(24.0);
  const double D = arc_digits(cU);
  const int terms = static_cast<int>(std::ceil(D / 1.35)) + 5;
  const double digits = D + 2.6 * terms + 12;
  if (digits <= 60) return near_arc<60>(j, t, nD, terms, opt);
  if (digits <= 120) return near_arc<120>(j, t, nD, terms, opt);
  if (digits <= 200) return near_arc<200>(j, t, nD, terms, opt);
  if (digits <= 320) return near_arc<320>(j, t, nD, terms, opt);
  if (digits <= 480) return near_arc<480>(j, t, nD, terms, opt);
  if (digits <= 720) return near_arc<720>(j, t, nD, terms, opt);
  throw ValidationError("main sum: n too large for the available precision tiers");
}

// node grids for far arcs: N-point Gauss-Legendre on [0, u0] and [u0, U], for N and N/2
struct FarGrid {
  int N;
  std::vector<double> u, w;  // concatenated panels
  std::vector<double> t;     // 1/24 - u^2
};

inline const std::array<FarGrid, 2>& far_grids(int N) {
  static std::mutex mu;
  static std::map<int, std::array<FarGrid, 2>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;
  std::array<FarGrid, 2> gs;
  const double U = 1 / std::sqrt(24.0), u0 = 1 / std::sqrt(48.0);
  for (int i = 0; i < 2; ++i) {
    int n = i == 0 ? N : N / 2;
    auto& g = gs[static_cast<std::size_t>(i)];
    g.N = n;
    const auto& gl = GaussLegendre<MpReal<40>>::get(n);
    for (auto [a, b] : {std::pair{0.0, u0}, {u0, U}}) {
      for (std::size_t q = 0; q < gl.x.size(); ++q) {
        double x = to_double(gl.x[q]);
        g.u.push_back((a + b) / 2 + (b - a) / 2 * x);
        g.w.push_back((b - a) / 2 * to_double(gl.w[q]));
      }
    }
    for (double u : g.u) g.t.push_back(1.0 / 24 - u * u);
  }
  return cache.emplace(N, std::move(gs)).first->second;
}

inline std::shared_ptr<const ArcClassSums> far_class_sums(long k, int N, long X) {
  static std::mutex mu;
  static std::map<std::tuple<long, int, long>, std::shared_ptr<const ArcClassSums>> cache;
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find({k, N, X});
    if (it != cache.end()) return it->second;
  }
  const auto& g = far_grids(N);
  std::vector<double> nodes = g[0].t;
  nodes.insert(nodes.end(), g[1].t.begin(), g[1].t.end());
  auto s = std::make_shared<const ArcClassSums>(k, nodes, X);
  std::lock_guard<std::mutex> lk(mu);
  return cache.emplace(std::tuple{k, N, X}, s).first->second;
}

inline std::shared_ptr<const AggregatedTaylorTable> far_taylor_table(int j, long k) {
  static std::mutex mu;
  static std::map<std::pair<int, long>, std::shared_ptr<const AggregatedTaylorTable>> cache;
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find({j, k});
    if (it != cache.end()) return it->second;
  }
  auto s = std::make_shared<const AggregatedTaylorTable>(j, k, ArcClassSums::p - 1);
  std::lock_guard<std::mutex> lk(mu);
  return cache.emplace(std::pair{j, k}, s).first->second;
}

inline Cplx<Acc> far_arc(int j, const ModularTriple& t, const Rational& nD, const MainSumOptions& opt) {
  const int N = std::max(opt.quad_nodes, 16);
  const auto& grids = far_grids(N);
  auto cs = far_class_sums(t.k, N, opt.class_sum_X);
  constexpr int p = ArcClassSums::p;
  auto low = far_taylor_table(j, t.k)->at(t.h);
  auto P = psi_vector<double>(t.matrix, false);
  for (int r = 0; r < p; ++r) low[static_cast<std::size_t>(r)] /= factorial(r).get_d();
  const double m0 = 1.0 / 48;
  std::complex<double> R0 = P[j][0].to_std() * unit_root<double>(t.h_prime, 48 * t.k).to_std() * d_coefficient(0, ratio(1, 48)).get_d();
  for (int i = 0; i < p; ++i) low[static_cast<std::size_t>(i)] += R0 / std::pow(m0, i + 1);
  std::vector<std::complex<double>> tail(cs->nodes().size(), 0.0);
  for (int l = 0; l < 3; ++l) {
    auto ph = cs->phased_all(l, t.h_prime);
    std::complex<double> w = P[j][l].to_std();
    for (std::size_t i = 0; i < tail.size(); ++i) tail[i] += w * ph[i];
  }

  const double pi = std::numbers::pi;
  const double c = 4 * pi / t.k * std::sqrt(nD.get_d());
  const double U = 1 / std::sqrt(24.0), u0 = 1 / std::sqrt(48.0);
  auto F = [&](double u) { return R0 * (-2 * u * std::sinh(c * u) / (u + u0)); };
  const std::complex<double> Fu0 = F(u0);

  std::array<std::complex<double>, 2> I{};
  std::size_t offset = 0;
  for (int gi = 0; gi < 2; ++gi) {
    const auto& g = grids[static_cast<std::size_t>(gi)];
    std::complex<double> s = 0;
    for (std::size_t q = 0; q < g.u.size(); ++q) {
      double x = g.t[q], u = g.u[q];
      std::complex<double> G = low[2];
      G = G * x + low[1];
      G = G * x + low[0];
      G += x * x * x * tail[offset + q];
      s += g.w[q] * (G * (2 * u * std::sinh(c * u)) + (F(u) - Fu0) / (u - u0));
    }
    I[static_cast<std::size_t>(gi)] = s + Fu0 * std::log((U - u0) / u0);
    offset += g.u.size();
  }
  double diff = std::abs(I[0] - I[1]);
  double scale = std::max(std::abs(I[0]), 1.0);
  if (diff > 1e-9 * scale)
    throw ConvergenceError("main sum: far-arc quadrature did not converge at k=" + std::to_string(t.k), diff / scale);
  Cplx<double> ph = unit_root<double>(ratio(-1, 8) - eta_multiplier_exponent(t.matrix) / 2 - (Rational(t.h_prime, 24) + nD * t.h) / t.k);
  std::complex<double> v = I[0] * ph.to_std() * std::sqrt(2 / (pi * c));
  return Cplx<Acc>(Acc(v.real()), Acc(v.imag()));
}

}  // namespace detail

// exact alpha_j(0..n_max), cached and grown on demand
inline std::shared_ptr<const std::vector<BigInt>> alpha_cached(int j, long n_max) {
  require_j(j);
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const std::vector<BigInt>>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto& slot = cache[j];
  if (!slot || static_cast<long>(slot->size()) <= n_max) slot = std::make_shared<const std::vector<BigInt>>(alpha(j, n_max));
  return slot;
}

// big-integer convolution cost grows quickly past this
inline constexpr long kExactCap = 5000;

// the double sum over arcs h/k with k <= k_max
inline AsymptoticReport theorem_main_sum(int j, long n, const MainSumOptions& opt = {}, bool with_exact = false) {
  require_j(j);
  require(n >= 1, "n must be >= 1");
  require(opt.quad_nodes >= 8, "quad_nodes must be >= 8");
  const Rational nD = Rational(n) + Delta(j);
  const long k_max = opt.k_max > 0 ? opt.k_max : isqrt_floor(n);
  std::vector<ModularTriple> arcs;
  for (long k = 1; k <= k_max; ++k)
    for (long h = 0; h < k; ++h)
      if (std::gcd(h, k) == 1) arcs.push_back(ModularTriple::make(h, k));
  std::vector<Cplx<Acc>> vals(arcs.size());
  const double pi = std::numbers::pi;
  parallel_for(arcs.size(), [&](std::size_t i) {
    const auto& t = arcs[i];
    double cU = 4 * pi / t.k * std::sqrt(nD.get_d()) / std::sqrt(24.0);
    bool far = opt.force_route == 2 || (opt.force_route == 0 && detail::arc_digits(cU) <= opt.far_digits);
    vals[i] = far ? detail::far_arc(j, t, nD, opt) : detail::near_arc_dispatch(j, t, nD, opt);
  });
  Cplx<Acc> total;
  for (std::size_t i = 0; i < arcs.size(); ++i) total += vals[i] / Acc(arcs[i].k);
  using std::pow;
  Acc pref = 2 / pow(real_from<Acc>(nD), Acc(0.25));
  total = total * pref;

  AsymptoticReport rep;
  rep.j = j;
  rep.n = n;
  rep.k_max = k_max;
  rep.main_sum_mp = total.re;
  rep.main_sum = to_double(total.re);
  rep.imag_ratio = to_double(abs(total.im) / abs(total.re));
  check(rep.imag_ratio <= 1e-9, "main sum is not real: |Im|/|Re| = " + fmt17(rep.imag_ratio));
  if (with_exact) {
    require(n <= kExactCap, "exact coefficients are capped at n <= " + std::to_string(kExactCap));
    rep.exact = (*alpha_cached(j, n))[static_cast<std::size_t>(n)];
    Acc res = real_from<Acc>(*rep.exact) - total.re;
    rep.residual = to_double(res);
    rep.residual_over_n34 = rep.residual / std::pow(static_cast<double>(n), 0.75);
  }
  return rep;
}

// sqrt(radical) * sum_e c_e pi^e
struct LeadingCoefficient {
  int radical = 3;
  std::map<int, Rational> pi_powers;

  double value() const {
    double s = 0;
    for (const auto& [e, c] : pi_powers) s += c.get_d() * std::pow(std::numbers::pi, e);
    return std::sqrt(static_cast<double>(radical)) * s;
  }
  std::string str() const {
    std::string s;
    for (auto it = pi_powers.rbegin(); it != pi_powers.rend(); ++it) {
      const auto& [e, c] = *it;
      if (c == 0) continue;
      std::string term = rational_str(abs(c));
      if (e != 0) term += "*pi^" + std::to_string(e);
      s += s.empty() ? (c < 0 ? "-" : "") + term : (c < 0 ? " - " : " + ") + term;
    }
    if (s.empty()) return "0";
    return "sqrt(" + std::to_string(radical) + ")*(" + s + ")";
  }
};

inline Rational pow_si(long b, int e) {
  BigInt z;
  mpz_ui_pow_ui(z.get_mpz_t(), static_cast<unsigned long>(std::labs(b)), static_cast<unsigned long>(e));
  if (b < 0 && e % 2) z = -z;
  return Rational(z);
}

struct LeadingExpansion {
  int j = 0;
  Rational delta;
  std::vector<LeadingCoefficient> coeffs;  // a_r multiplies (n + Delta)^{-1 - r/2}
};

inline constexpr int kMaxLeadingTerms = 24;

// a_r = 4 sqrt3 / (4 pi sqrt6)^{r+2} d^r/du^r [(1 - 12u) G_j(u - 6u^2)] at u = 0
inline LeadingExpansion leading_expansion(int j, int N) {
  require_j(j);
  require(N >= 1, "need at least one term");
  require(N <= kMaxLeadingTerms, "requested expansion exceeds the available Taylor depth");
  LeadingExpansion e;
  e.j = j;
  e.delta = Delta(j);
  for (int r = 0; r < N; ++r) {
    LeadingCoefficient a;
    // r! [u^r] = r! sum_s q_s pi^{2s+2}/s! * ( C(s,r-s)(-6)^{r-s} - 12 C(s,r-s-1)(-6)^{r-s-1} )
    std::map<int, Rational> acc;
    for (int s = 0; s <= r; ++s) {
      Rational coef = 0;
      int d = r - s;
      if (d <= s) coef += Rational(binomial(s, d)) * pow_si(-6, d);
      if (d >= 1 && d - 1 <= s) coef -= 12 * Rational(binomial(s, d - 1)) * pow_si(-6, d - 1);
      if (coef == 0) continue;
      Rational q = aggregated_taylor_k1_exact(j, s);
      acc[2 * s + 2] += coef * q / Rational(factorial(s));
    }
    // prefactor 4 sqrt3 r! / (4^{r+2} pi^{r+2} 6^{(r+2)/2})
    Rational pref = Rational(4) * Rational(factorial(r)) / pow_si(4, r + 2);
    if (r % 2 == 0) {
      a.radical = 3;
      pref /= pow_si(6, (r + 2) / 2);
    } else {
      // sqrt3 / sqrt6 = sqrt2 / 2
      a.radical = 2;
      pref /= pow_si(6, (r + 1) / 2) * 2;
    }
    for (auto& [pw, c] : acc) {
      Rational v = c * pref;
      v.canonicalize();
      if (v != 0) a.pi_powers[pw - (r + 2)] = v;
    }
    e.coeffs.push_back(a);
  }
  return e;
}

struct CorollaryRow {
  long n;
  BigInt exact;
  std::vector<double> approx;   // cumulative truncations
  std::vector<double> rel_err;  // |exact - approx| / exact
};

struct CorollaryCheck {
  int j;
  std::vector<CorollaryRow> rows;
  std::vector<double> slopes;  // log-log slope of rel_err[i+1]/rel_err[i] against n
};

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

// truncations of the leading-exponential expansion with `terms` nonzero terms
inline CorollaryCheck corollary_check(int j, const std::vector<long>& ns, int terms = 3) {
  require_j(j);
  require(!ns.empty() && terms >= 1, "need n values and at least one term");
  auto ex = leading_expansion(j, terms + 2);
  // skip vanishing leading coefficients
  std::size_t first = 0;
  while (first < ex.coeffs.size() && ex.coeffs[first].pi_powers.empty()) ++first;
  long n_max = *std::max_element(ns.begin(), ns.end());
  auto al = alpha_cached(j, n_max);
  CorollaryCheck out{j, {}, {}};
  using Mp = MpReal<120>;
  for (long n : ns) {
    require(n >= 1, "n must be >= 1");
    CorollaryRow row{n, (*al)[static_cast<std::size_t>(n)], {}, {}};
    Mp x = real_from<Mp>(Rational(n) + Delta(j));
    Mp pi = pi_v<Mp>();
    Mp lead = exp(4 * pi * sqrt(x / 24));
    Mp ex_val = real_from<Mp>(row.exact);
    Mp acc = 0;
    for (int i = 0; i < terms; ++i) {
      std::size_t r = first + static_cast<std::size_t>(i);
      Mp a = 0;
      for (const auto& [e, c] : ex.coeffs[r].pi_powers) a += real_from<Mp>(c) * pow(pi, e);
      a *= sqrt(Mp(ex.coeffs[r].radical));
      acc += a * pow(x, -Mp(1) - Mp(static_cast<long>(r)) / 2);
      Mp approx = lead * acc;
      row.approx.push_back(to_double(approx));
      row.rel_err.push_back(to_double(abs(ex_val - approx) / abs(ex_val)));
    }
    out.rows.push_back(std::move(row));
  }
  if (ns.size() >= 2)
    for (int i = 0; i + 1 < terms; ++i) {
      std::vector<double> xs, ys;
      for (const auto& r : out.rows) {
        xs.push_back(static_cast<double>(r.n) + Delta(j).get_d());
        ys.push_back(r.rel_err[static_cast<std::size_t>(i + 1)] / r.rel_err[static_cast<std::size_t>(i)]);
      }
      out.slopes.push_back(loglog_slope(xs, ys));
    }
  return out;
}

// u_j(h/k + iV/k^2) from the series against (k/2pi^2) sum_r (V/2pi)^r sum_l Psi(j,l) Phi^{(r)}(0)
struct RadialCheck {
  std::complex<double> series;
  std::complex<double> expansion;
};

inline RadialCheck radial_limit_check(int j, const ModularTriple& t, double V, int terms) {
  require(V > 0, "V must be positive");
  const double pi = std::numbers::pi;
  const double y = V / static_cast<double>(t.k * t.k);
  long n_cut = 1;
  while (std::sqrt(static_cast<double>(n_cut)) * std::exp(-2 * pi * n_cut * y) > 1e-18) ++n_cut;
  auto u = u_series(j, n_cut + 1, URoute::lattice);
  using Mp = MpReal<50>;
  Cplx<Mp> s;
  for (long m = 0; m <= n_cut; ++m) {
    if (u[m] == 0) continue;
    Rational n = beta(j) + m;
    Cplx<Mp> ph = unit_root<Mp>(n * t.h / t.k);
    s += ph * (real_from<Mp>(u[m]) * exp(-2 * pi_v<Mp>() * real_from<Mp>(n) * Mp(y)));
  }
  auto agg = aggregated_taylor<Mp>(j, t, terms - 1);
  Cplx<Mp> e;
  Mp pw = 1;
  for (int r = 0; r < terms; ++r) {
    e += agg[static_cast<std::size_t>(r)] * pw;
    pw *= Mp(V) / (2 * pi_v<Mp>());
  }
  e = e * (Mp(t.k) / (2 * pi_v<Mp>() * pi_v<Mp>()));
  return {s.to_std(), e.to_std()};
}

}  // namespace falsetheta
