#pragma once

#include <chrono>
#include <random>
#include <sstream>

#include "falsetheta/asymptotics.hpp"

namespace falsetheta {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool ok = true;             // correctness, part of the report
  double seconds = 0;         // wall time, kept out of the report
  double time_limit = 0;      // 0 means none
  std::vector<std::string> lines;

  bool within_time() const { return time_limit <= 0 || seconds <= time_limit; }
  bool pass() const { return ok && within_time(); }

  void expect(bool cond, const std::string& what) {
    lines.push_back(std::string(cond ? "  ok   " : "  FAIL ") + what);
    ok = ok && cond;
  }
  // deterministic text: no timings
  std::string report() const {
    std::string s = "criterion " + std::to_string(id) + " " + name + ": " + (ok ? "ok" : "FAIL") + "\n";
    for (const auto& l : lines) s += l + "\n";
    return s;
  }
};

namespace verify_detail {

template <class V>
std::string join(const V& v) {
  std::string s;
  for (const auto& x : v) {
    if (!s.empty()) s += ",";
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, BigInt>)
      s += x.get_str();
    else
      s += std::to_string(x);
  }
  return s;
}

inline std::vector<BigInt> big(std::initializer_list<long> v) {
  std::vector<BigInt> out;
  for (long x : v) out.emplace_back(x);
  return out;
}

inline ModularMatrix random_sl2(std::mt19937& rng) {
  std::uniform_int_distribution<long> dist(-9, 9);
  for (;;) {
    long a = dist(rng), c = dist(rng);
    if (c == 0 || std::gcd(a, c) != 1) continue;
    for (long d = -60; d <= 60; ++d) {
      long num = a * d - 1;
      if (num % c == 0) return ModularMatrix(a, num / c, c, d);
    }
  }
}

template <class F>
CriterionResult timed(int id, std::string name, double limit, F&& body) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  r.time_limit = limit;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.expect(false, std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace verify_detail

inline CriterionResult verify_ground_truth() {
  using namespace verify_detail;
  return timed(1, "generating functions", 1.0, [](CriterionResult& r) {
    auto pe = podeu(9);
    r.expect(pe == big({1, 1, 1, 2, 3, 3, 4, 5, 8, 8}), "podeu(0..9) = " + join(pe));
    auto a0 = alpha(0, 11);
    r.expect(a0 == big({-1, 0, 1, 1, 4, 4, 9, 11, 19, 23, 37, 44}), "u0/eta coefficients = " + join(a0));
    auto a1 = alpha(1, 10);
    r.expect(a1 == big({1, 3, 5, 9, 14, 22, 31, 48, 65, 92, 126}), "u1/eta coefficients = " + join(a1));
  });
}

inline CriterionResult verify_identities() {
  using namespace verify_detail;
  return timed(2, "identities", 10.0, [](CriterionResult& r) {
    r.expect(sigma_hypergeometric(200) == sigma_theta(200), "sigma: hypergeometric and theta forms agree to order 200");
    const long N = 500;
    auto a0 = alpha(0, N), a1 = alpha(1, N);
    auto p = partition_numbers(N);
    auto ro = r_odd_distinct(2 * N + 1);
    auto pe = podeu(2 * N + 1);
    long bad = 0;
    for (long n = 0; n <= N; ++n) {
      auto i = static_cast<std::size_t>(n);
      if (2 * pe[2 * i] != 2 * p[i] + ro[2 * i] + a0[i]) ++bad;
      if (2 * pe[2 * i + 1] != ro[2 * i + 1] + a1[i]) ++bad;
    }
    r.expect(bad == 0, "decomposition of 2 podeu(2n), 2 podeu(2n+1) for n <= 500: " + std::to_string(bad) + " mismatches");
  });
}

inline CriterionResult verify_duality() {
  using namespace verify_detail;
  return timed(3, "lattice and series", 30.0, [](CriterionResult& r) {
    for (int j = 0; j < 3; ++j) {
      // j = 0, 1 against the product side; j = 2 has only the lattice description
      auto u = j < 2 ? u_series(j, 201, URoute::generating) : u_series(j, 201, URoute::lattice);
      long bad = 0;
      for (long m = 0; m <= 200; ++m)
        if (d_coefficient(j, beta(j) + m) != Rational(u[m])) ++bad;
      r.expect(bad == 0, "j=" + std::to_string(j) + ": d_j(n) equals the q-series coefficient for n <= 200 (" +
                             std::to_string(bad) + " mismatches)");
    }
  });
}

inline CriterionResult verify_multipliers() {
  using namespace verify_detail;
  return timed(4, "multipliers", 0, [](CriterionResult& r) {
    auto T = psi_vector<double>(ModularMatrix::T());
    MultiplierMatrix<double> eT{};
    eT[0][0] = unit_root<double>(1, 48);
    eT[1][1] = unit_root<double>(25, 48);
    eT[2][2] = unit_root<double>(23, 24);
    r.expect(max_abs_diff(T, eT) <= 1e-12, "Psi_T = diag(e(1/48), e(25/48), e(23/24))");
    auto S = psi_vector<double>(ModularMatrix::S());
    const double h = 0.5, s = std::sqrt(2.0) / 2;
    const double v[3][3] = {{h, h, s}, {h, h, -s}, {s, -s, 0}};
    MultiplierMatrix<double> eS{}, I{};
    for (int i = 0; i < 3; ++i) {
      I[i][i] = Cplx<double>(1, 0);
      for (int j = 0; j < 3; ++j) eS[i][j] = Cplx<double>(v[i][j], 0);
    }
    r.expect(max_abs_diff(S, eS) <= 1e-12, "Psi_S = [[1/2,1/2,r],[1/2,1/2,-r],[r,-r,0]], r = sqrt(2)/2");
    r.expect(max_abs_diff(matmul(S, S), I) <= 1e-12, "Psi_S^2 = I");
    auto t01 = ModularTriple::make(0, 1);
    Rational phase = ratio(-1, 8) - eta_multiplier_exponent(t01.matrix) / 2;
    r.expect(frac(phase) == 0 && t01.matrix == ModularMatrix::S(), "psi_{0,1} = Psi_S exactly (phase e(" + rational_str(phase) + "))");
    std::mt19937 rng(11);
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
      auto A = random_sl2(rng), B = random_sl2(rng);
      worst = std::max(worst, max_abs_diff(psi_vector<double>(A * B), matmul(psi_vector<double>(A), psi_vector<double>(B))));
    }
    r.expect(worst <= 1e-10, "cocycle on 20 random pairs");
  });
}

inline CriterionResult verify_table() {
  using namespace verify_detail;
  return timed(5, "kernel Taylor table", 120.0, [](CriterionResult& r) {
    using R = MpReal<60>;
    auto t = ModularTriple::make(0, 1);
    int exact_ok = 0, numeric_ok = 0;
    for (int j = 0; j < 3; ++j) {
      auto v = aggregated_taylor<R>(j, t, 4);
      for (int rr = 0; rr <= 4; ++rr) {
        Rational pub = tabulated_aggregated(j, rr);
        if (aggregated_taylor_k1_exact(j, rr) == pub) ++exact_ok;
        R expect = real_from<R>(pub) * pow(pi_v<R>(), 2 * rr + 2);
        R got = v[static_cast<std::size_t>(rr)].re;
        bool good = pub == 0 ? to_double(abs(got)) <= 1e-12 : to_double(abs(got - expect) / abs(expect)) <= 1e-10;
        if (good) ++numeric_ok;
      }
    }
    r.expect(exact_ok == 15, std::to_string(exact_ok) + "/15 Table 1 entries OK (exact rationals)");
    r.expect(numeric_ok == 15, std::to_string(numeric_ok) + "/15 Table 1 entries OK (Euler-Maclaurin route, 1e-10)");
    double z = to_double(abs(aggregated_taylor<R>(0, t, 0)[0].re));
    r.expect(z <= 1e-12, "(j,r) = (0,0) vanishes after cancellation");
    auto P = psi_vector<double>(t.matrix);
    const double pi = std::numbers::pi;
    double worst = 0;
    for (int rr = 0; rr <= 2; ++rr) {
      std::array<double, 3> sym{};
      for (int l = 0; l < 3; ++l) sym[static_cast<std::size_t>(l)] = -symmetric_sum(l, rr, t).value.real() * factorial(rr).get_d();
      for (int j = 0; j < 3; ++j) {
        double agg = 0;
        for (int l = 0; l < 3; ++l) agg += P[j][l].re * sym[static_cast<std::size_t>(l)];
        double pub = tabulated_aggregated(j, rr).get_d() * std::pow(pi, 2 * rr + 2);
        double scale = pub == 0 ? std::pow(pi, 2 * rr + 2) : std::abs(pub);
        worst = std::max(worst, std::abs(agg - pub) / scale);
      }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1e", worst);
    r.expect(worst <= 1e-6, std::string("symmetric-sum route agrees for r <= 2 (worst ") + buf + ")");
  });
}

inline CriterionResult verify_rademacher() {
  using namespace verify_detail;
  return timed(6, "Rademacher", 0, [](CriterionResult& r) {
    auto p = partition_numbers(200);
    long bad = 0;
    double worst = 0;
    for (long n = 1; n <= 200; ++n) {
      long k = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(n)))) + 5;
      double v = rademacher_p(n, k);
      double d = std::abs(v - p[static_cast<std::size_t>(n)].get_d());
      worst = std::max(worst, d);
      if (!(d < 0.5)) ++bad;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", worst);
    r.expect(bad == 0, std::string("rademacher_p(n, ceil(sqrt n)+5) rounds to p(n) for n <= 200 (max distance ") + buf + ")");
  });
}

inline CriterionResult verify_corollary() {
  using namespace verify_detail;
  return timed(7, "leading expansion", 0, [](CriterionResult& r) {
    for (int j : {1, 2}) {
      auto c = corollary_check(j, {1000, 2000, 4000}, 2);
      const auto& last = c.rows.back();
      r.expect(last.rel_err[0] < 0.02, "j=" + std::to_string(j) + " n=4000 one-term relative error " + fmt17(last.rel_err[0]));
      r.expect(std::abs(c.slopes[0] + 0.5) <= 0.15, "j=" + std::to_string(j) + " second-term gain slope " + fmt17(c.slopes[0]));
    }
  });
}

inline CriterionResult verify_theorem(const std::vector<long>& ns = {500, 1000, 2000, 4000}) {
  using namespace verify_detail;
  return timed(8, "circle-method main sum", 900.0, [&](CriterionResult& r) {
    for (int j = 0; j < 3; ++j) {
      std::vector<double> ratios;
      for (long n : ns) {
        auto rep = theorem_main_sum(j, n, {}, true);
        ratios.push_back(std::abs(rep.residual_over_n34));
        r.lines.push_back("  j=" + std::to_string(j) + " n=" + std::to_string(n) + " residual=" + fmt17(rep.residual) +
                          " n34_ratio=" + fmt17(rep.residual_over_n34));
        r.expect(rep.imag_ratio <= 1e-9, "j=" + std::to_string(j) + " n=" + std::to_string(n) + " real to 1e-9");
      }
      double C = *std::max_element(ratios.begin(), ratios.end());
      std::vector<double> xs(ns.begin(), ns.end());
      double slope = loglog_slope(xs, ratios);
      r.expect(C < 1.0, "j=" + std::to_string(j) + " |residual|/n^(3/4) bounded by " + fmt17(C));
      r.expect(slope <= 0, "j=" + std::to_string(j) + " log-log trend of the ratio " + fmt17(slope) + " <= 0");
    }
  });
}

inline CriterionResult verify_density() {
  using namespace verify_detail;
  return timed(9, "lattice density", 0, [](CriterionResult& r) {
    const double A = density_constant();
    r.expect(std::abs(A - 0.46794065) < 1e-8, "A = log(sqrt2 + sqrt3)/sqrt6 = " + fmt17(A));
    const long X = 10000;
    for (int j = 0; j < 3; ++j) {
      double worst = 0;
      for (const auto& mu : shift_family(j).plus)
        for (int sg : {1, -1}) worst = std::max(worst, std::abs(shift_partial_sum(mu, X, sg).get_d() / X / A - 1));
      r.expect(worst <= 0.05, "j=" + std::to_string(j) + " per-shift partial sums / X within " + fmt17(worst) + " of A");
    }
  });
}

inline std::vector<CriterionResult> run_criteria(const std::vector<int>& ids) {
  std::vector<CriterionResult> out;
  for (int id : ids) {
    switch (id) {
      case 1: out.push_back(verify_ground_truth()); break;
      case 2: out.push_back(verify_identities()); break;
      case 3: out.push_back(verify_duality()); break;
      case 4: out.push_back(verify_multipliers()); break;
      case 5: out.push_back(verify_table()); break;
      case 6: out.push_back(verify_rademacher()); break;
      case 7: out.push_back(verify_corollary()); break;
      case 8: out.push_back(verify_theorem()); break;
      case 9: out.push_back(verify_density()); break;
      default: throw ValidationError("unknown criterion " + std::to_string(id));
    }
  }
  return out;
}

inline std::string joined_report(const std::vector<CriterionResult>& rs) {
  std::string s;
  for (const auto& r : rs) s += r.report();
  return s;
}

// criteria 1..9 at two thread counts, reports compared byte for byte
inline CriterionResult verify_determinism(int threads_a = 1, int threads_b = 4, std::vector<CriterionResult>* first = nullptr) {
  using namespace verify_detail;
  return timed(10, "determinism", 0, [&](CriterionResult& r) {
    const std::vector<int> ids = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    int saved = thread_override().load();
    thread_override().store(threads_a);
    auto a = run_criteria(ids);
    thread_override().store(threads_b);
    auto b = run_criteria(ids);
    thread_override().store(saved);
    std::string ra = joined_report(a), rb = joined_report(b);
    r.expect(ra == rb, "reports with " + std::to_string(threads_a) + " and " + std::to_string(threads_b) +
                           " threads are byte-identical (" + std::to_string(ra.size()) + " bytes)");
    if (first) *first = std::move(a);
  });
}

}  // namespace falsetheta
