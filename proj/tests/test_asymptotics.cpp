#include <gtest/gtest.h>

#include "falsetheta/asymptotics.hpp"

using namespace falsetheta;

namespace {

double series_I_half(double x) {
  // (x/2)^{1/2} sum (x^2/4)^m / (m! Gamma(m + 3/2)), 30 terms
  double s = 0, y = x * x / 4, term = 1 / std::tgamma(1.5);
  for (int m = 0; m < 30; ++m) {
    s += term;
    term *= y / ((m + 1) * (m + 1.5));
  }
  return std::sqrt(x / 2) * s;
}

}  // namespace

TEST(Bessel, HalfOrderClosedFormAndSeries) {
  const double pi = std::numbers::pi;
  EXPECT_NEAR(bessel_I_half(1.0), std::sqrt(2 / pi) * std::sinh(1.0), 1e-15);
  EXPECT_NEAR(bessel_I_half(1.0), series_I_half(1.0), 1e-14);
  // sqrt(pi x/2) I_{1/2}(x) = sinh x ~ x
  for (double x : {1e-3, 1e-5, 1e-8}) EXPECT_NEAR(std::sqrt(pi * x / 2) * bessel_I_half(x) / x, 1.0, 1e-6);
  // the two regimes meet smoothly
  EXPECT_NEAR(bessel_I_half(0.5 - 1e-12), bessel_I_half(0.5 + 1e-12), 1e-11);
}

TEST(Bessel, MonotoneOnGrid) {
  double prev = 0, prev32 = 0;
  for (int i = 1; i <= 5000; ++i) {
    double x = i * 0.01;
    double v = bessel_I_half(x), w = bessel_I_threehalves(x);
    EXPECT_GT(v, prev);
    EXPECT_GT(w, prev32);
    prev = v;
    prev32 = w;
  }
}

TEST(Bessel, ThreeHalvesRegimesAgree) {
  const double pi = std::numbers::pi;
  for (double x : {1.0, 1.5, 3.0}) {
    double closed = std::sqrt(2 / (pi * x)) * (std::cosh(x) - std::sinh(x) / x);
    EXPECT_NEAR(bessel_I_threehalves(x), closed, 1e-13 * closed);
  }
  EXPECT_NEAR(bessel_I_threehalves(1 - 1e-12), bessel_I_threehalves(1 + 1e-12), 1e-11);
  EXPECT_THROW(bessel_I_threehalves(0), ValidationError);
  EXPECT_THROW(bessel_I_half(-1), ValidationError);
}

TEST(Rademacher, TrivialKloosterman) {
  for (long n = 1; n < 30; ++n) EXPECT_NEAR(kloosterman_A(1, n).re, 1.0, 1e-15);
}

TEST(Rademacher, RoundsToPartitionNumbers) {
  auto p = partition_numbers(200);
  EXPECT_EQ(std::llround(rademacher_p(5, 5)), 7);
  std::vector<double> dist;
  for (long n = 1; n <= 200; ++n) {
    long k = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(n)))) + 5;
    double v = rademacher_p(n, k);
    EXPECT_EQ(BigInt(static_cast<long>(std::llround(v))), p[static_cast<std::size_t>(n)]) << n;
    dist.push_back(std::abs(v - p[static_cast<std::size_t>(n)].get_d()));
  }
  // the truncated tail, not rounding, dominates the distance
  std::sort(dist.begin(), dist.end());
  EXPECT_LT(dist[dist.size() / 2], 5e-3);
  EXPECT_LT(dist.back(), 0.5);
}

TEST(Quadrature, GaussLegendreIsExactOnPolynomials) {
  for (int N : {5, 16, 64}) {
    auto f = [&](double x) { return std::pow(x, 2 * N - 1) + std::pow(x, 2 * N - 2); };
    double v = gauss_legendre<double, double>(f, 0.0, 1.0, N);
    EXPECT_NEAR(v, 1.0 / (2 * N) + 1.0 / (2 * N - 1), 1e-13);
  }
  using R = MpReal<50>;
  auto v = gauss_legendre<R, R>([](const R& x) { return exp(x); }, R(0), R(1), 40);
  EXPECT_LT(to_double(abs(v - (exp(R(1)) - 1))), 1e-45);
}

TEST(Quadrature, PrincipalValueOfPureSymmetricPole) {
  const double a = 0, b = 1.0 / 24, p = 1.0 / 48;
  double v = pv_integral<double, double>([](double) { return 1.0; }, a, b, p, 64);
  EXPECT_LT(std::abs(v), 1e-12);
  using R = MpReal<60>;
  R w = pv_integral<R, R>([](const R&) { return R(1); }, R(0), 1 / R(24), 1 / R(48), 64);
  EXPECT_LT(to_double(abs(w)), 1e-12);
}

TEST(Quadrature, PrincipalValueKnownIntegral) {
  // PV int_0^1 e^t/(t - 1/3) dt = e^{1/3} (Ei(2/3) - Ei(-1/3))
  double v = pv_integral<double, double>([](double t) { return std::exp(t); }, 0.0, 1.0, 1.0 / 3, 64);
  double expect = std::exp(1.0 / 3) * (std::expint(2.0 / 3) - std::expint(-1.0 / 3));
  EXPECT_NEAR(v, expect, 1e-13);
  EXPECT_THROW((pv_integral<double, double>([](double) { return 1.0; }, 0.0, 1.0, 1.0, 8)), ValidationError);
}

TEST(MainSum, WithinThreePercentAtHundred) {
  auto r = theorem_main_sum(1, 100, {}, true);
  ASSERT_TRUE(r.exact.has_value());
  double ex = r.exact->get_d();
  EXPECT_LT(std::abs(ex - r.main_sum) / ex, 0.03);
  EXPECT_LE(r.imag_ratio, 1e-9);
  EXPECT_NEAR(r.residual, ex - r.main_sum, 1e-6 * ex);
  EXPECT_DOUBLE_EQ(r.residual_over_n34, r.residual / std::pow(100.0, 0.75));
}

TEST(MainSum, SmallNResidualsAreSmall) {
  for (int j = 0; j < 3; ++j)
    for (long n : {1L, 10L, 50L}) {
      auto r = theorem_main_sum(j, n, {}, true);
      EXPECT_LT(std::abs(r.residual), 2 * std::pow(static_cast<double>(n), 0.75)) << j << " " << n;
    }
}

TEST(MainSum, NearAndFarRoutesAgree) {
  for (int j = 0; j < 3; ++j) {
    MainSumOptions a, b;
    a.force_route = 1;
    b.force_route = 2;
    auto x = theorem_main_sum(j, 150, a), y = theorem_main_sum(j, 150, b);
    EXPECT_LT(std::abs(x.main_sum - y.main_sum), 1e-12 * std::abs(x.main_sum)) << j;
  }
}

TEST(MainSum, TrivialArcCarriesTheLeadingTerm) {
  for (int j = 0; j < 3; ++j) {
    const long n = 300;
    MainSumOptions one;
    one.k_max = 1;
    auto full = theorem_main_sum(j, n);
    auto k1 = theorem_main_sum(j, n, one);
    double x = static_cast<double>(n) + Delta(j).get_d();
    double sub = std::exp(std::numbers::pi * std::sqrt(x / 2));
    EXPECT_LT(std::abs(full.main_sum - k1.main_sum), sub) << j;
    EXPECT_GT(std::abs(full.main_sum - k1.main_sum), 0.0);
  }
}

TEST(MainSum, Validation) {
  EXPECT_THROW(theorem_main_sum(3, 10), ValidationError);
  EXPECT_THROW(theorem_main_sum(0, 0), ValidationError);
  MainSumOptions o;
  o.quad_nodes = 2;
  EXPECT_THROW(theorem_main_sum(0, 10, o), ValidationError);
}

TEST(LeadingExpansion, MatchesClosedForms) {
  const double pi = std::numbers::pi, s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
  auto e0 = leading_expansion(0, 3), e1 = leading_expansion(1, 3), e2 = leading_expansion(2, 3);
  EXPECT_TRUE(e0.coeffs[0].pi_powers.empty());
  EXPECT_EQ(e0.coeffs[0].value(), 0.0);
  EXPECT_NEAR(e0.coeffs[1].value(), pi / (6 * s2), 1e-12);
  EXPECT_NEAR(e0.coeffs[2].value(), (71 * pi * pi - 432) / (576 * s3), 1e-12);
  EXPECT_NEAR(e1.coeffs[0].value(), 1 / (2 * s3), 1e-12);
  EXPECT_NEAR(e1.coeffs[1].value(), (23 * pi * pi - 144) / (288 * s2 * pi), 1e-12);
  EXPECT_NEAR(e1.coeffs[2].value(), (9745 * pi * pi - 19872) / (55296 * s3), 1e-12);
  EXPECT_NEAR(e2.coeffs[0].value(), 1 / (2 * s3), 1e-12);
  EXPECT_NEAR(e2.coeffs[1].value(), (25 * pi * pi - 72) / (144 * s2 * pi), 1e-12);
  EXPECT_NEAR(e2.coeffs[2].value(), (2929 * pi * pi - 10800) / (13824 * s3), 1e-12);
  EXPECT_EQ(e1.coeffs[0].str(), "sqrt(3)*(1/6)");
  EXPECT_GT(e1.coeffs[0].value(), 0);
  EXPECT_GT(e2.coeffs[0].value(), 0);
  EXPECT_EQ(e1.delta, ratio(23, 48));
}

TEST(LeadingExpansion, FourthCoefficientFromChainRule) {
  // a_3 from the raw Taylor data: 4 sqrt3 /(4 pi sqrt6)^5 * d^3/du^3 [(1-12u) G(u - 6u^2)] at 0
  const double pi = std::numbers::pi;
  for (int j = 0; j < 3; ++j) {
    double g[4];
    for (int r = 0; r < 4; ++r) g[r] = aggregated_taylor_k1_exact(j, r).get_d() * std::pow(pi, 2 * r + 2);
    // H(u) = G(u - 6u^2): H'' = g2 - 12 g1, H''' = g3 - 36 g2
    double H2 = g[2] - 12 * g[1], H3 = g[3] - 36 * g[2];
    double d3 = H3 - 36 * H2;
    double a3 = 4 * std::sqrt(3.0) / std::pow(4 * pi * std::sqrt(6.0), 5) * d3;
    EXPECT_NEAR(leading_expansion(j, 4).coeffs[3].value(), a3, 1e-12 * std::abs(a3)) << j;
  }
}

TEST(LeadingExpansion, DepthIsLimited) {
  EXPECT_THROW(leading_expansion(1, kMaxLeadingTerms + 1), ValidationError);
  EXPECT_THROW(leading_expansion(1, 0), ValidationError);
}

TEST(LeadingTerms, OneTermAtFourThousand) {
  for (int j : {1, 2}) {
    auto c = corollary_check(j, {4000}, 1);
    EXPECT_LT(c.rows[0].rel_err[0], 0.02) << j;
  }
}

TEST(LeadingTerms, EachTermGainsHalfAPower) {
  for (int j = 0; j < 3; ++j) {
    auto c = corollary_check(j, {1000, 2000, 4000}, 3);
    ASSERT_EQ(c.slopes.size(), 2u);
    for (double s : c.slopes) EXPECT_NEAR(s, -0.5, 0.15) << j;
    for (const auto& row : c.rows) EXPECT_LT(row.rel_err[2], row.rel_err[0]);
  }
}

TEST(RadialLimit, SeriesApproachesTaylorExpansion) {
  for (long k : {1L, 2L, 3L}) {
    auto t = ModularTriple::make(k == 1 ? 0 : 1, k);
    for (int j = 0; j < 3; ++j) {
      auto coarse = radial_limit_check(j, t, 0.005, 10);
      auto fine = radial_limit_check(j, t, 0.0025, 10);
      double e1 = std::abs(coarse.series - coarse.expansion) / std::abs(coarse.series);
      double e2 = std::abs(fine.series - fine.expansion) / std::abs(fine.series);
      EXPECT_LT(e2, 1e-8) << k << " " << j;
      EXPECT_LT(e2, e1);
    }
  }
}

TEST(ExactCache, GrowsOnDemand) {
  auto a = alpha_cached(1, 20);
  auto b = alpha_cached(1, 40);
  ASSERT_GE(b->size(), 41u);
  for (std::size_t i = 0; i <= 20; ++i) EXPECT_EQ((*a)[i], (*b)[i]);
}

TEST(Rademacher, LongerSumsConverge) {
  auto p = partition_numbers(100);
  for (long n : {10L, 50L, 100L}) EXPECT_LT(std::abs(rademacher_p(n, 200) - p[static_cast<std::size_t>(n)].get_d()), 1e-4) << n;
}
