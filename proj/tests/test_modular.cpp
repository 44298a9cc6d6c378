#include <gtest/gtest.h>

#include <random>

#include "falsetheta/modular.hpp"

using namespace falsetheta;

namespace {

ModularMatrix random_sl2(std::mt19937& rng) {
  std::uniform_int_distribution<long> dist(-9, 9);
  for (;;) {
    long a = dist(rng), c = dist(rng);
    if (c == 0 || std::gcd(a, c) != 1) continue;
    // solve a d - b c = 1
    for (long d = -60; d <= 60; ++d) {
      long num = a * d - 1;
      if (num % c == 0) return ModularMatrix(a, num / c, c, d);
    }
  }
}

MultiplierMatrix<double> expected_S() {
  const double s = std::sqrt(2.0) / 2, h = 0.5;
  MultiplierMatrix<double> P{};
  double v[3][3] = {{h, h, s}, {h, h, -s}, {s, -s, 0}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) P[i][j] = Cplx<double>(v[i][j], 0);
  return P;
}

}  // namespace

TEST(GaussMultiplier, TranslationPhase) {
  ShiftVector mu(7, 0);
  auto z = gauss_multiplier<double>(ModularMatrix::T(), mu, mu);
  auto expect = unit_root<double>(1, 48);
  EXPECT_NEAR(z.re, expect.re, 1e-15);
  EXPECT_NEAR(z.im, expect.im, 1e-15);
}

TEST(GaussMultiplier, InversionFormula) {
  for (const auto& mu : all_shift_classes())
    for (const auto& nu : {ShiftVector(7, 0), ShiftVector(10, 3), ShiftVector(5, 2)}) {
      auto z = gauss_multiplier<double>(ModularMatrix::S(), mu, nu);
      Rational ph = -(24 * mu.mu1() * nu.mu1() - 4 * mu.mu2() * nu.mu2());
      auto w = unit_root<double>(ph) / (4 * std::sqrt(6.0));
      EXPECT_LT((z - w).abs(), 1e-15);
    }
}

TEST(GaussMultiplier, Unitarity) {
  std::mt19937 rng(7);
  std::vector<ModularMatrix> mats = {ModularMatrix::S(), ModularMatrix::T()};
  for (int i = 0; i < 10; ++i) mats.push_back(random_sl2(rng));
  auto cls = all_shift_classes();
  for (const auto& M : mats)
    for (const auto& mu : {cls[3], cls[50], cls[95]}) {
      double s = 0;
      for (const auto& nu : cls) s += gauss_multiplier<double>(M, mu, nu).norm();
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(PsiVector, TranslationAndInversion) {
  auto T = psi_vector<double>(ModularMatrix::T());
  MultiplierMatrix<double> expect{};
  expect[0][0] = unit_root<double>(1, 48);
  expect[1][1] = unit_root<double>(25, 48);
  expect[2][2] = unit_root<double>(23, 24);
  EXPECT_LT(max_abs_diff(T, expect), 1e-12);
  auto S = psi_vector<double>(ModularMatrix::S());
  EXPECT_LT(max_abs_diff(S, expected_S()), 1e-12);
  MultiplierMatrix<double> I{};
  for (int i = 0; i < 3; ++i) I[i][i] = Cplx<double>(1, 0);
  EXPECT_LT(max_abs_diff(matmul(S, S), I), 1e-12);
}

TEST(PsiVector, TranslationPhaseOrders) {
  auto T = psi_vector<double>(ModularMatrix::T());
  const int orders[3] = {48, 48, 24};
  for (int j = 0; j < 3; ++j) {
    std::complex<double> z = T[j][j].to_std(), p = 1;
    for (int i = 0; i < orders[j]; ++i) p *= z;
    EXPECT_LT(std::abs(p - 1.0), 1e-12);
  }
}

TEST(PsiVector, Cocycle) {
  std::mt19937 rng(11);
  for (int i = 0; i < 20; ++i) {
    auto A = random_sl2(rng), B = random_sl2(rng);
    auto lhs = psi_vector<double>(A * B);
    auto rhs = matmul(psi_vector<double>(A), psi_vector<double>(B));
    EXPECT_LT(max_abs_diff(lhs, rhs), 1e-10);
  }
}

TEST(PsiVector, HighPrecisionAgrees) {
  auto M = ModularMatrix(3, -2, 5, -3);
  auto a = psi_vector<double>(M);
  auto b = psi_vector<MpReal<50>>(M);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_LT(std::abs(a[i][j].to_std() - b[i][j].to_std()), 1e-14);
}

TEST(Dedekind, Values) {
  EXPECT_EQ(dedekind_sum(0, 1), 0);
  EXPECT_EQ(dedekind_sum(1, 3), ratio(1, 18));
}

TEST(Dedekind, Reciprocity) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<long> dist(1, 200);
  for (int i = 0; i < 50; ++i) {
    long h = dist(rng), k = dist(rng);
    if (std::gcd(h, k) != 1) continue;
    Rational lhs = dedekind_sum(h, k) + dedekind_sum(k, h);
    Rational rhs = ratio(-1, 4) + (ratio(h, k) + ratio(k, h) + ratio(1, h * k)) / 12;
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(EtaMultiplier, UnitModulusAndRejectsC) {
  std::mt19937 rng(5);
  for (int i = 0; i < 20; ++i) {
    auto M = random_sl2(rng);
    if (M.c < 0) M = ModularMatrix(-M.a, -M.b, -M.c, -M.d);
    EXPECT_NEAR(eta_multiplier<double>(M).abs(), 1.0, 1e-15);
  }
  EXPECT_THROW(eta_multiplier<double>(ModularMatrix::T()), ValidationError);
}

TEST(EtaMultiplier, InversionAgainstProduct) {
  std::complex<double> tau(0, 1.3);
  auto lhs = eta_numeric(-1.0 / tau);
  auto rhs = eta_multiplier<double>(ModularMatrix::S()).to_std() * std::sqrt(tau) * eta_numeric(tau);
  EXPECT_LT(std::abs(lhs - rhs), 1e-12);
}

TEST(EtaMultiplier, CircleMethodTransformation) {
  // eta(h/k + iZ/k^2) = nu_eta(M_{h,k}) sqrt(ik/Z) eta(h'/k + i/Z)
  auto t = ModularTriple::make(1, 2);
  const double Z = 0.7;
  std::complex<double> I(0, 1);
  auto lhs = eta_numeric(0.5 + I * Z / 4.0);
  auto rhs = eta_multiplier<double>(t.matrix).to_std() * std::sqrt(I * 2.0 / Z) * eta_numeric(0.5 + I / Z);
  EXPECT_LT(std::abs(lhs - rhs), 1e-10);
  for (auto [h, k] : {std::pair{2L, 5L}, {3L, 7L}, {5L, 12L}}) {
    auto tr = ModularTriple::make(h, k);
    double z = 0.9;
    auto l = eta_numeric(static_cast<double>(h) / k + I * z / static_cast<double>(k * k));
    auto r = eta_multiplier<double>(tr.matrix).to_std() * std::sqrt(I * static_cast<double>(k) / z) *
             eta_numeric(static_cast<double>(tr.h_prime) / k + I / z);
    EXPECT_LT(std::abs(l - r), 1e-10) << h << "/" << k;
  }
}

TEST(Triple, Construction) {
  auto t = ModularTriple::make(1, 2);
  EXPECT_EQ(t.h_prime, 1);
  EXPECT_EQ(t.matrix, ModularMatrix(1, -1, 2, -1));
  auto s = ModularTriple::make(0, 1);
  EXPECT_EQ(s.matrix, ModularMatrix::S());
  EXPECT_THROW(ModularTriple::make(2, 4), ValidationError);
  EXPECT_THROW(ModularTriple::make(5, 4), ValidationError);
}

TEST(CircleMultiplier, TrivialArcIsInversion) {
  auto psi = circle_multiplier<double>(ModularTriple::make(0, 1));
  EXPECT_LT(max_abs_diff(psi, psi_vector<double>(ModularMatrix::S())), 1e-15);
  EXPECT_LT(max_abs_diff(psi, expected_S()), 1e-12);
}

TEST(CircleMultiplier, BoundedEntriesAndDeterminant) {
  for (long k = 1; k <= 12; ++k)
    for (long h = 0; h < k; ++h) {
      if (std::gcd(h, k) != 1) continue;
      auto t = ModularTriple::make(h, k);
      auto psi = circle_multiplier<double>(t);
      auto P = psi_vector<double>(t.matrix);
      for (int i = 0; i < 3; ++i) {
        double row = 0;
        for (int j = 0; j < 3; ++j) {
          EXPECT_LE(psi[i][j].abs(), 1 + 1e-12);
          row += psi[i][j].norm();
        }
        EXPECT_NEAR(row, 1.0, 1e-12);
      }
      auto det = [](const MultiplierMatrix<double>& m) {
        auto z = [&](int i, int j) { return m[i][j].to_std(); };
        return z(0, 0) * (z(1, 1) * z(2, 2) - z(1, 2) * z(2, 1)) - z(0, 1) * (z(1, 0) * z(2, 2) - z(1, 2) * z(2, 0)) +
               z(0, 2) * (z(1, 0) * z(2, 1) - z(1, 1) * z(2, 0));
      };
      EXPECT_NEAR(std::abs(det(psi)), std::abs(det(P)), 1e-12);
    }
}
