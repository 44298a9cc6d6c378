#pragma once

#include <string>
#include <vector>

#include "falsetheta/common.hpp"
#include "falsetheta/maass.hpp"

namespace falsetheta {

struct TruncationError : AssertionFailure {
  using AssertionFailure::AssertionFailure;
};

// Truncated q-series sum_{i < order} c_i q^(offset + i), offset on the 1/48 grid.
// Coefficients for exponents >= offset + order are unknown, not zero.
template <class Coeff = Rational>
class QExpansion {
 public:
  QExpansion() = default;
  QExpansion(const Rational& offset, std::vector<Coeff> coeffs, long order) : coeffs_(std::move(coeffs)), order_(order) {
    Rational o = offset * 48;
    require(o.get_den() == 1, "series offset must have denominator dividing 48");
    offset48_ = o.get_num().get_si();
    require(order >= 0, "truncation order must be >= 0");
    coeffs_.resize(static_cast<std::size_t>(order), Coeff(0));
  }
  static QExpansion one(long order) {
    std::vector<Coeff> c(static_cast<std::size_t>(order), Coeff(0));
    if (order > 0) c[0] = 1;
    return QExpansion(Rational(0), std::move(c), order);
  }

  Rational offset() const { return ratio(offset48_, 48); }
  long offset48() const { return offset48_; }
  long order() const { return order_; }
  const std::vector<Coeff>& coeffs() const { return coeffs_; }

  // index i is the exponent offset + i
  const Coeff& operator[](long i) const {
    if (i < 0 || i >= order_) throw TruncationError("read at index " + std::to_string(i) + " beyond truncation order " + std::to_string(order_));
    return coeffs_[static_cast<std::size_t>(i)];
  }
  Coeff at_exponent(const Rational& e) const {
    Rational i = e - offset();
    require(i.get_den() == 1, "exponent not on this series' grid");
    long idx = i.get_num().get_si();
    if (idx < 0) return Coeff(0);
    return (*this)[idx];
  }

  QExpansion truncated(long order) const {
    require(order <= order_, "cannot extend truncation order");
    return QExpansion(offset(), std::vector<Coeff>(coeffs_.begin(), coeffs_.begin() + order), order);
  }

  QExpansion shifted(const Rational& e) const {
    QExpansion r = *this;
    Rational o = e * 48;
    require(o.get_den() == 1, "shift must have denominator dividing 48");
    r.offset48_ += o.get_num().get_si();
    return r;
  }

  friend QExpansion operator+(const QExpansion& a, const QExpansion& b) { return a.combine(b, 1); }
  friend QExpansion operator-(const QExpansion& a, const QExpansion& b) { return a.combine(b, -1); }
  QExpansion operator-() const {
    QExpansion r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }
  friend QExpansion operator*(const Coeff& s, QExpansion a) {
    for (auto& c : a.coeffs_) c *= s;
    return a;
  }

  friend QExpansion operator*(const QExpansion& a, const QExpansion& b) {
    long n = std::min(a.order_, b.order_);
    std::vector<Coeff> c(static_cast<std::size_t>(n), Coeff(0));
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      Coeff s = 0;
      for (std::size_t k = 0; k <= i; ++k) {
        if (a.coeffs_[k] == 0) continue;
        s += a.coeffs_[k] * b.coeffs_[i - k];
      }
      c[i] = s;
    });
    QExpansion r;
    r.offset48_ = a.offset48_ + b.offset48_;
    r.order_ = n;
    r.coeffs_ = std::move(c);
    return r;
  }

  // multiplicative inverse; integral rings need a unit leading coefficient
  QExpansion inverse() const {
    require(order_ >= 1, "cannot invert an empty series");
    const Coeff& a0 = coeffs_[0];
    require(a0 != 0, "leading coefficient must be nonzero");
    if constexpr (std::is_same_v<Coeff, BigInt>) require(abs(a0) == 1, "integral inversion needs a unit leading coefficient");
    std::vector<Coeff> b(coeffs_.size(), Coeff(0));
    b[0] = Coeff(1) / a0;
    for (std::size_t n = 1; n < b.size(); ++n) {
      Coeff s = 0;
      for (std::size_t i = 1; i <= n; ++i)
        if (coeffs_[i] != 0) s += coeffs_[i] * b[n - i];
      b[n] = -s / a0;
    }
    QExpansion r;
    r.offset48_ = -offset48_;
    r.order_ = order_;
    r.coeffs_ = std::move(b);
    return r;
  }

  // q -> -q; only for integral offsets
  QExpansion negate_q() const {
    require(offset48_ % 48 == 0, "q -> -q needs an integral offset");
    QExpansion r = *this;
    long e0 = offset48_ / 48;
    for (std::size_t i = 0; i < r.coeffs_.size(); ++i)
      if (((e0 + static_cast<long>(i)) & 1) != 0) r.coeffs_[i] = -r.coeffs_[i];
    return r;
  }

  // coefficients at indices residue + step*m, viewed as a series in q^step -> q
  QExpansion decimate(long step, long residue, const Rational& new_offset) const {
    require(step >= 1 && residue >= 0 && residue < step, "bad decimation");
    long n = (order_ - residue + step - 1) / step;
    if (n < 0) n = 0;
    std::vector<Coeff> c(static_cast<std::size_t>(n));
    for (long m = 0; m < n; ++m) c[static_cast<std::size_t>(m)] = coeffs_[static_cast<std::size_t>(residue + step * m)];
    return QExpansion(new_offset, std::move(c), n);
  }

  // finalization for series known to be integral
  std::vector<BigInt> integers() const {
    std::vector<BigInt> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) {
      if constexpr (std::is_same_v<Coeff, BigInt>) {
        out.push_back(c);
      } else {
        Rational q(c);
        q.canonicalize();
        check(q.get_den() == 1, "non-integral coefficient in an integral series");
        out.push_back(q.get_num());
      }
    }
    return out;
  }

  QExpansion<Rational> to_rational() const {
    std::vector<Rational> c(coeffs_.begin(), coeffs_.end());
    return QExpansion<Rational>(offset(), std::move(c), order_);
  }

  friend bool operator==(const QExpansion& a, const QExpansion& b) {
    return a.offset48_ == b.offset48_ && a.order_ == b.order_ && a.coeffs_ == b.coeffs_;
  }

 private:
  QExpansion combine(const QExpansion& b, int sign) const {
    long d = b.offset48_ - offset48_;
    require(d % 48 == 0, "added series must share a grid class");
    long lo = std::min(offset48_, b.offset48_);
    long shiftA = (offset48_ - lo) / 48, shiftB = (b.offset48_ - lo) / 48;
    long order = std::min(order_ + shiftA, b.order_ + shiftB);
    std::vector<Coeff> c(static_cast<std::size_t>(std::max(order, 0L)), Coeff(0));
    for (long i = 0; i < order; ++i) {
      if (i >= shiftA) c[static_cast<std::size_t>(i)] += coeffs_[static_cast<std::size_t>(i - shiftA)];
      if (i >= shiftB) {
        if (sign > 0)
          c[static_cast<std::size_t>(i)] += b.coeffs_[static_cast<std::size_t>(i - shiftB)];
        else
          c[static_cast<std::size_t>(i)] -= b.coeffs_[static_cast<std::size_t>(i - shiftB)];
      }
    }
    QExpansion r;
    r.offset48_ = lo;
    r.order_ = std::max(order, 0L);
    r.coeffs_ = std::move(c);
    return r;
  }

  long offset48_ = 0;
  std::vector<Coeff> coeffs_;
  long order_ = 0;
};

using IntSeries = QExpansion<BigInt>;

inline void require_order(long order) { require(order >= 1, "order must be >= 1"); }

// prod_{i>=0} (1 - a_sign q^(a_exp + i*step)), truncated
template <class Coeff = Rational>
QExpansion<Coeff> pochhammer(int a_sign, long a_exp, long step, long order, long count = -1) {
  require_order(order);
  require(a_sign == 1 || a_sign == -1, "a_sign must be +1 or -1");
  require(step >= 1 && a_exp >= 1, "need positive exponents");
  std::vector<Coeff> c(static_cast<std::size_t>(order), Coeff(0));
  c[0] = 1;
  for (long i = 0; count < 0 || i < count; ++i) {
    long e = a_exp + i * step;
    if (e >= order) break;
    for (long n = order - 1; n >= e; --n) {
      if (c[static_cast<std::size_t>(n - e)] == 0) continue;
      if (a_sign > 0)
        c[static_cast<std::size_t>(n)] -= c[static_cast<std::size_t>(n - e)];
      else
        c[static_cast<std::size_t>(n)] += c[static_cast<std::size_t>(n - e)];
    }
  }
  return QExpansion<Coeff>(Rational(0), std::move(c), order);
}

// (a_sign q^step; q^step)_infinity
template <class Coeff = Rational>
QExpansion<Coeff> pochhammer(int a_sign, long step, long order) {
  return pochhammer<Coeff>(a_sign, step, step, order);
}

// sum_{n>=0} q^{n(n+1)/2} / (-q;q)_n
inline IntSeries sigma_hypergeometric(long order) {
  require_order(order);
  std::vector<BigInt> acc(static_cast<std::size_t>(order), 0);
  // term_n = q^{T_n} / (-q;q)_n, built from term_{n-1} by q^n / (1 + q^n)
  std::vector<BigInt> term(static_cast<std::size_t>(order), 0);
  term[0] = 1;
  for (long n = 0;; ++n) {
    if (n > 0) {
      std::vector<BigInt> next(static_cast<std::size_t>(order), 0);
      for (long i = order - 1; i >= n; --i) next[static_cast<std::size_t>(i)] = term[static_cast<std::size_t>(i - n)];
      for (long i = n; i < order; ++i) next[static_cast<std::size_t>(i)] -= next[static_cast<std::size_t>(i - n)];
      term.swap(next);
    }
    if (n * (n + 1) / 2 >= order) break;
    for (long i = 0; i < order; ++i) acc[static_cast<std::size_t>(i)] += term[static_cast<std::size_t>(i)];
  }
  return IntSeries(Rational(0), std::move(acc), order);
}

// sum_{n>=0, |j|<=n} (-1)^{n+j} q^{n(3n+1)/2 - j^2} (1 - q^{2n+1})
inline IntSeries sigma_theta(long order) {
  require_order(order);
  std::vector<BigInt> c(static_cast<std::size_t>(order), 0);
  // smallest exponent for given n is n(3n+1)/2 - n^2 = n(n+1)/2
  for (long n = 0; n * (n + 1) / 2 < order; ++n) {
    for (long j = -n; j <= n; ++j) {
      long e = n * (3 * n + 1) / 2 - j * j;
      int s = ((n + j) & 1) ? -1 : 1;
      if (e < order) c[static_cast<std::size_t>(e)] += s;
      if (e + 2 * n + 1 < order) c[static_cast<std::size_t>(e + 2 * n + 1)] -= s;
    }
  }
  return IntSeries(Rational(0), std::move(c), order);
}

// p(0..n_max) by the pentagonal recurrence
inline std::vector<BigInt> partition_numbers(long n_max) {
  require(n_max >= 0, "n_max must be >= 0");
  std::vector<BigInt> p(static_cast<std::size_t>(n_max + 1), 0);
  p[0] = 1;
  for (long n = 1; n <= n_max; ++n) {
    BigInt s = 0;
    for (long k = 1;; ++k) {
      long g1 = k * (3 * k - 1) / 2, g2 = k * (3 * k + 1) / 2;
      if (g1 > n) break;
      bool plus = (k & 1) != 0;
      if (plus)
        s += p[static_cast<std::size_t>(n - g1)];
      else
        s -= p[static_cast<std::size_t>(n - g1)];
      if (g2 <= n) {
        if (plus)
          s += p[static_cast<std::size_t>(n - g2)];
        else
          s -= p[static_cast<std::size_t>(n - g2)];
      }
    }
    p[static_cast<std::size_t>(n)] = s;
  }
  return p;
}

// eta = q^{1/24} (q;q)_infinity
inline IntSeries eta_series(long order) {
  return pochhammer<BigInt>(1, 1, order).shifted(ratio(1, 24));
}

inline IntSeries inverse_eta(long order) {
  require_order(order);
  return IntSeries(ratio(-1, 24), partition_numbers(order - 1), order);
}

enum class URoute { generating, lattice };

// u_j on Z + beta_j through the sigma-function identities (j = 0, 1)
inline IntSeries u_series_generating(int j, long order) {
  require(j == 0 || j == 1, "the generating-function route exists only for j = 0, 1");
  require_order(order);
  IntSeries sg = sigma_theta(2 * order + 2);
  IntSeries part = sg.decimate(2, j, beta(j));
  IntSeries out = part.truncated(order);
  if (j == 0) out = -out;
  return out;
}

inline IntSeries u_series_lattice(int j, long order) {
  require_j(j);
  require_order(order);
  auto tab = coefficient_table(j, order + 1);
  std::vector<BigInt> c(static_cast<std::size_t>(order), 0);
  for (long m = 0; m < order; ++m) {
    long q = tab->quad(m);
    check(q % 4 == 0, "non-integral lattice coefficient d_j(n)");
    c[static_cast<std::size_t>(m)] = q / 4;
  }
  return IntSeries(beta(j), std::move(c), order);
}

// both routes for j = 0, 1; disagreement is fatal
inline IntSeries u_series(int j, long order) {
  require_j(j);
  IntSeries lat = u_series_lattice(j, order);
  if (j <= 1) {
    IntSeries gen = u_series_generating(j, order);
    check(gen == lat, "u_series: generating-function and lattice routes disagree");
  }
  return lat;
}

inline IntSeries u_series(int j, long order, URoute route) {
  return route == URoute::generating ? u_series_generating(j, order) : u_series_lattice(j, order);
}

// alpha_j(0..n_max): coefficients of u_j / eta
inline std::vector<BigInt> alpha(int j, long n_max) {
  require_j(j);
  require(n_max >= 0, "n_max must be >= 0");
  IntSeries u = u_series(j, n_max + 1);
  IntSeries prod = u * inverse_eta(n_max + 1);
  check(prod.offset() == Delta(j), "alpha: unexpected exponent offset");
  return prod.integers();
}

// coefficients of prod_{n>=0} (1 + q^{2n+1})
inline std::vector<BigInt> r_odd_distinct(long n_max) {
  require(n_max >= 0, "n_max must be >= 0");
  return pochhammer<BigInt>(-1, 1, 2, n_max + 1).integers();
}

// F = (1/(q^2;q^2)) (1 - sigma(-q)/2 + (-q;-q)/2)
inline std::vector<BigInt> podeu(long n_max) {
  require(n_max >= 0, "n_max must be >= 0");
  long order = n_max + 1;
  IntSeries sig_neg = sigma_hypergeometric(order).negate_q();
  IntSeries qq = pochhammer<BigInt>(1, 1, order).negate_q();
  IntSeries twice = BigInt(2) * IntSeries::one(order) - sig_neg + qq;
  // 1/(q^2;q^2) = sum p(k) q^{2k}
  auto p = partition_numbers(n_max / 2);
  std::vector<BigInt> inv(static_cast<std::size_t>(order), 0);
  for (std::size_t k = 0; k < p.size(); ++k) inv[2 * k] = p[k];
  IntSeries F2 = twice * IntSeries(Rational(0), std::move(inv), order);
  std::vector<BigInt> out;
  for (const auto& c : F2.integers()) {
    check(mpz_even_p(c.get_mpz_t()), "p_od^eu: odd numerator before halving");
    out.push_back(c / 2);
  }
  return out;
}

}  // namespace falsetheta
