#pragma once

#include <gmpxx.h>
#include <mpfr.h>
#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace falsetheta {

using BigInt = mpz_class;
using Rational = mpq_class;

// error kinds map onto the CLI exit codes 2, 3, 4
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct AssertionFailure : std::logic_error {
  using std::logic_error::logic_error;
};
struct ConvergenceError : std::runtime_error {
  double achieved;
  ConvergenceError(const std::string& what, double achieved_bound)
      : std::runtime_error(what), achieved(achieved_bound) {}
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}
inline void check(bool ok, const std::string& msg) {
  if (!ok) throw AssertionFailure(msg);
}

// canonical num/den; mpq_class(num, den) alone leaves common factors in place
inline Rational ratio(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

template <unsigned Digits>
using MpReal = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<Digits>,
                                             boost::multiprecision::et_off>;

template <class R>
struct RealTraits;

template <>
struct RealTraits<double> {
  static constexpr unsigned digits10 = 15;
  static double pi() { return std::numbers::pi; }
  static double from(const Rational& q) { return q.get_d(); }
  static double from(const BigInt& z) { return z.get_d(); }
  static double to_double(double x) { return x; }
  static std::string str(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
};

template <unsigned D>
struct RealTraits<MpReal<D>> {
  using R = MpReal<D>;
  static constexpr unsigned digits10 = D;
  static R pi() {
    R x;
    mpfr_const_pi(x.backend().data(), MPFR_RNDN);
    return x;
  }
  static R from(const Rational& q) {
    R x;
    mpfr_set_q(x.backend().data(), q.get_mpq_t(), MPFR_RNDN);
    return x;
  }
  static R from(const BigInt& z) {
    R x;
    mpfr_set_z(x.backend().data(), z.get_mpz_t(), MPFR_RNDN);
    return x;
  }
  static double to_double(const R& x) { return mpfr_get_d(x.backend().data(), MPFR_RNDN); }
  static std::string str(const R& x) { return x.str(D, std::ios_base::scientific); }
};

template <class R>
R real_from(const Rational& q) {
  return RealTraits<R>::from(q);
}
template <class R>
R real_from(long num, long den) {
  return RealTraits<R>::from(ratio(num, den));
}
template <class R>
double to_double(const R& x) {
  return RealTraits<R>::to_double(x);
}
template <class R>
R pi_v() {
  return RealTraits<R>::pi();
}

// minimal complex type usable with mpfr numbers
template <class R>
struct Cplx {
  R re{0}, im{0};
  Cplx() = default;
  Cplx(R r) : re(std::move(r)), im(0) {}
  Cplx(R r, R i) : re(std::move(r)), im(std::move(i)) {}

  Cplx& operator+=(const Cplx& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Cplx& operator-=(const Cplx& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Cplx& operator*=(const Cplx& o) {
    R r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Cplx& operator*=(const R& s) {
    re *= s;
    im *= s;
    return *this;
  }
  Cplx& operator/=(const R& s) {
    re /= s;
    im /= s;
    return *this;
  }
  friend Cplx operator+(Cplx a, const Cplx& b) { return a += b; }
  friend Cplx operator-(Cplx a, const Cplx& b) { return a -= b; }
  friend Cplx operator*(Cplx a, const Cplx& b) { return a *= b; }
  friend Cplx operator*(Cplx a, const R& s) { return a *= s; }
  friend Cplx operator*(const R& s, Cplx a) { return a *= s; }
  friend Cplx operator/(Cplx a, const R& s) { return a /= s; }
  friend Cplx operator/(const Cplx& a, const Cplx& b) {
    R n = b.re * b.re + b.im * b.im;
    return Cplx((a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n);
  }
  Cplx operator-() const { return Cplx(-re, -im); }
  Cplx conj() const { return Cplx(re, -im); }
  R norm() const { return re * re + im * im; }
  R abs() const {
    using std::sqrt;
    return sqrt(norm());
  }
  std::complex<double> to_std() const { return {to_double(re), to_double(im)}; }
};

template <class To, class From>
Cplx<To> cplx_cast(const Cplx<From>& z) {
  if constexpr (std::is_same_v<To, From>) {
    return z;
  } else if constexpr (std::is_same_v<To, double>) {
    return Cplx<double>(to_double(z.re), to_double(z.im));
  } else {
    return Cplx<To>(To(z.re), To(z.im));
  }
}

inline long mod_floor(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

// e(num/den) = exp(2 pi i num/den), exact on the quarter points
template <class R>
Cplx<R> unit_root(long num, long den) {
  using std::cos;
  using std::sin;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long r = mod_floor(num, den);
  if (r == 0) return Cplx<R>(R(1), R(0));
  if (4 * r == den) return Cplx<R>(R(0), R(1));
  if (2 * r == den) return Cplx<R>(R(-1), R(0));
  if (4 * r == 3 * den) return Cplx<R>(R(0), R(-1));
  R x = 2 * pi_v<R>() * real_from<R>(r, den);
  return Cplx<R>(cos(x), sin(x));
}

template <class R>
Cplx<R> unit_root(const Rational& x) {
  Rational f = x;
  BigInt fl;
  mpz_fdiv_q(fl.get_mpz_t(), f.get_num_mpz_t(), f.get_den_mpz_t());
  f -= fl;
  check(f.get_den().fits_slong_p(), "unit_root: denominator too large");
  return unit_root<R>(f.get_num().get_si(), f.get_den().get_si());
}

inline Rational frac(const Rational& x) {
  BigInt fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return x - Rational(fl);
}

inline BigInt floor_q(const Rational& x) {
  BigInt fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return fl;
}

inline std::string fmt17(double x) { return RealTraits<double>::str(x); }

inline std::string rational_str(const Rational& q) {
  return q.get_den() == 1 ? q.get_num().get_str() : q.get_str();
}

// worker count: explicit override, else FALSETHETA_THREADS, else hardware
inline std::atomic<int>& thread_override() {
  static std::atomic<int> v{0};
  return v;
}

inline int parse_thread_env() {
  const char* s = std::getenv("FALSETHETA_THREADS");
  if (!s || !*s) return 0;
  char* end = nullptr;
  long v = std::strtol(s, &end, 10);
  require(end && *end == '\0' && v >= 1 && v <= 1024, "FALSETHETA_THREADS must be a positive integer");
  return static_cast<int>(v);
}

inline int thread_count() {
  if (int v = thread_override().load(); v > 0) return v;
  if (int v = parse_thread_env(); v > 0) return v;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// results land in per-index slots, so output never depends on scheduling
template <class F>
void parallel_for(std::size_t n, F&& fn, int threads = 0) {
  if (threads <= 0) threads = thread_count();
  threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace falsetheta
