#pragma once

#include <ostream>

#include "falsetheta/asymptotics.hpp"

namespace falsetheta {

// always p/q, including integers
inline std::string offset_str(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

inline std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

// {"offset":"p/q","coeffs":["..."],"order":N}
template <class Coeff>
std::string series_json(const QExpansion<Coeff>& s) {
  std::string out = "{\"offset\":" + json_quote(offset_str(s.offset())) + ",\"coeffs\":[";
  for (long i = 0; i < s.order(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<Coeff, BigInt>)
      out += json_quote(s[i].get_str());
    else
      out += json_quote(rational_str(s[i]));
  }
  return out + "],\"order\":" + std::to_string(s.order()) + "}";
}

inline const char* kAsymptoticCsvHeader = "j,n,exact,main_sum,residual,n34_ratio";

// floats are written with 17 significant digits, so records are assembled by hand
inline std::string asymptotic_json(const AsymptoticReport& r) {
  std::string s = "{\"j\":" + std::to_string(r.j) + ",\"n\":" + std::to_string(r.n) + ",\"exact\":";
  s += r.exact ? json_quote(r.exact->get_str()) : "null";
  s += ",\"main_sum\":" + fmt17(r.main_sum);
  s += ",\"residual\":" + (r.exact ? fmt17(r.residual) : std::string("null"));
  s += ",\"n34_ratio\":" + (r.exact ? fmt17(r.residual_over_n34) : std::string("null"));
  return s + "}";
}

inline std::string asymptotic_csv(const AsymptoticReport& r) {
  std::string s = std::to_string(r.j) + "," + std::to_string(r.n) + ",";
  s += r.exact ? r.exact->get_str() : "";
  s += "," + fmt17(r.main_sum) + ",";
  if (r.exact) s += fmt17(r.residual) + "," + fmt17(r.residual_over_n34);
  else s += ",";
  return s;
}

// rows (j, n_numerator, n_denominator, value) for every grid point with 0 < |n| <= X
inline void write_coefficient_dump(std::ostream& os, int j, long X) {
  auto tab = coefficient_table(j, X);
  os << "j,n_numerator,n_denominator,value\n";
  for (long m = tab->m_lo(); m <= tab->m_hi(); ++m) {
    Rational n = tab->n_of(m);
    if (abs(n) > X) continue;
    os << j << "," << n.get_num().get_str() << "," << n.get_den().get_str() << "," << rational_str(tab->d(m)) << "\n";
  }
}

// exact aggregated value as a string: c*pi^e
inline std::string pi_multiple_str(const Rational& c, int e) {
  if (c == 0) return "0";
  return rational_str(c) + "*pi^" + std::to_string(e);
}

inline std::string cplx_json(const Cplx<double>& z) { return "{\"re\":" + fmt17(z.re) + ",\"im\":" + fmt17(z.im) + "}"; }

inline std::string matrix_json(const MultiplierMatrix<double>& P) {
  std::string s = "[";
  for (int i = 0; i < 3; ++i) {
    if (i) s += ",";
    s += "[";
    for (int j = 0; j < 3; ++j) {
      if (j) s += ",";
      s += cplx_json(P[i][j]);
    }
    s += "]";
  }
  return s + "]";
}

}  // namespace falsetheta
