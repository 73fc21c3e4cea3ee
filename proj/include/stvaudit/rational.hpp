#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stvaudit {

/// Exact rational arithmetic for ballot values, tallies, bounds and margins.
/// Arbitrary precision: chained transfer values never overflow or drift.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(long long num, long long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Nearest integer, halves away from zero. Used for Table-style tally display.
inline BigInt round_to_int(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);  // den > 0
  if (num >= 0) return (2 * num + den) / (2 * den);
  return -((2 * -num + den) / (2 * den));
}

/// Fixed-point decimal rendering, `places` digits, round half away from zero.
inline std::string format_fixed(const Rational& r, int places) {
  BigInt scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const bool neg = r < 0;
  const Rational mag = neg ? Rational(-r) : r;
  const BigInt num = boost::multiprecision::numerator(mag) * scale;
  const BigInt den = boost::multiprecision::denominator(mag);
  BigInt scaled = (2 * num + den) / (2 * den);  // round half up on magnitude
  std::string digits = scaled.str();
  if (static_cast<int>(digits.size()) <= places)
    digits.insert(0, places + 1 - digits.size(), '0');
  std::string out = neg ? "-" : "";
  out += digits.substr(0, digits.size() - places);
  if (places > 0) {
    out += '.';
    out += digits.substr(digits.size() - places);
  }
  return out;
}

/// Canonical "num/den" rendering ("num" alone when the denominator is 1).
inline std::string format_ratio(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

/// Parses "num/den", a plain integer, or a decimal literal ("0.01" -> 1/100).
inline Rational parse_ratio(std::string_view text) {
  const std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const BigInt num(s.substr(0, slash));
    const BigInt den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    return Rational(num, den);
  }
  const auto dot = s.find('.');
  if (dot == std::string::npos) return Rational(BigInt(s));
  const std::string whole = s.substr(0, dot);
  const std::string frac = s.substr(dot + 1);
  if (frac.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("malformed decimal literal: " + s);
  BigInt scale = 1;
  for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
  const bool neg = !whole.empty() && whole[0] == '-';
  const std::string wdigits = (whole.empty() || whole == "-") ? "0" : (neg ? whole.substr(1) : whole);
  const BigInt mag = BigInt(wdigits) * scale + (frac.empty() ? BigInt(0) : BigInt(frac));
  Rational r(mag, scale);
  return neg ? Rational(-r) : r;
}

}  // namespace stvaudit
