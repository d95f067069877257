#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "frieze/errors.hpp"

namespace frieze {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) throw InputError("zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

inline BigInt numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

// Largest integer <= q.
inline BigInt floor_of(const Rational& q) {
  BigInt num = numerator_of(q);
  BigInt den = denominator_of(q);
  BigInt quot = num / den;  // truncates toward zero
  if (num < 0 && quot * den != num) quot -= 1;
  return quot;
}

// Smallest integer >= q.
inline BigInt ceil_of(const Rational& q) {
  BigInt f = floor_of(q);
  return (Rational(f) == q) ? f : f + 1;
}

inline Rational abs_of(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline std::int64_t to_int64(const BigInt& v) {
  if (v > BigInt(INT64_MAX) || v < BigInt(INT64_MIN)) {
    throw CapacityError("integer value exceeds 64-bit range", 0);
  }
  return v.convert_to<std::int64_t>();
}

// "p/q", or "p" when the denominator is 1.
inline std::string to_string(const Rational& q) {
  BigInt den = denominator_of(q);
  if (den == 1) return numerator_of(q).str();
  return numerator_of(q).str() + "/" + den.str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

// cpp_int reads a leading 0 as octal, so leading zeros go first.
inline BigInt decimal_bigint(std::string_view digits) {
  while (digits.size() > 1 && digits.front() == '0') digits.remove_prefix(1);
  return BigInt{std::string(digits)};
}

inline BigInt parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw InputError("not a number: '" + std::string(whole) + "'");
  BigInt v = decimal_bigint(s);
  return negative ? BigInt(-v) : v;
}

}  // namespace detail

// Exact parse of "p", "p/q", "-1.25", ".5", "3e-2" style literals.
inline Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (s.empty()) throw InputError("empty number");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    BigInt num = detail::parse_integer(s.substr(0, slash), text);
    BigInt den = detail::parse_integer(s.substr(slash + 1), text);
    if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }

  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  std::int64_t exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    BigInt ev = detail::parse_integer(s.substr(e + 1), text);
    if (ev > 4000 || ev < -4000) throw InputError("exponent out of range in '" + std::string(text) + "'");
    exponent = ev.convert_to<std::int64_t>();
    s = s.substr(0, e);
  }

  std::string digits;
  std::int64_t frac_len = 0;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) throw InputError("not a number: '" + std::string(text) + "'");
    if ((!int_part.empty() && !detail::all_digits(int_part)) || (!frac_part.empty() && !detail::all_digits(frac_part))) {
      throw InputError("not a number: '" + std::string(text) + "'");
    }
    digits = std::string(int_part) + std::string(frac_part);
    frac_len = static_cast<std::int64_t>(frac_part.size());
  } else {
    if (!detail::all_digits(s)) throw InputError("not a number: '" + std::string(text) + "'");
    digits = std::string(s);
  }

  BigInt mantissa = detail::decimal_bigint(digits);
  std::int64_t scale = exponent - frac_len;
  BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
  Rational value = scale >= 0 ? Rational(mantissa * ten_pow) : Rational(mantissa, ten_pow);
  return negative ? Rational(-value) : value;
}

}  // namespace frieze
