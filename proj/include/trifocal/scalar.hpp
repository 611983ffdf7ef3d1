#pragma once

// Scalar backends for the whole library: exact rationals (arbitrary precision)
// and IEEE doubles. Every algorithm upstream is templated on the scalar type S
// and must compile for both; mixing kinds in one expression is a compile error.

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace trifocal {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class ScalarKind { rational, decimal };

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a precondition on rank / degeneracy is violated
// (rank-deficient cameras, slices of wrong rank, unextractable epipoles, ...).
struct DegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr ScalarKind kind = ScalarKind::rational;
  static constexpr const char* name = "rational";
};

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr ScalarKind kind = ScalarKind::decimal;
  static constexpr const char* name = "decimal";
};

template <class S>
concept Scalar = std::is_same_v<S, Rational> || std::is_same_v<S, double>;

inline bool is_zero(const Rational& x) { return x.is_zero(); }
inline bool is_zero(double x) { return x == 0.0; }

inline Rational abs_value(const Rational& x) { return x < 0 ? Rational(-x) : x; }
inline double abs_value(double x) { return std::fabs(x); }

inline double to_float(const Rational& x) { return x.convert_to<double>(); }
inline double to_float(double x) { return x; }

// Exact: doubles are dyadic rationals, so nothing is lost here.
inline Rational float_to_rational(double x) {
  if (!std::isfinite(x)) throw ParseError("non-finite value cannot be converted to a rational");
  return Rational(x);
}

template <class To, class From>
inline To scalar_cast(const From& x) {
  if constexpr (std::is_same_v<To, From>) {
    return x;
  } else if constexpr (std::is_same_v<To, double>) {
    return to_float(x);
  } else {
    return float_to_rational(x);
  }
}

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline BigInt pow10(std::size_t k) {
  BigInt r(1);
  const BigInt ten(10);
  for (std::size_t i = 0; i < k; ++i) r *= ten;
  return r;
}

// Always base 10. The cpp_int string constructor follows C-literal rules, so a
// leading zero ("0125") would silently switch it to octal.
inline BigInt digits_to_bigint(std::string_view digits) {
  BigInt r(0);
  for (char c : digits) {
    r *= 10;
    r += c - '0';
  }
  return r;
}

}  // namespace detail

// Number grammar shared by all file formats and the CLI:
//   integer   :=  '-'? digits
//   fraction  :=  '-'? digits '/' digits          (denominator unsigned, nonzero)
//   decimal   :=  '-'? digits ['.' digits] [('e'|'E') ('+'|'-')? digits]
// A decimal token converts to the exact rational it denotes (no binary rounding).
inline Rational parse_rational(std::string_view text) {
  const std::string_view original = text;
  auto fail = [&](const char* why) -> Rational {
    throw ParseError("invalid number '" + std::string(original) + "': " + why);
  };

  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    if (text.front() == '+') return fail("leading '+' is not accepted");
    negative = true;
    text.remove_prefix(1);
  }
  if (text.empty()) return fail("missing digits");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    if (!detail::all_digits(num)) return fail("numerator must be an integer");
    if (!detail::all_digits(den)) return fail("denominator must be unsigned digits");
    BigInt n = detail::digits_to_bigint(num);
    BigInt d = detail::digits_to_bigint(den);
    if (d.is_zero()) return fail("zero denominator");
    if (negative) n = -n;
    return Rational(n, d);
  }

  std::string_view ipart = text;
  std::string_view fpart, epart;
  bool eneg = false;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    ipart = text.substr(0, e);
    epart = text.substr(e + 1);
    if (!epart.empty() && (epart.front() == '+' || epart.front() == '-')) {
      eneg = epart.front() == '-';
      epart.remove_prefix(1);
    }
    if (!detail::all_digits(epart)) return fail("malformed exponent");
  }
  if (auto dot = ipart.find('.'); dot != std::string_view::npos) {
    fpart = ipart.substr(dot + 1);
    ipart = ipart.substr(0, dot);
    if (!detail::all_digits(fpart)) return fail("malformed fractional part");
  }
  if (!detail::all_digits(ipart)) return fail("malformed integer part");

  BigInt mantissa = detail::digits_to_bigint(std::string(ipart) + std::string(fpart));
  if (negative) mantissa = -mantissa;
  long long exp10 = 0;
  if (!epart.empty()) {
    if (epart.size() > 9) return fail("exponent out of range");
    exp10 = std::stoll(std::string(epart));
    if (eneg) exp10 = -exp10;
  }
  exp10 -= static_cast<long long>(fpart.size());

  if (exp10 >= 0) return Rational(mantissa * detail::pow10(static_cast<std::size_t>(exp10)));
  return Rational(mantissa, detail::pow10(static_cast<std::size_t>(-exp10)));
}

inline double parse_decimal(std::string_view text) {
  if (text.find('/') != std::string_view::npos) {
    // Fraction tokens are legal in decimal files; evaluate exactly, then round once.
    return to_float(parse_rational(text));
  }
  if (!text.empty() && text.front() == '+')
    throw ParseError("invalid number '" + std::string(text) + "': leading '+' is not accepted");
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError("invalid number '" + std::string(text) + "'");
  return value;
}

template <Scalar S>
inline S parse_number(std::string_view text) {
  if constexpr (scalar_traits<S>::exact)
    return parse_rational(text);
  else
    return parse_decimal(text);
}

inline std::string format_number(const Rational& x) {
  std::string s = numerator(x).str();
  if (denominator(x) != 1) {
    s += '/';
    s += denominator(x).str();
  }
  return s;
}

// Shortest representation that round-trips to the same double.
inline std::string format_number(double x) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("format_number: to_chars failed");
  return std::string(buf, ptr);
}

}  // namespace trifocal
