#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

namespace ultragap {

using Rational = mpq_class;

/// Parses "7", "-3/2", "0.125" or "1.5e-3" exactly. Throws DomainError on bad text.
Rational parse_rational(std::string_view text);

/// Parses the same grammar as parse_rational into a double ("3/2" -> 1.5).
double parse_real(std::string_view text);

/// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& q);

double to_double(const Rational& q);

/// Decimal rendering at 12 significant digits.
std::string format_decimal(double value);

/// Rounds to 12 significant digits so JSON dumps stay short and stable.
double round_decimal(double value);

/// Arithmetic policy for the two supported scalar types.
///
/// Float mode compares with a relative tolerance; rational mode is exact. Powers
/// follow the 0^0 = 0 convention used for distance matrices.
template <class T>
struct Scalar;

template <>
struct Scalar<double> {
  static constexpr bool exact = false;
  static constexpr double relative_tolerance = 1e-9;
  static constexpr double balance_tolerance = 1e-12;

  static double parse(std::string_view text) { return parse_real(text); }
  static double to_double(double v) { return v; }
  static double from_rational(const Rational& q) { return q.get_d(); }
  static std::string str(double v) { return format_decimal(v); }

  static double pow(double base, double p) {
    if (base == 0.0) return 0.0;
    if (p == 1.0) return base;
    return std::pow(base, p);
  }

  /// a <= b up to relative tolerance.
  static bool leq(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return a <= b + relative_tolerance * scale;
  }

  static bool is_zero_balance(double residual) { return std::abs(residual) <= balance_tolerance; }
};

template <>
struct Scalar<Rational> {
  static constexpr bool exact = true;

  static Rational parse(std::string_view text) { return parse_rational(text); }
  static double to_double(const Rational& v) { return v.get_d(); }
  static Rational from_rational(const Rational& q) { return q; }
  static std::string str(const Rational& v) { return to_string(v); }

  /// Exact power; p must be a non-negative integer.
  static Rational pow(const Rational& base, double p);

  static bool leq(const Rational& a, const Rational& b) { return a <= b; }
  static bool is_zero_balance(const Rational& residual) { return sgn(residual) == 0; }
};

}  // namespace ultragap
