#pragma once

#include <gmpxx.h>

#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>

namespace gamma_lab {

using Rational = mpq_class;

/// Coefficient fields supported by the polynomial and moment engines.
template <class T>
concept Coefficient = std::same_as<T, double> || std::same_as<T, Rational>;

/// Parses "3", "-2.5", "1e-3", "7/12" or "-0.125e2" into an exact rational.
/// Throws std::invalid_argument on malformed text.
Rational parse_rational(std::string_view text);

/// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& q);

/// True iff the reduced denominator has no prime factors other than 2 and 5.
bool has_finite_decimal(const Rational& q);

/// Exact decimal expansion; requires has_finite_decimal(q).
std::string to_decimal_string(const Rational& q);

/// Shortest decimal text that round-trips the double.
std::string format_double(double x);

/// The rational whose decimal expansion is the shortest round-trip text of x.
/// This recovers "0.1" as 1/10 rather than the binary value of 0.1.
Rational rational_from_shortest(double x);

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_zero(double x) { return x == 0.0; }

template <Coefficient T>
T from_rational(const Rational& q) {
  if constexpr (std::same_as<T, double>) {
    return q.get_d();
  } else {
    return q;
  }
}

template <Coefficient T>
T from_integer(std::int64_t v) {
  if constexpr (std::same_as<T, double>) {
    return static_cast<double>(v);
  } else {
    return Rational(static_cast<long>(v));
  }
}

}  // namespace gamma_lab
