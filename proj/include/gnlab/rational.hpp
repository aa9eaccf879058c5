#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace gnlab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

Rational make_rational(std::int64_t num, std::int64_t den = 1);

/// Parses "num/den", a plain integer, or a finite decimal such as "1.5".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& value);
double to_double(const Rational& value);

/// True when the rational is an integer >= 0.
bool is_nonnegative_integer(const Rational& value);

/// An exact rational extended by a single point at +infinity.
///
/// Lebesgue indices and their reciprocals live here. The reciprocal is exact:
/// 1/INFINITY is 0 and 1/0 is INFINITY. Negative values are representable so
/// that callers can detect them, but they are never produced by reciprocal().
class ExtReal {
 public:
  ExtReal() = default;
  ExtReal(const Rational& value) : value_(value) {}  // NOLINT: implicit by intent
  ExtReal(std::int64_t value) : value_(value) {}     // NOLINT

  static ExtReal infinity() {
    ExtReal out;
    out.infinite_ = true;
    return out;
  }
  /// The index whose reciprocal is `recip` (0 maps to infinity).
  static ExtReal from_reciprocal(const Rational& recip);

  bool is_infinite() const noexcept { return infinite_; }
  bool is_finite() const noexcept { return !infinite_; }
  /// Throws when infinite.
  const Rational& value() const;
  Rational reciprocal() const;
  double to_double() const;
  double reciprocal_double() const;

  friend bool operator==(const ExtReal& a, const ExtReal& b);
  friend std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b);

 private:
  Rational value_{0};
  bool infinite_ = false;
};

/// "inf", "infinity" or anything parse_rational accepts.
ExtReal parse_ext(std::string_view text);
std::string to_string(const ExtReal& value);

}  // namespace gnlab
