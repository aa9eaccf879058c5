#pragma once
// Small independent fraction type used as an oracle for the exact exponent
// code. Deliberately shares nothing with gnlab::Rational.

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace oracle {

__extension__ using i128 = __int128;

struct Frac {
  i128 num = 0;
  i128 den = 1;

  Frac() = default;
  Frac(long long n) : num(n), den(1) {}  // NOLINT
  Frac(i128 n, i128 d) : num(n), den(d) {
    if (den == 0) throw std::domain_error("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    i128 a = num < 0 ? -num : num, b = den;
    while (b != 0) {
      const i128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      num /= a;
      den /= a;
    }
  }

  friend Frac operator+(Frac a, Frac b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Frac operator-(Frac a, Frac b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend Frac operator*(Frac a, Frac b) { return {a.num * b.num, a.den * b.den}; }
  friend Frac operator/(Frac a, Frac b) { return {a.num * b.den, a.den * b.num}; }
  friend bool operator==(Frac a, Frac b) { return a.num == b.num && a.den == b.den; }
  friend bool operator<(Frac a, Frac b) { return a.num * b.den < b.num * a.den; }
  friend bool operator<=(Frac a, Frac b) { return !(b < a); }
  Frac inv() const { return {den, num}; }
  bool is_integer() const { return den == 1; }
  long long n() const { return static_cast<long long>(num); }
  long long d() const { return static_cast<long long>(den); }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline std::ostream& operator<<(std::ostream& out, Frac f) {
  return out << static_cast<long long>(f.num) << "/" << static_cast<long long>(f.den);
}

}  // namespace oracle
