#pragma once

#include "frac.hpp"
#include "gnlab/rational.hpp"

namespace oracle {

inline gnlab::Rational to_rational(Frac f) { return gnlab::make_rational(f.n(), f.d()); }

inline Frac from_rational(const gnlab::Rational& r) {
  return {static_cast<i128>(static_cast<long long>(numerator(r))),
          static_cast<i128>(static_cast<long long>(denominator(r)))};
}

inline gnlab::Rational rat(long long n, long long d = 1) { return gnlab::make_rational(n, d); }

}  // namespace oracle
