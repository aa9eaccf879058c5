#pragma once

// Exact exponent calculus for the Gagliardo-Nirenberg family
//
//   ||grad^j u||_p <= C ||grad^k u||_r^theta ||u||_q^(1-theta),
//   1/p = j/n + theta (1/r - k/n) + (1-theta)/q.
//
// Every relation is evaluated in exact rational arithmetic; Lebesgue indices
// are ExtReal so that q = inf and p = inf carry reciprocal exactly 0.

#include "gnlab/rational.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gnlab {

struct GNParams {
  int n = 1;
  int j = 0;
  int k = 1;
  Rational theta{0};
  std::optional<ExtReal> p;  // unset until solved or supplied
  ExtReal q{1};
  ExtReal r{1};

  /// Copy with p replaced by solve_p(). Throws like solve_p().
  GNParams with_solved_p() const;
  /// Throws kInvalidArgument if p is unset.
  const ExtReal& p_or_throw() const;
};

enum class AdmissibilityReason {
  kOk,
  kThetaOutOfRange,
  kCriticalIntegerCase,
  kPNonpositive,
  kIndexOutOfRange,
};

std::string_view reason_name(AdmissibilityReason reason) noexcept;

struct AdmissibilityVerdict {
  bool admissible = false;
  AdmissibilityReason reason = AdmissibilityReason::kIndexOutOfRange;
  std::string detail;
};

/// Throws kInvalidIndex if j >= k, kNegativeReciprocal if 1/p < 0.
/// Returns infinity when 1/p is exactly 0.
ExtReal solve_p(int n, int j, int k, const Rational& theta, const ExtReal& q,
                const ExtReal& r);

/// The reciprocal 1/p given by the balance relation, with no sign checks.
Rational gn_reciprocal_p(int n, int j, int k, const Rational& theta, const ExtReal& q,
                         const ExtReal& r);

/// theta = (1/p - j/n - 1/q) / (1/r - k/n - 1/q). Throws kDegenerate when the
/// denominator vanishes.
Rational solve_theta(int n, int j, int k, const ExtReal& p, const ExtReal& q,
                     const ExtReal& r);

/// 1/p = j/(k r) + (k-j)/(k q): the theta = j/k case, independent of n.
ExtReal solve_special_p(int j, int k, const ExtReal& q, const ExtReal& r);

AdmissibilityVerdict check_admissible(const GNParams& params);

/// delta = (j - n/p) - theta (k - n/r) + (1-theta) n/q. The ratio of the two
/// sides scales as s^delta under u -> u(s .); zero iff p solves the relation.
Rational scaling_deficit(const GNParams& params);

/// alpha with 1/p = alpha/r + (1-alpha)/q, required in [0,1].
Rational interpolation_alpha(const ExtReal& p, const ExtReal& r, const ExtReal& q);

struct GagliardoBalance {
  Rational lambda;
  Rational mu;
  // Exponents of ||u''|| and ||u|| in the two terms after substituting
  // l = a ||u''||^lambda ||u||^mu.
  Rational second_derivative_exp_first;
  Rational second_derivative_exp_second;
  Rational function_exp_first;
  Rational function_exp_second;

  bool balanced() const {
    return second_derivative_exp_first == second_derivative_exp_second &&
           function_exp_first == function_exp_second;
  }
};

/// Exponents (lambda, mu) = (-1/2, q/(2r)) making both terms of the
/// one-dimensional two-term modular form carry identical powers.
GagliardoBalance gagliardo_balance(const ExtReal& p, const ExtReal& q, const ExtReal& r);

/// p = kqr / (jq + (k-j) r) for 0 < j < k, 1 <= r <= q < inf.
Rational gagliardo_p(int j, int k, const ExtReal& q, const ExtReal& r);

struct StepOneExponents {
  ExtReal p;
  ExtReal p_tilde;
};

/// Exponents of the step GN(k,1) => GN(k+1,1):
///   1/p = (1/(k+1))/r + (k/(k+1))/q,   2/p = 1/p~ + 1/q.
StepOneExponents induction_step1_exponents(int k, const ExtReal& q, const ExtReal& r);

struct StepTwoExponents {
  ExtReal p;
  ExtReal q_tilde;
};

/// Exponents of the step GN(k,j) => GN(k+1,j+1):
///   1/p = ((j+1)/(k+1))/r + ((k-j)/(k+1))/q,   1/p = (j/k)/r + (1-j/k)/q~.
StepTwoExponents induction_step2_exponents(int k, int j, const ExtReal& q, const ExtReal& r);

// ---------------------------------------------------------------------------
// Symbolic inequality records.

struct NormFactor {
  int order = 0;
  ExtReal norm_exp;
  Rational power;
};

/// Named constants with rational powers, e.g. {"C21": 4/3, "C21'": 2/3}.
using ConstantExpr = std::map<std::string, Rational>;

/// ||grad^lhs_order u||_lhs_exp <= constant_expr * prod ||grad^order u||_exp^power.
struct InequalityRecord {
  int lhs_order = 0;
  ExtReal lhs_exp;
  std::vector<NormFactor> factors;
  ConstantExpr constant_expr;

  Rational power_sum() const;
  std::string to_string() const;
};

/// GN(k,j) with exponents (p; r, q) and one named constant. Throws
/// kInvalidIndex unless 0 <= j < k.
InequalityRecord gn_record(int k, int j, const ExtReal& p, const ExtReal& q,
                           const ExtReal& r, const std::string& constant_name);

/// The same inequality applied to grad u: every derivative order + shift.
InequalityRecord shift_orders(InequalityRecord record, int shift);

/// Substitutes `b` into the factor of `a` matching b's left-hand norm, moves
/// any resulting power of a's own left-hand norm across and renormalizes.
/// Factors come out in decreasing derivative order.
/// Throws kNoMatchingFactor or kSelfPowerGeqOne.
InequalityRecord chain_records(const InequalityRecord& a, const InequalityRecord& b);

/// Numeric value of a constant expression for the supplied atom values.
double evaluate_constant(const ConstantExpr& expr, const std::map<std::string, double>& atoms);

}  // namespace gnlab
