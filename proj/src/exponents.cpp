#include "gnlab/exponents.hpp"

#include "gnlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gnlab {

namespace {

void require_indices(int j, int k) {
  if (j < 0 || j >= k)
    fail(ErrorCode::kInvalidIndex,
         "need 0 <= j < k, got j=" + std::to_string(j) + " k=" + std::to_string(k));
}

void require_lebesgue(const ExtReal& value, const char* name) {
  if (value < ExtReal(1))
    fail(ErrorCode::kInvalidIndex, std::string(name) + " must be >= 1, got " + to_string(value));
}

ExtReal index_from_reciprocal(const Rational& recip, const char* what) {
  if (recip < 0)
    fail(ErrorCode::kNegativeReciprocal,
         std::string(what) + ": reciprocal " + to_string(recip) + " is negative");
  return ExtReal::from_reciprocal(recip);
}

}  // namespace

std::string_view reason_name(AdmissibilityReason reason) noexcept {
  switch (reason) {
    case AdmissibilityReason::kOk: return "OK";
    case AdmissibilityReason::kThetaOutOfRange: return "THETA_OUT_OF_RANGE";
    case AdmissibilityReason::kCriticalIntegerCase: return "CRITICAL_INTEGER_CASE";
    case AdmissibilityReason::kPNonpositive: return "P_NONPOSITIVE";
    case AdmissibilityReason::kIndexOutOfRange: return "INDEX_OUT_OF_RANGE";
  }
  return "UNKNOWN";
}

GNParams GNParams::with_solved_p() const {
  GNParams out = *this;
  out.p = solve_p(n, j, k, theta, q, r);
  return out;
}

const ExtReal& GNParams::p_or_throw() const {
  if (!p) fail(ErrorCode::kInvalidArgument, "exponent p is not set");
  return *p;
}

Rational gn_reciprocal_p(int n, int j, int k, const Rational& theta, const ExtReal& q,
                         const ExtReal& r) {
  if (n < 1) fail(ErrorCode::kInvalidIndex, "dimension must be positive");
  const Rational dim(n);
  return Rational(j) / dim + theta * (r.reciprocal() - Rational(k) / dim) +
         (Rational(1) - theta) * q.reciprocal();
}

ExtReal solve_p(int n, int j, int k, const Rational& theta, const ExtReal& q,
                const ExtReal& r) {
  require_indices(j, k);
  if (r.is_infinite()) fail(ErrorCode::kInvalidIndex, "r must be finite");
  return index_from_reciprocal(gn_reciprocal_p(n, j, k, theta, q, r), "solve_p");
}

Rational solve_theta(int n, int j, int k, const ExtReal& p, const ExtReal& q,
                     const ExtReal& r) {
  require_indices(j, k);
  if (n < 1) fail(ErrorCode::kInvalidIndex, "dimension must be positive");
  const Rational dim(n);
  const Rational den = r.reciprocal() - Rational(k) / dim - q.reciprocal();
  if (den == 0)
    fail(ErrorCode::kDegenerate, "1/r - k/n - 1/q vanishes; theta is not determined");
  return (p.reciprocal() - Rational(j) / dim - q.reciprocal()) / den;
}

ExtReal solve_special_p(int j, int k, const ExtReal& q, const ExtReal& r) {
  require_indices(j, k);
  const Rational recip = Rational(j, k) * r.reciprocal() + Rational(k - j, k) * q.reciprocal();
  return index_from_reciprocal(recip, "solve_special_p");
}

AdmissibilityVerdict check_admissible(const GNParams& params) {
  auto reject = [](AdmissibilityReason reason, std::string detail) {
    return AdmissibilityVerdict{false, reason, std::move(detail)};
  };
  const auto& [n, j, k, theta, p, q, r] = params;
  if (n < 1 || j < 0 || j >= k)
    return reject(AdmissibilityReason::kIndexOutOfRange, "need n >= 1 and 0 <= j < k");
  if (q < ExtReal(1)) return reject(AdmissibilityReason::kIndexOutOfRange, "q < 1");
  if (r < ExtReal(1) || r.is_infinite())
    return reject(AdmissibilityReason::kIndexOutOfRange, "need 1 <= r < inf");

  const Rational lower(j, k);
  if (theta < lower || theta > 1)
    return reject(AdmissibilityReason::kThetaOutOfRange,
                  "theta=" + to_string(theta) + " outside [" + to_string(lower) + ", 1]");

  if (r > ExtReal(1) && theta == 1) {
    const Rational gap = Rational(k - j) - Rational(n) / r.value();
    if (is_nonnegative_integer(gap))
      return reject(AdmissibilityReason::kCriticalIntegerCase,
                    "theta=1 with k-j-n/r=" + to_string(gap) + " a non-negative integer");
  }

  const Rational recip = gn_reciprocal_p(n, j, k, theta, q, r);
  if (recip < 0)
    return reject(AdmissibilityReason::kPNonpositive, "1/p=" + to_string(recip) + " < 0");
  if (recip > 1) return reject(AdmissibilityReason::kIndexOutOfRange, "p < 1");
  if (p && !(*p == ExtReal::from_reciprocal(recip)))
    return reject(AdmissibilityReason::kIndexOutOfRange,
                  "supplied p=" + to_string(*p) + " violates the balance relation");
  return {true, AdmissibilityReason::kOk, ""};
}

Rational scaling_deficit(const GNParams& params) {
  const Rational dim(params.n);
  const ExtReal& p = params.p_or_throw();
  return (Rational(params.j) - dim * p.reciprocal()) -
         params.theta * (Rational(params.k) - dim * params.r.reciprocal()) +
         (Rational(1) - params.theta) * dim * params.q.reciprocal();
}

Rational interpolation_alpha(const ExtReal& p, const ExtReal& r, const ExtReal& q) {
  const Rational den = r.reciprocal() - q.reciprocal();
  if (den == 0) {
    // Any alpha works when all three indices agree; take the endpoint.
    if (p == r) return Rational(1);
    fail(ErrorCode::kDegenerate, "r == q but p != r");
  }
  Rational alpha = (p.reciprocal() - q.reciprocal()) / den;
  if (alpha < 0 || alpha > 1)
    fail(ErrorCode::kAlphaOutOfRange, "alpha=" + to_string(alpha) + " outside [0,1]");
  return alpha;
}

GagliardoBalance gagliardo_balance(const ExtReal& p, const ExtReal& q, const ExtReal& r) {
  if (p.is_infinite() || q.is_infinite() || r.is_infinite())
    fail(ErrorCode::kInvalidIndex, "gagliardo_balance needs finite p, q, r");
  require_lebesgue(p, "p");
  require_lebesgue(q, "q");
  require_lebesgue(r, "r");
  const Rational& pv = p.value();
  const Rational& qv = q.value();
  const Rational& rv = r.value();

  GagliardoBalance out;
  out.lambda = Rational(-1, 2);
  out.mu = qv / (2 * rv);
  // First term: l^(2r/p - 1) ||u''||^(r/p); second: l^(-1) ||u||^(q/p).
  const Rational first_power = 2 * rv / pv - 1;
  out.second_derivative_exp_first = first_power * out.lambda + rv / pv;
  out.function_exp_first = first_power * out.mu;
  out.second_derivative_exp_second = -out.lambda;
  out.function_exp_second = -out.mu + qv / pv;
  return out;
}

Rational gagliardo_p(int j, int k, const ExtReal& q, const ExtReal& r) {
  if (j <= 0 || j >= k) fail(ErrorCode::kInvalidIndex, "need 0 < j < k");
  if (q.is_infinite()) fail(ErrorCode::kInvalidIndex, "q must be finite");
  require_lebesgue(r, "r");
  if (r > q) fail(ErrorCode::kInvalidIndex, "need r <= q");
  const Rational& qv = q.value();
  const Rational& rv = r.value();
  return Rational(k) * qv * rv / (Rational(j) * qv + Rational(k - j) * rv);
}

StepOneExponents induction_step1_exponents(int k, const ExtReal& q, const ExtReal& r) {
  if (k < 2) fail(ErrorCode::kInvalidIndex, "step one needs k >= 2");
  require_lebesgue(q, "q");
  require_lebesgue(r, "r");
  const Rational p_recip =
      Rational(1, k + 1) * r.reciprocal() + Rational(k, k + 1) * q.reciprocal();
  const Rational p_tilde_recip = 2 * p_recip - q.reciprocal();
  if (p_tilde_recip < 0 || p_tilde_recip > 1)
    fail(ErrorCode::kNegativeReciprocal,
         "1/p~=" + to_string(p_tilde_recip) + " leaves [0,1]");
  StepOneExponents out{ExtReal::from_reciprocal(p_recip),
                       ExtReal::from_reciprocal(p_tilde_recip)};
  // GN(k,1) applied to grad u with (q, p) -> (p, p~).
  if (p_tilde_recip != Rational(1, k) * r.reciprocal() + Rational(k - 1, k) * p_recip)
    fail(ErrorCode::kExponentMismatch, "step one consistency identity failed");
  return out;
}

StepTwoExponents induction_step2_exponents(int k, int j, const ExtReal& q, const ExtReal& r) {
  if (j < 1 || j >= k) fail(ErrorCode::kInvalidIndex, "step two needs 1 <= j < k");
  require_lebesgue(q, "q");
  require_lebesgue(r, "r");
  const Rational p_recip =
      Rational(j + 1, k + 1) * r.reciprocal() + Rational(k - j, k + 1) * q.reciprocal();
  const Rational weight(j, k);
  const Rational q_tilde_recip = (p_recip - weight * r.reciprocal()) / (1 - weight);
  if (q_tilde_recip < 0 || q_tilde_recip > 1)
    fail(ErrorCode::kNegativeReciprocal,
         "1/q~=" + to_string(q_tilde_recip) + " leaves [0,1]");
  // GN(j+1,1) with top norm ||grad^(j+1) u||_p and bottom norm ||u||_q.
  if (q_tilde_recip != Rational(1, j + 1) * p_recip + Rational(j, j + 1) * q.reciprocal())
    fail(ErrorCode::kExponentMismatch, "step two consistency identity failed");
  return {ExtReal::from_reciprocal(p_recip), ExtReal::from_reciprocal(q_tilde_recip)};
}

// ---------------------------------------------------------------------------

Rational InequalityRecord::power_sum() const {
  Rational sum(0);
  for (const auto& factor : factors) sum += factor.power;
  return sum;
}

std::string InequalityRecord::to_string() const {
  std::ostringstream out;
  out << "||D^" << lhs_order << " u||_" << gnlab::to_string(lhs_exp) << " <= ";
  bool first = true;
  for (const auto& [name, power] : constant_expr) {
    out << (first ? "" : "*") << name << "^(" << gnlab::to_string(power) << ")";
    first = false;
  }
  for (const auto& factor : factors) {
    out << " ||D^" << factor.order << " u||_" << gnlab::to_string(factor.norm_exp) << "^("
        << gnlab::to_string(factor.power) << ")";
  }
  return out.str();
}

InequalityRecord gn_record(int k, int j, const ExtReal& p, const ExtReal& q, const ExtReal& r,
                           const std::string& constant_name) {
  require_indices(j, k);
  const Rational top(j, k);
  InequalityRecord record;
  record.lhs_order = j;
  record.lhs_exp = p;
  record.factors.push_back({k, r, top});
  record.factors.push_back({0, q, 1 - top});
  record.constant_expr[constant_name] = Rational(1);
  return record;
}

InequalityRecord shift_orders(InequalityRecord record, int shift) {
  record.lhs_order += shift;
  for (auto& factor : record.factors) factor.order += shift;
  return record;
}

InequalityRecord chain_records(const InequalityRecord& a, const InequalityRecord& b) {
  auto same_norm = [](int order, const ExtReal& exp, const NormFactor& f) {
    return f.order == order && f.norm_exp == exp;
  };

  std::size_t match = a.factors.size();
  for (std::size_t i = 0; i < a.factors.size(); ++i) {
    if (same_norm(b.lhs_order, b.lhs_exp, a.factors[i])) {
      match = i;
      break;
    }
  }
  if (match == a.factors.size())
    fail(ErrorCode::kNoMatchingFactor, "no factor of " + a.to_string() +
                                           " matches the left side of " + b.to_string());
  const Rational weight = a.factors[match].power;

  std::vector<NormFactor> merged;
  auto accumulate = [&](const NormFactor& factor) {
    for (auto& existing : merged) {
      if (same_norm(factor.order, factor.norm_exp, existing)) {
        existing.power += factor.power;
        return;
      }
    }
    merged.push_back(factor);
  };
  for (std::size_t i = 0; i < a.factors.size(); ++i)
    if (i != match) accumulate(a.factors[i]);
  for (const auto& factor : b.factors) accumulate({factor.order, factor.norm_exp, factor.power * weight});

  ConstantExpr constants = a.constant_expr;
  for (const auto& [name, power] : b.constant_expr) constants[name] += power * weight;

  Rational self_power(0);
  std::vector<NormFactor> rest;
  for (const auto& factor : merged) {
    if (same_norm(a.lhs_order, a.lhs_exp, factor))
      self_power += factor.power;
    else if (factor.power != 0)
      rest.push_back(factor);
  }
  if (self_power >= 1)
    fail(ErrorCode::kSelfPowerGeqOne,
         "left norm reappears with power " + to_string(self_power));

  const Rational scale = Rational(1) / (1 - self_power);
  InequalityRecord out;
  out.lhs_order = a.lhs_order;
  out.lhs_exp = a.lhs_exp;
  for (auto& factor : rest) {
    factor.power *= scale;
    out.factors.push_back(factor);
  }
  std::stable_sort(out.factors.begin(), out.factors.end(),
                   [](const NormFactor& x, const NormFactor& y) { return x.order > y.order; });
  for (const auto& [name, power] : constants)
    if (power != 0) out.constant_expr[name] = power * scale;
  if (out.power_sum() != 1)
    fail(ErrorCode::kExponentMismatch, "chained powers sum to " + to_string(out.power_sum()));
  return out;
}

double evaluate_constant(const ConstantExpr& expr, const std::map<std::string, double>& atoms) {
  double value = 1.0;
  for (const auto& [name, power] : expr) {
    auto it = atoms.find(name);
    if (it == atoms.end()) fail(ErrorCode::kInvalidArgument, "no value for constant " + name);
    value *= std::pow(it->second, to_double(power));
  }
  return value;
}

}  // namespace gnlab
