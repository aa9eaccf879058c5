#pragma once

// One-dimensional balanced covers.
//
// For a point x and window length h, with W = (x - h/2, x + h/2),
//   omega_x(h) = h^(1 + 1/p - 1/r) ||u''||_{r,W},
//   alpha_x(h) = h^(-1 + 1/p - 1/q) ||u||_{q,W},
// and the balancing length is r_x = sup{h > 0 : omega_x(h) <= alpha_x(h)}.
// A cover interval centred at x is the balanced window itself, so each
// interval of length l satisfies l^(1+1/p-1/r)||u''|| = l^(-1+1/p-1/q)||u||.

#include "gnlab/gridfn.hpp"
#include "gnlab/rational.hpp"

#include <vector>

namespace gnlab {

/// Window norms with the same piecewise-linear quadrature as lp_norm, summed
/// directly over the cells of the window so that tiny windows keep full
/// relative precision.
class BalanceProblem {
 public:
  BalanceProblem(const GridFunction& u, const ExtReal& p, const ExtReal& q, const ExtReal& r);

  double omega(double x, double h) const;
  double alpha(double x, double h) const;
  double second_derivative_norm(double a, double b) const;
  double function_norm(double a, double b) const;

  double omega_exponent() const { return omega_exp_; }
  double alpha_exponent() const { return alpha_exp_; }
  const GridFunction& function() const { return u_; }
  const GridFunction& second_derivative() const { return u2_; }
  /// Numeric support: nodes with |u| > 1e-12 max|u|.
  const std::vector<std::size_t>& support_nodes() const { return support_; }
  double support_lo() const;
  double support_hi() const;

 private:
  double window_norm(const std::vector<double>& powered, const GridFunction& base,
                     double exponent, bool sup, double a, double b) const;

  GridFunction u_;
  GridFunction u2_;
  std::vector<double> u_pow_;
  std::vector<double> u2_pow_;
  double q_ = 1, r_ = 1;
  bool q_inf_ = false, r_inf_ = false;
  double omega_exp_ = 0, alpha_exp_ = 0;
  std::vector<std::size_t> support_;
};

double omega(const GridFunction& u, double x, double h, const ExtReal& p, const ExtReal& r);
double alpha(const GridFunction& u, double x, double h, const ExtReal& p, const ExtReal& q);

struct BalancePoint {
  double center = 0;
  double length = 0;  // r_x
  double omega = 0;
  double alpha = 0;
  double residual = 0;  // |omega - alpha| / max(omega, alpha)
};

/// Largest crossing of omega_x - alpha_x, bracketed on a geometric scan and
/// refined by bisection to relative width 1e-8.
BalancePoint balance_at(const BalanceProblem& problem, double x);
double balancing_radius(const GridFunction& u, double x, const ExtReal& p, const ExtReal& q,
                        const ExtReal& r);

struct CoverInterval {
  double center = 0;
  double radius = 0;  // half the balanced length
  double omega = 0;
  double alpha = 0;
  double residual = 0;

  double lo() const { return center - radius; }
  double hi() const { return center + radius; }
  double length() const { return 2 * radius; }
  bool contains(double t) const { return t > lo() && t < hi(); }
};

struct BalancedCover {
  std::vector<CoverInterval> intervals;
  /// Overlap counts on a grid 8x finer than the function's grid.
  std::vector<int> multiplicity_profile;
  double profile_lo = 0;
  double profile_step = 0;
  int max_multiplicity = 0;
  /// Before removing redundant intervals.
  std::size_t greedy_count = 0;
  int greedy_max_multiplicity = 0;
  bool covers_support = false;
  double max_residual = 0;
  // Uniform bound r_x <= M = 2 max{r_0, diam(supp u)}, r_0 taken at argmax |u|.
  double r0 = 0;
  double support_diameter = 0;
  double radius_bound = 0;
  double max_balancing_length = 0;

  std::vector<double> balance_residuals() const;
  /// Histogram: entry m counts profile points covered exactly m times.
  std::vector<std::size_t> multiplicity_histogram() const;
};

/// Greedy left-to-right cover of the numeric support, followed by removal of
/// intervals whose support nodes are already covered by the others.
BalancedCover build_cover(const GridFunction& u, const ExtReal& p, const ExtReal& q,
                          const ExtReal& r);

/// p + 1 - p/r + (p/2)(-2 - 1/q + 1/r), which must vanish when 2/p = 1/r + 1/q.
Rational cover_exponent_identity(const ExtReal& p, const ExtReal& q, const ExtReal& r);

struct CoverSumBound {
  Rational exponent_identity;
  Rational holder_first;   // q/(q+r)
  Rational holder_second;  // r/(q+r)
  double lhs = 0;               // ||u'||_p^p
  double interval_sum = 0;      // sum_k int_{I_k} |u'|^p
  double two_term_sum = 0;        // sum_k (C2 (omega_k-term + alpha_k-term))^p
  double balanced_sum = 0;      // after the balance substitution, l-powers cancelled
  double holder_bound = 0;      // after Hoelder on the two sums
  double final_bound = 0;       // after the multiplicity bound
  double two_term_constant = 0;   // max_k ||u'||_{p,I_k} / (two-term interval bound)
  double substitution_residual = 0;  // |balanced_sum / two_term_sum - 1|
  int multiplicity = 0;
  double ratio = 0;  // lhs / final_bound
  bool chain_holds = false;
};

/// Follows the covering-sum chain stage by stage. Throws kExponentMismatch
/// unless 2/p = 1/r + 1/q with q finite.
CoverSumBound cover_sum_bound(const GridFunction& u, const BalancedCover& cover, const ExtReal& p,
                              const ExtReal& q, const ExtReal& r);

/// One line per interval, '#' where covered, plus a multiplicity row.
std::string render_cover_strip(const BalancedCover& cover, double lo, double hi, int width = 72);

}  // namespace gnlab
