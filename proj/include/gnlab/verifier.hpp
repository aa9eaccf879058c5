#pragma once

// Measured versions of each inequality in the Gagliardo-Nirenberg chain:
// ratios of left to right sides on sampled functions, empirical constants
// over function families, and dilation slopes.
//
// Empirical constants are suprema over the finite family that was swept. They
// are lower bounds for the best constant and are never reported as optimal.

#include "gnlab/exponents.hpp"
#include "gnlab/gridfn.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gnlab {

/// Caches |grad^k u| by order; order 0 is |u|.
class DerivativeCache {
 public:
  explicit DerivativeCache(const GridFunction& u) : u_(u) {}
  const GridFunction& magnitude(int order);
  double norm(int order, const ExtReal& exp) { return lp_norm(magnitude(order), exp); }
  const GridFunction& function() const { return u_; }

 private:
  const GridFunction& u_;
  std::map<int, GridFunction> fields_;
};

struct RatioRow {
  std::string label;
  double s = 1.0;
  double ratio = 0.0;
};

struct SlopeFit {
  std::vector<double> s_values;
  std::vector<double> log_ratios;
  std::vector<double> discarded_s;
  double slope = 0.0;
  double intercept = 0.0;
  Rational deficit;
};

struct VerificationReport {
  std::string case_id;
  std::string family_description;
  std::vector<RatioRow> rows;
  std::optional<double> estimated_constant;
  std::string argmax;
  std::optional<SlopeFit> slope;
  std::map<std::string, bool> flags;
  std::map<std::string, double> values;
  std::map<std::string, std::string> exact;
  std::map<std::string, double> refinement_deltas;
  std::vector<std::string> warnings;

  void add_ratio(std::string label, double ratio, double s = 1.0);
  double ratio_min() const;
  double ratio_max() const;
  double ratio_mean() const;
  /// True when every flag is set.
  bool passed() const;
  /// Flags GRID_UNCONVERGED unless every refinement delta is below `tolerance`.
  void check_refinement(double tolerance = 1e-3);
};

// --- Mean approximation --------------------------------------------------------

struct MeanApprox {
  double ratio = 1.0;
  double mean = 0.0;
  double best_constant = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
  bool degenerate = false;  // constant on the region: 0/0 reported as 1
};

/// ||u - u_M||_{p,M} / inf_c ||u - c||_{p,M}, the infimum by golden-section
/// search (the map c -> ||u - c|| is convex). For p = inf the sup is that of
/// the multilinear interpolant over the region and the minimizer is its
/// midrange. The discrete measure is the quadrature one, so the bound 2 is
/// exact, not asymptotic.
MeanApprox mean_approx_ratio(const GridFunction& u, const std::optional<Box>& region,
                             const ExtReal& p);

// --- One-dimensional ratios --------------------------------------------------

/// ||u'||_{p,I} / (l^(1+1/p-1/r) ||u''||_{r,I} + l^(-1+1/p-1/q) ||u||_{q,I}), I = (a, b).
double interval_inequality_ratio(const GridFunction& u, double a, double b, const ExtReal& p,
                                 const ExtReal& q, const ExtReal& r);

/// ||u'||_p^2 / (||u''||_r ||u||_q). Throws kExponentMismatch unless 2/p = 1/r + 1/q.
double line_ratio(const GridFunction& u, const ExtReal& p, const ExtReal& q, const ExtReal& r);

// --- GN(2,1) in n dimensions ---------------------------------------------------

/// Quantities of the split x = (x', x_n) used to pass from n-1 to n dimensions.
struct DimensionSplit {
  bool available = false;
  double grad_prime_p = 0;      // int |u_x'|^p
  double grad_last_p = 0;       // int |u_xn|^p
  double slice_prime = 0;       // int ||u_x'x'||_{r,x'}^(p/2) ||u||_{q,x'}^(p/2) dx_n
  double slice_last = 0;        // int ||u_xnxn||_{r,xn}^(p/2) ||u||_{q,xn}^(p/2) dx'
  double holder_prime = 0;      // (int ||u_x'x'||^r dx_n)^(p/2r) (int ||u||^q dx_n)^(p/2q)
  double holder_last = 0;
  double fubini_prime = 0;      // int ||u||_{q,x'}^q dx_n
  double fubini_last = 0;       // int ||u||_{q,xn}^q dx'
  double full_q = 0;            // ||u||_q^q
  double pointwise_excess = 0;  // max(|u_x'x'|, |u_xnxn|) - |grad^2 u|, should be <= 0
};

struct Gn21Result {
  double ratio = 0;
  double grad_p = 0;
  double hessian_r = 0;
  double function_q = 0;
  DimensionSplit split;
};

/// ||grad u||_p^2 / (||grad^2 u||_r ||u||_q). Throws kExponentMismatch unless
/// 2/p = 1/q + 1/r.
Gn21Result gn21_ratio(const GridFunction& u, const ExtReal& p, const ExtReal& q, const ExtReal& r);

// --- General ratios -------------------------------------------------------------

struct RatioSample {
  std::optional<FamilySpec> family;
  GNParams params;
  double lhs = 0;
  std::vector<double> rhs_factors;  // ||grad^k u||_r, ||u||_q
  std::vector<double> powers;       // theta, 1 - theta
  double ratio = 0;
};

/// ||grad^j u||_p / (||grad^k u||_r^theta ||u||_q^(1-theta)) for whatever p
/// the params carry; no admissibility check.
RatioSample inequality_ratio(const GridFunction& u, const GNParams& params);
RatioSample inequality_ratio(DerivativeCache& cache, const GNParams& params);

/// As inequality_ratio, but throws kInadmissibleParams unless check_admissible
/// accepts; p is solved when unset.
RatioSample gn_ratio(const GridFunction& u, const GNParams& params);

/// lhs norm / prod factor norms^power, constants excluded.
double record_ratio(DerivativeCache& cache, const InequalityRecord& record);

// --- Sweeps ------------------------------------------------------------------

struct ConstantSweep {
  std::vector<FamilySpec> members;
  std::vector<double> dilations{1.0};
  GridSpec grid;
  bool refine = true;
  int restarts = 3;
  std::uint64_t seed = 0;
  int max_evaluations = 400;
};

/// sup of gn_ratio over members x dilations, then a coordinate search with
/// shrinking steps over the shape parameters of the best member. Candidates
/// that hit the box edge or span fewer than 8 cells per feature are rejected.
VerificationReport estimate_constant(const ConstantSweep& sweep, const GNParams& params);

struct SharpnessOptions {
  /// Evaluate every dilate on the original grid instead of the scaled box;
  /// dilates that no longer decay at the edge are discarded.
  bool fixed_box = false;
  double relative_tolerance = 0.05;
  double zero_tolerance = 5e-3;
};

/// Least-squares slope of log R(T_s u) against log s, compared with the exact
/// scaling deficit of the params (p must be set).
VerificationReport sharpness_scan(const FamilySpec& family, const GridSpec& grid,
                                  const GNParams& params, const std::vector<double>& s_values,
                                  const SharpnessOptions& options = {});

std::vector<double> log_spaced(double lo, double hi, int count);

// --- Modular form ---------------------------------------------------------------

struct ModularCheck {
  double lhs_integral = 0;       // int_I |u'|^p
  double function_term = 0;      // lambda^(-p) int |u|^q
  double second_term = 0;        // lambda^(2r-p) int |u''|^r
  double constant_term = 0;      // lambda^(1-p)
  double three_term_c = 0;
  double two_term_c = 0;         // ||u'||/(l^(2r/p-1)||u''||^(r/p) + l^-1 ||u||^(q/p))
  double two_term_min_c = 0;     // two_term_c at the window length minimizing its denominator
  double merged_c = 0;           // ||u'|| / (||u''||^e1 ||u||^e2), +inf when u'' = 0
  Rational merged_second_exp;    // e1
  Rational merged_function_exp;  // e2
  bool homogeneous = false;      // e1 + e2 == 1
  std::vector<double> t_values;
  std::vector<double> three_term_c_by_t;
  std::vector<double> two_term_c_by_t;
  std::vector<double> two_term_min_c_by_t;
  std::vector<double> optimal_length_by_t;
  std::vector<double> merged_c_by_t;
  double two_term_min_spread = 0;  // max relative deviation of two_term_min_c over t
  double merged_spread = 0;        // max relative deviation of merged_c over t
  bool third_term_droppable = false;
};

/// Evaluates the modular three-term form on (a, a + length) together with its
/// homogenized two-term and merged single-term versions for each scale t.
ModularCheck gagliardo_modular_check(const GridFunction& u, double a, double length,
                                     const ExtReal& p, const ExtReal& q, const ExtReal& r,
                                     const std::vector<double>& t_values = {1.0, 10.0, 100.0});

// --- Induction chain ------------------------------------------------------------

struct ChainCheck {
  InequalityRecord outer;    // GN(2,1): ||grad u||_p <= C21 ||grad^2 u||_p~^(1/2) ||u||_q^(1/2)
  InequalityRecord inner;    // GN(k,1) on grad u
  InequalityRecord chained;  // GN(k+1,1)
  double outer_constant = 0;
  double inner_constant = 0;
  double implied_constant = 0;
  std::vector<double> direct_ratios;
  std::vector<double> identity_residuals;  // |direct - outer^a inner^b| / direct per function
  bool dominated = false;
};

/// Measures the two constants over the members, chains them through the
/// record algebra and checks the implied GN(k+1,1) bound against direct ratios.
ChainCheck induction_chain_check(const std::vector<FamilySpec>& members, const GridSpec& grid,
                                 int k, const ExtReal& q, const ExtReal& r);

/// |f(refined) - f(grid)| / |f(grid)|.
template <typename Fn>
double refinement_delta(Fn&& evaluate, const GridSpec& grid) {
  const double coarse = evaluate(grid);
  const double fine = evaluate(grid.refined());
  return std::abs(fine - coarse) / std::abs(coarse);
}

}  // namespace gnlab
