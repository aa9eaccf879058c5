#include "gnlab/covering.hpp"

#include "gnlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gnlab {

namespace {

constexpr double kSupportThreshold = 1e-12;
constexpr double kScanRatio = 1.0905077326652577;  // 2^(1/8)
constexpr int kScanStepsPerDoubling = 8;
constexpr double kBisectionTolerance = 1e-8;

std::vector<double> powered_abs(const GridFunction& v, double exponent, bool sup) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    out[i] = sup ? a : (exponent == 2.0 ? a * a : std::pow(a, exponent));
  }
  return out;
}

void require_one_dimensional(const GridFunction& u) {
  if (u.dim() != 1) fail(ErrorCode::kInvalidArgument, "balanced covers are one-dimensional");
}

}  // namespace

BalanceProblem::BalanceProblem(const GridFunction& u, const ExtReal& p, const ExtReal& q,
                               const ExtReal& r)
    : u_(u), u2_(derivative_magnitude(u, 2).magnitude) {
  require_one_dimensional(u);
  if (p < ExtReal(1) || q < ExtReal(1) || r < ExtReal(1))
    fail(ErrorCode::kInvalidIndex, "p, q, r must be >= 1");
  q_inf_ = q.is_infinite();
  r_inf_ = r.is_infinite();
  q_ = q_inf_ ? 1.0 : q.to_double();
  r_ = r_inf_ ? 1.0 : r.to_double();
  omega_exp_ = 1.0 + p.reciprocal_double() - r.reciprocal_double();
  alpha_exp_ = -1.0 + p.reciprocal_double() - q.reciprocal_double();
  if (omega_exp_ < 0)
    fail(ErrorCode::kInvalidIndex, "omega is monotone only when 1 + 1/p - 1/r >= 0");
  u_pow_ = powered_abs(u_, q_, q_inf_);
  u2_pow_ = powered_abs(u2_, r_, r_inf_);

  const double threshold = kSupportThreshold * u_.max_abs();
  for (std::size_t i = 0; i < u_.size(); ++i)
    if (std::abs(u_[i]) > threshold) support_.push_back(i);
}

double BalanceProblem::support_lo() const {
  if (support_.empty()) fail(ErrorCode::kZeroFunction, "u vanishes identically");
  return u_.coordinate(0, support_.front());
}

double BalanceProblem::support_hi() const {
  if (support_.empty()) fail(ErrorCode::kZeroFunction, "u vanishes identically");
  return u_.coordinate(0, support_.back());
}

double BalanceProblem::window_norm(const std::vector<double>& powered, const GridFunction& base,
                                   double exponent, bool sup, double a, double b) const {
  const double lo = base.box().lo[0];
  const double h = base.spacing(0);
  const std::size_t m = base.shape()[0];
  a = std::max(a, lo);
  b = std::min(b, base.box().hi[0]);
  if (!(b > a)) fail(ErrorCode::kWindowEmpty, "window misses the grid");
  const double ta = (a - lo) / h;
  const double tb = (b - lo) / h;
  const auto first = std::min(static_cast<std::size_t>(ta), m - 2);
  const auto last = std::min(static_cast<std::size_t>(tb), m - 2);
  if (sup) {
    auto interp = [&](double t) {
      const auto c = std::min(static_cast<std::size_t>(t), m - 2);
      const double f = t - static_cast<double>(c);
      return (1.0 - f) * powered[c] + f * powered[c + 1];
    };
    double best = std::max(interp(ta), interp(tb));
    for (std::size_t i = first + 1; i <= last && i < m; ++i)
      if (static_cast<double>(i) < tb) best = std::max(best, powered[i]);
    return best;
  }
  double total = 0.0;
  for (std::size_t c = first; c <= last; ++c) {
    const double t0 = std::clamp(ta - static_cast<double>(c), 0.0, 1.0);
    const double t1 = std::clamp(tb - static_cast<double>(c), 0.0, 1.0);
    if (t1 <= t0) continue;
    const double right = 0.5 * (t1 * t1 - t0 * t0);
    total += h * (powered[c] * ((t1 - t0) - right) + powered[c + 1] * right);
  }
  return exponent == 1.0 ? total : std::pow(total, 1.0 / exponent);
}

double BalanceProblem::second_derivative_norm(double a, double b) const {
  return window_norm(u2_pow_, u2_, r_, r_inf_, a, b);
}

double BalanceProblem::function_norm(double a, double b) const {
  return window_norm(u_pow_, u_, q_, q_inf_, a, b);
}

double BalanceProblem::omega(double x, double h) const {
  if (!(h > 0)) fail(ErrorCode::kInvalidArgument, "window length must be positive");
  return std::pow(h, omega_exp_) * second_derivative_norm(x - h / 2, x + h / 2);
}

double BalanceProblem::alpha(double x, double h) const {
  if (!(h > 0)) fail(ErrorCode::kInvalidArgument, "window length must be positive");
  return std::pow(h, alpha_exp_) * function_norm(x - h / 2, x + h / 2);
}

double omega(const GridFunction& u, double x, double h, const ExtReal& p, const ExtReal& r) {
  return BalanceProblem(u, p, ExtReal(1), r).omega(x, h);
}

double alpha(const GridFunction& u, double x, double h, const ExtReal& p, const ExtReal& q) {
  return BalanceProblem(u, p, q, ExtReal(1)).alpha(x, h);
}

BalancePoint balance_at(const BalanceProblem& problem, double x) {
  const GridFunction& u = problem.function();
  if (u.max_abs() == 0.0) fail(ErrorCode::kZeroFunction, "u vanishes identically");
  auto gap = [&](double h) { return problem.omega(x, h) - problem.alpha(x, h); };

  double h = u.spacing(0);
  if (gap(h) > 0) {
    bool found = false;
    for (int i = 0; i < 40 && !found; ++i) {
      h *= 0.5;
      found = gap(h) <= 0;
    }
    if (!found) fail(ErrorCode::kNoCrossing, "omega exceeds alpha at every scanned window");
  }

  // Beyond `settled` the window holds the whole support, where omega and
  // alpha are pure powers of h and the sign of the gap can no longer change.
  const double reach = std::max(x - problem.support_lo(), problem.support_hi() - x);
  const double settled = 2.0 * reach + 2.0 * u.spacing(0);
  const double box_length = u.box().hi[0] - u.box().lo[0];
  double last_nonpositive = h;
  double first_positive = 0.0;
  int positive_run = 0;
  for (double next = h * kScanRatio;; next *= kScanRatio) {
    if (gap(next) <= 0) {
      last_nonpositive = next;
      positive_run = 0;
    } else {
      if (positive_run == 0) first_positive = next;
      ++positive_run;
    }
    const bool two_doublings = positive_run >= 2 * kScanStepsPerDoubling;
    if ((two_doublings && next >= settled) || next > 8.0 * box_length) break;
  }
  if (positive_run == 0)
    fail(ErrorCode::kNoCrossing, "omega never overtakes alpha within the box");

  double lo = last_nonpositive, hi = first_positive;
  while (hi - lo > kBisectionTolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) <= 0 ? lo : hi) = mid;
  }
  BalancePoint out;
  out.center = x;
  out.length = lo;
  out.omega = problem.omega(x, lo);
  out.alpha = problem.alpha(x, lo);
  const double scale = std::max(out.omega, out.alpha);
  out.residual = scale > 0 ? std::abs(out.omega - out.alpha) / scale : 0.0;
  return out;
}

double balancing_radius(const GridFunction& u, double x, const ExtReal& p, const ExtReal& q,
                        const ExtReal& r) {
  return balance_at(BalanceProblem(u, p, q, r), x).length;
}

std::vector<double> BalancedCover::balance_residuals() const {
  std::vector<double> out;
  out.reserve(intervals.size());
  for (const auto& interval : intervals) out.push_back(interval.residual);
  return out;
}

std::vector<std::size_t> BalancedCover::multiplicity_histogram() const {
  std::vector<std::size_t> histogram(static_cast<std::size_t>(max_multiplicity) + 1, 0);
  for (int m : multiplicity_profile) ++histogram[static_cast<std::size_t>(m)];
  return histogram;
}

namespace {

std::vector<int> overlap_profile(const std::vector<CoverInterval>& intervals, double lo,
                                 double step, std::size_t count) {
  std::vector<int> profile(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = lo + static_cast<double>(i) * step;
    for (const auto& interval : intervals) profile[i] += interval.contains(t) ? 1 : 0;
  }
  return profile;
}

}  // namespace

BalancedCover build_cover(const GridFunction& u, const ExtReal& p, const ExtReal& q,
                          const ExtReal& r) {
  require_one_dimensional(u);
  const BalanceProblem problem(u, p, q, r);
  const auto& support = problem.support_nodes();
  if (support.empty()) fail(ErrorCode::kZeroFunction, "u vanishes identically");
  auto coord = [&](std::size_t node) { return u.coordinate(0, node); };

  BalancedCover cover;
  std::vector<CoverInterval> candidates;
  for (std::size_t idx = 0; idx < support.size();) {
    const double x = coord(support[idx]);
    const BalancePoint point = balance_at(problem, x);
    const double radius = point.length / 2;
    candidates.push_back({x, radius, point.omega, point.alpha, point.residual});
    cover.max_balancing_length = std::max(cover.max_balancing_length, point.length);
    while (idx < support.size() && coord(support[idx]) < x + radius) ++idx;
  }
  cover.greedy_count = candidates.size();

  const double fine_step = u.spacing(0) / 8.0;
  const std::size_t fine_count = 8 * (u.shape()[0] - 1) + 1;
  cover.profile_lo = u.box().lo[0];
  cover.profile_step = fine_step;
  {
    const auto greedy_profile = overlap_profile(candidates, cover.profile_lo, fine_step, fine_count);
    cover.greedy_max_multiplicity = *std::max_element(greedy_profile.begin(), greedy_profile.end());
  }

  // Coverage count of each support node.
  std::vector<int> coverage(support.size(), 0);
  auto nodes_in = [&](const CoverInterval& interval) {
    auto first = std::upper_bound(support.begin(), support.end(), interval.lo(),
                                  [&](double v, std::size_t node) { return v < coord(node); });
    std::vector<std::size_t> positions;
    for (auto it = first; it != support.end() && coord(*it) < interval.hi(); ++it)
      if (interval.contains(coord(*it))) positions.push_back(static_cast<std::size_t>(it - support.begin()));
    return positions;
  };
  std::vector<std::vector<std::size_t>> members(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    members[i] = nodes_in(candidates[i]);
    for (std::size_t pos : members[i]) ++coverage[pos];
  }

  // A single pass in order of increasing length leaves a minimal family: a
  // node covered once stays covered once, so kept intervals stay needed.
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return candidates[a].radius < candidates[b].radius;
  });
  std::vector<bool> keep(candidates.size(), true);
  for (std::size_t i : order) {
    const bool redundant = std::all_of(members[i].begin(), members[i].end(),
                                       [&](std::size_t pos) { return coverage[pos] > 1; });
    if (redundant) {
      keep[i] = false;
      for (std::size_t pos : members[i]) --coverage[pos];
    }
  }
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (keep[i]) cover.intervals.push_back(candidates[i]);

  cover.covers_support = std::all_of(coverage.begin(), coverage.end(), [](int c) { return c > 0; });
  cover.multiplicity_profile = overlap_profile(cover.intervals, cover.profile_lo, fine_step, fine_count);
  cover.max_multiplicity =
      *std::max_element(cover.multiplicity_profile.begin(), cover.multiplicity_profile.end());
  for (const auto& interval : cover.intervals)
    cover.max_residual = std::max(cover.max_residual, interval.residual);

  std::size_t peak = 0;
  for (std::size_t i = 1; i < u.size(); ++i)
    if (std::abs(u[i]) > std::abs(u[peak])) peak = i;
  cover.r0 = balance_at(problem, coord(peak)).length;
  cover.support_diameter = problem.support_hi() - problem.support_lo();
  cover.radius_bound = 2.0 * std::max(cover.r0, cover.support_diameter);
  return cover;
}

Rational cover_exponent_identity(const ExtReal& p, const ExtReal& q, const ExtReal& r) {
  if (p.is_infinite()) fail(ErrorCode::kExponentMismatch, "p must be finite");
  const Rational& pv = p.value();
  return pv + 1 - pv * r.reciprocal() + pv / 2 * (-2 - q.reciprocal() + r.reciprocal());
}

CoverSumBound cover_sum_bound(const GridFunction& u, const BalancedCover& cover, const ExtReal& p,
                              const ExtReal& q, const ExtReal& r) {
  require_one_dimensional(u);
  if (p.is_infinite() || q.is_infinite() || r.is_infinite())
    fail(ErrorCode::kExponentMismatch, "the covering sum needs finite p, q, r");
  if (2 * p.reciprocal() != r.reciprocal() + q.reciprocal())
    fail(ErrorCode::kExponentMismatch, "2/p != 1/r + 1/q");
  if (cover.intervals.empty()) fail(ErrorCode::kInvalidArgument, "empty cover");

  CoverSumBound out;
  out.exponent_identity = cover_exponent_identity(p, q, r);
  const Rational& qv = q.value();
  const Rational& rv = r.value();
  out.holder_first = qv / (qv + rv);
  out.holder_second = rv / (qv + rv);
  out.multiplicity = cover.max_multiplicity;

  const double pd = p.to_double(), qd = q.to_double(), rd = r.to_double();
  const BalanceProblem problem(u, p, q, r);
  const GridFunction u1 = partial_derivative(u, 0);

  out.lhs = lp_integral(u1, pd);
  std::vector<double> local_grad(cover.intervals.size()), two_term(cover.intervals.size());
  double sum_second = 0.0, sum_function = 0.0, balanced = 0.0;
  for (std::size_t k = 0; k < cover.intervals.size(); ++k) {
    const auto& interval = cover.intervals[k];
    const double l = interval.length();
    const double grad_p = lp_integral(u1, pd, Box{{interval.lo()}, {interval.hi()}});
    const double second = problem.second_derivative_norm(interval.lo(), interval.hi());
    const double function = problem.function_norm(interval.lo(), interval.hi());
    out.interval_sum += grad_p;
    local_grad[k] = std::pow(grad_p, 1.0 / pd);
    two_term[k] = std::pow(l, problem.omega_exponent()) * second +
                std::pow(l, problem.alpha_exponent()) * function;
    out.two_term_constant = std::max(out.two_term_constant, local_grad[k] / two_term[k]);
    const double second_r = std::pow(second, rd);
    const double function_q = std::pow(function, qd);
    sum_second += second_r;
    sum_function += function_q;
    balanced += std::pow(second_r, to_double(out.holder_first)) *
                std::pow(function_q, to_double(out.holder_second));
  }
  // With balance, each two-term bound is 2 l^(1+1/p-1/r) ||u''||.
  const double tracked = std::pow(2.0 * out.two_term_constant, pd);
  for (double bound : two_term) out.two_term_sum += std::pow(out.two_term_constant * bound, pd);
  out.balanced_sum = tracked * balanced;
  out.substitution_residual = std::abs(out.balanced_sum / out.two_term_sum - 1.0);
  out.holder_bound = tracked * std::pow(sum_second, to_double(out.holder_first)) *
                     std::pow(sum_function, to_double(out.holder_second));
  const double mu = static_cast<double>(out.multiplicity);
  out.final_bound = tracked * std::pow(mu * lp_integral(problem.second_derivative(), rd),
                                       to_double(out.holder_first)) *
                    std::pow(mu * lp_integral(u, qd), to_double(out.holder_second));
  out.ratio = out.lhs / out.final_bound;

  const double slack = 1e-9;
  const double sub = 10.0 * cover.max_residual * pd + slack;
  out.chain_holds = out.exponent_identity == 0 && out.lhs <= out.interval_sum * (1 + slack) &&
                    out.interval_sum <= out.two_term_sum * (1 + slack) &&
                    out.substitution_residual <= sub &&
                    out.balanced_sum <= out.holder_bound * (1 + slack) &&
                    out.holder_bound <= out.final_bound * (1 + slack) && out.ratio <= 1.0 + sub;
  return out;
}

std::string render_cover_strip(const BalancedCover& cover, double lo, double hi, int width) {
  std::ostringstream out;
  const double step = (hi - lo) / width;
  for (const auto& interval : cover.intervals) {
    std::string row(static_cast<std::size_t>(width), '.');
    for (int c = 0; c < width; ++c)
      if (interval.contains(lo + (c + 0.5) * step)) row[static_cast<std::size_t>(c)] = '#';
    const double col = std::floor((interval.center - lo) / step);
    if (col >= 0 && col < width) row[static_cast<std::size_t>(col)] = '#';
    out << row << '\n';
  }
  std::string counts(static_cast<std::size_t>(width), '0');
  for (int c = 0; c < width; ++c) {
    int m = 0;
    for (const auto& interval : cover.intervals) m += interval.contains(lo + (c + 0.5) * step);
    counts[static_cast<std::size_t>(c)] = static_cast<char>('0' + std::min(m, 9));
  }
  out << counts << '\n';
  return out.str();
}

}  // namespace gnlab
