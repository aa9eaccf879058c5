#include "gnlab/verifier.hpp"

#include "gnlab/error.hpp"
#include "gnlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace gnlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct WeightedValue {
  double weight;
  double value;
};

// Nodes carrying nonzero quadrature weight on the region, with that weight.
std::vector<WeightedValue> weighted_nodes(const GridFunction& u, const std::optional<Box>& region) {
  const std::size_t dim = u.dim();
  std::vector<std::vector<double>> weights(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    const double lo = region ? region->lo[a] : u.box().lo[a];
    const double hi = region ? region->hi[a] : u.box().hi[a];
    if (!(hi > lo)) fail(ErrorCode::kEmptyRegion, "region has zero volume");
    weights[a] = axis_weights(u, a, lo, hi);
  }
  std::vector<WeightedValue> out;
  for (std::size_t flat = 0; flat < u.size(); ++flat) {
    double w = 1.0;
    for (std::size_t a = 0; a < dim && w != 0.0; ++a) w *= weights[a][(flat / u.stride(a)) % u.shape()[a]];
    if (w != 0.0) out.push_back({w, u[flat]});
  }
  if (out.empty()) fail(ErrorCode::kEmptyRegion, "region misses the grid");
  return out;
}

// Multilinear interpolant of u at the tensor set formed, per axis, by the
// region bounds and the nodes between them. Its extremes over the region are
// attained on this set.
std::vector<double> region_vertex_values(const GridFunction& u, const std::optional<Box>& region) {
  const std::size_t dim = u.dim();
  std::vector<std::vector<double>> positions(dim);  // fractional node index
  for (std::size_t a = 0; a < dim; ++a) {
    const double lo = std::max(region ? region->lo[a] : u.box().lo[a], u.box().lo[a]);
    const double hi = std::min(region ? region->hi[a] : u.box().hi[a], u.box().hi[a]);
    if (!(hi > lo)) fail(ErrorCode::kEmptyRegion, "region misses the grid");
    const double t_lo = (lo - u.box().lo[a]) / u.spacing(a), t_hi = (hi - u.box().lo[a]) / u.spacing(a);
    positions[a].push_back(t_lo);
    for (double i = std::floor(t_lo) + 1; i < t_hi; ++i) positions[a].push_back(i);
    positions[a].push_back(t_hi);
  }
  std::size_t total = 1;
  for (const auto& axis : positions) total *= axis.size();
  std::vector<double> values(total);
  std::vector<std::size_t> index(dim, 0);
  for (std::size_t v = 0; v < total; ++v) {
    double value = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t{1} << dim); ++corner) {
      double weight = 1.0;
      std::size_t flat = 0;
      for (std::size_t a = 0; a < dim && weight != 0.0; ++a) {
        const double t = positions[a][index[a]];
        const auto base = std::min(static_cast<std::size_t>(t), u.shape()[a] - 2);
        const double frac = t - static_cast<double>(base);
        const bool upper = (corner >> a) & 1U;
        weight *= upper ? frac : 1.0 - frac;
        flat += (base + (upper ? 1 : 0)) * u.stride(a);
      }
      if (weight != 0.0) value += weight * u[flat];
    }
    values[v] = value;
    for (std::size_t a = dim; a-- > 0;) {
      if (++index[a] < positions[a].size()) break;
      index[a] = 0;
    }
  }
  return values;
}

double sup_deviation(const std::vector<double>& values, double c) {
  double best = 0.0;
  for (double v : values) best = std::max(best, std::abs(v - c));
  return best;
}

double weighted_deviation(const std::vector<WeightedValue>& nodes, double c, const ExtReal& p) {
  const double pd = p.to_double();
  double total = 0.0;
  for (const auto& node : nodes) total += node.weight * std::pow(std::abs(node.value - c), pd);
  return std::pow(total, 1.0 / pd);
}

void require_balance_link(const ExtReal& p, const ExtReal& q, const ExtReal& r) {
  if (2 * p.reciprocal() != q.reciprocal() + r.reciprocal())
    fail(ErrorCode::kExponentMismatch, "need 2/p = 1/q + 1/r, got p=" + to_string(p) +
                                           " q=" + to_string(q) + " r=" + to_string(r));
}

// Outer index of each node when the axes in `inner` are integrated out.
std::vector<double> slice_integrals(const GridFunction& f, double power,
                                    const std::vector<std::size_t>& inner,
                                    const std::vector<std::size_t>& outer,
                                    std::vector<double>& outer_weights) {
  std::vector<std::vector<double>> weights(f.dim());
  for (std::size_t a = 0; a < f.dim(); ++a) weights[a] = axis_weights(f, a, f.box().lo[a], f.box().hi[a]);
  std::size_t outer_count = 1;
  for (std::size_t a : outer) outer_count *= f.shape()[a];
  std::vector<double> slices(outer_count, 0.0);
  outer_weights.assign(outer_count, 1.0);
  std::vector<bool> filled(outer_count, false);
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    std::size_t key = 0;
    double wo = 1.0;
    for (std::size_t a : outer) {
      const std::size_t i = (flat / f.stride(a)) % f.shape()[a];
      key = key * f.shape()[a] + i;
      wo *= weights[a][i];
    }
    double wi = 1.0;
    for (std::size_t a : inner) wi *= weights[a][(flat / f.stride(a)) % f.shape()[a]];
    slices[key] += wi * std::pow(std::abs(f[flat]), power);
    if (!filled[key]) {
      outer_weights[key] = wo;
      filled[key] = true;
    }
  }
  return slices;
}

}  // namespace

// ---------------------------------------------------------------------------

const GridFunction& DerivativeCache::magnitude(int order) {
  if (order == 0) return u_;
  auto it = fields_.find(order);
  if (it == fields_.end())
    it = fields_.emplace(order, derivative_magnitude(u_, order).magnitude).first;
  return it->second;
}

void VerificationReport::add_ratio(std::string label, double ratio, double s) {
  rows.push_back({std::move(label), s, ratio});
}

double VerificationReport::ratio_min() const {
  double best = kInf;
  for (const auto& row : rows) best = std::min(best, row.ratio);
  return rows.empty() ? 0.0 : best;
}

double VerificationReport::ratio_max() const {
  double best = -kInf;
  for (const auto& row : rows) best = std::max(best, row.ratio);
  return rows.empty() ? 0.0 : best;
}

double VerificationReport::ratio_mean() const {
  if (rows.empty()) return 0.0;
  double total = 0.0;
  for (const auto& row : rows) total += row.ratio;
  return total / static_cast<double>(rows.size());
}

bool VerificationReport::passed() const {
  return std::all_of(flags.begin(), flags.end(), [](const auto& kv) { return kv.second; });
}

void VerificationReport::check_refinement(double tolerance) {
  bool converged = true;
  for (const auto& [name, delta] : refinement_deltas) converged = converged && delta < tolerance;
  flags["grid_converged"] = converged;
  if (!converged) warnings.push_back(std::string(error_name(ErrorCode::kGridUnconverged)));
}

// ---------------------------------------------------------------------------

MeanApprox mean_approx_ratio(const GridFunction& u, const std::optional<Box>& region,
                             const ExtReal& p) {
  if (p < ExtReal(1)) fail(ErrorCode::kInvalidIndex, "p must be >= 1");
  const auto nodes = weighted_nodes(u, region);
  double mass = 0.0, total = 0.0;
  double lo = kInf, hi = -kInf;
  for (const auto& node : nodes) {
    mass += node.weight;
    total += node.weight * node.value;
    lo = std::min(lo, node.value);
    hi = std::max(hi, node.value);
  }
  MeanApprox out;
  out.mean = total / mass;
  std::vector<double> vertices;
  if (p.is_infinite()) {
    vertices = region_vertex_values(u, region);
    lo = *std::min_element(vertices.begin(), vertices.end());
    hi = *std::max_element(vertices.begin(), vertices.end());
  }
  if (hi - lo <= 1e-14 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)))) {
    out.degenerate = true;
    out.best_constant = out.mean;
    return out;
  }
  if (p.is_infinite()) {
    out.best_constant = 0.5 * (lo + hi);
    out.numerator = sup_deviation(vertices, out.mean);
    out.denominator = sup_deviation(vertices, out.best_constant);
    out.ratio = out.numerator / out.denominator;
    return out;
  }
  // Golden-section search; the minimizer lies in [min u, max u].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = weighted_deviation(nodes, c, p), fd = weighted_deviation(nodes, d, p);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * (hi - lo); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = weighted_deviation(nodes, c, p);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = weighted_deviation(nodes, d, p);
    }
  }
  out.best_constant = 0.5 * (a + b);
  // The mean itself is a candidate; keeps the ratio >= 1 at round-off level.
  if (weighted_deviation(nodes, out.mean, p) < weighted_deviation(nodes, out.best_constant, p))
    out.best_constant = out.mean;
  out.numerator = weighted_deviation(nodes, out.mean, p);
  out.denominator = weighted_deviation(nodes, out.best_constant, p);
  out.ratio = out.numerator / out.denominator;
  return out;
}

double interval_inequality_ratio(const GridFunction& u, double a, double b, const ExtReal& p,
                                 const ExtReal& q, const ExtReal& r) {
  if (u.dim() != 1) fail(ErrorCode::kInvalidArgument, "interval ratio is one-dimensional");
  if (!(b > a)) fail(ErrorCode::kEmptyRegion, "empty interval");
  const Box window{{a}, {b}};
  const double l = b - a;
  const double grad = lp_norm(partial_derivative(u, 0), p, window);
  const double second = lp_norm(derivative_magnitude(u, 2), r, window);
  const double function = lp_norm(u, q, window);
  const double omega_exp = 1.0 + p.reciprocal_double() - r.reciprocal_double();
  const double alpha_exp = -1.0 + p.reciprocal_double() - q.reciprocal_double();
  return grad / (std::pow(l, omega_exp) * second + std::pow(l, alpha_exp) * function);
}

double line_ratio(const GridFunction& u, const ExtReal& p, const ExtReal& q, const ExtReal& r) {
  if (u.dim() != 1) fail(ErrorCode::kInvalidArgument, "line ratio is one-dimensional");
  require_balance_link(p, q, r);
  DerivativeCache cache(u);
  const double grad = cache.norm(1, p);
  return grad * grad / (cache.norm(2, r) * cache.norm(0, q));
}

Gn21Result gn21_ratio(const GridFunction& u, const ExtReal& p, const ExtReal& q, const ExtReal& r) {
  require_balance_link(p, q, r);
  DerivativeCache cache(u);
  Gn21Result out;
  out.grad_p = cache.norm(1, p);
  out.hessian_r = cache.norm(2, r);
  out.function_q = cache.norm(0, q);
  out.ratio = out.grad_p * out.grad_p / (out.hessian_r * out.function_q);

  const std::size_t n = u.dim();
  if (n < 2 || p.is_infinite() || q.is_infinite() || r.is_infinite()) return out;
  const double pd = p.to_double(), qd = q.to_double(), rd = r.to_double();
  std::vector<std::size_t> prime(n - 1);
  std::iota(prime.begin(), prime.end(), std::size_t{0});
  const std::vector<std::size_t> last{n - 1};

  const GridFunction grad_prime = derivative_magnitude(u, 1, prime).magnitude;
  const GridFunction grad_last = derivative_magnitude(u, 1, last).magnitude;
  const GridFunction hess_prime = derivative_magnitude(u, 2, prime).magnitude;
  const GridFunction hess_last = derivative_magnitude(u, 2, last).magnitude;
  const GridFunction& hess = cache.magnitude(2);

  DimensionSplit& split = out.split;
  split.available = true;
  split.grad_prime_p = lp_integral(grad_prime, pd);
  split.grad_last_p = lp_integral(grad_last, pd);
  split.full_q = lp_integral(u, qd);
  split.pointwise_excess = -kInf;
  for (std::size_t i = 0; i < u.size(); ++i)
    split.pointwise_excess =
        std::max(split.pointwise_excess, std::max(hess_prime[i], hess_last[i]) - hess[i]);

  auto side = [&](const GridFunction& second, const std::vector<std::size_t>& inner,
                  const std::vector<std::size_t>& outer, double& slice, double& holder,
                  double& fubini) {
    std::vector<double> weights;
    const auto second_r = slice_integrals(second, rd, inner, outer, weights);
    const auto function_q = slice_integrals(u, qd, inner, outer, weights);
    double sum_second = 0.0;
    fubini = 0.0;
    slice = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      sum_second += weights[i] * second_r[i];
      fubini += weights[i] * function_q[i];
      slice += weights[i] * std::pow(second_r[i], pd / (2 * rd)) * std::pow(function_q[i], pd / (2 * qd));
    }
    holder = std::pow(sum_second, pd / (2 * rd)) * std::pow(fubini, pd / (2 * qd));
  };
  side(hess_prime, prime, last, split.slice_prime, split.holder_prime, split.fubini_prime);
  side(hess_last, last, prime, split.slice_last, split.holder_last, split.fubini_last);
  return out;
}

RatioSample inequality_ratio(DerivativeCache& cache, const GNParams& params) {
  RatioSample out;
  out.params = params;
  out.family = cache.function().family();
  const ExtReal& p = params.p_or_throw();
  const double theta = to_double(params.theta);
  out.lhs = cache.norm(params.j, p);
  out.rhs_factors = {cache.norm(params.k, params.r), cache.norm(0, params.q)};
  out.powers = {theta, 1.0 - theta};
  double rhs = 1.0;
  for (std::size_t i = 0; i < out.powers.size(); ++i)
    if (out.powers[i] != 0.0) rhs *= std::pow(out.rhs_factors[i], out.powers[i]);
  out.ratio = out.lhs / rhs;
  return out;
}

RatioSample inequality_ratio(const GridFunction& u, const GNParams& params) {
  DerivativeCache cache(u);
  return inequality_ratio(cache, params);
}

RatioSample gn_ratio(const GridFunction& u, const GNParams& params) {
  const auto verdict = check_admissible(params);
  if (!verdict.admissible)
    fail(ErrorCode::kInadmissibleParams,
         std::string(reason_name(verdict.reason)) + ": " + verdict.detail);
  for (std::size_t a = 0; a < u.dim(); ++a)
    if (u.shape()[a] < static_cast<std::size_t>(4 * params.k + 4))
      fail(ErrorCode::kGridTooCoarse, "grid too coarse for order " + std::to_string(params.k));
  return inequality_ratio(u, params.p ? params : params.with_solved_p());
}

double record_ratio(DerivativeCache& cache, const InequalityRecord& record) {
  double rhs = 1.0;
  for (const auto& factor : record.factors)
    rhs *= std::pow(cache.norm(factor.order, factor.norm_exp), to_double(factor.power));
  return cache.norm(record.lhs_order, record.lhs_exp) / rhs;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kMinCellsPerFeature = 8.0;

std::string describe(const FamilySpec& spec, double s) {
  std::ostringstream out;
  out << family_name(spec.kind) << "[";
  for (std::size_t i = 0; i < spec.shape_params.size(); ++i)
    out << (i ? "," : "") << spec.shape_params[i];
  out << "] s=" << s;
  return out.str();
}

// Shortest length scale of the member, in grid cells.
double cells_per_feature(const FamilySpec& spec, const GridFunction& sampled) {
  double feature = spec.shape_params[0];
  if (spec.kind == FamilyKind::kGaussian) {
    const std::size_t widths = spec.shape_params.size() == 3 ? 2 : spec.shape_params.size();
    for (std::size_t i = 0; i < widths; ++i) feature = std::min(feature, spec.shape_params[i]);
  }
  if (spec.kind == FamilyKind::kSineBump) feature = std::min(feature, 1.0 / std::abs(spec.shape_params[1]));
  return feature / sampled.max_spacing();
}

}  // namespace

VerificationReport estimate_constant(const ConstantSweep& sweep, const GNParams& params) {
  const auto verdict = check_admissible(params);
  if (!verdict.admissible)
    fail(ErrorCode::kInadmissibleParams,
         std::string(reason_name(verdict.reason)) + ": " + verdict.detail);
  if (sweep.members.empty()) fail(ErrorCode::kInvalidArgument, "empty family sweep");
  const GNParams solved = params.p ? params : params.with_solved_p();

  VerificationReport report;
  report.case_id = "estimate_constant";
  double best = -kInf;
  FamilySpec best_member = sweep.members.front();
  double best_s = 1.0;
  const std::size_t per_member = sweep.dilations.size();
  std::vector<double> ratios(sweep.members.size() * per_member);
  std::vector<char> edge(sweep.members.size(), 0);
  parallel_for(sweep.members.size(), [&](std::size_t m) {
    const GridFunction base = sample_family(sweep.members[m], sweep.grid);
    edge[m] = base.edge_warning();
    for (std::size_t d = 0; d < per_member; ++d)
      ratios[m * per_member + d] = gn_ratio(dilate(base, sweep.dilations[d]), solved).ratio;
  });
  for (std::size_t m = 0; m < sweep.members.size(); ++m) {
    const auto& member = sweep.members[m];
    if (edge[m]) report.warnings.push_back("edge decay: " + describe(member, 1.0));
    for (std::size_t d = 0; d < per_member; ++d) {
      const double s = sweep.dilations[d];
      const double ratio = ratios[m * per_member + d];
      report.add_ratio(describe(member, s), ratio, s);
      if (ratio > best) {
        best = ratio;
        best_member = member;
        best_s = s;
      }
    }
  }
  report.values["sweep_sup"] = best;
  report.argmax = describe(best_member, best_s);

  if (sweep.refine) {
    auto evaluate = [&](const std::vector<double>& shape_params) {
      FamilySpec candidate = best_member;
      candidate.shape_params = shape_params;
      try {
        const GridFunction sampled = sample_family(candidate, sweep.grid);
        if (sampled.edge_warning() || cells_per_feature(candidate, sampled) < kMinCellsPerFeature)
          return -kInf;
        return gn_ratio(dilate(sampled, best_s), solved).ratio;
      } catch (const Error&) {
        return -kInf;
      }
    };
    std::mt19937_64 rng(sweep.seed);
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    double refined_best = best;
    std::vector<double> refined_params = best_member.shape_params;
    bool converged_all = true;
    int evaluations = 0;
    for (int restart = 0; restart < sweep.restarts; ++restart) {
      std::vector<double> x = best_member.shape_params;
      if (restart > 0)
        for (double& v : x) v *= 1.0 + jitter(rng);
      double fx = evaluate(x);
      ++evaluations;
      std::vector<double> scale(x.size());
      std::vector<double> step(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        scale[i] = std::max(std::abs(x[i]), 0.1);
        step[i] = 0.25 * scale[i];
      }
      int budget = sweep.max_evaluations;
      auto small = [&] {
        for (std::size_t i = 0; i < x.size(); ++i)
          if (step[i] >= 1e-3 * scale[i]) return false;
        return true;
      };
      while (!small() && budget > 0) {
        bool improved = false;
        for (std::size_t i = 0; i < x.size() && budget > 0; ++i) {
          for (double dir : {1.0, -1.0}) {
            std::vector<double> trial = x;
            trial[i] += dir * step[i];
            const double ft = evaluate(trial);
            --budget;
            ++evaluations;
            if (ft > fx) {
              x = trial;
              fx = ft;
              improved = true;
              break;
            }
          }
        }
        if (!improved)
          for (double& st : step) st *= 0.5;
      }
      converged_all = converged_all && small();
      if (fx > refined_best) {
        refined_best = fx;
        refined_params = x;
      }
    }
    report.values["refined_sup"] = refined_best;
    report.values["evaluations"] = evaluations;
    report.flags["refinement_converged"] = converged_all;
    if (refined_best > best) {
      FamilySpec refined = best_member;
      refined.shape_params = refined_params;
      report.argmax = describe(refined, best_s) + " (refined)";
      best = refined_best;
    }
  }
  report.estimated_constant = best;
  std::ostringstream family;
  family << sweep.members.size() << " members x " << sweep.dilations.size() << " dilations";
  report.family_description = family.str();
  report.flags["constant_finite"] = std::isfinite(best);
  report.flags["constant_dominates_ratios"] = best >= report.ratio_max();
  return report;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0) || !(hi > lo) || count < 2)
    fail(ErrorCode::kInvalidArgument, "log_spaced needs 0 < lo < hi and count >= 2");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  return out;
}

VerificationReport sharpness_scan(const FamilySpec& family, const GridSpec& grid,
                                  const GNParams& params, const std::vector<double>& s_values,
                                  const SharpnessOptions& options) {
  if (s_values.size() < 5) fail(ErrorCode::kInvalidArgument, "need at least 5 dilation factors");
  VerificationReport report;
  report.case_id = "sharpness_scan";
  report.family_description = describe(family, 1.0);
  SlopeFit fit;
  fit.deficit = scaling_deficit(params);

  const GridFunction base = sample_family(family, grid);
  for (double s : s_values) {
    GridFunction v = options.fixed_box ? sample_family(family.dilated(s), grid) : dilate(base, s);
    if (v.edge_warning()) {
      fit.discarded_s.push_back(s);
      continue;
    }
    const double ratio = inequality_ratio(v, params).ratio;
    report.add_ratio("s", ratio, s);
    fit.s_values.push_back(s);
    fit.log_ratios.push_back(std::log(ratio));
  }
  const std::size_t count = fit.s_values.size();
  if (count < 5) fail(ErrorCode::kInvalidArgument, "fewer than 5 usable dilation factors");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < count; ++i) {
    mx += std::log(fit.s_values[i]);
    my += fit.log_ratios[i];
  }
  mx /= static_cast<double>(count);
  my /= static_cast<double>(count);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double dx = std::log(fit.s_values[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (fit.log_ratios[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;

  const double deficit = to_double(fit.deficit);
  report.values["slope"] = fit.slope;
  report.values["deficit"] = deficit;
  report.exact["deficit"] = to_string(fit.deficit);
  if (fit.deficit == 0) {
    report.flags["slope_matches_deficit"] = std::abs(fit.slope) <= options.zero_tolerance;
  } else {
    report.values["relative_error"] = std::abs(fit.slope - deficit) / std::abs(deficit);
    report.flags["slope_matches_deficit"] =
        std::abs(fit.slope - deficit) <= options.relative_tolerance * std::abs(deficit);
  }
  if (!fit.discarded_s.empty())
    report.warnings.push_back(std::to_string(fit.discarded_s.size()) +
                              " dilation factors discarded near the box edge");
  report.slope = std::move(fit);
  return report;
}

// ---------------------------------------------------------------------------

namespace {

double relative_spread(const std::vector<double>& values) {
  const double base = values.front();
  if (!std::isfinite(base) || base == 0) return kInf;
  double spread = 0;
  for (double v : values) spread = std::max(spread, std::abs(v / base - 1.0));
  return spread;
}

}  // namespace

ModularCheck gagliardo_modular_check(const GridFunction& u, double a, double length,
                                     const ExtReal& p, const ExtReal& q, const ExtReal& r,
                                     const std::vector<double>& t_values) {
  if (u.dim() != 1) fail(ErrorCode::kInvalidArgument, "modular form is one-dimensional");
  if (!(length > 0)) fail(ErrorCode::kEmptyRegion, "window length must be positive");
  if (p.is_infinite() || q.is_infinite() || r.is_infinite())
    fail(ErrorCode::kInvalidIndex, "modular form needs finite p, q, r");
  const auto balance = gagliardo_balance(p, q, r);
  ModularCheck out;
  out.merged_second_exp = balance.second_derivative_exp_first;
  out.merged_function_exp = balance.function_exp_first;
  out.homogeneous = out.merged_second_exp + out.merged_function_exp == 1;

  const double pd = p.to_double(), qd = q.to_double(), rd = r.to_double();
  const Box window{{a}, {a + length}};
  const double e1 = to_double(out.merged_second_exp);
  const double e2 = to_double(out.merged_function_exp);

  out.t_values = t_values;
  for (double t : t_values) {
    const GridFunction tu = u.scaled(t);
    const double lhs = lp_integral(partial_derivative(tu, 0), pd, window);
    const double second_int = lp_integral(derivative_magnitude(tu, 2).magnitude, rd, window);
    const double function_int = lp_integral(tu, qd, window);
    const double fterm = std::pow(length, -pd) * function_int;
    const double sterm = std::pow(length, 2 * rd - pd) * second_int;
    const double cterm = std::pow(length, 1 - pd);
    const double grad_norm = std::pow(lhs, 1 / pd);
    const double second_norm = std::pow(second_int, 1 / rd);
    const double function_norm = std::pow(function_int, 1 / qd);
    out.three_term_c_by_t.push_back(lhs / (fterm + sterm + cterm));
    out.two_term_c_by_t.push_back(
        grad_norm / (std::pow(length, 2 * rd / pd - 1) * std::pow(second_norm, rd / pd) +
                     std::pow(length, -1) * std::pow(function_norm, qd / pd)));
    // inf over l of A l^a + B / l, attained at l^(a+1) = B / (a A).
    const double a_exp = 2 * rd / pd - 1;
    const double a_coef = std::pow(second_norm, rd / pd), b_coef = std::pow(function_norm, qd / pd);
    if (a_exp > 0 && a_coef > 0 && b_coef > 0) {
      const double l_star = std::pow(b_coef / (a_exp * a_coef), 1 / (a_exp + 1));
      out.two_term_min_c_by_t.push_back(grad_norm / (b_coef * (1 + 1 / a_exp) / l_star));
      out.optimal_length_by_t.push_back(l_star);
    } else {
      out.two_term_min_c_by_t.push_back(kInf);
      out.optimal_length_by_t.push_back(kNaN);
    }
    const double merged_den = std::pow(second_norm, e1) * std::pow(function_norm, e2);
    out.merged_c_by_t.push_back(merged_den > 0 ? grad_norm / merged_den : kInf);
    if (t == t_values.front()) {
      out.lhs_integral = lhs;
      out.function_term = fterm;
      out.second_term = sterm;
      out.constant_term = cterm;
    }
  }
  out.three_term_c = out.three_term_c_by_t.front();
  out.two_term_c = out.two_term_c_by_t.front();
  out.merged_c = out.merged_c_by_t.front();
  out.two_term_min_c = out.two_term_min_c_by_t.front();
  out.two_term_min_spread = relative_spread(out.two_term_min_c_by_t);
  out.merged_spread = relative_spread(out.merged_c_by_t);
  out.third_term_droppable = out.homogeneous && std::isfinite(out.merged_c) && out.merged_spread <= 1e-6 &&
                             out.two_term_min_spread <= 1e-6;
  return out;
}

ChainCheck induction_chain_check(const std::vector<FamilySpec>& members, const GridSpec& grid,
                                 int k, const ExtReal& q, const ExtReal& r) {
  if (members.empty()) fail(ErrorCode::kInvalidArgument, "no test functions");
  const auto exps = induction_step1_exponents(k, q, r);
  ChainCheck out;
  out.outer = gn_record(2, 1, exps.p, q, exps.p_tilde, "C21");
  out.inner = shift_orders(gn_record(k, 1, exps.p_tilde, exps.p, r, "Ck1"), 1);
  out.chained = chain_records(out.outer, out.inner);

  std::vector<double> outer_ratios, inner_ratios;
  InequalityRecord bare = out.chained;
  bare.constant_expr.clear();
  for (const auto& member : members) {
    const GridFunction u = sample_family(member, grid);
    DerivativeCache cache(u);
    outer_ratios.push_back(record_ratio(cache, out.outer));
    inner_ratios.push_back(record_ratio(cache, out.inner));
    out.direct_ratios.push_back(record_ratio(cache, bare));
  }
  out.outer_constant = *std::max_element(outer_ratios.begin(), outer_ratios.end());
  out.inner_constant = *std::max_element(inner_ratios.begin(), inner_ratios.end());
  out.implied_constant =
      evaluate_constant(out.chained.constant_expr, {{"C21", out.outer_constant}, {"Ck1", out.inner_constant}});
  out.dominated = true;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const double per_function =
        evaluate_constant(out.chained.constant_expr, {{"C21", outer_ratios[i]}, {"Ck1", inner_ratios[i]}});
    out.identity_residuals.push_back(std::abs(out.direct_ratios[i] - per_function) / out.direct_ratios[i]);
    out.dominated = out.dominated && out.direct_ratios[i] <= out.implied_constant * (1 + 1e-12);
  }
  return out;
}

}  // namespace gnlab
