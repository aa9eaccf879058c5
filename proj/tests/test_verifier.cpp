#include "doctest.h"
#include "gnlab/error.hpp"
#include "gnlab/verifier.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace gnlab;

namespace {

GridSpec line(double lo, double hi, std::size_t m) { return {Box{{lo}, {hi}}, {m}}; }
GridSpec square(double lo, double hi, std::size_t m) { return {Box::cube(2, lo, hi), {m, m}}; }

FamilySpec gaussian1(double width = 1.0) { return {FamilyKind::kGaussian, {width}, {0.0}}; }

GNParams params(int n, int j, int k, Rational theta, ExtReal q, ExtReal r,
                std::optional<ExtReal> p = std::nullopt) {
  GNParams g;
  g.n = n;
  g.j = j;
  g.k = k;
  g.theta = theta;
  g.q = q;
  g.r = r;
  g.p = p;
  return g;
}

template <typename Fn>
ErrorCode error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

GridFunction piecewise_linear(const GridSpec& grid, const std::vector<double>& knots,
                              const std::vector<double>& values) {
  std::vector<double> samples(grid.shape[0]);
  const GridFunction probe(grid.box, grid.shape, samples);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = probe.coordinate(0, i);
    std::size_t seg = 0;
    while (seg + 2 < knots.size() && x > knots[seg + 1]) ++seg;
    const double t = (x - knots[seg]) / (knots[seg + 1] - knots[seg]);
    samples[i] = values[seg] + t * (values[seg + 1] - values[seg]);
  }
  return probe.with_samples(samples);
}

}  // namespace

TEST_CASE("mean approximation") {
  const auto flat = GridFunction(Box{{0}, {1}}, {16}, std::vector<double>(16, 3.0));
  const auto degenerate = mean_approx_ratio(flat, std::nullopt, ExtReal(2));
  CHECK(degenerate.degenerate);
  CHECK(degenerate.ratio == 1.0);

  const auto g = sample_family(gaussian1(), line(-4, 4, 801));
  const auto l2 = mean_approx_ratio(g, Box{{-1.3}, {2.1}}, ExtReal(2));
  CHECK(std::abs(l2.ratio - 1.0) < 1e-8);

  const auto x = piecewise_linear(line(0, 1, 1001), {0, 1}, {0, 1});
  CHECK(mean_approx_ratio(x, std::nullopt, ExtReal(1)).ratio == doctest::Approx(1.0).epsilon(1e-8));

  // Skewed: brute-force scan of c on a 1e-4 grid as the oracle.
  const auto skew = piecewise_linear(line(0, 1, 1001), {0, 0.05, 0.1, 1}, {0, 1, 0, 0});
  const auto measured = mean_approx_ratio(skew, std::nullopt, ExtReal(1));
  double best = INFINITY;
  for (double c = 0; c <= 1.0; c += 1e-4) {
    std::vector<double> shifted(skew.size());
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = skew[i] - c;
    best = std::min(best, lp_norm(skew.with_samples(shifted), ExtReal(1)));
  }
  CHECK(measured.denominator == doctest::Approx(best).epsilon(1e-6));
  CHECK(measured.ratio > 1.0);
  CHECK(measured.ratio <= 2.0);

  const auto sup = mean_approx_ratio(skew, std::nullopt, ExtReal::infinity());
  CHECK(sup.best_constant == doctest::Approx(0.5));
  CHECK(sup.ratio <= 2.0 + 1e-12);

  // Region bounds off the nodes: the sup of |x - c| over (a, b) is (b - a) / 2 at c = (a + b) / 2.
  const auto coarse_x = piecewise_linear(line(0, 1, 11), {0, 1}, {0, 1});
  const auto off_grid = mean_approx_ratio(coarse_x, Box{{0.23}, {0.71}}, ExtReal::infinity());
  CHECK(off_grid.best_constant == doctest::Approx(0.47).epsilon(1e-12));
  CHECK(off_grid.denominator == doctest::Approx(0.24).epsilon(1e-12));
  CHECK(off_grid.ratio == doctest::Approx(1.0).epsilon(1e-12));
  // Bilinear u = x y on [0.15, 0.85]^2: extremes at the region corners.
  std::vector<double> xy(11 * 11);
  const GridFunction plane(Box::cube(2, 0, 1), {11, 11}, xy);
  for (std::size_t i = 0; i < xy.size(); ++i) xy[i] = plane.point(i)[0] * plane.point(i)[1];
  const auto corners = mean_approx_ratio(plane.with_samples(xy), Box::cube(2, 0.15, 0.85), ExtReal::infinity());
  CHECK(corners.best_constant == doctest::Approx((0.15 * 0.15 + 0.85 * 0.85) / 2).epsilon(1e-12));

  CHECK(error_of([&] { mean_approx_ratio(skew, Box{{0.5}, {0.5}}, ExtReal(2)); }) ==
        ErrorCode::kEmptyRegion);
}

TEST_CASE("interval inequality ratio") {
  const ExtReal two(2);
  const auto lin = piecewise_linear(line(-2, 2, 801), {-2, 2}, {-2, 2});
  const double r_lin = interval_inequality_ratio(lin, -0.5, 0.5, two, two, two);
  CHECK(std::isfinite(r_lin));
  CHECK(r_lin > 0);

  // u(x) -> u(lambda x) with the interval shrunk by lambda.
  const FamilySpec sb{FamilyKind::kSineBump, {1.5, 2.0, 0.4}, {0.0}};
  const auto u = sample_family(sb, line(-2, 2, 2001));
  const double lambda = 2.0;
  const auto v = dilate(u, lambda);
  for (const auto& [p, q, r] : std::vector<std::tuple<ExtReal, ExtReal, ExtReal>>{
           {two, two, two}, {ExtReal(3), ExtReal(4), ExtReal(2)}, {ExtReal(1), ExtReal(2), ExtReal(1)}}) {
    const double a = interval_inequality_ratio(u, -0.6, 0.9, p, q, r);
    const double b = interval_inequality_ratio(v, -0.6 / lambda, 0.9 / lambda, p, q, r);
    CHECK(b == doctest::Approx(a).epsilon(1e-4));
  }
}

TEST_CASE("line ratio") {
  const ExtReal two(2);
  const auto g = sample_family(gaussian1(), line(-8, 8, 2049));
  CHECK(line_ratio(g, two, two, two) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));

  // Moments I_2m = int x^2m exp(-2x^2): I0 = sqrt(pi/2), I2 = I0/4, I4 = 3 I0/16.
  const double i0 = std::sqrt(std::numbers::pi / 2), i2 = i0 / 4, i4 = 3 * i0 / 16;
  const double grad2 = 4 * i2, hess2 = 16 * i4 - 16 * i2 + 4 * i0;
  CHECK(grad2 / std::sqrt(hess2 * i0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));

  const double base = line_ratio(g, two, two, two);
  for (double s : {0.5, 2.0, 4.0}) CHECK(line_ratio(dilate(g, s), two, two, two) == doctest::Approx(base).epsilon(1e-4));
  CHECK(line_ratio(g.scaled(7.5), two, two, two) == doctest::Approx(base).epsilon(1e-12));

  CHECK(error_of([&] { line_ratio(g, ExtReal(3), two, two); }) == ErrorCode::kExponentMismatch);
  const ExtReal p(make_rational(12, 5)), q(3), r(2);
  CHECK(std::isfinite(line_ratio(g, p, q, r)));
}

TEST_CASE("gn21 ratio and dimension split") {
  const ExtReal two(2);
  const FamilySpec product{FamilyKind::kGaussian, {1.0}, {0.0, 0.0}};
  const auto u = sample_family(product, square(-7, 7, 225));
  const auto result = gn21_ratio(u, two, two, two);
  CHECK(result.ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-5));

  const auto& split = result.split;
  REQUIRE(split.available);
  CHECK(split.fubini_prime == doctest::Approx(split.full_q).epsilon(1e-10));
  CHECK(split.fubini_last == doctest::Approx(split.full_q).epsilon(1e-10));
  CHECK(split.pointwise_excess <= 1e-10);
  CHECK(split.slice_prime <= split.holder_prime * (1 + 1e-12));
  CHECK(split.slice_last <= split.holder_last * (1 + 1e-12));
  CHECK(split.grad_prime_p + split.grad_last_p == doctest::Approx(std::pow(result.grad_p, 2)).epsilon(1e-10));

  const FamilySpec rotated{FamilyKind::kGaussian, {1.0, 1.0, std::numbers::pi / 4}, {0.0, 0.0}};
  const auto v = sample_family(rotated, square(-7, 7, 225));
  CHECK(std::abs(gn21_ratio(v, two, two, two).ratio / result.ratio - 1) < 1e-3);

  const FamilySpec aniso{FamilyKind::kGaussian, {1.2, 0.7, 0.5}, {0.3, -0.2}};
  const auto w = sample_family(aniso, square(-7, 7, 225));
  const auto rw = gn21_ratio(w, two, two, two);
  const auto rw45 = gn21_ratio(dilate(w, 1.7), two, two, two);
  CHECK(rw45.ratio == doctest::Approx(rw.ratio).epsilon(1e-6));
  CHECK(error_of([&] { gn21_ratio(w, ExtReal(3), two, two); }) == ErrorCode::kExponentMismatch);
}

TEST_CASE("gn_ratio guards and invariances") {
  const auto bad = params(1, 1, 2, make_rational(1, 4), 2, 2);
  const auto g = sample_family(gaussian1(), line(-8, 8, 513));
  CHECK(error_of([&] { gn_ratio(g, bad); }) == ErrorCode::kInadmissibleParams);
  const auto coarse = sample_family(gaussian1(), line(-8, 8, 9));
  CHECK(error_of([&] { gn_ratio(coarse, params(1, 1, 2, make_rational(1, 2), 2, 2)); }) ==
        ErrorCode::kGridTooCoarse);

  // ||u||_inf <= (1/2) ||u'||_1 for compactly supported u.
  const auto sobolev = params(1, 0, 1, 1, 1, 1, ExtReal::infinity());
  for (double w : {0.3, 0.6, 1.0}) {
    const auto u = sample_family({FamilyKind::kBump, {w}, {0.1}}, line(-1.5, 1.5, 1201));
    const double ratio = gn_ratio(u, sobolev).ratio;
    CHECK(ratio <= 1 + 1e-6);
    CHECK(ratio == doctest::Approx(0.5).epsilon(1e-4));
  }

  const auto admissible = params(1, 1, 2, make_rational(1, 2), 3, 2);
  const FamilySpec sb{FamilyKind::kSineBump, {1.0, 3.0}, {0.0}};
  const auto u = sample_family(sb, line(-2, 2, 801));
  const double base = gn_ratio(u, admissible).ratio;
  for (double t : {1e-3, 1.0, 1e3}) CHECK(gn_ratio(u.scaled(t), admissible).ratio == doctest::Approx(base).epsilon(1e-12));
  const std::vector<double> shift{0.37};
  const auto moved = sample_family(sb.translated(shift), line(-2, 2, 801));
  CHECK(gn_ratio(moved, admissible).ratio == doctest::Approx(base).epsilon(1e-6));
}

TEST_CASE("estimate_constant") {
  const auto p2 = params(1, 1, 2, make_rational(1, 2), 2, 2);

  ConstantSweep dilations_only;
  dilations_only.members = {{FamilyKind::kPolyGaussian, {1.0, 1.0, 0.5, -0.3}, {0.0}}};
  dilations_only.dilations = log_spaced(0.5, 2.0, 5);
  dilations_only.grid = line(-10, 10, 1025);
  dilations_only.refine = false;
  const auto flat = estimate_constant(dilations_only, p2);
  CHECK(flat.ratio_max() / flat.ratio_min() - 1 < 1e-4);
  CHECK(*flat.estimated_constant >= flat.ratio_max());

  CHECK(error_of([&] {
          auto bad = p2;
          bad.theta = make_rational(1, 4);
          estimate_constant(dilations_only, bad);
        }) == ErrorCode::kInadmissibleParams);

  // Gaussian times Hermite polynomials H_0..H_3 in t = x/w.
  const std::vector<std::vector<double>> hermite{{1}, {0, 2}, {-2, 0, 4}, {0, -12, 0, 8}};
  auto sweep_with = [&](std::vector<double> widths, int dilation_count) {
    ConstantSweep sweep;
    for (const auto& coeffs : hermite)
      for (double w : widths) {
        std::vector<double> shape{w};
        shape.insert(shape.end(), coeffs.begin(), coeffs.end());
        sweep.members.push_back({FamilyKind::kPolyGaussian, shape, {0.0}});
      }
    sweep.dilations = log_spaced(0.5, 2.0, dilation_count);
    sweep.grid = line(-12, 12, 1025);
    sweep.max_evaluations = 150;
    return estimate_constant(sweep, p2);
  };
  const auto small = sweep_with({0.8, 1.2}, 3);
  const auto large = sweep_with({0.7, 0.8, 1.0, 1.2}, 6);
  REQUIRE(small.estimated_constant);
  REQUIRE(large.estimated_constant);
  CHECK(std::isfinite(*small.estimated_constant));
  CHECK(*small.estimated_constant <= 1.0 + 1e-6);
  CHECK(std::abs(*large.estimated_constant / *small.estimated_constant - 1) < 0.02);
  CHECK(*large.estimated_constant >= large.ratio_max());
}

TEST_CASE("sharpness scan") {
  const FamilySpec g2{FamilyKind::kGaussian, {1.0}, {0.0, 0.0}};
  const auto grid = square(-7, 7, 129);
  const auto s_values = log_spaced(0.5, 2.0, 5);

  const auto admissible = params(2, 1, 2, make_rational(1, 2), 2, 2).with_solved_p();
  const auto flat = sharpness_scan(g2, grid, admissible, s_values);
  CHECK(std::abs(flat.slope->slope) < 5e-3);
  CHECK(flat.passed());

  auto perturbed = admissible;
  perturbed.p = ExtReal(make_rational(11, 5));
  const auto tilted = sharpness_scan(g2, grid, perturbed, s_values);
  CHECK(tilted.slope->deficit == make_rational(1, 11));
  CHECK(tilted.slope->slope == doctest::Approx(1.0 / 11).epsilon(0.05));
  CHECK(tilted.flags.at("slope_matches_deficit"));
  // Positive deficit: R(T_s u) grows with s.
  for (std::size_t i = 1; i < tilted.rows.size(); ++i) CHECK(tilted.rows[i].ratio > tilted.rows[i - 1].ratio);

  SharpnessOptions fixed;
  fixed.fixed_box = true;
  const auto on_grid = sharpness_scan(g2, square(-10, 10, 201), perturbed, log_spaced(0.7, 2.0, 6), fixed);
  CHECK(on_grid.flags.at("slope_matches_deficit"));

  CHECK(error_of([&] { sharpness_scan(g2, grid, perturbed, {1.0, 2.0}); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("gagliardo modular check") {
  const FamilySpec sb{FamilyKind::kSineBump, {1.2, 2.5, 0.3}, {0.0}};
  const auto u = sample_family(sb, line(-1.5, 1.5, 1201));
  const ExtReal q(3), r(2);
  const ExtReal p(1 / (make_rational(1, 4) + make_rational(1, 6)));
  const auto check = gagliardo_modular_check(u, -0.7, 1.3, p, q, r, {1.0, 10.0, 100.0});
  CHECK(check.merged_second_exp == make_rational(1, 2));
  CHECK(check.merged_function_exp == make_rational(1, 2));
  CHECK(check.homogeneous);
  CHECK(check.merged_spread < 1e-6);
  CHECK(check.two_term_min_spread < 1e-6);
  CHECK(check.third_term_droppable);

  // The closed-form minimum over the window length against a dense scan.
  const double pd = p.to_double();
  const double grad_norm = lp_norm(partial_derivative(u, 0), p, Box{{-0.7}, {0.6}});
  const double second_norm = lp_norm(derivative_magnitude(u, 2).magnitude, r, Box{{-0.7}, {0.6}});
  const double function_norm = lp_norm(u, q, Box{{-0.7}, {0.6}});
  double scan_min = INFINITY;
  for (int i = 0; i <= 200000; ++i) {
    const double l = std::exp(-8.0 + 16.0 * i / 200000);
    scan_min = std::min(scan_min, std::pow(l, 2 * 2 / pd - 1) * std::pow(second_norm, 2 / pd) +
                                      std::pow(function_norm, 3 / pd) / l);
  }
  CHECK(check.two_term_min_c == doctest::Approx(grad_norm / scan_min).epsilon(1e-8));
  CHECK(check.two_term_min_c >= check.two_term_c);
  // Without homogenization the constant term dominates less and less.
  CHECK(check.three_term_c_by_t.back() > check.three_term_c_by_t.front());

  std::vector<double> ramp(u.size());
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 2.0 + u.coordinate(0, i);
  const auto lin = gagliardo_modular_check(u.with_samples(ramp), -0.7, 1.3, p, q, r);
  CHECK(std::isfinite(lin.three_term_c));
  CHECK(std::isfinite(lin.two_term_c));
  CHECK(lin.second_term < 1e-12);
}

TEST_CASE("induction chain check") {
  std::vector<FamilySpec> members;
  for (double w : {0.8, 1.0, 1.3})
    members.push_back({FamilyKind::kPolyGaussian, {w, 1.0, 0.3, 0.4}, {0.0}});
  members.push_back({FamilyKind::kSineBump, {3.0, 2.0}, {0.0}});
  const auto check = induction_chain_check(members, line(-10, 10, 2001), 2, 6, 2);
  CHECK(check.chained.factors[0].power == make_rational(1, 3));
  CHECK(check.chained.factors[1].power == make_rational(2, 3));
  CHECK(check.dominated);
  for (double residual : check.identity_residuals) CHECK(residual < 1e-10);
  for (double direct : check.direct_ratios) CHECK(direct <= check.implied_constant);
}

TEST_CASE("report bookkeeping") {
  VerificationReport report;
  report.add_ratio("a", 1.0);
  report.add_ratio("b", 3.0);
  CHECK(report.ratio_min() == 1.0);
  CHECK(report.ratio_max() == 3.0);
  CHECK(report.ratio_mean() == 2.0);
  report.refinement_deltas["a"] = 5e-4;
  report.check_refinement();
  CHECK(report.passed());
  report.refinement_deltas["b"] = 2e-3;
  report.check_refinement();
  CHECK_FALSE(report.passed());
  CHECK(report.warnings.back() == "GRID_UNCONVERGED");
}
