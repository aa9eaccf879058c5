#include "doctest.h"
#include "gnlab/covering.hpp"
#include "gnlab/error.hpp"

#include <cmath>
#include <random>

using namespace gnlab;

namespace {

GridSpec line(double lo, double hi, std::size_t m) { return {Box{{lo}, {hi}}, {m}}; }

FamilySpec bump(double width, double center = 0.0) { return {FamilyKind::kBump, {width}, {center}}; }

template <typename Fn>
ErrorCode error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

void check_cover(const GridFunction& u, const BalancedCover& cover) {
  REQUIRE_FALSE(cover.intervals.empty());
  CHECK(cover.covers_support);
  CHECK(cover.max_multiplicity <= 4);
  CHECK(cover.max_residual <= 1e-6);
  for (const auto& interval : cover.intervals) {
    CHECK(interval.radius > 0);
    CHECK(interval.residual <= 1e-6);
  }
  // Independent coverage check on the nodes.
  const double threshold = 1e-12 * u.max_abs();
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) <= threshold) continue;
    const double x = u.coordinate(0, i);
    bool hit = false;
    for (const auto& interval : cover.intervals) hit = hit || interval.contains(x);
    CHECK(hit);
  }
  // Independent multiplicity count on an 8x finer grid.
  const double lo = u.box().lo[0], hi = u.box().hi[0];
  const std::size_t points = (u.size() - 1) * 8 + 1;
  int worst = 0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    int count = 0;
    for (const auto& interval : cover.intervals) count += interval.contains(x);
    worst = std::max(worst, count);
  }
  CHECK(worst <= cover.max_multiplicity);
  CHECK(worst <= 4);
}

}  // namespace

TEST_CASE("omega and alpha") {
  const auto grid = line(-1.5, 1.5, 1201);
  const auto u = sample_family(bump(1.0), grid);
  const ExtReal two(2);

  const auto line_fn = u.with_samples([&] {
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.5 * u.coordinate(0, i);
    return v;
  }());
  CHECK(omega(line_fn, 0.0, 1.0, two, two) < 1e-9);

  const BalanceProblem problem(u, two, two, two);
  // The window of a 2x wider h is different, so compare the power factor alone.
  CHECK(problem.omega_exponent() == doctest::Approx(1.0));
  CHECK(problem.omega(0.0, 1.0) / problem.second_derivative_norm(-0.5, 0.5) == doctest::Approx(1.0));
  CHECK(problem.omega(0.0, 2.0) / problem.second_derivative_norm(-1.0, 1.0) == doctest::Approx(2.0));

  // 10x finer grid as the oracle.
  const auto base = sample_family(bump(1.0), line(-1.5, 1.5, 4001));
  const auto fine = sample_family(bump(1.0), line(-1.5, 1.5, 40001));
  CHECK(omega(base, 0.0, 1.0, two, two) == doctest::Approx(omega(fine, 0.0, 1.0, two, two)).epsilon(1e-6));
  CHECK(alpha(base, 0.0, 1.0, two, two) == doctest::Approx(alpha(fine, 0.0, 1.0, two, two)).epsilon(1e-6));
  CHECK(alpha(base, 0.2, 0.7, two, two) == doctest::Approx(alpha(fine, 0.2, 0.7, two, two)).epsilon(1e-6));

  CHECK(alpha(u, 1.3, 0.1, two, two) == 0.0);
  CHECK(alpha(u, 0.0, 0.01, two, two) > alpha(u, 0.0, 0.02, two, two));
  CHECK(alpha(u, 0.0, 0.005, two, two) > alpha(u, 0.0, 0.01, two, two));

  CHECK(error_of([&] { omega(u, 10.0, 0.5, two, two); }) == ErrorCode::kWindowEmpty);
}

TEST_CASE("balancing radius") {
  const auto u = sample_family(bump(1.0), line(-1.5, 1.5, 1201));
  const ExtReal two(2);
  const BalanceProblem problem(u, two, two, two);
  const auto point = balance_at(problem, 0.3);
  CHECK(point.residual <= 1e-6);
  CHECK(point.length > 0);
  // Beyond the crossing omega stays above alpha.
  for (double f : {1.05, 1.5, 2.0, 4.0}) CHECK(problem.omega(0.3, f * point.length) > problem.alpha(0.3, f * point.length));

  const auto zero = u.with_samples(std::vector<double>(u.size(), 0.0));
  CHECK(error_of([&] { balancing_radius(zero, 0.0, two, two, two); }) == ErrorCode::kZeroFunction);
}

TEST_CASE("balancing radius is dilation covariant") {
  // r_x for T_s u equals r_{sx} for u divided by s.
  const FamilySpec windowed{FamilyKind::kSineBump, {1.0, 2.0, 0.7}, {0.0}};
  const auto u = sample_family(windowed, line(-1.5, 1.5, 2401));
  const double s = 2.0;
  const auto v = dilate(u, s);
  const ExtReal p(2), q(2), r(2);
  for (double x : {-0.2, 0.05, 0.3}) {
    const double rv = balancing_radius(v, x, p, q, r);
    const double ru = balancing_radius(u, s * x, p, q, r);
    CHECK(rv == doctest::Approx(ru / s).epsilon(1e-4));
  }
}

TEST_CASE("build_cover on single and twin bumps") {
  const ExtReal two(2);
  const auto single = sample_family(bump(0.3, 0.1), line(-1.5, 1.5, 1201));
  const auto cover = build_cover(single, two, two, two);
  check_cover(single, cover);
  CHECK(cover.intervals.size() >= 1);
  for (const auto& interval : cover.intervals) CHECK(interval.length() <= cover.radius_bound);

  std::vector<double> samples(single.size());
  const auto left = sample_family(bump(0.4, -0.8), line(-1.5, 1.5, 1201));
  const auto right = sample_family(bump(0.3, 0.7), line(-1.5, 1.5, 1201));
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = left[i] + right[i];
  const auto twin = single.with_samples(samples);
  const auto twin_cover = build_cover(twin, two, two, two);
  check_cover(twin, twin_cover);
  for (const auto& interval : twin_cover.intervals) {
    const double c = interval.center;
    CHECK((std::abs(c + 0.8) < 0.4 || std::abs(c - 0.7) < 0.3));
  }

  std::size_t histogram_total = 0;
  for (auto count : twin_cover.multiplicity_histogram()) histogram_total += count;
  CHECK(histogram_total == twin_cover.multiplicity_profile.size());
  CHECK(!render_cover_strip(twin_cover, -1.5, 1.5).empty());
}

TEST_CASE("cover is translation covariant") {
  const ExtReal p(3), q(3), r(3);
  const FamilySpec base{FamilyKind::kSineBump, {0.8, 5.0}, {-0.2}};
  const auto grid = line(-2, 2, 1601);
  const double h = 4.0 / 1600;
  const double shift = 40 * h;
  const auto a = build_cover(sample_family(base, grid), p, q, r);
  const std::vector<double> t{shift};
  const auto b = build_cover(sample_family(base.translated(t), grid), p, q, r);
  REQUIRE(a.intervals.size() == b.intervals.size());
  for (std::size_t i = 0; i < a.intervals.size(); ++i)
    CHECK(std::abs(b.intervals[i].center - a.intervals[i].center - shift) <= h);
}

TEST_CASE("cover over exponent triples") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> width(0.3, 1.0), freq(0.0, 8.0), phase(0.0, 3.0);
  const std::vector<std::tuple<ExtReal, ExtReal, ExtReal>> triples{
      {ExtReal(2), ExtReal(2), ExtReal(2)},
      {ExtReal(make_rational(12, 5)), ExtReal(3), ExtReal(2)},
      {ExtReal(make_rational(4, 3)), ExtReal(1), ExtReal(2)},
      {ExtReal(make_rational(8, 5)), ExtReal(4), ExtReal(1)},
  };
  for (int trial = 0; trial < 6; ++trial) {
    const FamilySpec member{FamilyKind::kSineBump, {width(rng), freq(rng), phase(rng)}, {0.0}};
    const auto u = sample_family(member, line(-1.2, 1.2, 961));
    for (const auto& [p, q, r] : triples) {
      const auto cover = build_cover(u, p, q, r);
      check_cover(u, cover);
    }
  }
}

TEST_CASE("cover exponent identity") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> num(0, 40), den(1, 9);
  for (int i = 0; i < 200; ++i) {
    const Rational q = 1 + make_rational(num(rng), den(rng));
    const Rational r = 1 + make_rational(num(rng), den(rng));
    const Rational p = 2 / (1 / r + 1 / q);
    CHECK(cover_exponent_identity(p, q, r) == 0);
  }
  CHECK(cover_exponent_identity(3, 2, 2) != 0);
}

TEST_CASE("cover_sum_bound") {
  const ExtReal two(2);
  const auto u = sample_family(bump(0.8), line(-1.5, 1.5, 1201));
  const auto cover = build_cover(u, two, two, two);
  const auto bound = cover_sum_bound(u, cover, two, two, two);
  CHECK(bound.exponent_identity == 0);
  CHECK(bound.holder_first == make_rational(1, 2));
  CHECK(bound.holder_second == make_rational(1, 2));
  CHECK(bound.lhs <= bound.interval_sum * (1 + 1e-12));
  CHECK(bound.interval_sum <= bound.two_term_sum * (1 + 1e-12));
  CHECK(bound.substitution_residual < 1e-5);
  CHECK(bound.balanced_sum <= bound.holder_bound * (1 + 1e-12));
  CHECK(bound.holder_bound <= bound.final_bound * (1 + 1e-12));
  CHECK(bound.ratio <= 1.0);
  CHECK(bound.chain_holds);

  const ExtReal p(make_rational(12, 5)), q(3), r(2);
  CHECK(bound.lhs > 0);
  CHECK(error_of([&] { cover_sum_bound(u, cover, ExtReal(3), two, two); }) == ErrorCode::kExponentMismatch);
  const auto other = build_cover(u, p, q, r);
  CHECK(cover_sum_bound(u, other, p, q, r).chain_holds);
}
