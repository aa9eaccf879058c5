#include "doctest.h"
#include "gnlab/error.hpp"
#include "gnlab/gridfn.hpp"

#include <cmath>
#include <numbers>

using namespace gnlab;

namespace {

GridSpec line(double lo, double hi, std::size_t m) { return {Box{{lo}, {hi}}, {m}}; }

GridSpec square(double lo, double hi, std::size_t m) { return {Box::cube(2, lo, hi), {m, m}}; }

FamilySpec gaussian(std::vector<double> center, double width = 1.0) {
  return {FamilyKind::kGaussian, {width}, std::move(center)};
}

template <typename Fn>
GridFunction tabulate(const GridSpec& grid, Fn&& fn) {
  std::size_t total = 1;
  for (auto m : grid.shape) total *= m;
  GridFunction probe(grid.box, grid.shape, std::vector<double>(total, 0.0));
  std::vector<double> samples(total);
  for (std::size_t i = 0; i < total; ++i) samples[i] = fn(probe.point(i));
  return probe.with_samples(std::move(samples));
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

}  // namespace

TEST_CASE("GridFunction validates its shape") {
  CHECK(error_of([] { GridFunction(Box{{0}, {1}}, {7}, std::vector<double>(7)); }) ==
        ErrorCode::kGridTooCoarse);
  CHECK(error_of([] { GridFunction(Box{{0}, {1}}, {8}, std::vector<double>(9)); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(error_of([] {
          GridFunction(Box{{0}, {1}}, {8}, std::vector<double>(8, std::nan("")));
        }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("sample_family") {
  const auto g = sample_family(gaussian({0.0}), line(-8, 8, 4097));
  CHECK(g.max_abs() == 1.0);
  CHECK(g[2048] == 1.0);
  CHECK_FALSE(g.edge_warning());

  const FamilySpec bump{FamilyKind::kBump, {1.0}, {0.3}};
  const auto b = sample_family(bump, line(-3, 3, 601));
  for (std::size_t i = 0; i < b.size(); ++i)
    if (std::abs(b.coordinate(0, i) - 0.3) >= 1.0) CHECK(b[i] == 0.0);
  CHECK(error_of([&] { sample_family(bump, line(-0.5, 1.0, 101)); }) ==
        ErrorCode::kSupportExceedsBox);

  const FamilySpec odd{FamilyKind::kPolyGaussian, {1.0, 0.0, 1.0}, {0.0}};
  const auto o = sample_family(odd, line(-8, 8, 1025));
  double sum = 0;
  for (double v : o.samples()) sum += v;
  CHECK(std::abs(sum) < 1e-12);

  CHECK(sample_family(gaussian({0.0}), line(-2, 2, 101)).edge_warning());
}

TEST_CASE("partial_derivative") {
  const auto c = tabulate(line(-1, 1, 64), [](auto) { return 3.0; });
  const auto dc = partial_derivative(c, 0);
  for (std::size_t i = 2; i + 2 < dc.size(); ++i) CHECK(dc[i] == 0.0);

  const double pi = std::numbers::pi;
  const auto s = tabulate(line(-pi, pi, 2049), [](auto x) { return std::sin(x[0]); });
  const auto ds = partial_derivative(s, 0);
  double err = 0;
  for (std::size_t i = 2; i + 2 < ds.size(); ++i)
    err = std::max(err, std::abs(ds[i] - std::cos(s.coordinate(0, i))));
  CHECK(err < 1e-8);

  const auto g = sample_family(gaussian({0.0}), line(-8, 8, 1025));
  const auto dg = partial_derivative(g, 0);
  double asym = 0;
  for (std::size_t i = 0; i < dg.size(); ++i) asym = std::max(asym, std::abs(dg[i] + dg[dg.size() - 1 - i]));
  CHECK(asym < 1e-12);

  CHECK(error_of([&] { partial_derivative(g, 1); }) == ErrorCode::kAxisOutOfRange);
}

TEST_CASE("fourth-order stencil error scales like h^4") {
  auto error_at = [](std::size_t m) {
    const auto g = sample_family(gaussian({0.0}), line(-8, 8, m));
    const auto dg = partial_derivative(g, 0);
    double err = 0;
    for (std::size_t i = 0; i < dg.size(); ++i) {
      const double x = g.coordinate(0, i);
      err = std::max(err, std::abs(dg[i] + 2 * x * std::exp(-x * x)));
    }
    return err;
  };
  const double ratio = error_at(257) / error_at(513);
  CHECK(ratio > 14.0);
  CHECK(ratio < 18.0);
}

TEST_CASE("derivative_magnitude") {
  const double pi = std::numbers::pi;
  const auto s = tabulate(line(-pi, pi, 2049), [](auto x) { return std::sin(x[0]); });
  const auto d1 = derivative_magnitude(s, 1);
  double err = 0;
  for (std::size_t i = 2; i + 2 < s.size(); ++i)
    err = std::max(err, std::abs(d1.magnitude[i] - std::abs(std::cos(s.coordinate(0, i)))));
  CHECK(err < 1e-8);

  const auto grid = square(-1, 1, 33);
  const auto x = tabulate(grid, [](auto p) { return p[0]; });
  const auto gx = derivative_magnitude(x, 1);
  const auto xy = tabulate(grid, [](auto p) { return p[0] * p[1]; });
  const auto hxy = derivative_magnitude(xy, 2);
  auto interior = [&](std::size_t flat, std::size_t margin) {
    const std::size_t i = flat / 33, j = flat % 33;
    return i >= margin && j >= margin && i + margin < 33 && j + margin < 33;
  };
  for (std::size_t f = 0; f < x.size(); ++f) {
    if (interior(f, 2)) CHECK(gx.magnitude[f] == doctest::Approx(1.0).epsilon(1e-12));
    if (interior(f, 4)) CHECK(hxy.magnitude[f] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  }

  CHECK(error_of([&] { derivative_magnitude(s.with_samples(std::vector<double>(2049)), 0); }) ==
        ErrorCode::kInvalidArgument);
  const auto coarse = tabulate(line(0, 1, 11), [](auto p) { return p[0]; });
  CHECK(error_of([&] { derivative_magnitude(coarse, 2); }) == ErrorCode::kGridTooCoarse);
}

TEST_CASE("directional magnitudes never exceed the full tensor magnitude") {
  const FamilySpec rotated{FamilyKind::kGaussian, {1.0, 0.6, 0.7}, {0.2, -0.1}};
  const auto u = sample_family(rotated, square(-6, 6, 97));
  const std::size_t first[] = {0}, second[] = {1};
  for (int k : {1, 2}) {
    const auto full = derivative_magnitude(u, k).magnitude;
    const auto a = derivative_magnitude(u, k, first).magnitude;
    const auto b = derivative_magnitude(u, k, second).magnitude;
    for (std::size_t i = 0; i < u.size(); ++i) {
      CHECK(a[i] <= full[i] + 1e-10);
      CHECK(b[i] <= full[i] + 1e-10);
    }
  }
}

TEST_CASE("lp_norm") {
  const auto one = tabulate(GridSpec{Box{{0, 0}, {2, 3}}, {9, 13}}, [](auto) { return 1.0; });
  CHECK(lp_norm(one, ExtReal(1)) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(lp_norm(one, ExtReal(3)) == doctest::Approx(std::cbrt(6.0)).epsilon(1e-14));

  const auto g = sample_family(gaussian({0.0}), line(-8, 8, 4097));
  CHECK(lp_norm(g, ExtReal(2)) == doctest::Approx(std::pow(std::numbers::pi / 2, 0.25)).epsilon(1e-6));
  CHECK(lp_norm(g, ExtReal::infinity()) == g.max_abs());

  const FamilySpec sb{FamilyKind::kSineBump, {1.5, 3.0}, {0.1}};
  const auto s = sample_family(sb, line(-2, 2, 513));
  CHECK(lp_norm(s, ExtReal::infinity()) == s.max_abs());

  CHECK(error_of([&] { lp_norm(g, ExtReal(2), Box{{1}, {1}}); }) == ErrorCode::kEmptyRegion);
  CHECK(error_of([&] { lp_norm(g, ExtReal(2), Box{{20}, {30}}); }) == ErrorCode::kEmptyRegion);
}

TEST_CASE("lp_norm converges at second order under refinement") {
  const FamilySpec bump{FamilyKind::kBump, {1.0}, {0.0}};
  auto norm = [&](std::size_t m) { return lp_norm(sample_family(bump, line(-1.5, 1.5, m)), ExtReal(3)); };
  // The sequence m, 2m-1, 4m-3 halves the spacing each time.
  const double a = norm(65), b = norm(129), c = norm(257);
  const double order = std::log2(std::abs(b - a) / std::abs(c - b));
  CHECK(order >= 2.0);

  // A sub-window cutting through cells converges too.
  const Box window{{-0.37}, {0.61}};
  auto windowed = [&](std::size_t m) {
    return lp_norm(sample_family(bump, line(-1.5, 1.5, m)), ExtReal(2), window);
  };
  const double wa = windowed(65), wb = windowed(129), wc = windowed(257);
  CHECK(std::log2(std::abs(wb - wa) / std::abs(wc - wb)) >= 1.9);
}

TEST_CASE("mean_value") {
  const auto c = tabulate(line(-1, 2, 31), [](auto) { return -2.5; });
  CHECK(mean_value(c) == doctest::Approx(-2.5).epsilon(1e-15));

  const auto odd = tabulate(square(-1, 1, 41), [](auto p) { return p[0] * std::exp(p[1]); });
  CHECK(std::abs(mean_value(odd)) < 1e-12);

  const auto x = tabulate(line(0, 1, 101), [](auto p) { return p[0]; });
  CHECK(mean_value(x) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(mean_value(x, Box{{0.25}, {0.5}}) == doctest::Approx(0.375).epsilon(1e-10));
  CHECK(error_of([&] { mean_value(x, Box{{0.5}, {0.25}}); }) == ErrorCode::kEmptyRegion);
}

TEST_CASE("dilate") {
  const auto g = sample_family(gaussian({0.0}), line(-8, 8, 2049));
  const auto same = dilate(g, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(same[i] == g[i]);

  const auto d4 = dilate(g, 4.0);
  CHECK(lp_norm(d4, ExtReal(2)) / lp_norm(g, ExtReal(2)) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(d4.box().hi[0] == doctest::Approx(2.0));
  CHECK_FALSE(d4.interpolated());

  // grad^j(T_s u) = s^j T_s(grad^j u).
  const double s = 2.0;
  const auto lhs = partial_derivative(dilate(g, s), 0);
  const auto rhs = dilate(partial_derivative(g, 0), s);
  double residual = 0;
  for (std::size_t i = 0; i < lhs.size(); ++i) residual = std::max(residual, std::abs(lhs[i] - s * rhs[i]));
  CHECK(residual < 1e-6);

  const auto plain = g.with_samples({g.samples().begin(), g.samples().end()});
  CHECK(dilate(plain, 2.0).interpolated());
  const auto onto = dilate(plain, 2.0, g.grid());
  CHECK(onto.interpolated());
  CHECK(lp_norm(onto, ExtReal(2)) / lp_norm(g, ExtReal(2)) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-5));
  const auto analytic = dilate(g, 2.0, g.grid());
  CHECK_FALSE(analytic.interpolated());

  CHECK(error_of([&] { dilate(g, 0.0); }) == ErrorCode::kNonpositiveScale);
  CHECK(error_of([&] { dilate(g, -1.0); }) == ErrorCode::kNonpositiveScale);
}

TEST_CASE("dilation scales norms by s^(-n/m)") {
  const std::vector<ExtReal> exps{ExtReal(1), ExtReal(2), ExtReal(4), ExtReal::infinity()};
  for (std::size_t n : {1u, 2u}) {
    const GridSpec grid = n == 1 ? line(-8, 8, 1025) : square(-8, 8, 257);
    const auto f = sample_family({FamilyKind::kGaussian, {1.0}, std::vector<double>(n, 0.0)}, grid);
    for (double s : {0.25, 0.5, 2.0, 4.0}) {
      const auto t = dilate(f, s);
      for (const auto& m : exps) {
        const double expected = m.is_infinite() ? 1.0 : std::pow(s, -static_cast<double>(n) / m.to_double());
        CHECK(lp_norm(t, m) / lp_norm(f, m) == doctest::Approx(expected).epsilon(1e-4));
      }
    }
  }
}

TEST_CASE("mollify") {
  const auto one = tabulate(line(-4, 4, 801), [](auto) { return 1.0; });
  const auto m1 = mollify(one, 0.3);
  for (std::size_t i = 0; i < m1.size(); ++i)
    if (std::abs(m1.coordinate(0, i)) < 3.0) CHECK(m1[i] == doctest::Approx(1.0).epsilon(1e-10));

  const FamilySpec bump{FamilyKind::kBump, {1.0}, {0.0}};
  const auto b = sample_family(bump, line(-2, 2, 801));
  double previous = INFINITY;
  for (double eps : {0.4, 0.2, 0.1}) {
    const auto m = mollify(b, eps);
    double err = 0;
    for (std::size_t i = 0; i < b.size(); ++i) err = std::max(err, std::abs(m[i] - b[i]));
    CHECK(err < previous);
    previous = err;
    CHECK(m.max_abs() <= b.max_abs() + 1e-10);
  }
  CHECK(error_of([&] { mollify(b, 0.005); }) == ErrorCode::kEpsTooSmall);

  const auto two_d = sample_family({FamilyKind::kBump, {1.0}, {0.0, 0.0}}, square(-2, 2, 81));
  CHECK(mollify(two_d, 0.3).max_abs() <= two_d.max_abs() + 1e-10);
}
