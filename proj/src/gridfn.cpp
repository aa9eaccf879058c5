#include "gnlab/gridfn.hpp"

#include "gnlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace gnlab {

namespace {

constexpr double kEdgeWarnRelative = 1e-8;

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

// Visits every multi-index in the per-axis inclusive ranges [first, last].
template <typename Fn>
void for_each_in_ranges(const std::vector<std::size_t>& first, const std::vector<std::size_t>& last,
                        const std::vector<std::size_t>& strides, Fn&& fn) {
  const std::size_t dim = first.size();
  std::vector<std::size_t> index = first;
  while (true) {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < dim; ++a) flat += index[a] * strides[a];
    fn(index, flat);
    std::size_t a = dim;
    while (a > 0) {
      --a;
      if (index[a] < last[a]) {
        ++index[a];
        break;
      }
      index[a] = first[a];
      if (a == 0) return;
    }
    if (dim == 0) return;
  }
}

struct WeightedRanges {
  std::vector<std::vector<double>> weights;
  std::vector<std::size_t> first;
  std::vector<std::size_t> last;
  bool empty = false;
};

WeightedRanges region_weights(const GridFunction& u, const std::optional<Box>& region) {
  const std::size_t dim = u.dim();
  if (region && region->dim() != dim)
    fail(ErrorCode::kInvalidArgument, "region dimension does not match the grid");
  WeightedRanges out;
  out.weights.resize(dim);
  out.first.resize(dim);
  out.last.resize(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    const double lo = region ? region->lo[a] : u.box().lo[a];
    const double hi = region ? region->hi[a] : u.box().hi[a];
    out.weights[a] = axis_weights(u, a, lo, hi);
    const auto& w = out.weights[a];
    auto nz = [](double v) { return v != 0.0; };
    auto it = std::find_if(w.begin(), w.end(), nz);
    if (it == w.end()) {
      out.empty = true;
      return out;
    }
    out.first[a] = static_cast<std::size_t>(it - w.begin());
    out.last[a] = w.size() - 1 - static_cast<std::size_t>(std::find_if(w.rbegin(), w.rend(), nz) - w.rbegin());
  }
  return out;
}

void require_region(const std::optional<Box>& region) {
  if (!region) return;
  for (std::size_t a = 0; a < region->dim(); ++a)
    if (!(region->hi[a] > region->lo[a]))
      fail(ErrorCode::kEmptyRegion, "region has zero volume");
}

double sup_over_region(const GridFunction& u, const std::optional<Box>& region) {
  const std::size_t dim = u.dim();
  std::vector<std::size_t> first(dim), last(dim);
  bool nodes_inside = true;
  for (std::size_t a = 0; a < dim; ++a) {
    const double h = u.spacing(a);
    const double lo = region ? std::max(region->lo[a], u.box().lo[a]) : u.box().lo[a];
    const double hi = region ? std::min(region->hi[a], u.box().hi[a]) : u.box().hi[a];
    if (hi < lo) fail(ErrorCode::kEmptyRegion, "region misses the grid");
    const double i0 = std::ceil((lo - u.box().lo[a]) / h - 1e-12);
    const double i1 = std::floor((hi - u.box().lo[a]) / h + 1e-12);
    if (i1 < i0) {
      nodes_inside = false;
    } else {
      first[a] = static_cast<std::size_t>(std::max(0.0, i0));
      last[a] = std::min(u.shape()[a] - 1, static_cast<std::size_t>(i1));
    }
  }
  double best = 0.0;
  if (nodes_inside) {
    std::vector<std::size_t> strides(dim);
    for (std::size_t a = 0; a < dim; ++a) strides[a] = u.stride(a);
    for_each_in_ranges(first, last, strides, [&](const auto&, std::size_t flat) {
      best = std::max(best, std::abs(u[flat]));
    });
  }
  if (dim == 1 && region) {
    // End values of the piecewise-linear interpolant of |u|.
    const double h = u.spacing(0);
    const std::size_t m = u.shape()[0];
    for (double x : {region->lo[0], region->hi[0]}) {
      const double t = (x - u.box().lo[0]) / h;
      if (t < 0.0 || t > static_cast<double>(m - 1)) continue;
      const auto i = std::min(static_cast<std::size_t>(t), m - 2);
      const double frac = t - static_cast<double>(i);
      best = std::max(best, (1.0 - frac) * std::abs(u[i]) + frac * std::abs(u[i + 1]));
    }
  } else if (!nodes_inside) {
    fail(ErrorCode::kEmptyRegion, "region contains no grid node");
  }
  return best;
}

double power_abs(double v, double p) {
  const double a = std::abs(v);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

}  // namespace

// ---------------------------------------------------------------------------

double Box::volume() const {
  double v = 1.0;
  for (std::size_t a = 0; a < dim(); ++a) v *= hi[a] - lo[a];
  return v;
}

Box Box::scaled(double factor) const {
  Box out = *this;
  for (std::size_t a = 0; a < dim(); ++a) {
    out.lo[a] = lo[a] * factor;
    out.hi[a] = hi[a] * factor;
  }
  return out;
}

Box Box::translated(std::span<const double> shift) const {
  Box out = *this;
  for (std::size_t a = 0; a < dim(); ++a) {
    out.lo[a] += shift[a];
    out.hi[a] += shift[a];
  }
  return out;
}

Box Box::cube(std::size_t dim, double lo, double hi) {
  return Box{std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
}

GridSpec GridSpec::refined() const {
  GridSpec out = *this;
  for (auto& m : out.shape) m = 2 * m - 1;
  return out;
}

std::string_view family_name(FamilyKind kind) noexcept {
  switch (kind) {
    case FamilyKind::kGaussian: return "gaussian";
    case FamilyKind::kBump: return "bump";
    case FamilyKind::kSineBump: return "sine_bump";
    case FamilyKind::kPolyGaussian: return "poly_gaussian";
  }
  return "unknown";
}

FamilyKind parse_family_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto kind : {FamilyKind::kGaussian, FamilyKind::kBump, FamilyKind::kSineBump,
                    FamilyKind::kPolyGaussian})
    if (family_name(kind) == lower) return kind;
  fail(ErrorCode::kParseError, "unknown family '" + std::string(name) + "'");
}

void FamilySpec::validate(std::size_t dim) const {
  if (center.size() != dim)
    fail(ErrorCode::kInvalidArgument, "family center has dimension " +
                                          std::to_string(center.size()) + ", grid has " +
                                          std::to_string(dim));
  if (!std::isfinite(amplitude)) fail(ErrorCode::kInvalidArgument, "amplitude must be finite");
  const std::size_t np = shape_params.size();
  switch (kind) {
    case FamilyKind::kGaussian: {
      const bool rotated = dim == 2 && np == 3;
      if (!(np == 1 || np == dim || rotated))
        fail(ErrorCode::kInvalidArgument, "gaussian takes 1 or n widths (or w1,w2,angle in 2-D)");
      for (std::size_t i = 0; i < (rotated ? 2 : np); ++i)
        if (!(shape_params[i] > 0)) fail(ErrorCode::kInvalidArgument, "widths must be positive");
      break;
    }
    case FamilyKind::kBump:
      if (np != 1 || !(shape_params[0] > 0))
        fail(ErrorCode::kInvalidArgument, "bump takes one positive width");
      break;
    case FamilyKind::kSineBump:
      if ((np != 2 && np != 3) || !(shape_params[0] > 0))
        fail(ErrorCode::kInvalidArgument, "sine_bump takes [width, omega(, phase)]");
      break;
    case FamilyKind::kPolyGaussian:
      if (np < 2 || !(shape_params[0] > 0))
        fail(ErrorCode::kInvalidArgument, "poly_gaussian takes [width, a0, a1, ...]");
      break;
  }
}

double FamilySpec::evaluate(std::span<const double> x) const {
  const std::size_t dim = x.size();
  double r2 = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    const double d = x[a] - center[a];
    r2 += d * d;
  }
  auto bump = [&](double w) {
    const double rho2 = r2 / (w * w);
    return rho2 < 1.0 ? std::exp(-1.0 / (1.0 - rho2)) : 0.0;
  };
  switch (kind) {
    case FamilyKind::kGaussian: {
      const std::size_t np = shape_params.size();
      double e = 0.0;
      if (dim == 2 && np == 3) {
        const double c = std::cos(shape_params[2]), s = std::sin(shape_params[2]);
        const double d0 = x[0] - center[0], d1 = x[1] - center[1];
        const double y0 = (c * d0 + s * d1) / shape_params[0];
        const double y1 = (-s * d0 + c * d1) / shape_params[1];
        e = y0 * y0 + y1 * y1;
      } else {
        for (std::size_t a = 0; a < dim; ++a) {
          const double w = shape_params[np == 1 ? 0 : a];
          const double y = (x[a] - center[a]) / w;
          e += y * y;
        }
      }
      return amplitude * std::exp(-e);
    }
    case FamilyKind::kBump:
      return amplitude * bump(shape_params[0]);
    case FamilyKind::kSineBump: {
      const double phase = shape_params.size() > 2 ? shape_params[2] : 0.0;
      return amplitude * bump(shape_params[0]) *
             std::sin(shape_params[1] * (x[0] - center[0]) + phase);
    }
    case FamilyKind::kPolyGaussian: {
      const double w = shape_params[0];
      const double t = (x[0] - center[0]) / w;
      double poly = 0.0;
      for (std::size_t i = shape_params.size(); i-- > 1;) poly = poly * t + shape_params[i];
      return amplitude * poly * std::exp(-r2 / (w * w));
    }
  }
  return 0.0;
}

double FamilySpec::support_radius() const {
  if (kind == FamilyKind::kBump || kind == FamilyKind::kSineBump) return shape_params[0];
  return std::numeric_limits<double>::infinity();
}

FamilySpec FamilySpec::dilated(double s) const {
  if (!(s > 0)) fail(ErrorCode::kNonpositiveScale, "dilation factor must be positive");
  FamilySpec out = *this;
  for (auto& c : out.center) c /= s;
  switch (kind) {
    case FamilyKind::kGaussian: {
      const bool rotated = center.size() == 2 && shape_params.size() == 3;
      for (std::size_t i = 0; i < (rotated ? 2 : shape_params.size()); ++i) out.shape_params[i] /= s;
      break;
    }
    case FamilyKind::kBump:
    case FamilyKind::kPolyGaussian:
      out.shape_params[0] /= s;
      break;
    case FamilyKind::kSineBump:
      out.shape_params[0] /= s;
      out.shape_params[1] *= s;
      break;
  }
  return out;
}

FamilySpec FamilySpec::translated(std::span<const double> shift) const {
  FamilySpec out = *this;
  for (std::size_t a = 0; a < out.center.size(); ++a) out.center[a] += shift[a];
  return out;
}

FamilySpec FamilySpec::scaled(double t) const {
  FamilySpec out = *this;
  out.amplitude *= t;
  return out;
}

// ---------------------------------------------------------------------------

GridFunction::GridFunction(Box box, std::vector<std::size_t> shape, std::vector<double> samples,
                           std::optional<FamilySpec> family)
    : box_(std::move(box)),
      shape_(std::move(shape)),
      samples_(std::move(samples)),
      family_(std::move(family)) {
  const std::size_t dim = box_.dim();
  if (dim == 0 || box_.hi.size() != dim || shape_.size() != dim)
    fail(ErrorCode::kInvalidArgument, "box and shape dimensions disagree");
  for (std::size_t m : shape_)
    if (m < 8) fail(ErrorCode::kGridTooCoarse, "every axis needs at least 8 samples");
  if (samples_.size() != product(shape_))
    fail(ErrorCode::kInvalidArgument, "sample count does not match the shape");
  spacing_.resize(dim);
  strides_.resize(dim);
  std::size_t stride = 1;
  for (std::size_t a = dim; a-- > 0;) {
    strides_[a] = stride;
    stride *= shape_[a];
    spacing_[a] = (box_.hi[a] - box_.lo[a]) / static_cast<double>(shape_[a] - 1);
    if (!(spacing_[a] > 0) || !std::isfinite(spacing_[a]))
      fail(ErrorCode::kInvalidArgument, "grid spacing must be positive and finite");
  }
  for (double v : samples_)
    if (!std::isfinite(v)) fail(ErrorCode::kInvalidArgument, "samples must be finite");
}

double GridFunction::max_spacing() const {
  return *std::max_element(spacing_.begin(), spacing_.end());
}

double GridFunction::cell_volume() const {
  return std::accumulate(spacing_.begin(), spacing_.end(), 1.0, std::multiplies<>());
}

double GridFunction::coordinate(std::size_t axis, std::size_t index) const {
  if (index + 1 == shape_[axis]) return box_.hi[axis];
  return box_.lo[axis] + static_cast<double>(index) * spacing_[axis];
}

std::vector<double> GridFunction::point(std::size_t flat) const {
  std::vector<double> x(dim());
  for (std::size_t a = 0; a < dim(); ++a) x[a] = coordinate(a, (flat / strides_[a]) % shape_[a]);
  return x;
}

double GridFunction::max_abs() const {
  double best = 0.0;
  for (double v : samples_) best = std::max(best, std::abs(v));
  return best;
}

GridFunction GridFunction::with_samples(std::vector<double> samples) const {
  GridFunction out(box_, shape_, std::move(samples));
  out.interpolated_ = interpolated_;
  return out;
}

GridFunction GridFunction::scaled(double t) const {
  std::vector<double> values(samples_.begin(), samples_.end());
  for (double& v : values) v *= t;
  GridFunction out(box_, shape_, std::move(values),
                   family_ ? std::optional<FamilySpec>(family_->scaled(t)) : std::nullopt);
  out.interpolated_ = interpolated_;
  out.edge_warning_ = edge_warning_;
  return out;
}

// ---------------------------------------------------------------------------

GridFunction sample_family(const FamilySpec& spec, const GridSpec& grid) {
  const std::size_t dim = grid.box.dim();
  spec.validate(dim);
  const double radius = spec.support_radius();
  if (std::isfinite(radius)) {
    for (std::size_t a = 0; a < dim; ++a)
      if (!(spec.center[a] - radius > grid.box.lo[a] && spec.center[a] + radius < grid.box.hi[a]))
        fail(ErrorCode::kSupportExceedsBox, "compact support is not strictly inside the box");
  }
  GridFunction out(grid.box, grid.shape, std::vector<double>(product(grid.shape), 0.0), spec);
  double edge = 0.0;
  std::vector<double> x(dim);
  for (std::size_t flat = 0; flat < out.samples_.size(); ++flat) {
    bool on_edge = false;
    for (std::size_t a = 0; a < dim; ++a) {
      const std::size_t i = (flat / out.strides_[a]) % out.shape_[a];
      x[a] = out.coordinate(a, i);
      on_edge = on_edge || i == 0 || i + 1 == out.shape_[a];
    }
    const double v = spec.evaluate(x);
    out.samples_[flat] = v;
    if (on_edge) edge = std::max(edge, std::abs(v));
  }
  out.edge_warning_ = edge > kEdgeWarnRelative * out.max_abs();
  return out;
}

GridFunction partial_derivative(const GridFunction& u, std::size_t axis) {
  if (axis >= u.dim())
    fail(ErrorCode::kAxisOutOfRange, "axis " + std::to_string(axis) + " out of range");
  const std::size_t m = u.shape()[axis];
  const std::size_t stride = u.stride(axis);
  const double inv = 1.0 / (12.0 * u.spacing(axis));
  auto samples = u.samples();
  std::vector<double> out(samples.size());
  for (std::size_t flat = 0; flat < samples.size(); ++flat) {
    const std::size_t i = (flat / stride) % m;
    auto at = [&](std::ptrdiff_t offset) {
      const auto idx = static_cast<std::ptrdiff_t>(i) + offset;
      if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(m)) return 0.0;
      return samples[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(flat) +
                                              offset * static_cast<std::ptrdiff_t>(stride))];
    };
    out[flat] = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) * inv;
  }
  return u.with_samples(std::move(out));
}

DerivativeField derivative_magnitude(const GridFunction& u, int k) {
  std::vector<std::size_t> axes(u.dim());
  std::iota(axes.begin(), axes.end(), std::size_t{0});
  return derivative_magnitude(u, k, axes);
}

DerivativeField derivative_magnitude(const GridFunction& u, int k,
                                     std::span<const std::size_t> axes) {
  if (k < 1) fail(ErrorCode::kInvalidArgument, "derivative order must be >= 1");
  if (axes.empty()) fail(ErrorCode::kInvalidArgument, "no axes selected");
  for (std::size_t axis : axes) {
    if (axis >= u.dim()) fail(ErrorCode::kAxisOutOfRange, "axis out of range");
    if (u.shape()[axis] < static_cast<std::size_t>(4 * k + 4))
      fail(ErrorCode::kGridTooCoarse, "order " + std::to_string(k) + " needs " +
                                          std::to_string(4 * k + 4) + " points per axis");
  }
  std::vector<double> sum(u.size(), 0.0);
  std::vector<int> counts(axes.size(), 0);
  double k_factorial = 1.0;
  for (int i = 2; i <= k; ++i) k_factorial *= i;

  // Mixed partials commute, so each multiset of axes is differentiated once
  // and weighted by the number of ordered tuples it stands for.
  std::function<void(const GridFunction&, int, std::size_t)> visit =
      [&](const GridFunction& current, int depth, std::size_t start) {
        if (depth == k) {
          double tuples = k_factorial;
          for (int c : counts)
            for (int i = 2; i <= c; ++i) tuples /= i;
          auto values = current.samples();
          for (std::size_t idx = 0; idx < sum.size(); ++idx) sum[idx] += tuples * values[idx] * values[idx];
          return;
        }
        for (std::size_t pos = start; pos < axes.size(); ++pos) {
          ++counts[pos];
          visit(partial_derivative(current, axes[pos]), depth + 1, pos);
          --counts[pos];
        }
      };
  visit(u, 0, 0);
  for (double& v : sum) v = std::sqrt(v);
  return DerivativeField{k, u.with_samples(std::move(sum))};
}

std::vector<double> axis_weights(const GridFunction& u, std::size_t axis, double a, double b) {
  const std::size_t m = u.shape()[axis];
  const double lo = u.box().lo[axis];
  const double h = u.spacing(axis);
  std::vector<double> w(m, 0.0);
  a = std::max(a, lo);
  b = std::min(b, u.box().hi[axis]);
  if (!(b > a)) return w;
  const double ta = (a - lo) / h;
  const double tb = (b - lo) / h;
  const auto first_cell = std::min(static_cast<std::size_t>(std::floor(ta)), m - 2);
  const auto last_cell = std::min(static_cast<std::size_t>(std::floor(tb)), m - 2);
  for (std::size_t c = first_cell; c <= last_cell; ++c) {
    const double t0 = std::clamp(ta - static_cast<double>(c), 0.0, 1.0);
    const double t1 = std::clamp(tb - static_cast<double>(c), 0.0, 1.0);
    if (t1 <= t0) continue;
    const double right = 0.5 * (t1 * t1 - t0 * t0);
    w[c] += h * ((t1 - t0) - right);
    w[c + 1] += h * right;
  }
  return w;
}

double lp_integral(const GridFunction& u, double p, const std::optional<Box>& region) {
  if (!(p >= 1.0) || !std::isfinite(p))
    fail(ErrorCode::kInvalidIndex, "lp_integral needs finite p >= 1");
  require_region(region);
  const auto ranges = region_weights(u, region);
  if (ranges.empty) fail(ErrorCode::kEmptyRegion, "region misses the grid");
  std::vector<std::size_t> strides(u.dim());
  for (std::size_t a = 0; a < u.dim(); ++a) strides[a] = u.stride(a);
  double total = 0.0;
  for_each_in_ranges(ranges.first, ranges.last, strides, [&](const auto& index, std::size_t flat) {
    double w = 1.0;
    for (std::size_t a = 0; a < index.size(); ++a) w *= ranges.weights[a][index[a]];
    if (w != 0.0) total += w * power_abs(u[flat], p);
  });
  return total;
}

double lp_norm(const GridFunction& u, double p, const std::optional<Box>& region) {
  return std::pow(lp_integral(u, p, region), 1.0 / p);
}

double lp_norm(const GridFunction& u, const ExtReal& p, const std::optional<Box>& region) {
  if (p < ExtReal(1)) fail(ErrorCode::kInvalidIndex, "norm index must be >= 1");
  if (p.is_infinite()) {
    require_region(region);
    return sup_over_region(u, region);
  }
  return lp_norm(u, p.to_double(), region);
}

double lp_norm(const DerivativeField& field, const ExtReal& p, const std::optional<Box>& region) {
  return lp_norm(field.magnitude, p, region);
}

double mean_value(const GridFunction& u, const std::optional<Box>& region) {
  require_region(region);
  const auto ranges = region_weights(u, region);
  if (ranges.empty) fail(ErrorCode::kEmptyRegion, "region misses the grid");
  std::vector<std::size_t> strides(u.dim());
  for (std::size_t a = 0; a < u.dim(); ++a) strides[a] = u.stride(a);
  double mass = 0.0, total = 0.0;
  for_each_in_ranges(ranges.first, ranges.last, strides, [&](const auto& index, std::size_t flat) {
    double w = 1.0;
    for (std::size_t a = 0; a < index.size(); ++a) w *= ranges.weights[a][index[a]];
    mass += w;
    total += w * u[flat];
  });
  if (!(mass > 0)) fail(ErrorCode::kEmptyRegion, "region has zero measure");
  return total / mass;
}

GridFunction dilate(const GridFunction& u, double s) {
  if (!(s > 0)) fail(ErrorCode::kNonpositiveScale, "dilation factor must be positive");
  const GridSpec target{u.box().scaled(1.0 / s), u.shape()};
  if (u.family()) return sample_family(u.family()->dilated(s), target);
  // Node i of the scaled grid maps back onto node i of the source grid.
  GridFunction out(target.box, target.shape,
                   std::vector<double>(u.samples().begin(), u.samples().end()));
  out.mark_interpolated();
  return out;
}

GridFunction dilate(const GridFunction& u, double s, const GridSpec& target) {
  if (!(s > 0)) fail(ErrorCode::kNonpositiveScale, "dilation factor must be positive");
  if (target.box.dim() != u.dim()) fail(ErrorCode::kInvalidArgument, "target dimension mismatch");
  if (u.family()) return sample_family(u.family()->dilated(s), target);

  GridFunction out(target.box, target.shape, std::vector<double>(product(target.shape), 0.0));
  const std::size_t dim = u.dim();
  std::vector<double> values(out.size());
  std::vector<std::size_t> base(dim);
  std::vector<double> frac(dim);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    const auto x = out.point(flat);
    bool inside = true;
    for (std::size_t a = 0; a < dim && inside; ++a) {
      const double t = (s * x[a] - u.box().lo[a]) / u.spacing(a);
      const auto m = static_cast<double>(u.shape()[a] - 1);
      if (t < 0.0 || t > m) {
        inside = false;
        break;
      }
      base[a] = std::min(static_cast<std::size_t>(t), u.shape()[a] - 2);
      frac[a] = t - static_cast<double>(base[a]);
    }
    if (!inside) continue;
    double v = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t{1} << dim); ++corner) {
      double w = 1.0;
      std::size_t idx = 0;
      for (std::size_t a = 0; a < dim; ++a) {
        const bool up = (corner >> a) & 1U;
        w *= up ? frac[a] : 1.0 - frac[a];
        idx += (base[a] + (up ? 1 : 0)) * u.stride(a);
      }
      if (w != 0.0) v += w * u[idx];
    }
    values[flat] = v;
  }
  GridFunction result = out.with_samples(std::move(values));
  result.mark_interpolated();
  return result;
}

GridFunction mollify(const GridFunction& u, double eps) {
  if (!(eps > 0) || eps < 2.0 * u.max_spacing())
    fail(ErrorCode::kEpsTooSmall, "eps must be at least twice the grid spacing");
  const std::size_t dim = u.dim();

  struct Tap {
    std::vector<std::ptrdiff_t> offset;
    double weight;
  };
  std::vector<Tap> taps;
  std::vector<std::ptrdiff_t> reach(dim);
  for (std::size_t a = 0; a < dim; ++a)
    reach[a] = static_cast<std::ptrdiff_t>(std::floor(eps / u.spacing(a)));
  std::vector<std::ptrdiff_t> offset(dim);
  for (std::size_t a = 0; a < dim; ++a) offset[a] = -reach[a];
  double mass = 0.0;
  while (true) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
      const double z = static_cast<double>(offset[a]) * u.spacing(a);
      r2 += z * z;
    }
    const double rho2 = r2 / (eps * eps);
    if (rho2 < 1.0) {
      const double w = std::exp(-1.0 / (1.0 - rho2));
      taps.push_back({offset, w});
      mass += w;
    }
    std::size_t a = dim;
    bool done = true;
    while (a-- > 0) {
      if (offset[a] < reach[a]) {
        ++offset[a];
        done = false;
        break;
      }
      offset[a] = -reach[a];
    }
    if (done) break;
  }
  for (auto& tap : taps) tap.weight /= mass;

  std::vector<double> out(u.size(), 0.0);
  std::vector<std::ptrdiff_t> index(dim);
  for (std::size_t flat = 0; flat < u.size(); ++flat) {
    for (std::size_t a = 0; a < dim; ++a)
      index[a] = static_cast<std::ptrdiff_t>((flat / u.stride(a)) % u.shape()[a]);
    double acc = 0.0;
    for (const auto& tap : taps) {
      std::ptrdiff_t src = 0;
      bool inside = true;
      for (std::size_t a = 0; a < dim; ++a) {
        const std::ptrdiff_t i = index[a] - tap.offset[a];
        if (i < 0 || i >= static_cast<std::ptrdiff_t>(u.shape()[a])) {
          inside = false;
          break;
        }
        src += i * static_cast<std::ptrdiff_t>(u.stride(a));
      }
      if (inside) acc += tap.weight * u[static_cast<std::size_t>(src)];
    }
    out[flat] = acc;
  }
  return u.with_samples(std::move(out));
}

}  // namespace gnlab
