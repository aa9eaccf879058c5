#pragma once

// Sampled functions on uniform box grids in R^n, with fourth-order finite
// difference derivative tensors and L^p quadrature.
//
// Samples are stored row-major (the last axis varies fastest). Node i on axis
// a sits at lo[a] + i * h[a] with h[a] = (hi[a] - lo[a]) / (m[a] - 1).
// Everything outside the box is treated as zero, both for differentiation and
// for quadrature, so the test families are chosen to decay to round-off
// before the box edge.

#include "gnlab/rational.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gnlab {

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const { return lo.size(); }
  double volume() const;
  Box scaled(double factor) const;
  Box translated(std::span<const double> shift) const;
  static Box cube(std::size_t dim, double lo, double hi);
};

struct GridSpec {
  Box box;
  std::vector<std::size_t> shape;

  /// Same box, 2m - 1 points per axis, so the coarse nodes are a subset.
  GridSpec refined() const;
};

enum class FamilyKind { kGaussian, kBump, kSineBump, kPolyGaussian };

std::string_view family_name(FamilyKind kind) noexcept;
FamilyKind parse_family_kind(std::string_view name);

/// Closed-form test functions.
///
///   GAUSSIAN       params [w] or [w_1..w_n]; in 2-D optionally [w_1, w_2, angle]
///                  to rotate the principal axes. exp(-sum ((R(x-c))_i / w_i)^2).
///   BUMP           params [w]. exp(-1 / (1 - |x-c|^2 / w^2)) for |x-c| < w, else 0.
///   SINE_BUMP      params [w, omega] or [w, omega, phase]. BUMP * sin(omega (x_1-c_1) + phase).
///   POLY_GAUSSIAN  params [w, a_0, a_1, ...]. P(t) exp(-|x-c|^2 / w^2), t = (x_1-c_1)/w.
///
/// Every member is multiplied by `amplitude`.
struct FamilySpec {
  FamilyKind kind = FamilyKind::kGaussian;
  std::vector<double> shape_params;
  std::vector<double> center;
  double amplitude = 1.0;

  double evaluate(std::span<const double> x) const;
  /// Radius of the compact support, or +inf for the Gaussian kinds.
  double support_radius() const;
  void validate(std::size_t dim) const;

  /// The member v with v(x) = u(s x).
  FamilySpec dilated(double s) const;
  FamilySpec translated(std::span<const double> shift) const;
  FamilySpec scaled(double t) const;
};

class GridFunction {
 public:
  GridFunction(Box box, std::vector<std::size_t> shape, std::vector<double> samples,
               std::optional<FamilySpec> family = std::nullopt);

  std::size_t dim() const { return box_.dim(); }
  const Box& box() const { return box_; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  GridSpec grid() const { return {box_, shape_}; }
  std::size_t size() const { return samples_.size(); }
  double spacing(std::size_t axis) const { return spacing_.at(axis); }
  double max_spacing() const;
  double cell_volume() const;
  /// Distance in the flat array between neighbours along `axis`.
  std::size_t stride(std::size_t axis) const { return strides_.at(axis); }
  double coordinate(std::size_t axis, std::size_t index) const;
  /// Coordinates of the node at flat index `flat`.
  std::vector<double> point(std::size_t flat) const;

  std::span<const double> samples() const { return samples_; }
  double operator[](std::size_t flat) const { return samples_[flat]; }
  double max_abs() const;

  const std::optional<FamilySpec>& family() const { return family_; }
  /// Set when samples came from interpolation rather than re-evaluation.
  bool interpolated() const { return interpolated_; }
  /// Set when the sampled family is still above 1e-8 (relative) at the box edge.
  bool edge_warning() const { return edge_warning_; }
  void mark_interpolated() { interpolated_ = true; }

  GridFunction with_samples(std::vector<double> samples) const;
  /// t * u, keeping the family description.
  GridFunction scaled(double t) const;

 private:
  Box box_;
  std::vector<std::size_t> shape_;
  std::vector<double> samples_;
  std::vector<double> spacing_;
  std::vector<std::size_t> strides_;
  std::optional<FamilySpec> family_;
  bool interpolated_ = false;
  bool edge_warning_ = false;

  friend GridFunction sample_family(const FamilySpec&, const GridSpec&);
};

/// Pointwise |grad^k u| on the grid of the base function.
struct DerivativeField {
  int order = 0;
  GridFunction magnitude;
};

/// Throws kSupportExceedsBox for BUMP-type members not strictly inside the box.
GridFunction sample_family(const FamilySpec& spec, const GridSpec& grid);

/// Fourth-order central difference along `axis` with zero extension.
GridFunction partial_derivative(const GridFunction& u, std::size_t axis);

/// sqrt of the sum over ordered k-tuples (i_1..i_k) drawn from `axes` of
/// (d^k u / dx_i1 ... dx_ik)^2. With all axes this is |grad^k u|; a subset of
/// axes gives the magnitude of the derivatives in those directions only.
DerivativeField derivative_magnitude(const GridFunction& u, int k);
DerivativeField derivative_magnitude(const GridFunction& u, int k,
                                     std::span<const std::size_t> axes);

/// (integral over region of |u|^p)^(1/p). The integrand |u|^p is replaced by
/// its piecewise multilinear interpolant, which is the trapezoid rule on whole
/// cells and varies continuously with the region bounds. p = inf is the max
/// of |u| over the region (in 1-D including the interpolated end values).
double lp_norm(const GridFunction& u, const ExtReal& p, const std::optional<Box>& region = {});
double lp_norm(const DerivativeField& field, const ExtReal& p,
               const std::optional<Box>& region = {});
/// Same quadrature with a real exponent (p >= 1, finite).
double lp_norm(const GridFunction& u, double p, const std::optional<Box>& region = {});

/// integral over region of |u|^p (p finite) without the final root.
double lp_integral(const GridFunction& u, double p, const std::optional<Box>& region = {});

double mean_value(const GridFunction& u, const std::optional<Box>& region = {});

/// Quadrature weights of the piecewise-linear interpolant along one axis for
/// the interval [a, b]; entry i belongs to node i. All zero when the interval
/// misses the grid.
std::vector<double> axis_weights(const GridFunction& u, std::size_t axis, double a, double b);

/// T_s u (x) = u(s x) on the box scaled by 1/s with the same node counts.
/// Re-evaluates the family when one is attached, otherwise copies the
/// samples, which is exact on the scaled grid.
GridFunction dilate(const GridFunction& u, double s);
/// T_s u sampled on an arbitrary grid: re-evaluation when possible, else
/// multilinear interpolation (zero outside the source box), flagged.
GridFunction dilate(const GridFunction& u, double s, const GridSpec& target);

/// Convolution with the standard bump mollifier of radius eps, normalized to
/// unit discrete mass. Throws kEpsTooSmall when eps < 2 * max spacing.
GridFunction mollify(const GridFunction& u, double eps);

}  // namespace gnlab
