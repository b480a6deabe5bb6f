#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "xrt/exponents.hpp"

namespace xrt {

inline constexpr std::size_t kMaxDim = 8;

/// Source fields live on (s, x), target fields on (t, y). Axis 0 is s or t.
enum class Side { source, target };

std::string_view to_string(Side side);
Side parse_side(std::string_view text);

/// Uniform cell-centred grid on the box [origin, origin + counts * spacing].
/// Node i on an axis sits at origin + (i + 1/2) * spacing.
class Grid {
 public:
  Grid() = default;
  Grid(Side side, std::vector<double> origin, std::vector<double> spacing, std::vector<std::size_t> counts);

  /// Grid whose cells tile [lo, hi] exactly.
  static Grid box(Side side, std::span<const double> lo, std::span<const double> hi,
                  std::span<const std::size_t> counts);
  static Grid cube(Side side, int d, double lo, double hi, std::size_t n);

  Side side() const { return side_; }
  int dim() const { return static_cast<int>(counts_.size()); }
  const std::vector<double>& origin() const { return origin_; }
  const std::vector<double>& spacing() const { return spacing_; }
  const std::vector<std::size_t>& counts() const { return counts_; }

  std::size_t size() const { return size_; }
  /// Number of nodes in one slice of fixed axis-0 index.
  std::size_t slice_size() const { return size_ / counts_[0]; }
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }
  double cell_volume() const;
  /// Volume of one cell of a fixed-axis-0 slice (the dy element).
  double slice_cell_volume() const;

  double coordinate(int axis, std::size_t i) const {
    return origin_[static_cast<std::size_t>(axis)] + (static_cast<double>(i) + 0.5) * spacing_[static_cast<std::size_t>(axis)];
  }
  double lower(int axis) const { return origin_[static_cast<std::size_t>(axis)]; }
  double upper(int axis) const;

  void node(std::size_t flat, std::span<double> out) const;
  std::vector<double> node(std::size_t flat) const;

  Grid with_side(Side side) const;
  Grid with_counts(std::vector<std::size_t> counts) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Side side_ = Side::source;
  std::vector<double> origin_;
  std::vector<double> spacing_;
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

/// Real values sampled on a Grid, row-major with axis 0 slowest. Immutable.
class SampledField {
 public:
  SampledField() = default;
  SampledField(Grid grid, std::vector<double> values);

  static SampledField zeros(Grid grid);
  static SampledField sample(Grid grid, const std::function<double(std::span<const double>)>& fn);

  const Grid& grid() const { return grid_; }
  Side side() const { return grid_.side(); }
  int dim() const { return grid_.dim(); }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Multilinear interpolation between nodes. Nodes beyond the grid count as 0,
  /// so the interpolant vanishes a half cell outside the box.
  double interpolate(std::span<const double> point) const;

  bool is_nonnegative() const;
  bool is_zero() const;
  double max_value() const;

  SampledField scaled(double factor) const;
  /// Pointwise combination a * this + b * other on the same grid.
  SampledField combined(double a, const SampledField& other, double b) const;
  SampledField multiplied(const SampledField& other) const;
  SampledField mapped(const std::function<double(double)>& fn) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// gamma(t) = (t, t^2, ..., t^{d-1}).
std::vector<double> gamma_eval(int d, double t);
void gamma_into(double t, std::span<double> out);

double lp_norm(const SampledField& f, Exponent p);

/// Per t-slice inner integrals: integral of g^r dy, or the slice max when r = inf.
std::vector<double> slice_integrals(const SampledField& g, Exponent r);

/// (integral (integral g^r dy)^{q/r} dt)^{1/q} by Riemann sums; requires a
/// nonnegative target-side field.
double mixed_norm(const SampledField& g, Exponent q, Exponent r);

/// Dyadic Lorentz proxy (sum_j (2^j |E_j|^{1/p})^s)^{1/s}.
double lorentz_source_norm(const SampledField& f, Exponent p, Exponent s);

/// Slab Lorentz proxy (sum_l ||g^l||_{q,r}^s)^{1/s}.
double lorentz_mixed_norm(const SampledField& g, Exponent q, Exponent s, Exponent r);

/// F(z) chi(|z| < R) chi(|F| < R).
SampledField truncate(const SampledField& field, double radius);

/// Grid integral of a * b; both fields must share the grid.
double inner_product(const SampledField& a, const SampledField& b);

void require_nonnegative(const SampledField& f, std::string_view what);

}  // namespace xrt
