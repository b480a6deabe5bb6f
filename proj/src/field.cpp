#include "xrt/field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "xrt/error.hpp"
#include "xrt/kernels.hpp"

namespace xrt {

std::string_view to_string(Side side) { return side == Side::source ? "source" : "target"; }

Side parse_side(std::string_view text) {
  if (text == "source") return Side::source;
  if (text == "target") return Side::target;
  throw Error(ErrorKind::parse, "unknown side '" + std::string(text) + "'");
}

Grid::Grid(Side side, std::vector<double> origin, std::vector<double> spacing, std::vector<std::size_t> counts)
    : side_(side), origin_(std::move(origin)), spacing_(std::move(spacing)), counts_(std::move(counts)) {
  const std::size_t d = counts_.size();
  if (d < 2 || d > kMaxDim) throw Error(ErrorKind::dimension, "grid dimension must lie in [2, 8]");
  if (origin_.size() != d || spacing_.size() != d) {
    throw Error(ErrorKind::dimension, "grid origin/spacing/counts lengths differ");
  }
  for (std::size_t a = 0; a < d; ++a) {
    if (counts_[a] < 2) throw Error(ErrorKind::domain, "grid needs at least 2 nodes per axis");
    if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a])) {
      throw Error(ErrorKind::domain, "grid spacing must be positive and finite");
    }
    if (!std::isfinite(origin_[a])) throw Error(ErrorKind::domain, "grid origin must be finite");
  }
  strides_.assign(d, 1);
  for (std::size_t a = d - 1; a > 0; --a) strides_[a - 1] = strides_[a] * counts_[a];
  size_ = strides_[0] * counts_[0];
}

Grid Grid::box(Side side, std::span<const double> lo, std::span<const double> hi,
               std::span<const std::size_t> counts) {
  if (lo.size() != hi.size() || lo.size() != counts.size()) {
    throw Error(ErrorKind::dimension, "box bounds and counts must have equal length");
  }
  std::vector<double> spacing(lo.size());
  for (std::size_t a = 0; a < lo.size(); ++a) {
    if (!(hi[a] > lo[a])) throw Error(ErrorKind::domain, "box upper bound must exceed lower bound");
    spacing[a] = (hi[a] - lo[a]) / static_cast<double>(counts[a]);
  }
  return Grid(side, {lo.begin(), lo.end()}, std::move(spacing), {counts.begin(), counts.end()});
}

Grid Grid::cube(Side side, int d, double lo, double hi, std::size_t n) {
  const auto dd = static_cast<std::size_t>(d);
  std::vector<double> l(dd, lo), h(dd, hi);
  std::vector<std::size_t> c(dd, n);
  return box(side, l, h, c);
}

double Grid::cell_volume() const {
  return std::accumulate(spacing_.begin(), spacing_.end(), 1.0, std::multiplies<>());
}

double Grid::slice_cell_volume() const {
  return std::accumulate(spacing_.begin() + 1, spacing_.end(), 1.0, std::multiplies<>());
}

double Grid::upper(int axis) const {
  const auto a = static_cast<std::size_t>(axis);
  return origin_[a] + static_cast<double>(counts_[a]) * spacing_[a];
}

void Grid::node(std::size_t flat, std::span<double> out) const {
  for (int a = dim() - 1; a >= 0; --a) {
    const auto ua = static_cast<std::size_t>(a);
    out[ua] = coordinate(a, flat % counts_[ua]);
    flat /= counts_[ua];
  }
}

std::vector<double> Grid::node(std::size_t flat) const {
  std::vector<double> out(counts_.size());
  node(flat, out);
  return out;
}

Grid Grid::with_side(Side side) const { return Grid(side, origin_, spacing_, counts_); }

Grid Grid::with_counts(std::vector<std::size_t> counts) const {
  std::vector<double> lo(origin_), hi(counts_.size());
  for (int a = 0; a < dim(); ++a) hi[static_cast<std::size_t>(a)] = upper(a);
  return box(side_, lo, hi, counts);
}

SampledField::SampledField(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw Error(ErrorKind::dimension, "value count does not match grid size");
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::domain, "field values must be finite");
  }
}

SampledField SampledField::zeros(Grid grid) {
  std::vector<double> v(grid.size(), 0.0);
  return SampledField(std::move(grid), std::move(v));
}

SampledField SampledField::sample(Grid grid, const std::function<double(std::span<const double>)>& fn) {
  std::vector<double> v(grid.size());
  std::vector<double> z(static_cast<std::size_t>(grid.dim()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.node(i, z);
    v[i] = fn(z);
  }
  return SampledField(std::move(grid), std::move(v));
}

double SampledField::interpolate(std::span<const double> point) const {
  return kernels::interpolate(grid_, values_.data(), point.data());
}

bool SampledField::is_nonnegative() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
}

bool SampledField::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double SampledField::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

SampledField SampledField::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return SampledField(grid_, std::move(v));
}

SampledField SampledField::combined(double a, const SampledField& other, double b) const {
  if (!(other.grid_ == grid_)) throw Error(ErrorKind::plan, "fields live on different grids");
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * values_[i] + b * other.values_[i];
  return SampledField(grid_, std::move(v));
}

SampledField SampledField::multiplied(const SampledField& other) const {
  if (!(other.grid_ == grid_)) throw Error(ErrorKind::plan, "fields live on different grids");
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] * other.values_[i];
  return SampledField(grid_, std::move(v));
}

SampledField SampledField::mapped(const std::function<double(double)>& fn) const {
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(values_[i]);
  return SampledField(grid_, std::move(v));
}

std::vector<double> gamma_eval(int d, double t) {
  if (d < 3) throw Error(ErrorKind::dimension, "moment curve needs d >= 3");
  std::vector<double> out(static_cast<std::size_t>(d - 1));
  gamma_into(t, out);
  return out;
}

void gamma_into(double t, std::span<double> out) {
  double power = t;
  for (double& c : out) {
    c = power;
    power *= t;
  }
}

void require_nonnegative(const SampledField& f, std::string_view what) {
  if (!f.is_nonnegative()) throw Error(ErrorKind::nonnegativity, std::string(what) + " requires a nonnegative field");
}

namespace {

// |v|^p with exact fast paths for the common exponents.
inline double abs_pow(double v, double p) {
  const double a = std::fabs(v);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

}  // namespace

double lp_norm(const SampledField& f, Exponent p) {
  const Grid& g = f.grid();
  const auto values = f.values();
  if (p.is_infinite()) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m;
  }
  const double pe = p.as_double();
  const std::size_t slices = g.counts()[0];
  const std::size_t per = g.slice_size();
  std::vector<double> partial(slices, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < slices; ++k) {
    double acc = 0.0;
    const double* row = values.data() + k * per;
    for (std::size_t i = 0; i < per; ++i) acc += abs_pow(row[i], pe);
    partial[k] = acc;
  }
  double total = 0.0;
  for (double v : partial) total += v;
  total *= g.cell_volume();
  return pe == 1.0 ? total : std::pow(total, 1.0 / pe);
}

std::vector<double> slice_integrals(const SampledField& g, Exponent r) {
  const Grid& grid = g.grid();
  const auto values = g.values();
  const std::size_t slices = grid.counts()[0];
  const std::size_t per = grid.slice_size();
  const double dy = grid.slice_cell_volume();
  const bool inf = r.is_infinite();
  const double re = inf ? 0.0 : r.as_double();
  std::vector<double> out(slices, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < slices; ++k) {
    const double* row = values.data() + k * per;
    double acc = 0.0;
    if (inf) {
      for (std::size_t i = 0; i < per; ++i) acc = std::max(acc, std::fabs(row[i]));
    } else {
      for (std::size_t i = 0; i < per; ++i) acc += abs_pow(row[i], re);
      acc *= dy;
    }
    out[k] = acc;
  }
  return out;
}

double mixed_norm(const SampledField& g, Exponent q, Exponent r) {
  if (g.side() != Side::target) throw Error(ErrorKind::side, "mixed_norm expects a target-side field");
  require_nonnegative(g, "mixed_norm");
  const std::vector<double> inner = slice_integrals(g, r);
  const double dt = g.grid().spacing()[0];

  if (q.is_infinite()) {
    double m = 0.0;
    for (double v : inner) m = std::max(m, r.is_infinite() ? v : std::pow(v, r.reciprocal_double()));
    return m;
  }
  const double qe = q.as_double();
  double total = 0.0;
  if (q == r) {
    for (double v : inner) total += v;
  } else if (r.is_infinite()) {
    for (double v : inner) total += abs_pow(v, qe);
  } else {
    const double ratio = qe / r.as_double();
    for (double v : inner) total += std::pow(v, ratio);
  }
  total *= dt;
  return qe == 1.0 ? total : std::pow(total, 1.0 / qe);
}

SampledField truncate(const SampledField& field, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::domain, "truncation radius must be positive");
  const Grid& g = field.grid();
  std::vector<double> out(field.values().begin(), field.values().end());
  std::vector<double> z(static_cast<std::size_t>(g.dim()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    g.node(i, z);
    double r2 = 0.0;
    for (double c : z) r2 += c * c;
    if (!(std::sqrt(r2) < radius) || !(std::fabs(out[i]) < radius)) out[i] = 0.0;
  }
  return SampledField(g, std::move(out));
}

double inner_product(const SampledField& a, const SampledField& b) {
  if (!(a.grid() == b.grid())) throw Error(ErrorKind::plan, "inner product needs fields on the same grid");
  const std::size_t slices = a.grid().counts()[0];
  const std::size_t per = a.grid().slice_size();
  const double* av = a.values().data();
  const double* bv = b.values().data();
  std::vector<double> partial(slices, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < slices; ++k) {
    double acc = 0.0;
    for (std::size_t i = k * per; i < (k + 1) * per; ++i) acc += av[i] * bv[i];
    partial[k] = acc;
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total * a.grid().cell_volume();
}

}  // namespace xrt
