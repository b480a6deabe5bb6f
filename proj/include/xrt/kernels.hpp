#pragma once

// Inner-loop helpers shared by the transforms and pullbacks. Not part of the
// stable API.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

#include "xrt/field.hpp"

namespace xrt::kernels {

// Flat copy of the grid geometry so hot loops avoid vector indirection.
struct GridView {
  int d = 0;
  std::array<double, kMaxDim> origin{};
  std::array<double, kMaxDim> spacing{};
  std::array<double, kMaxDim> inv_spacing{};
  std::array<std::int64_t, kMaxDim> counts{};
  std::array<std::size_t, kMaxDim> stride{};

  explicit GridView(const Grid& g) : d(g.dim()) {
    for (int a = 0; a < d; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      origin[ua] = g.origin()[ua];
      spacing[ua] = g.spacing()[ua];
      inv_spacing[ua] = 1.0 / g.spacing()[ua];
      counts[ua] = static_cast<std::int64_t>(g.counts()[ua]);
      stride[ua] = g.stride(a);
    }
  }

  // Open interval on which the zero-padded interpolant can be nonzero.
  double support_lo(int a) const { return origin[static_cast<std::size_t>(a)] - 0.5 * spacing[static_cast<std::size_t>(a)]; }
  double support_hi(int a) const {
    const auto ua = static_cast<std::size_t>(a);
    return origin[ua] + (static_cast<double>(counts[ua]) + 0.5) * spacing[ua];
  }
};

inline double interpolate(const GridView& g, const double* values, const double* point) {
  std::array<std::int64_t, kMaxDim> base{};
  std::array<double, kMaxDim> frac{};
  for (int a = 0; a < g.d; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const double u = (point[ua] - g.origin[ua]) * g.inv_spacing[ua] - 0.5;
    if (!(u > -1.0) || !(u < static_cast<double>(g.counts[ua]))) return 0.0;
    const double fl = std::floor(u);
    base[ua] = static_cast<std::int64_t>(fl);
    frac[ua] = u - fl;
  }
  double acc = 0.0;
  const unsigned corners = 1u << static_cast<unsigned>(g.d);
  for (unsigned mask = 0; mask < corners; ++mask) {
    double w = 1.0;
    std::size_t idx = 0;
    bool inside = true;
    for (int a = 0; a < g.d; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const bool hi = (mask >> static_cast<unsigned>(a)) & 1u;
      const std::int64_t i = base[ua] + (hi ? 1 : 0);
      if (i < 0 || i >= g.counts[ua]) {
        inside = false;
        break;
      }
      w *= hi ? frac[ua] : 1.0 - frac[ua];
      idx += static_cast<std::size_t>(i) * g.stride[ua];
    }
    if (inside && w != 0.0) acc += w * values[idx];
  }
  return acc;
}

inline double interpolate(const Grid& g, const double* values, const double* point) {
  return interpolate(GridView(g), values, point);
}

}  // namespace xrt::kernels
