#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "xrt/field.hpp"
#include "xrt/paraball.hpp"
#include "xrt/symmetry.hpp"

namespace xrt::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

/// Paraball with alpha, beta log-uniform in [lo, hi] and centres uniform in [-c, c].
inline Paraball random_paraball(Rng& rng, int d, double lo = 0.5, double hi = 2.0, double c = 1.0) {
  Paraball b;
  b.s0 = uniform(rng, -c, c);
  b.t0 = uniform(rng, -c, c);
  for (int m = 1; m < d; ++m) b.ybar.push_back(uniform(rng, -c, c));
  b.alpha = log_uniform(rng, lo, hi);
  b.beta = log_uniform(rng, lo, hi);
  return b;
}

/// Scale, then shear, then translate, each drawn with the given amplitude.
inline Symmetry random_symmetry(Rng& rng, int d, double amplitude = 0.5) {
  std::vector<double> v;
  for (int m = 1; m < d; ++m) v.push_back(uniform(rng, -amplitude, amplitude));
  const double a = std::exp(uniform(rng, -0.6 * amplitude, 0.6 * amplitude));
  const double b = std::exp(uniform(rng, -0.6 * amplitude, 0.6 * amplitude));
  return Symmetry({Scale{a, b}, Shear{uniform(rng, -amplitude, amplitude), uniform(rng, -amplitude, amplitude)},
                   Translate{v}});
}

/// Three Gaussian bumps with widths 0.10-0.25 of the box and centres in its middle half.
inline SampledField gaussian_mixture(const Grid& grid, Rng& rng) {
  struct Bump {
    std::vector<double> centre, width;
    double weight;
  };
  std::vector<Bump> bumps;
  for (int k = 0; k < 3; ++k) {
    Bump b;
    for (int ax = 0; ax < grid.dim(); ++ax) {
      const double len = grid.upper(ax) - grid.lower(ax);
      b.width.push_back((0.1 + 0.15 * uniform(rng, 0, 1)) * len);
      b.centre.push_back(grid.lower(ax) + len * (0.25 + 0.5 * uniform(rng, 0, 1)));
    }
    b.weight = 0.5 + uniform(rng, 0, 1);
    bumps.push_back(std::move(b));
  }
  return SampledField::sample(grid, [&](std::span<const double> z) {
    double v = 0.0;
    for (const Bump& b : bumps) {
      double r2 = 0.0;
      for (std::size_t ax = 0; ax < z.size(); ++ax) {
        const double u = (z[ax] - b.centre[ax]) / b.width[ax];
        r2 += u * u;
      }
      v += b.weight * std::exp(-0.5 * r2);
    }
    return v;
  });
}

/// Smooth bump cos^2 supported in a ball of the given radius, times a random linear ramp.
inline SampledField compact_bump(const Grid& grid, Rng& rng, double radius) {
  std::vector<double> centre, tilt;
  for (int ax = 0; ax < grid.dim(); ++ax) {
    centre.push_back(uniform(rng, -0.2, 0.2) * radius);
    tilt.push_back(uniform(rng, -0.3, 0.3) / radius);
  }
  return SampledField::sample(grid, [&](std::span<const double> z) {
    double r2 = 0.0, ramp = 1.0;
    for (std::size_t ax = 0; ax < z.size(); ++ax) {
      r2 += (z[ax] - centre[ax]) * (z[ax] - centre[ax]);
      ramp += tilt[ax] * (z[ax] - centre[ax]);
    }
    const double r = std::sqrt(r2) / radius;
    if (r >= 1.0) return 0.0;
    const double c = std::cos(0.5 * M_PI * r);
    return c * c * c * c * ramp;
  });
}

/// Step function: a few boxes of random dyadic-ish heights on top of each other.
/// Redrawn until at least one node is covered, so the result is never zero.
inline SampledField random_step(const Grid& grid, Rng& rng, int boxes = 4) {
  std::vector<double> values(grid.size(), 0.0);
  while (std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; })) {
    std::vector<double> z(static_cast<std::size_t>(grid.dim()));
    for (int k = 0; k < boxes; ++k) {
      std::vector<double> lo, hi;
      for (int ax = 0; ax < grid.dim(); ++ax) {
        const double a = uniform(rng, grid.lower(ax), grid.upper(ax));
        const double b = uniform(rng, grid.lower(ax), grid.upper(ax));
        lo.push_back(std::min(a, b));
        hi.push_back(std::max(a, b));
      }
      const double height = std::ldexp(uniform(rng, 1.0, 2.0), static_cast<int>(std::floor(uniform(rng, -6, 6))));
      for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.node(i, z);
        bool inside = true;
        for (std::size_t ax = 0; ax < z.size() && inside; ++ax) inside = z[ax] >= lo[ax] && z[ax] <= hi[ax];
        if (inside) values[i] += height;
      }
    }
  }
  return SampledField(grid, std::move(values));
}

}  // namespace xrt::testing
