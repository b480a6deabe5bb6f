#pragma once

#include <cstddef>

#include "xrt/exponents.hpp"
#include "xrt/field.hpp"

namespace xrt {

/// Grids and quadrature sizes for X and X*. A quadrature count of 0 selects
/// 2 (n + 1) midpoint nodes over the padded extent of the integrated field,
/// which is exact for profiles that are piecewise linear along the axis.
struct TransformPlan {
  Grid source;
  Grid target;
  std::size_t s_quad = 0;
  std::size_t t_quad = 0;

  /// Throws ErrorKind::plan on mismatched dimensions, sides or a count of 1.
  void validate() const;
};

/// Plan whose target grid is the source grid relabelled, a common test setup.
TransformPlan square_plan(const Grid& source, std::size_t s_quad = 0, std::size_t t_quad = 0);

std::size_t default_quad_count(const Grid& integrated, std::size_t requested);

/// Xf(t, y) = integral of f(s, y + s gamma(t)) ds at each target node.
SampledField apply_x(const SampledField& f, const TransformPlan& plan);
SampledField apply_x(const SampledField& f, const Grid& target, std::size_t s_quad);

/// X*g(s, x) = integral of g(t, x - s gamma(t)) dt at each source node.
SampledField apply_x_star(const SampledField& g, const TransformPlan& plan);
SampledField apply_x_star(const SampledField& g, const Grid& source, std::size_t t_quad);

/// Grid integral of Xf * g, with Xf evaluated on g's grid.
double bilinear(const SampledField& f, const SampledField& g, const TransformPlan& plan);

/// ||Xf||_{q,r} / ||f||_p for the triple at theta.
double phi_functional(const SampledField& f, Rational theta, const TransformPlan& plan);

namespace serial {

// Reference kernels: one thread, no clipping of the quadrature range.
SampledField apply_x(const SampledField& f, const Grid& target, std::size_t s_quad);
SampledField apply_x_star(const SampledField& g, const Grid& source, std::size_t t_quad);

}  // namespace serial

}  // namespace xrt
