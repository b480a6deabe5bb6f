#include "xrt/xray.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "xrt/error.hpp"
#include "xrt/kernels.hpp"

namespace xrt {

void TransformPlan::validate() const {
  if (source.dim() != target.dim()) throw Error(ErrorKind::plan, "source and target grids differ in dimension");
  if (source.dim() < 3) throw Error(ErrorKind::dimension, "transform needs d >= 3");
  if (source.side() != Side::source || target.side() != Side::target) {
    throw Error(ErrorKind::side, "plan grids must be tagged source and target");
  }
  if (s_quad == 1 || t_quad == 1) throw Error(ErrorKind::plan, "quadrature counts must be 0 (auto) or >= 2");
}

TransformPlan square_plan(const Grid& source, std::size_t s_quad, std::size_t t_quad) {
  TransformPlan plan{source.with_side(Side::source), source.with_side(Side::target), s_quad, t_quad};
  plan.validate();
  return plan;
}

std::size_t default_quad_count(const Grid& integrated, std::size_t requested) {
  if (requested == 1) throw Error(ErrorKind::plan, "quadrature count must be >= 2");
  return requested != 0 ? requested : 2 * (integrated.counts()[0] + 1);
}

namespace {

void check_pair(const SampledField& in, Side in_side, const Grid& out, Side out_side) {
  if (in.side() != in_side || out.side() != out_side) throw Error(ErrorKind::side, "field on the wrong side");
  if (in.dim() != out.dim()) throw Error(ErrorKind::plan, "field and output grid differ in dimension");
  if (in.dim() < 3) throw Error(ErrorKind::dimension, "transform needs d >= 3");
}

// Unravels a flat index into per-axis node coordinates.
inline void node_coords(const kernels::GridView& g, std::size_t flat, double* out) {
  for (int a = g.d - 1; a >= 0; --a) {
    const auto ua = static_cast<std::size_t>(a);
    const auto n = static_cast<std::size_t>(g.counts[ua]);
    out[ua] = g.origin[ua] + (static_cast<double>(flat % n) + 0.5) * g.spacing[ua];
    flat /= n;
  }
}

}  // namespace

SampledField apply_x(const SampledField& f, const Grid& target, std::size_t s_quad) {
  check_pair(f, Side::source, target, Side::target);
  const kernels::GridView src(f.grid());
  const kernels::GridView tgt(target);
  const int d = src.d;
  const std::size_t nq = default_quad_count(f.grid(), s_quad);
  const double s_lo = src.support_lo(0);
  const double ds = (src.support_hi(0) - s_lo) / static_cast<double>(nq);
  const double* fv = f.values().data();

  std::vector<double> out(target.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    std::array<double, kMaxDim> ty{};
    node_coords(tgt, idx, ty.data());
    std::array<double, kMaxDim> gam{};
    gamma_into(ty[0], std::span<double>(gam.data() + 1, static_cast<std::size_t>(d - 1)));

    // Each x_m = y_m + s t^m is affine in s, so the support box clips s to an interval.
    double a = s_lo, b = s_lo + static_cast<double>(nq) * ds;
    bool empty = false;
    for (int m = 1; m < d && !empty; ++m) {
      const auto um = static_cast<std::size_t>(m);
      const double lo = src.support_lo(m) - ty[um];
      const double hi = src.support_hi(m) - ty[um];
      const double slope = gam[um];
      if (slope == 0.0) {
        empty = !(lo < 0.0 && 0.0 < hi);
      } else {
        double s1 = lo / slope, s2 = hi / slope;
        if (s1 > s2) std::swap(s1, s2);
        a = std::max(a, s1);
        b = std::min(b, s2);
        empty = !(a < b);
      }
    }
    if (empty) continue;

    // One node of slack on each side; nodes outside the support add exact zeros.
    const auto last = static_cast<std::int64_t>(nq) - 1;
    const std::int64_t k0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((a - s_lo) / ds - 0.5)) - 1);
    const std::int64_t k1 = std::min<std::int64_t>(last, static_cast<std::int64_t>(std::ceil((b - s_lo) / ds - 0.5)) + 1);

    std::array<double, kMaxDim> z{};
    double acc = 0.0;
    for (std::int64_t k = k0; k <= k1; ++k) {
      const double s = s_lo + (static_cast<double>(k) + 0.5) * ds;
      z[0] = s;
      for (int m = 1; m < d; ++m) z[static_cast<std::size_t>(m)] = ty[static_cast<std::size_t>(m)] + s * gam[static_cast<std::size_t>(m)];
      acc += kernels::interpolate(src, fv, z.data());
    }
    out[idx] = acc * ds;
  }
  return SampledField(target, std::move(out));
}

SampledField apply_x(const SampledField& f, const TransformPlan& plan) {
  plan.validate();
  return apply_x(f, plan.target, plan.s_quad);
}

SampledField apply_x_star(const SampledField& g, const Grid& source, std::size_t t_quad) {
  check_pair(g, Side::target, source, Side::source);
  const kernels::GridView tgt(g.grid());
  const kernels::GridView src(source);
  const int d = tgt.d;
  const std::size_t nq = default_quad_count(g.grid(), t_quad);
  const double t_lo = tgt.support_lo(0);
  const double dt = (tgt.support_hi(0) - t_lo) / static_cast<double>(nq);
  const double* gv = g.values().data();

  // gamma at every quadrature node, shared by all output nodes.
  const auto dm1 = static_cast<std::size_t>(d - 1);
  std::vector<double> gam(nq * dm1);
  for (std::size_t k = 0; k < nq; ++k) {
    gamma_into(t_lo + (static_cast<double>(k) + 0.5) * dt, std::span<double>(gam.data() + k * dm1, dm1));
  }

  std::vector<double> out(source.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    std::array<double, kMaxDim> sx{};
    node_coords(src, idx, sx.data());
    const double s = sx[0];

    // y_1 = x_1 - s t is affine in t; clip on that axis, the rest is checked per node.
    std::int64_t k0 = 0, k1 = static_cast<std::int64_t>(nq) - 1;
    if (s != 0.0) {
      double t1 = (sx[1] - tgt.support_hi(1)) / s;
      double t2 = (sx[1] - tgt.support_lo(1)) / s;
      if (t1 > t2) std::swap(t1, t2);
      k0 = std::max<std::int64_t>(k0, static_cast<std::int64_t>(std::floor((t1 - t_lo) / dt - 0.5)) - 1);
      k1 = std::min<std::int64_t>(k1, static_cast<std::int64_t>(std::ceil((t2 - t_lo) / dt - 0.5)) + 1);
    }

    std::array<double, kMaxDim> z{};
    double acc = 0.0;
    for (std::int64_t k = k0; k <= k1; ++k) {
      z[0] = t_lo + (static_cast<double>(k) + 0.5) * dt;
      const double* gk = gam.data() + static_cast<std::size_t>(k) * dm1;
      for (std::size_t m = 1; m < static_cast<std::size_t>(d); ++m) z[m] = sx[m] - s * gk[m - 1];
      acc += kernels::interpolate(tgt, gv, z.data());
    }
    out[idx] = acc * dt;
  }
  return SampledField(source, std::move(out));
}

SampledField apply_x_star(const SampledField& g, const TransformPlan& plan) {
  plan.validate();
  return apply_x_star(g, plan.source, plan.t_quad);
}

double bilinear(const SampledField& f, const SampledField& g, const TransformPlan& plan) {
  if (f.side() != Side::source || g.side() != Side::target) {
    throw Error(ErrorKind::side, "bilinear needs a source field and a target field");
  }
  return inner_product(apply_x(f, g.grid(), plan.s_quad), g);
}

double phi_functional(const SampledField& f, Rational theta, const TransformPlan& plan) {
  const ExponentTriple e = triple_for_theta(f.dim(), theta);
  const double denom = lp_norm(f, e.p);
  if (!(denom > 0.0)) throw Error(ErrorKind::division, "phi_functional of a zero field");
  return mixed_norm(apply_x(f, plan), e.q, e.r) / denom;
}

}  // namespace xrt
