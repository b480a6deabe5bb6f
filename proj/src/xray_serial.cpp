// Straightforward reference kernels kept for testing the parallel ones.

#include <vector>

#include "xrt/error.hpp"
#include "xrt/kernels.hpp"
#include "xrt/xray.hpp"

namespace xrt::serial {

SampledField apply_x(const SampledField& f, const Grid& target, std::size_t s_quad) {
  if (f.side() != Side::source || target.side() != Side::target) throw Error(ErrorKind::side, "field on the wrong side");
  if (f.dim() != target.dim()) throw Error(ErrorKind::plan, "field and output grid differ in dimension");
  const int d = f.dim();
  const std::size_t nq = default_quad_count(f.grid(), s_quad);
  const kernels::GridView src(f.grid());
  const double s_lo = src.support_lo(0);
  const double ds = (src.support_hi(0) - s_lo) / static_cast<double>(nq);

  std::vector<double> out(target.size());
  std::vector<double> ty(static_cast<std::size_t>(d)), z(static_cast<std::size_t>(d));
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    target.node(idx, ty);
    const std::vector<double> gam = gamma_eval(d, ty[0]);
    double acc = 0.0;
    for (std::size_t k = 0; k < nq; ++k) {
      const double s = s_lo + (static_cast<double>(k) + 0.5) * ds;
      z[0] = s;
      for (std::size_t m = 1; m < z.size(); ++m) z[m] = ty[m] + s * gam[m - 1];
      acc += f.interpolate(z);
    }
    out[idx] = acc * ds;
  }
  return SampledField(target, std::move(out));
}

SampledField apply_x_star(const SampledField& g, const Grid& source, std::size_t t_quad) {
  if (g.side() != Side::target || source.side() != Side::source) throw Error(ErrorKind::side, "field on the wrong side");
  if (g.dim() != source.dim()) throw Error(ErrorKind::plan, "field and output grid differ in dimension");
  const int d = g.dim();
  const std::size_t nq = default_quad_count(g.grid(), t_quad);
  const kernels::GridView tgt(g.grid());
  const double t_lo = tgt.support_lo(0);
  const double dt = (tgt.support_hi(0) - t_lo) / static_cast<double>(nq);

  std::vector<double> out(source.size());
  std::vector<double> sx(static_cast<std::size_t>(d)), z(static_cast<std::size_t>(d));
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    source.node(idx, sx);
    double acc = 0.0;
    for (std::size_t k = 0; k < nq; ++k) {
      const double t = t_lo + (static_cast<double>(k) + 0.5) * dt;
      const std::vector<double> gam = gamma_eval(d, t);
      z[0] = t;
      for (std::size_t m = 1; m < z.size(); ++m) z[m] = sx[m] - sx[0] * gam[m - 1];
      acc += g.interpolate(z);
    }
    out[idx] = acc * dt;
  }
  return SampledField(source, std::move(out));
}

}  // namespace xrt::serial
