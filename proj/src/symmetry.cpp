#include "xrt/symmetry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "xrt/error.hpp"
#include "xrt/kernels.hpp"

namespace xrt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Binomial coefficients up to kMaxDim.
const std::array<std::array<double, kMaxDim + 1>, kMaxDim + 1>& binomials() {
  static const auto table = [] {
    std::array<std::array<double, kMaxDim + 1>, kMaxDim + 1> c{};
    for (std::size_t n = 0; n <= kMaxDim; ++n) {
      c[n][0] = 1.0;
      for (std::size_t k = 1; k <= n; ++k) c[n][k] = c[n - 1][k - 1] + (k < n ? c[n - 1][k] : 0.0);
    }
    return c;
  }();
  return table;
}

void check_translate(const Translate& tr, std::size_t n) {
  if (tr.v.size() != n) throw Error(ErrorKind::dimension, "translation length does not match d-1");
}

void add_gamma(double t, double coeff, std::span<double> x) {
  double power = t;
  for (double& c : x) {
    c += coeff * power;
    power *= t;
  }
}

void scale_space(double alpha, double beta, std::span<double> x) {
  double factor = alpha;
  for (double& c : x) {
    factor *= beta;
    c *= factor;
  }
}

void unscale_space(double alpha, double beta, std::span<double> x) {
  double factor = alpha;
  for (double& c : x) {
    factor *= beta;
    c /= factor;
  }
}

void phi(const Generator& op, std::span<double> z) {
  std::span<double> x = z.subspan(1);
  std::visit(overloaded{
                 [&](const Translate& tr) {
                   check_translate(tr, x.size());
                   for (std::size_t i = 0; i < x.size(); ++i) x[i] += tr.v[i];
                 },
                 [&](const Scale& sc) {
                   z[0] *= sc.alpha;
                   scale_space(sc.alpha, sc.beta, x);
                 },
                 [&](const Shear& sh) {
                   z[0] += sh.s0;
                   apply_shear_matrix(sh.t0, x, x);
                   add_gamma(sh.t0, z[0], x);
                 },
             },
             op);
}

void phi_inverse(const Generator& op, std::span<double> z) {
  std::span<double> x = z.subspan(1);
  std::visit(overloaded{
                 [&](const Translate& tr) {
                   check_translate(tr, x.size());
                   for (std::size_t i = 0; i < x.size(); ++i) x[i] -= tr.v[i];
                 },
                 [&](const Scale& sc) {
                   z[0] /= sc.alpha;
                   unscale_space(sc.alpha, sc.beta, x);
                 },
                 [&](const Shear& sh) {
                   add_gamma(sh.t0, -z[0], x);
                   apply_shear_matrix(-sh.t0, x, x);
                   z[0] -= sh.s0;
                 },
             },
             op);
}

void psi(const Generator& op, std::span<double> z) {
  std::span<double> y = z.subspan(1);
  std::visit(overloaded{
                 [&](const Translate& tr) {
                   check_translate(tr, y.size());
                   for (std::size_t i = 0; i < y.size(); ++i) y[i] += tr.v[i];
                 },
                 [&](const Scale& sc) {
                   z[0] *= sc.beta;
                   scale_space(sc.alpha, sc.beta, y);
                 },
                 [&](const Shear& sh) {
                   add_gamma(z[0], -sh.s0, y);
                   apply_shear_matrix(sh.t0, y, y);
                   z[0] += sh.t0;
                 },
             },
             op);
}

void psi_inverse(const Generator& op, std::span<double> z) {
  std::span<double> y = z.subspan(1);
  std::visit(overloaded{
                 [&](const Translate& tr) {
                   check_translate(tr, y.size());
                   for (std::size_t i = 0; i < y.size(); ++i) y[i] -= tr.v[i];
                 },
                 [&](const Scale& sc) {
                   z[0] /= sc.beta;
                   unscale_space(sc.alpha, sc.beta, y);
                 },
                 [&](const Shear& sh) {
                   z[0] -= sh.t0;
                   apply_shear_matrix(-sh.t0, y, y);
                   add_gamma(z[0], sh.s0, y);
                 },
             },
             op);
}

void validate(const Generator& op) {
  if (const auto* sc = std::get_if<Scale>(&op)) {
    if (!(sc->alpha > 0.0) || !(sc->beta > 0.0) || !std::isfinite(sc->alpha) || !std::isfinite(sc->beta)) {
      throw Error(ErrorKind::domain, "scale parameters must be positive and finite");
    }
  } else if (const auto* sh = std::get_if<Shear>(&op)) {
    if (!std::isfinite(sh->s0) || !std::isfinite(sh->t0)) throw Error(ErrorKind::domain, "shear parameters must be finite");
  } else {
    for (double c : std::get<Translate>(op).v) {
      if (!std::isfinite(c)) throw Error(ErrorKind::domain, "translation must be finite");
    }
  }
}

}  // namespace

ShearMatrix shear_matrix(int d, double t0) {
  if (d < 3) throw Error(ErrorKind::dimension, "shear matrix needs d >= 3");
  ShearMatrix g;
  g.n = d - 1;
  g.entries.assign(static_cast<std::size_t>(g.n * g.n), 0.0);
  const auto& c = binomials();
  for (int m = 1; m <= g.n; ++m) {
    for (int i = 1; i <= m; ++i) {
      g.entries[static_cast<std::size_t>((m - 1) * g.n + (i - 1))] =
          c[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] * std::pow(t0, m - i);
    }
  }
  return g;
}

void apply_shear_matrix(double t0, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  if (n > kMaxDim) throw Error(ErrorKind::dimension, "dimension too large");
  const auto& c = binomials();
  std::array<double, kMaxDim + 1> powers{};
  powers[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) powers[k] = powers[k - 1] * t0;
  std::array<double, kMaxDim> out{};
  for (std::size_t m = 1; m <= n; ++m) {
    double acc = 0.0;
    for (std::size_t i = 1; i <= m; ++i) acc += c[m][i] * powers[m - i] * x[i - 1];
    out[m - 1] = acc;
  }
  std::copy(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n), y.begin());
}

Symmetry::Symmetry(std::vector<Generator> ops) : ops_(std::move(ops)) {
  for (const Generator& op : ops_) validate(op);
}

Symmetry Symmetry::translate(std::vector<double> v) { return Symmetry({Translate{std::move(v)}}); }
Symmetry Symmetry::scale(double alpha, double beta) { return Symmetry({Scale{alpha, beta}}); }
Symmetry Symmetry::shear(double s0, double t0) { return Symmetry({Shear{s0, t0}}); }

Symmetry Symmetry::inverse() const {
  std::vector<Generator> out;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
    std::visit(overloaded{
                   [&](const Translate& tr) {
                     std::vector<double> v(tr.v);
                     for (double& c : v) c = -c;
                     out.emplace_back(Translate{std::move(v)});
                   },
                   [&](const Scale& sc) { out.emplace_back(Scale{1.0 / sc.alpha, 1.0 / sc.beta}); },
                   // Undo the G_{t0} part first, then the s-shift (a shear with t0 = 0).
                   [&](const Shear& sh) {
                     out.emplace_back(Shear{0.0, -sh.t0});
                     out.emplace_back(Shear{-sh.s0, 0.0});
                   },
               },
               *it);
  }
  return Symmetry(std::move(out));
}

bool Symmetry::is_paraball_form() const {
  return ops_.size() == 3 && std::holds_alternative<Scale>(ops_[0]) && std::holds_alternative<Shear>(ops_[1]) &&
         std::holds_alternative<Translate>(ops_[2]);
}

Symmetry compose(const Symmetry& outer, const Symmetry& inner) {
  std::vector<Generator> ops(inner.ops());
  ops.insert(ops.end(), outer.ops().begin(), outer.ops().end());
  return Symmetry(std::move(ops));
}

void map_source_inplace(const Symmetry& sigma, std::span<double> z) {
  for (const Generator& op : sigma.ops()) phi(op, z);
}

void map_target_inplace(const Symmetry& sigma, std::span<double> z) {
  for (const Generator& op : sigma.ops()) psi(op, z);
}

void unmap_source_inplace(const Symmetry& sigma, std::span<double> z) {
  for (auto it = sigma.ops().rbegin(); it != sigma.ops().rend(); ++it) phi_inverse(*it, z);
}

void unmap_target_inplace(const Symmetry& sigma, std::span<double> z) {
  for (auto it = sigma.ops().rbegin(); it != sigma.ops().rend(); ++it) psi_inverse(*it, z);
}

std::vector<double> map_source(const Symmetry& sigma, std::span<const double> z) {
  std::vector<double> out(z.begin(), z.end());
  map_source_inplace(sigma, out);
  return out;
}

std::vector<double> map_target(const Symmetry& sigma, std::span<const double> z) {
  std::vector<double> out(z.begin(), z.end());
  map_target_inplace(sigma, out);
  return out;
}

std::vector<double> unmap_source(const Symmetry& sigma, std::span<const double> z) {
  std::vector<double> out(z.begin(), z.end());
  unmap_source_inplace(sigma, out);
  return out;
}

std::vector<double> unmap_target(const Symmetry& sigma, std::span<const double> z) {
  std::vector<double> out(z.begin(), z.end());
  unmap_target_inplace(sigma, out);
  return out;
}

double source_jacobian(const Symmetry& sigma, int d) {
  double j = 1.0;
  for (const Generator& op : sigma.ops()) {
    if (const auto* sc = std::get_if<Scale>(&op)) j *= std::pow(sc->alpha, d) * std::pow(sc->beta, d * (d - 1) / 2);
  }
  return j;
}

double target_time_factor(const Symmetry& sigma) {
  double j = 1.0;
  for (const Generator& op : sigma.ops()) {
    if (const auto* sc = std::get_if<Scale>(&op)) j *= sc->beta;
  }
  return j;
}

double target_space_jacobian(const Symmetry& sigma, int d) {
  double j = 1.0;
  for (const Generator& op : sigma.ops()) {
    if (const auto* sc = std::get_if<Scale>(&op)) j *= std::pow(sc->alpha, d - 1) * std::pow(sc->beta, d * (d - 1) / 2);
  }
  return j;
}

std::pair<std::vector<double>, std::vector<double>> source_preimage_box(const Symmetry& sigma, const Grid& grid) {
  // phi is affine, so the preimage of the box is a parallelotope spanned by the corner images.
  const auto d = static_cast<std::size_t>(grid.dim());
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  std::vector<double> z(d);
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    for (std::size_t a = 0; a < d; ++a) {
      z[a] = (mask >> a) & 1u ? grid.upper(static_cast<int>(a)) : grid.lower(static_cast<int>(a));
    }
    unmap_source_inplace(sigma, z);
    for (std::size_t a = 0; a < d; ++a) {
      lo[a] = std::min(lo[a], z[a]);
      hi[a] = std::max(hi[a], z[a]);
    }
  }
  return {lo, hi};
}

std::pair<std::vector<double>, std::vector<double>> target_preimage_box(const Symmetry& sigma, const Grid& grid) {
  // For fixed t, psi^{-1} is affine in y, so y-corners suffice; t is sampled densely
  // because the y-extremes are polynomial in t. A small pad covers the sampling gaps.
  constexpr int kSamples = 4096;
  const auto d = static_cast<std::size_t>(grid.dim());
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  std::vector<double> z(d);
  const double t_lo = grid.lower(0), t_hi = grid.upper(0);
  for (int k = 0; k <= kSamples; ++k) {
    const double t = t_lo + (t_hi - t_lo) * static_cast<double>(k) / kSamples;
    for (unsigned mask = 0; mask < (1u << (d - 1)); ++mask) {
      z[0] = t;
      for (std::size_t a = 1; a < d; ++a) {
        z[a] = (mask >> (a - 1)) & 1u ? grid.upper(static_cast<int>(a)) : grid.lower(static_cast<int>(a));
      }
      unmap_target_inplace(sigma, z);
      for (std::size_t a = 0; a < d; ++a) {
        lo[a] = std::min(lo[a], z[a]);
        hi[a] = std::max(hi[a], z[a]);
      }
    }
  }
  for (std::size_t a = 1; a < d; ++a) {
    const double pad = 1e-3 * (hi[a] - lo[a]);
    lo[a] -= pad;
    hi[a] += pad;
  }
  return {lo, hi};
}

SampledField pullback_source_onto(const Symmetry& sigma, const SampledField& f, Exponent p, const Grid& grid) {
  if (f.side() != Side::source || grid.side() != Side::source) throw Error(ErrorKind::side, "pullback_source needs source fields");
  if (grid.dim() != f.dim()) throw Error(ErrorKind::dimension, "pullback grid dimension mismatch");
  const int d = f.dim();
  const double factor = p.is_infinite() ? 1.0 : std::pow(source_jacobian(sigma, d), p.reciprocal_double());
  const kernels::GridView src(f.grid());
  const double* fv = f.values().data();
  std::vector<double> out(grid.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::array<double, kMaxDim> z{};
    std::span<double> zs(z.data(), static_cast<std::size_t>(d));
    grid.node(i, zs);
    map_source_inplace(sigma, zs);
    out[i] = factor * kernels::interpolate(src, fv, z.data());
  }
  return SampledField(grid, std::move(out));
}

SampledField pullback_source(const Symmetry& sigma, const SampledField& f, Exponent p) {
  if (sigma.is_identity()) return f;
  auto [lo, hi] = source_preimage_box(sigma, f.grid());
  return pullback_source_onto(sigma, f, p, Grid::box(Side::source, lo, hi, f.grid().counts()));
}

SampledField pullback_target_onto(const Symmetry& sigma, const SampledField& g, Exponent q, Exponent r,
                                  const Grid& grid) {
  if (g.side() != Side::target || grid.side() != Side::target) throw Error(ErrorKind::side, "pullback_target needs target fields");
  if (grid.dim() != g.dim()) throw Error(ErrorKind::dimension, "pullback grid dimension mismatch");
  const int d = g.dim();
  const double factor = std::pow(target_time_factor(sigma), q.conjugate().reciprocal_double()) *
                        std::pow(target_space_jacobian(sigma, d), r.conjugate().reciprocal_double());
  const kernels::GridView tgt(g.grid());
  const double* gv = g.values().data();
  std::vector<double> out(grid.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::array<double, kMaxDim> z{};
    std::span<double> zs(z.data(), static_cast<std::size_t>(d));
    grid.node(i, zs);
    map_target_inplace(sigma, zs);
    out[i] = factor * kernels::interpolate(tgt, gv, z.data());
  }
  return SampledField(grid, std::move(out));
}

SampledField pullback_target(const Symmetry& sigma, const SampledField& g, Exponent q, Exponent r) {
  if (sigma.is_identity()) return g;
  auto [lo, hi] = target_preimage_box(sigma, g.grid());
  return pullback_target_onto(sigma, g, q, r, Grid::box(Side::target, lo, hi, g.grid().counts()));
}

namespace {

struct Sample {
  double value;
  double width;
  double weight;
};

// Quantile of a mixture of uniform densities, one per cell, by bisection on the
// piecewise-linear CDF.
double smoothed_quantile(const std::vector<Sample>& samples, double total, double level) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Sample& s : samples) {
    lo = std::min(lo, s.value - 0.5 * s.width);
    hi = std::max(hi, s.value + 0.5 * s.width);
  }
  const double target = level * total;
  auto cdf = [&](double x) {
    double acc = 0.0;
    for (const Sample& s : samples) {
      const double u = (x - (s.value - 0.5 * s.width)) / s.width;
      acc += s.weight * std::clamp(u, 0.0, 1.0);
    }
    return acc;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::fabs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

MassStatistics mass_statistics(const SampledField& f, Exponent p) {
  if (f.side() != Side::source) throw Error(ErrorKind::side, "mass statistics are defined for source fields");
  if (p.is_infinite()) throw Error(ErrorKind::domain, "mass statistics need a finite p");
  const Grid& grid = f.grid();
  const auto d = static_cast<std::size_t>(grid.dim());
  const double pe = p.as_double();

  std::vector<double> weight(f.size());
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    weight[i] = std::pow(std::fabs(f[i]), pe);
    total += weight[i];
  }
  if (!(total > 0.0)) throw Error(ErrorKind::division, "mass statistics of a zero field");

  MassStatistics st;
  st.mean_x.assign(d - 1, 0.0);
  std::vector<double> z(d);
  double ss = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (weight[i] == 0.0) continue;
    grid.node(i, z);
    const double w = weight[i] / total;
    st.mean_s += w * z[0];
    for (std::size_t a = 1; a < d; ++a) st.mean_x[a - 1] += w * z[a];
    ss += w * z[0] * z[0];
    sx += w * z[0] * z[1];
  }
  const double var_s = ss - st.mean_s * st.mean_s;
  const double cov = sx - st.mean_s * st.mean_x[0];
  st.shear_slope = var_s > 0.0 ? cov / var_s : 0.0;

  const double hs = grid.spacing()[0], hx = grid.spacing()[1];
  std::vector<Sample> s_samples, x_samples;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (weight[i] == 0.0) continue;
    grid.node(i, z);
    s_samples.push_back({z[0], hs, weight[i]});
    x_samples.push_back({z[1] - st.shear_slope * z[0], hx + std::fabs(st.shear_slope) * hs, weight[i]});
  }
  st.s_iqr = smoothed_quantile(s_samples, total, 0.75) - smoothed_quantile(s_samples, total, 0.25);
  st.sheared_iqr = smoothed_quantile(x_samples, total, 0.75) - smoothed_quantile(x_samples, total, 0.25);
  return st;
}

Symmetry normalize_symmetry(const SampledField& f, Exponent p) {
  const MassStatistics st = mass_statistics(f, p);
  if (!(st.s_iqr > 0.0) || !(st.sheared_iqr > 0.0)) throw Error(ErrorKind::degenerate, "mass has no spread to normalize");
  const double alpha = st.s_iqr;
  const double beta = st.sheared_iqr / alpha;
  const double t0 = st.shear_slope;
  std::vector<double> ybar(st.mean_x);
  double power = t0;
  for (double& c : ybar) {
    c -= st.mean_s * power;
    power *= t0;
  }
  return Symmetry({Scale{alpha, beta}, Shear{st.mean_s, t0}, Translate{std::move(ybar)}});
}

nlohmann::json to_json(const Symmetry& sigma) {
  nlohmann::json out = nlohmann::json::array();
  for (const Generator& op : sigma.ops()) {
    std::visit(overloaded{
                   [&](const Translate& tr) { out.push_back({{"translate", tr.v}}); },
                   [&](const Scale& sc) { out.push_back({{"scale", {sc.alpha, sc.beta}}}); },
                   [&](const Shear& sh) { out.push_back({{"shear", {sh.s0, sh.t0}}}); },
               },
               op);
  }
  return out;
}

Symmetry symmetry_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorKind::parse, "symmetry must be a JSON list of generators");
  std::vector<Generator> ops;
  try {
    for (const auto& item : j) {
      if (item.contains("translate")) {
        ops.emplace_back(Translate{item.at("translate").get<std::vector<double>>()});
      } else if (item.contains("scale")) {
        const auto v = item.at("scale").get<std::vector<double>>();
        if (v.size() != 2) throw Error(ErrorKind::parse, "scale takes [alpha, beta]");
        ops.emplace_back(Scale{v[0], v[1]});
      } else if (item.contains("shear")) {
        const auto v = item.at("shear").get<std::vector<double>>();
        if (v.size() != 2) throw Error(ErrorKind::parse, "shear takes [s0, t0]");
        ops.emplace_back(Shear{v[0], v[1]});
      } else {
        throw Error(ErrorKind::parse, "unknown generator " + item.dump());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("bad symmetry: ") + e.what());
  }
  return Symmetry(std::move(ops));
}

}  // namespace xrt
