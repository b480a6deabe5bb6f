#include "xrt/paraball.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "xrt/error.hpp"
#include "xrt/kernels.hpp"

namespace xrt {

Paraball Paraball::unit(int d) {
  if (d < 3) throw Error(ErrorKind::dimension, "paraballs need d >= 3");
  Paraball b;
  b.ybar.assign(static_cast<std::size_t>(d - 1), 0.0);
  return b;
}

std::vector<double> Paraball::xbar() const {
  std::vector<double> x(ybar);
  double power = t0;
  for (double& c : x) {
    c += s0 * power;
    power *= t0;
  }
  return x;
}

void Paraball::validate() const {
  if (ybar.size() < 2 || ybar.size() + 1 > kMaxDim) throw Error(ErrorKind::dimension, "paraball dimension out of range");
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw Error(ErrorKind::domain, "paraball alpha and beta must be positive");
  }
  if (!std::isfinite(s0) || !std::isfinite(t0)) throw Error(ErrorKind::domain, "paraball centre must be finite");
  for (double c : ybar) {
    if (!std::isfinite(c)) throw Error(ErrorKind::domain, "paraball centre must be finite");
  }
}

void unit_coordinates(const Paraball& b, std::span<const double> z, BallSide side, std::span<double> u) {
  const std::size_t n = b.ybar.size();
  if (z.size() != n + 1 || u.size() != n + 1) throw Error(ErrorKind::dimension, "point dimension mismatch");
  std::array<double, kMaxDim> w{};
  std::span<double> ws(w.data(), n);
  double lead = 0.0;  // coefficient multiplying the power term
  double base = 0.0;  // base of the power term
  if (side == BallSide::primal) {
    // [G_{-t0}(x - xbar)]_m + (s - s0)(-t0)^m
    const std::vector<double> xb = b.xbar();
    for (std::size_t i = 0; i < n; ++i) w[i] = z[i + 1] - xb[i];
    u[0] = (z[0] - b.s0) / b.alpha;
    lead = z[0] - b.s0;
    base = -b.t0;
  } else {
    // [G_{-t0}(y - ybar)]_m + s0 (t - t0)^m
    for (std::size_t i = 0; i < n; ++i) w[i] = z[i + 1] - b.ybar[i];
    u[0] = (z[0] - b.t0) / b.beta;
    lead = b.s0;
    base = z[0] - b.t0;
  }
  apply_shear_matrix(-b.t0, ws, ws);
  double power = base, width = b.alpha;
  for (std::size_t m = 0; m < n; ++m) {
    width *= b.beta;
    u[m + 1] = (w[m] + lead * power) / width;
    power *= base;
  }
}

bool membership(const Paraball& b, std::span<const double> z, BallSide side) {
  std::array<double, kMaxDim> u{};
  unit_coordinates(b, z, side, std::span<double>(u.data(), z.size()));
  if (!(std::fabs(u[0]) < 1.0)) return false;
  for (std::size_t m = 1; m < z.size(); ++m) {
    if (!(std::fabs(u[m]) <= 1.0)) return false;
  }
  return true;
}

double volume(const Paraball& b) {
  const int d = b.dim();
  return std::pow(2.0 * b.alpha, d) * std::pow(b.beta, d * (d - 1) / 2);
}

double dual_mixed_norm(const Paraball& b, Rational theta) {
  if (theta <= Rational(0) || theta >= Rational(1)) throw Error(ErrorKind::domain, "dual_mixed_norm needs theta in (0,1)");
  const int d = b.dim();
  const ExponentTriple e = triple_for_theta(d, theta).conjugate();
  const double section = std::pow(2.0 * b.alpha, d - 1) * std::pow(b.beta, d * (d - 1) / 2);
  return std::pow(2.0 * b.beta, e.q.reciprocal_double()) * std::pow(section, e.r.reciprocal_double());
}

Paraball scale(const Paraball& b, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::domain, "scale factor must be positive");
  Paraball out = b;
  out.alpha *= lambda;
  out.beta *= lambda;
  return out;
}

Symmetry to_symmetry(const Paraball& b) {
  b.validate();
  return Symmetry({Scale{b.alpha, b.beta}, Shear{b.s0, b.t0}, Translate{b.ybar}});
}

Paraball from_symmetry(const Symmetry& sigma, int d) {
  if (sigma.is_identity()) return Paraball::unit(d);
  if (!sigma.is_paraball_form()) {
    throw Error(ErrorKind::domain, "symmetry is not of the form Translate o Shear o Scale");
  }
  const auto& sc = std::get<Scale>(sigma.ops()[0]);
  const auto& sh = std::get<Shear>(sigma.ops()[1]);
  const auto& tr = std::get<Translate>(sigma.ops()[2]);
  Paraball b{sh.s0, sh.t0, tr.v, sc.alpha, sc.beta};
  b.validate();
  if (b.dim() != d) throw Error(ErrorKind::dimension, "translation length does not match d-1");
  return b;
}

Paraball transformed(const Paraball& b, const Symmetry& sigma) {
  Paraball out = b;
  const std::size_t n = b.ybar.size();
  for (const Generator& op : sigma.ops()) {
    if (const auto* tr = std::get_if<Translate>(&op)) {
      if (tr->v.size() != n) throw Error(ErrorKind::dimension, "translation length does not match d-1");
      for (std::size_t i = 0; i < n; ++i) out.ybar[i] += tr->v[i];
    } else if (const auto* sc = std::get_if<Scale>(&op)) {
      out.alpha *= sc->alpha;
      out.beta *= sc->beta;
      out.s0 *= sc->alpha;
      out.t0 *= sc->beta;
      double factor = sc->alpha;
      for (double& c : out.ybar) {
        factor *= sc->beta;
        c *= factor;
      }
    } else {
      // ybar' = G_{w} ybar + u gamma(w) - u gamma(t0 + w)
      const auto& sh = std::get<Shear>(op);
      apply_shear_matrix(sh.t0, out.ybar, out.ybar);
      const double t_new = out.t0 + sh.t0;
      double pw = sh.t0, pt = t_new;
      for (double& c : out.ybar) {
        c += sh.s0 * (pw - pt);
        pw *= sh.t0;
        pt *= t_new;
      }
      out.s0 += sh.s0;
      out.t0 = t_new;
    }
  }
  return out;
}

double mock_distance(const Paraball& a, const Paraball& b) {
  const int d = a.dim();
  if (b.dim() != d) throw Error(ErrorKind::dimension, "mock_distance needs paraballs of equal dimension");
  const std::size_t n = a.ybar.size();

  const double cross_a = std::pow(a.alpha, d - 1) * std::pow(a.beta, d * (d - 1) / 2);
  const double cross_b = std::pow(b.alpha, d - 1) * std::pow(b.beta, d * (d - 1) / 2);
  double total = std::max(cross_a, cross_b) / std::min(cross_a, cross_b);
  total += a.alpha / b.alpha + b.alpha / a.alpha;
  total += a.beta / b.beta + b.beta / a.beta;
  total += std::fabs(a.s0 - b.s0) * (1.0 / a.alpha + 1.0 / b.alpha);
  total += std::fabs(a.t0 - b.t0) * (1.0 / a.beta + 1.0 / b.beta);

  // Offsets of one centre in the unit frame of the other, primal then dual.
  std::array<double, kMaxDim> z{}, u{};
  auto offset_sum = [&](const Paraball& frame, const Paraball& other, BallSide side) {
    if (side == BallSide::primal) {
      z[0] = other.s0;
      const std::vector<double> xb = other.xbar();
      std::copy(xb.begin(), xb.end(), z.begin() + 1);
    } else {
      z[0] = other.t0;
      std::copy(other.ybar.begin(), other.ybar.end(), z.begin() + 1);
    }
    unit_coordinates(frame, std::span<const double>(z.data(), n + 1), side, std::span<double>(u.data(), n + 1));
    double acc = 0.0;
    for (std::size_t m = 1; m <= n; ++m) acc += std::fabs(u[m]);
    return acc;
  };
  // Each swap pair is added first; x + y == y + x makes the result exactly symmetric.
  const double primal_ab = offset_sum(a, b, BallSide::primal);
  const double primal_ba = offset_sum(b, a, BallSide::primal);
  const double dual_ab = offset_sum(a, b, BallSide::dual);
  const double dual_ba = offset_sum(b, a, BallSide::dual);
  total += primal_ab + primal_ba;
  total += dual_ab + dual_ba;
  return total;
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t a = 0; a < lo.size(); ++a) v *= hi[a] - lo[a];
  return v;
}

Box bounding_box(const Paraball& b, BallSide side) {
  const auto d = static_cast<std::size_t>(b.dim());
  const Symmetry sigma = to_symmetry(b);
  Box box{std::vector<double>(d, std::numeric_limits<double>::infinity()),
          std::vector<double>(d, -std::numeric_limits<double>::infinity())};
  std::vector<double> z(d);
  auto absorb = [&] {
    for (std::size_t a = 0; a < d; ++a) {
      box.lo[a] = std::min(box.lo[a], z[a]);
      box.hi[a] = std::max(box.hi[a], z[a]);
    }
  };
  if (side == BallSide::primal) {
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      for (std::size_t a = 0; a < d; ++a) z[a] = (mask >> a) & 1u ? 1.0 : -1.0;
      map_source_inplace(sigma, z);
      absorb();
    }
    return box;
  }
  // psi is affine in y for fixed t, and polynomial in t.
  constexpr int kSamples = 2048;
  for (int k = 0; k <= kSamples; ++k) {
    for (unsigned mask = 0; mask < (1u << (d - 1)); ++mask) {
      z[0] = -1.0 + 2.0 * k / kSamples;
      for (std::size_t a = 1; a < d; ++a) z[a] = (mask >> (a - 1)) & 1u ? 1.0 : -1.0;
      map_target_inplace(sigma, z);
      absorb();
    }
  }
  for (std::size_t a = 1; a < d; ++a) {
    const double pad = 1e-3 * (box.hi[a] - box.lo[a]);
    box.lo[a] -= pad;
    box.hi[a] += pad;
  }
  return box;
}

double intersection_volume(const Paraball& a, const Paraball& b, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw Error(ErrorKind::domain, "intersection_volume needs at least one sample");
  const Box ba = bounding_box(a, BallSide::primal);
  const Box bb = bounding_box(b, BallSide::primal);
  const Box& box = ba.volume() <= bb.volume() ? ba : bb;
  for (std::size_t i = 0; i < box.lo.size(); ++i) {
    if (ba.hi[i] <= bb.lo[i] || bb.hi[i] <= ba.lo[i]) return 0.0;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t d = box.lo.size();
  std::vector<double> z(d);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    for (std::size_t i = 0; i < d; ++i) z[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
    if (membership(a, z, BallSide::primal) && membership(b, z, BallSide::primal)) ++hits;
  }
  return box.volume() * static_cast<double>(hits) / static_cast<double>(samples);
}

SampledField rasterize(const Paraball& b, BallSide side, const Grid& grid, int supersample) {
  if (grid.dim() != b.dim()) throw Error(ErrorKind::dimension, "grid and paraball differ in dimension");
  if (supersample < 1) throw Error(ErrorKind::domain, "supersample must be >= 1");
  const Box box = bounding_box(b, side);
  const auto d = static_cast<std::size_t>(grid.dim());
  std::size_t per_cell = 1;
  for (std::size_t a = 0; a < d; ++a) per_cell *= static_cast<std::size_t>(supersample);
  const double weight = 1.0 / static_cast<double>(per_cell);
  const std::vector<double>& h = grid.spacing();

  std::vector<double> out(grid.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 256)
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::array<double, kMaxDim> c{}, z{};
    std::span<double> cs(c.data(), d);
    grid.node(i, cs);
    bool outside = false;
    for (std::size_t a = 0; a < d && !outside; ++a) {
      outside = c[a] + 0.5 * h[a] < box.lo[a] || c[a] - 0.5 * h[a] > box.hi[a];
    }
    if (outside) continue;
    std::size_t hits = 0;
    for (std::size_t k = 0; k < per_cell; ++k) {
      std::size_t rest = k;
      for (std::size_t a = 0; a < d; ++a) {
        const auto sub = static_cast<double>(rest % static_cast<std::size_t>(supersample));
        rest /= static_cast<std::size_t>(supersample);
        z[a] = c[a] + ((sub + 0.5) / supersample - 0.5) * h[a];
      }
      if (membership(b, std::span<const double>(z.data(), d), side)) ++hits;
    }
    out[i] = static_cast<double>(hits) * weight;
  }
  return SampledField(grid, std::move(out));
}

Grid adapted_grid(const Paraball& b, BallSide side, std::size_t n, double margin) {
  if (!(margin >= 0.0)) throw Error(ErrorKind::domain, "margin must be nonnegative");
  Box box = bounding_box(b, side);
  // Axis 0 puts the faces |s - s0| = alpha (|t - t0| = beta) on cell edges, k cells in.
  const auto k = static_cast<std::size_t>(std::ceil(margin * static_cast<double>(n)));
  if (n < 2 * k + 2) throw Error(ErrorKind::domain, "too few cells for the requested margin");
  const double centre = side == BallSide::primal ? b.s0 : b.t0;
  const double half = side == BallSide::primal ? b.alpha : b.beta;
  const double h0 = 2.0 * half / static_cast<double>(n - 2 * k);
  box.lo[0] = centre - half - static_cast<double>(k) * h0;
  box.hi[0] = centre + half + static_cast<double>(k) * h0;
  for (std::size_t a = 1; a < box.lo.size(); ++a) {
    const double pad = margin * (box.hi[a] - box.lo[a]);
    box.lo[a] -= pad;
    box.hi[a] += pad;
  }
  std::vector<std::size_t> counts(box.lo.size(), n);
  return Grid::box(side == BallSide::primal ? Side::source : Side::target, box.lo, box.hi, counts);
}

double quasi_ratio(const SampledField& f, const SampledField& g, Rational theta, const TransformPlan& plan) {
  const ExponentTriple e = triple_for_theta(f.dim(), theta);
  const ExponentTriple c = e.conjugate();
  const double nf = lp_norm(f, e.p);
  if (!(nf > 0.0)) throw Error(ErrorKind::division, "quasi_ratio: f has zero norm");
  const double ng = mixed_norm(g, c.q, c.r);
  if (!(ng > 0.0)) throw Error(ErrorKind::division, "quasi_ratio: g has zero norm");
  return bilinear(f, g, plan) / (nf * ng);
}

nlohmann::json to_json(const Paraball& b) {
  return {{"s0", b.s0}, {"t0", b.t0}, {"ybar", b.ybar}, {"alpha", b.alpha}, {"beta", b.beta}};
}

Paraball paraball_from_json(const nlohmann::json& j) {
  try {
    Paraball b{j.value("s0", 0.0), j.value("t0", 0.0), j.at("ybar").get<std::vector<double>>(), j.value("alpha", 1.0),
               j.value("beta", 1.0)};
    b.validate();
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("bad paraball: ") + e.what());
  }
}

}  // namespace xrt
