#include "diagnose.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "xrt/decomposition.hpp"
#include "xrt/error.hpp"
#include "xrt/paraball.hpp"
#include "xrt/search.hpp"
#include "xrt/symmetry.hpp"
#include "xrt/xray.hpp"

namespace xrt::cli {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Paraball random_ball(Rng& rng) {
  return Paraball{uniform(rng, -1, 1), uniform(rng, -1, 1), {uniform(rng, -1, 1), uniform(rng, -1, 1)},
                  std::exp(uniform(rng, -0.7, 0.7)), std::exp(uniform(rng, -0.7, 0.7))};
}

Symmetry random_symmetry(Rng& rng) {
  return Symmetry({Scale{std::exp(uniform(rng, -0.3, 0.3)), std::exp(uniform(rng, -0.3, 0.3))},
                   Shear{uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)},
                   Translate{{uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)}}});
}

// Smooth bump of radius 1.2 with a random centre and tilt.
SampledField bump(const Grid& grid, Rng& rng) {
  std::vector<double> c, tilt;
  for (int a = 0; a < grid.dim(); ++a) {
    c.push_back(uniform(rng, -0.25, 0.25));
    tilt.push_back(uniform(rng, -0.25, 0.25));
  }
  return SampledField::sample(grid, [&](std::span<const double> z) {
    double r2 = 0.0, ramp = 1.0;
    for (std::size_t a = 0; a < z.size(); ++a) {
      r2 += (z[a] - c[a]) * (z[a] - c[a]);
      ramp += tilt[a] * (z[a] - c[a]);
    }
    const double r = std::sqrt(r2) / 1.2;
    if (r >= 1.0) return 0.0;
    const double v = std::cos(0.5 * M_PI * r);
    return v * v * v * v * ramp;
  });
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct Check {
  const char* name;
  std::function<std::pair<bool, std::string>(Rng&)> run;
};

std::vector<Check> checks() {
  const Rational theta(5, 6);
  return {
      {"exponents",
       [](Rng&) {
         const bool example = triple_for_theta(3, Rational(5, 6)).str() == "p=3/2 q=2 r=2";
         bool balanced = true;
         for (int d = 3; d <= 8; ++d) {
           const ExponentTriple e = triple_for_theta(d, theta_zero(d));
           balanced = balanced && e.q == e.r;
         }
         return std::pair{example && balanced, std::string(example ? "" : "d=3 example wrong ") +
                                                   (balanced ? "q=r at theta_0 for d=3..8" : "q!=r at theta_0")};
       }},
      {"kernels.serial_match",
       [](Rng& rng) {
         const Grid src = Grid::cube(Side::source, 3, -2, 2, 16);
         const Grid tgt = Grid::box(Side::target, std::vector<double>{-2, -3, -3}, std::vector<double>{2, 3, 3},
                                    std::vector<std::size_t>{16, 16, 16});
         const SampledField f = bump(src, rng);
         const SampledField a = apply_x(f, tgt, 0), b = serial::apply_x(f, tgt, 0);
         double worst = 0.0;
         for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]) / (1 + std::fabs(b[i])));
         return std::pair{worst <= 1e-12, fmt("max rel diff %.2e", worst)};
       }},
      {"xray.adjoint",
       [](Rng& rng) {
         const Grid src = Grid::cube(Side::source, 3, -2, 2, 24), tgt = src.with_side(Side::target);
         const SampledField f = bump(src, rng), g = bump(tgt, rng);
         const TransformPlan plan{src, tgt};
         const double a = inner_product(apply_x(f, plan), g), b = inner_product(f, apply_x_star(g, plan));
         const double gap = std::fabs(a - b) / std::fabs(a);
         return std::pair{gap <= 1e-2, fmt("relative gap %.2e at 24^3", gap)};
       }},
      {"symmetry.scale_exact",
       [](Rng& rng) {
         const Exponent p(Rational(3, 2));
         const SampledField f = bump(Grid::cube(Side::source, 3, -2, 2, 16), rng);
         const SampledField fp = pullback_source(Symmetry::scale(uniform(rng, 0.5, 2), uniform(rng, 0.5, 2)), f, p);
         const double drift = std::fabs(lp_norm(fp, p) / lp_norm(f, p) - 1);
         return std::pair{drift <= 1e-12, fmt("norm drift %.2e", drift)};
       }},
      {"paraball.mock_distance",
       [](Rng& rng) {
         int bad = 0;
         for (int k = 0; k < 200; ++k) {
           const Paraball a = random_ball(rng), b = random_ball(rng);
           if (mock_distance(a, a) != 5.0 || mock_distance(a, b) != mock_distance(b, a)) ++bad;
           const Symmetry s = random_symmetry(rng);
           if (std::fabs(mock_distance(transformed(a, s), transformed(b, s)) / mock_distance(a, b) - 1) > 1e-9) ++bad;
         }
         return std::pair{bad == 0, std::to_string(bad) + " of 200 pairs off"};
       }},
      {"paraball.partition_cover",
       [theta](Rng& rng) {
         const Paraball b = random_ball(rng);
         const Cover cover = partition(b, 0.25, theta);
         const CoverIndex index(cover);
         const Symmetry frame = to_symmetry(b);
         int misses = 0;
         std::vector<double> u(3);
         for (int k = 0; k < 20000; ++k) {
           for (double& c : u) c = uniform(rng, -1, 1);
           if (!index.covers(map_source(frame, u), BallSide::primal)) ++misses;
           if (!index.covers(map_target(frame, u), BallSide::dual)) ++misses;
         }
         return std::pair{misses == 0, std::to_string(cover.members.size()) + " members, " + std::to_string(misses) +
                                           " uncovered of 40000"};
       }},
      {"paraball.unit_ratio",
       [theta](Rng&) {
         const Paraball b = Paraball::unit(3);
         const SampledField f = rasterize(b, BallSide::primal, adapted_grid(b, BallSide::primal, 32));
         const SampledField g = rasterize(b, BallSide::dual, adapted_grid(b, BallSide::dual, 32));
         const double ratio = quasi_ratio(f, g, theta, TransformPlan{f.grid(), g.grid()});
         const double rel = ratio / (13.0 / (8.0 * std::sqrt(2.0)));
         return std::pair{std::fabs(rel - 1) <= 1e-2, fmt("ratio / c* = %.5f", rel)};
       }},
      {"decomposition.sandwich",
       [](Rng& rng) {
         const Grid g = Grid::cube(Side::source, 3, -1, 1, 12);
         std::vector<double> v(g.size());
         for (double& x : v) x = std::ldexp(uniform(rng, 1, 2), static_cast<int>(uniform(rng, -8, 8)));
         const SampledField f(g, v);
         const auto pieces = dyadic_decompose(f);
         const SampledField lo = dyadic_reconstruct(g, pieces, 0), hi = dyadic_reconstruct(g, pieces, 1);
         int bad = 0;
         for (std::size_t i = 0; i < f.size(); ++i) bad += !(lo[i] <= f[i] && f[i] < hi[i]);
         return std::pair{bad == 0, std::to_string(pieces.size()) + " levels, " + std::to_string(bad) + " nodes outside"};
       }},
      {"search.dual_map",
       [](Rng& rng) {
         const Exponent q(Rational(3)), r(Rational(3, 2));
         const SampledField h = bump(Grid::cube(Side::target, 3, -2, 2, 12), rng);
         const SampledField d = dual_map(h, q, r);
         const double unit = mixed_norm(d, q.conjugate(), r.conjugate());
         const double pairing = inner_product(h, d) / mixed_norm(h, q, r);
         const double err = std::max(std::fabs(unit - 1), std::fabs(pairing - 1));
         return std::pair{err <= 1e-10, fmt("equality-case error %.2e", err)};
       }},
  };
}

}  // namespace

int diagnose(std::uint64_t seed, std::ostream& out) {
  Rng rng(seed);
  int failures = 0;
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %-6s %8s  %s\n", "check", "result", "seconds", "detail");
  out << line;
  for (const Check& c : checks()) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
      std::tie(pass, detail) = c.run(rng);
    } catch (const std::exception& e) {
      detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !pass;
    std::snprintf(line, sizeof line, "%-28s %-6s %8.2f  %s\n", c.name, pass ? "PASS" : "FAIL", secs, detail.c_str());
    out << line;
  }
  return failures;
}

}  // namespace xrt::cli
