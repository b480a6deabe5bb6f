#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "xrt/error.hpp"
#include "xrt/symmetry.hpp"
#include "xrt/xray.hpp"

using namespace xrt;
namespace fx = xrt::testing;

namespace {

Exponent ex(std::int64_t n, std::int64_t d = 1) { return Exponent(Rational(n, d)); }

void expect_vec_near(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << i;
}

std::vector<double> random_point(fx::Rng& rng, int d) {
  std::vector<double> z(static_cast<std::size_t>(d));
  for (double& c : z) c = fx::uniform(rng, -2, 2);
  return z;
}

}  // namespace

TEST(ShearMatrix, Examples) {
  const ShearMatrix id = shear_matrix(4, 0.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(id.at(i, j), i == j ? 1.0 : 0.0);
  }
  const ShearMatrix g = shear_matrix(3, 1.0);
  EXPECT_EQ(g.at(0, 0), 1.0);
  EXPECT_EQ(g.at(0, 1), 0.0);
  EXPECT_EQ(g.at(1, 0), 2.0);
  EXPECT_EQ(g.at(1, 1), 1.0);
}

TEST(ShearMatrix, GroupLawAndMomentCurve) {
  fx::Rng rng(1);
  for (int d : {3, 4, 5, 6}) {
    const std::size_t n = static_cast<std::size_t>(d - 1);
    std::vector<double> x(n), y(n), back(n);
    for (int k = 0; k < 100; ++k) {
      const double t = fx::uniform(rng, -1.5, 1.5), t0 = fx::uniform(rng, -1.5, 1.5);
      const std::vector<double> a = gamma_eval(d, t + t0), c = gamma_eval(d, t0);
      apply_shear_matrix(t0, gamma_eval(d, t), y);
      for (std::size_t m = 0; m < n; ++m) EXPECT_NEAR(a[m], y[m] + c[m], 1e-12);

      for (double& v : x) v = fx::uniform(rng, -1, 1);
      apply_shear_matrix(t0, x, y);
      apply_shear_matrix(-t0, y, back);
      expect_vec_near(back, x, 1e-12);
    }
  }
}

TEST(MapSource, Examples) {
  const std::vector<double> z{1, 1, 1};
  EXPECT_EQ(map_source(Symmetry{}, z), z);
  EXPECT_EQ(map_source(Symmetry::scale(2, 1), z), (std::vector<double>{2, 2, 2}));
  EXPECT_EQ(map_source(Symmetry::shear(1, 1), std::vector<double>{0, 0, 0}), (std::vector<double>{1, 1, 1}));
}

TEST(MapTarget, Examples) {
  const std::vector<double> z{1, 1, 1};
  EXPECT_EQ(map_target(Symmetry{}, z), z);
  EXPECT_EQ(map_target(Symmetry::scale(2, 3), z), (std::vector<double>{3, 6, 18}));
}

TEST(Symmetry, IncidencePreserved) {
  fx::Rng rng(2);
  for (int d : {3, 4}) {
    for (int k = 0; k < 200; ++k) {
      const Symmetry sigma = fx::random_symmetry(rng, d, 1.0);
      const double s = fx::uniform(rng, -1, 1), t = fx::uniform(rng, -1, 1);
      std::vector<double> tgt{t}, src{s};
      const std::vector<double> g = gamma_eval(d, t);
      for (int m = 0; m < d - 1; ++m) {
        const double y = fx::uniform(rng, -1, 1);
        tgt.push_back(y);
        src.push_back(y + s * g[static_cast<std::size_t>(m)]);
      }
      const std::vector<double> a = map_source(sigma, src), b = map_target(sigma, tgt);
      const std::vector<double> gb = gamma_eval(d, b[0]);
      for (int m = 1; m < d; ++m) {
        const auto i = static_cast<std::size_t>(m);
        EXPECT_NEAR(a[i], b[i] + a[0] * gb[i - 1], 1e-10);
      }
    }
  }
}

TEST(Compose, ActsAsComposition) {
  fx::Rng rng(3);
  const Symmetry a = fx::random_symmetry(rng, 3), b = fx::random_symmetry(rng, 3);
  for (int k = 0; k < 100; ++k) {
    const std::vector<double> z = random_point(rng, 3);
    expect_vec_near(map_source(compose(a, b), z), map_source(a, map_source(b, z)), 1e-12);
    expect_vec_near(map_target(compose(a, b), z), map_target(a, map_target(b, z)), 1e-12);
    expect_vec_near(map_source(compose(a, Symmetry{}), z), map_source(a, z), 0.0);
    expect_vec_near(map_source(compose(Symmetry::translate({1, 2}), Symmetry::translate({3, -1})), z),
                    map_source(Symmetry::translate({4, 1}), z), 1e-12);
    expect_vec_near(map_source(compose(Symmetry::scale(2, 1), Symmetry::scale(3, 1)), z),
                    map_source(Symmetry::scale(6, 1), z), 1e-12);
    expect_vec_near(unmap_source(a, map_source(a, z)), z, 1e-12);
    expect_vec_near(unmap_target(a, map_target(a, z)), z, 1e-12);
    expect_vec_near(map_source(compose(a.inverse(), a), z), z, 1e-12);
  }
}

TEST(Jacobians, ClosedFormMatchesFiniteDifferences) {
  fx::Rng rng(4);
  const int d = 3;
  for (int k = 0; k < 20; ++k) {
    const Symmetry sigma = compose(fx::random_symmetry(rng, d, 1.0), fx::random_symmetry(rng, d, 1.0));
    const std::vector<double> z = random_point(rng, d);
    double jac[3][3];
    const double h = 1e-6;
    for (int j = 0; j < d; ++j) {
      std::vector<double> zp = z, zm = z;
      zp[static_cast<std::size_t>(j)] += h;
      zm[static_cast<std::size_t>(j)] -= h;
      const std::vector<double> a = map_source(sigma, zp), b = map_source(sigma, zm);
      for (int i = 0; i < d; ++i) jac[i][j] = (a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]) / (2 * h);
    }
    const double det = jac[0][0] * (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1]) -
                       jac[0][1] * (jac[1][0] * jac[2][2] - jac[1][2] * jac[2][0]) +
                       jac[0][2] * (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]);
    const double closed = source_jacobian(sigma, d);
    EXPECT_NEAR(det / closed, 1.0, 1e-6);
  }
  const Symmetry s = Symmetry::scale(2.0, 3.0);
  EXPECT_DOUBLE_EQ(source_jacobian(s, 3), 8.0 * 27.0);
  EXPECT_DOUBLE_EQ(target_time_factor(s), 3.0);
  EXPECT_DOUBLE_EQ(target_space_jacobian(s, 3), 4.0 * 27.0);
}

TEST(Pullback, IdentityAndScale) {
  fx::Rng rng(5);
  const Grid g = Grid::cube(Side::source, 3, -2, 2, 12);
  const SampledField f = fx::gaussian_mixture(g, rng);
  const SampledField same = pullback_source(Symmetry{}, f, ex(3, 2));
  EXPECT_EQ(same.grid(), g);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(same[i], f[i]);

  // Scale maps grid nodes onto grid nodes, so only the Jacobian factor remains.
  const double a = 1.7;
  const SampledField scaled = pullback_source(Symmetry::scale(a, 1.0), f, ex(3, 2));
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(scaled[i], std::pow(a, 3 / 1.5) * f[i], 1e-12 * (1 + f[i]));

  const Grid tg = g.with_side(Side::target);
  const SampledField h = fx::gaussian_mixture(tg, rng);
  const double alpha = 1.3, beta = 0.8;
  // Onto the exact preimage grid, so nodes land on nodes.
  const Grid pre = Grid::box(Side::target, std::vector<double>{-2 / beta, -2 / (alpha * beta), -2 / (alpha * beta * beta)},
                             std::vector<double>{2 / beta, 2 / (alpha * beta), 2 / (alpha * beta * beta)}, tg.counts());
  const SampledField ht = pullback_target_onto(Symmetry::scale(alpha, beta), h, ex(2), ex(3), pre);
  // beta^{1/q'} (alpha^{d-1} beta^{d(d-1)/2})^{1/r'} with q' = 2, r' = 3/2.
  const double factor = std::pow(beta, 0.5) * std::pow(alpha * alpha * beta * beta * beta, 2.0 / 3.0);
  for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(ht[i], factor * h[i], 1e-12 * (1 + h[i]));
}

TEST(Pullback, NormAndPairingDriftShrinkWithGrid) {
  const ExponentTriple e = triple_for_theta(3, Rational(5, 6));
  // Scales, s-shears and translations map nodes onto nodes; the t-shear is the
  // one generator that interpolates, and its drift is second order.
  std::vector<double> shear_drift;
  for (std::size_t n : {16, 32, 64}) {
    fx::Rng rng(6);
    const SampledField f = fx::compact_bump(Grid::cube(Side::source, 3, -2, 2, n), rng, 1.2);
    const SampledField fp = pullback_source(Symmetry::shear(0.0, 0.3), f, e.p);
    shear_drift.push_back(std::fabs(lp_norm(fp, e.p) / lp_norm(f, e.p) - 1));
  }
  EXPECT_GT(shear_drift[0] / shear_drift[1], 2.5);
  EXPECT_GT(shear_drift[1] / shear_drift[2], 2.5);

  std::vector<double> norm_drift, pair_drift;
  for (std::size_t n : {32, 64}) {
    fx::Rng rng(6);
    const Grid sg = Grid::cube(Side::source, 3, -2, 2, n);
    const Grid tg = Grid::box(Side::target, std::vector<double>{-2, -3, -3}, std::vector<double>{2, 3, 3},
                              std::vector<std::size_t>{n, n, n});
    // Compact support well inside both boxes, so re-gridding never truncates.
    const SampledField f = fx::compact_bump(sg, rng, 1.2), g = fx::compact_bump(tg, rng, 1.2);
    const Symmetry sigma = fx::random_symmetry(rng, 3);
    const SampledField fp = pullback_source(sigma, f, e.p), gp = pullback_target(sigma, g, e.q, e.r);
    norm_drift.push_back(std::fabs(lp_norm(fp, e.p) / lp_norm(f, e.p) - 1));
    pair_drift.push_back(std::fabs(bilinear(fp, gp, TransformPlan{fp.grid(), gp.grid()}) /
                                       bilinear(f, g, TransformPlan{sg, tg}) -
                                   1));
  }
  EXPECT_LT(norm_drift[1], 5e-3);
  EXPECT_LT(pair_drift[1], 1e-2);
  EXPECT_GT(pair_drift[0] / pair_drift[1], 2.5);
}

TEST(NormalizeSymmetry, FixedPointAndTranslation) {
  const Exponent p = ex(3, 2);
  // The smoothed quantiles carry an O(h^2) width bias, so a second pass is the
  // identity only up to discretization; the residual must shrink with the grid.
  std::vector<double> residual;
  for (std::size_t n : {40, 80}) {
    const Grid grid = Grid::cube(Side::source, 3, -4, 4, n);
    const SampledField bump = SampledField::sample(grid, [](std::span<const double> z) {
      return std::exp(-(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]));
    });
    const Symmetry once = normalize_symmetry(bump, p);
    const Symmetry twice = normalize_symmetry(pullback_source_onto(once, bump, p, grid), p);
    const std::vector<double> z{0.3, -0.2, 0.4};
    const std::vector<double> w = map_source(twice, z);
    residual.push_back(std::max({std::fabs(w[0] - z[0]), std::fabs(w[1] - z[1]), std::fabs(w[2] - z[2])}));
  }
  EXPECT_LT(residual[1], 1e-3);
  EXPECT_GT(residual[0] / residual[1], 2.5);

  const Grid g = Grid::cube(Side::source, 3, -4, 4, 40);
  const std::vector<double> v{0.5, -0.25};
  const SampledField moved = SampledField::sample(g, [&](std::span<const double> w) {
    const double a = w[1] - v[0], b = w[2] - v[1];
    return std::exp(-(w[0] * w[0] + a * a + b * b));
  });
  const MassStatistics st = mass_statistics(moved, p);
  EXPECT_NEAR(st.mean_x[0], v[0], 1e-3);
  EXPECT_NEAR(st.mean_x[1], v[1], 1e-3);
  EXPECT_THROW(normalize_symmetry(SampledField::zeros(g), p), Error);
}

TEST(Symmetry, JsonRoundTrip) {
  const Symmetry s({Scale{2, 3}, Shear{0.5, -1}, Translate{{1, 2}}});
  const Symmetry back = symmetry_from_json(to_json(s));
  const std::vector<double> z{0.1, 0.2, 0.3};
  EXPECT_EQ(map_source(back, z), map_source(s, z));
  EXPECT_TRUE(s.is_paraball_form());
  EXPECT_FALSE(Symmetry({Shear{0, 1}, Scale{1, 1}}).is_paraball_form());
  EXPECT_THROW(symmetry_from_json(nlohmann::json::parse(R"([{"scale":[-1,1]}])")), Error);
}
