#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "xrt/error.hpp"
#include "xrt/paraball.hpp"

using namespace xrt;
namespace fx = xrt::testing;

namespace {

Paraball unit3() { return Paraball::unit(3); }

std::vector<double> in_unit_box(fx::Rng& rng, int d, double reach = 1.0) {
  std::vector<double> u(static_cast<std::size_t>(d));
  for (double& c : u) c = fx::uniform(rng, -reach, reach);
  return u;
}

}  // namespace

TEST(Membership, UnitBall) {
  const Paraball b = unit3();
  EXPECT_TRUE(membership(b, std::vector<double>{0, 0, 0}, BallSide::primal));
  EXPECT_FALSE(membership(b, std::vector<double>{2, 0, 0}, BallSide::primal));
  fx::Rng rng(1);
  for (int k = 0; k < 100000; ++k) {
    const std::vector<double> z = in_unit_box(rng, 3, 1.5);
    const bool box = std::fabs(z[0]) < 1 && std::fabs(z[1]) <= 1 && std::fabs(z[2]) <= 1;
    ASSERT_EQ(membership(b, z, BallSide::primal), box);
    ASSERT_EQ(membership(b, z, BallSide::dual), box);
  }
}

TEST(Volume, ClosedForm) {
  EXPECT_EQ(volume(unit3()), 8.0);
  fx::Rng rng(2);
  const Paraball b = fx::random_paraball(rng, 3);
  Paraball moved = b;
  moved.s0 += 1.0;
  moved.t0 -= 0.5;
  moved.ybar[0] += 2.0;
  EXPECT_EQ(volume(moved), volume(b));
  EXPECT_NEAR(intersection_volume(b, b, 1000000, 7) / volume(b), 1.0, 0.02);
  const double lam = 1.37;
  EXPECT_NEAR(volume(scale(b, lam)) / volume(b), std::pow(lam, 6), 1e-12 * std::pow(lam, 6));
}

TEST(DualMixedNorm, ClosedForm) {
  EXPECT_NEAR(dual_mixed_norm(unit3(), Rational(5, 6)), 2 * std::sqrt(2.0), 1e-14);
  fx::Rng rng(3);
  const Paraball b = fx::random_paraball(rng, 3);
  Paraball wider = b;
  wider.alpha *= 2.0;
  const Rational theta(1, 2);
  const ExponentTriple c = triple_for_theta(3, theta).conjugate();
  EXPECT_NEAR(dual_mixed_norm(wider, theta) / dual_mixed_norm(b, theta), std::pow(2.0, 2 * c.r.reciprocal_double()),
              1e-12);
  const SampledField chi = rasterize(b, BallSide::dual, adapted_grid(b, BallSide::dual, 64));
  EXPECT_NEAR(mixed_norm(chi, c.q, c.r) / dual_mixed_norm(b, theta), 1.0, 0.01);
  EXPECT_THROW(dual_mixed_norm(b, Rational(1)), Error);
}

TEST(Scale, ContainmentAndValidation) {
  fx::Rng rng(4);
  const Paraball b = fx::random_paraball(rng, 3);
  EXPECT_EQ(scale(b, 1.0), b);
  const Paraball big = scale(b, 2.0);
  const Symmetry frame = to_symmetry(b);
  for (int k = 0; k < 100000; ++k) {
    ASSERT_TRUE(membership(big, map_source(frame, in_unit_box(rng, 3, 0.999999)), BallSide::primal));
  }
  EXPECT_THROW(scale(b, 0.0), Error);
  EXPECT_NEAR(intersection_volume(b, big, 1000000, 3) / volume(b), 1.0, 0.02);
  Paraball far = b;
  far.s0 += 10 * b.alpha;
  EXPECT_EQ(intersection_volume(b, far, 1000, 1), 0.0);
}

TEST(Frame, RoundTripAndContainment) {
  EXPECT_EQ(from_symmetry(Symmetry{}, 3), unit3());
  fx::Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const Paraball b = fx::random_paraball(rng, 3);
    EXPECT_EQ(from_symmetry(to_symmetry(b), 3), b);
  }
  const Paraball b = fx::random_paraball(rng, 3);
  const Symmetry frame = to_symmetry(b);
  for (int k = 0; k < 10000; ++k) {
    const std::vector<double> u = in_unit_box(rng, 3, 0.999999);
    ASSERT_TRUE(membership(b, map_source(frame, u), BallSide::primal));
    ASSERT_TRUE(membership(b, map_target(frame, u), BallSide::dual));
  }
  EXPECT_THROW(from_symmetry(Symmetry({Shear{0, 1}, Scale{1, 1}}), 3), Error);
}

TEST(Transformed, MatchesComposition) {
  fx::Rng rng(6);
  const Paraball b = fx::random_paraball(rng, 3);
  const Symmetry sigma = fx::random_symmetry(rng, 3, 1.0);
  const Paraball moved = transformed(b, sigma);
  for (int k = 0; k < 1000; ++k) {
    const std::vector<double> u = in_unit_box(rng, 3, 0.999);
    const std::vector<double> z = map_source(sigma, map_source(to_symmetry(b), u));
    ASSERT_TRUE(membership(moved, z, BallSide::primal));
    const std::vector<double> w = map_target(sigma, map_target(to_symmetry(b), u));
    ASSERT_TRUE(membership(moved, w, BallSide::dual));
  }
}

TEST(MockDistance, Examples) {
  fx::Rng rng(7);
  for (int k = 0; k < 100; ++k) {
    const Paraball b = fx::random_paraball(rng, 3, 0.25, 4, 2);
    EXPECT_EQ(mock_distance(b, b), 5.0);
  }
  EXPECT_EQ(mock_distance(Paraball{0, 0, {0, 0}, 1, 1}, Paraball{0, 0, {0, 0}, 2, 1}), 8.5);
  for (int k = 0; k < 100; ++k) {
    const Paraball a = fx::random_paraball(rng, 3, 0.25, 4, 2), b = fx::random_paraball(rng, 3, 0.25, 4, 2);
    EXPECT_EQ(mock_distance(a, b), mock_distance(b, a));
    const Symmetry sigma = fx::random_symmetry(rng, 3);
    EXPECT_NEAR(mock_distance(transformed(a, sigma), transformed(b, sigma)) / mock_distance(a, b), 1.0, 1e-9);
  }
  EXPECT_THROW(mock_distance(unit3(), Paraball::unit(4)), Error);
}

TEST(Partition, DeltaOneAndCoverage) {
  const Cover whole = partition(unit3(), 1.0, Rational(5, 6));
  EXPECT_DOUBLE_EQ(whole.eta1, 1.0);
  EXPECT_DOUBLE_EQ(whole.eta2, 1.0);
  EXPECT_FALSE(whole.members.empty());
  // Members carry doubled half-widths: 2^{d(d+1)/2} times the parent at delta = 1.
  for (const Paraball& m : whole.members) EXPECT_NEAR(volume(m) / volume(unit3()), 64.0, 1e-12);

  fx::Rng rng(8);
  const Paraball b = fx::random_paraball(rng, 3);
  const double delta = 0.25;
  const Cover cover = partition(b, delta, Rational(5, 6));
  EXPECT_DOUBLE_EQ(std::pow(cover.eta1, 3) * std::pow(cover.eta2, 3), delta);
  const CoverIndex index(cover);
  const Symmetry frame = to_symmetry(b);
  for (int k = 0; k < 20000; ++k) {
    const std::vector<double> u = in_unit_box(rng, 3);
    const std::vector<double> z = map_source(frame, u), w = map_target(frame, u);
    const std::int64_t hit = index.find(z, BallSide::primal);
    ASSERT_GE(hit, 0);
    ASSERT_TRUE(membership(cover.members[static_cast<std::size_t>(hit)], z, BallSide::primal));
    ASSERT_TRUE(index.covers(w, BallSide::dual));
  }
  for (const Paraball& m : cover.members) {
    const double r = volume(m) / volume(b);
    EXPECT_GE(r, delta / 64 * (1 - 1e-12));
    EXPECT_LE(r, 64 * delta * (1 + 1e-12));
  }
  EXPECT_THROW(partition(b, 0.0, Rational(5, 6)), Error);
  EXPECT_THROW(partition(b, 1.5, Rational(5, 6)), Error);
}

TEST(SeparatedNet, SeparatedAndMaximal) {
  const auto net = separated_net(2, 0.3);
  EXPECT_EQ(net.front(), (std::vector<double>{0.0, 0.0}));
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (std::size_t j = i + 1; j < net.size(); ++j) {
      EXPECT_GE(std::hypot(net[i][0] - net[j][0], net[i][1] - net[j][1]), 0.3 * (1 - 1e-12));
    }
  }
  fx::Rng rng(9);
  for (int k = 0; k < 2000; ++k) {
    const double a = fx::uniform(rng, -1, 1), b = fx::uniform(rng, -1, 1);
    double nearest = 1e9;
    for (const auto& p : net) nearest = std::min(nearest, std::hypot(a - p[0], b - p[1]));
    EXPECT_LT(nearest, 0.3 + 0.05);  // maximal up to the candidate lattice
  }
}

TEST(QuasiRatio, UnitPairNearContinuumValue) {
  const Paraball b = unit3();
  const SampledField f = rasterize(b, BallSide::primal, adapted_grid(b, BallSide::primal, 48));
  const SampledField g = rasterize(b, BallSide::dual, adapted_grid(b, BallSide::dual, 48));
  const double ratio = quasi_ratio(f, g, Rational(5, 6), TransformPlan{f.grid(), g.grid()});
  EXPECT_NEAR(ratio / (13.0 / (8.0 * std::sqrt(2.0))), 1.0, 2e-3);
  EXPECT_THROW(quasi_ratio(f, SampledField::zeros(g.grid()), Rational(5, 6), TransformPlan{f.grid(), g.grid()}),
               Error);
}

TEST(FitParaball, RecoversPlantedBall) {
  const Paraball planted{0.3, -0.2, {0.1, -0.3}, 0.8, 1.1};
  const Grid sg = Grid::cube(Side::source, 3, -3, 3, 32);
  const Grid tg = Grid::cube(Side::target, 3, -3, 3, 32);
  const SampledField f = rasterize(planted, BallSide::primal, sg, 2);
  const SampledField g = rasterize(planted, BallSide::dual, tg, 2);
  const TransformPlan plan{sg, tg};
  FitOptions opt;
  opt.supersample = 2;
  const FitResult fit = fit_paraball(f, g, Rational(5, 6), plan, opt);
  EXPECT_NEAR(fit.ball.alpha / planted.alpha, 1.0, 0.1);
  EXPECT_NEAR(fit.ball.beta / planted.beta, 1.0, 0.1);
  EXPECT_NEAR(fit.ball.s0, planted.s0, 0.1 * planted.alpha);
  EXPECT_NEAR(fit.ball.t0, planted.t0, 0.1 * planted.beta);
  EXPECT_LE(volume(fit.ball), fit.budget * (1 + 1e-9));

  FitOptions one = opt;
  one.starts = 1;
  EXPECT_LE(fit_paraball(f, g, Rational(5, 6), plan, one).objective, fit.objective);
  EXPECT_THROW(fit_paraball(SampledField::zeros(sg), g, Rational(5, 6), plan), Error);
}

TEST(Paraball, JsonRoundTrip) {
  const Paraball b{0.5, -1.25, {0.25, 2}, 1.5, 0.75};
  EXPECT_EQ(paraball_from_json(to_json(b)), b);
  EXPECT_THROW(paraball_from_json(nlohmann::json::parse(R"({"s0":0,"t0":0,"ybar":[0,0],"alpha":-1,"beta":1})")),
               Error);
}
