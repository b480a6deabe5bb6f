#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "xrt/error.hpp"
#include "xrt/search.hpp"

using namespace xrt;
namespace fx = xrt::testing;

namespace {

Exponent ex(std::int64_t n, std::int64_t d = 1) { return Exponent(Rational(n, d)); }

SearchConfig small_config() {
  SearchConfig cfg;
  cfg.source = Grid::cube(Side::source, 3, -2.0, 2.0, 16);
  cfg.target = Grid::box(Side::target, std::vector<double>{-2, -3, -3}, std::vector<double>{2, 3, 3},
                         std::vector<std::size_t>{16, 16, 16});
  cfg.max_iters = 12;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / ("xrt_search_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                                     "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST(DualMap, HilbertCase) {
  fx::Rng rng(1);
  const Grid g = Grid::cube(Side::target, 3, -1, 1, 10);
  const SampledField h = fx::gaussian_mixture(g, rng);
  const SampledField d = dual_map(h, ex(2), ex(2));
  const double n2 = lp_norm(h, ex(2));
  for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(d[i], h[i] / n2, 1e-12);
  EXPECT_NEAR(inner_product(h, d), n2, 1e-12 * n2);
}

TEST(DualMap, EqualityCaseGeneral) {
  fx::Rng rng(2);
  const Grid g = Grid::cube(Side::target, 3, -1, 1, 8);
  for (int k = 0; k < 100; ++k) {
    const SampledField h = k % 2 ? fx::gaussian_mixture(g, rng) : fx::random_step(g, rng);
    const Exponent q = k % 3 ? ex(3) : ex(5, 4), r = k % 4 ? ex(3, 2) : ex(4);
    const SampledField d = dual_map(h, q, r);
    EXPECT_NEAR(mixed_norm(d, q.conjugate(), r.conjugate()), 1.0, 1e-10);
    const double m = mixed_norm(h, q, r);
    EXPECT_NEAR(inner_product(h, d) / m, 1.0, 1e-10);
  }
  EXPECT_THROW(dual_map(SampledField::zeros(g), ex(2), ex(2)), Error);
}

TEST(DualMap, SlabIndicatorGivesConstant) {
  const Grid g = Grid::cube(Side::target, 3, -1, 2, 12);
  const SampledField slab = SampledField::sample(g, [](std::span<const double> z) {
    return z[0] > 0 && z[0] < 1 && z[1] > 0 && z[1] < 1 && z[2] > 0 && z[2] < 1 ? 1.0 : 0.0;
  });
  const SampledField d = dual_map(slab, ex(3), ex(3, 2));
  double value = -1;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (slab[i] == 0.0) {
      EXPECT_EQ(d[i], 0.0);
      continue;
    }
    if (value < 0) value = d[i];
    EXPECT_NEAR(d[i], value, 1e-14);
  }
}

TEST(SearchState, Invariants) {
  const SearchConfig cfg = small_config();
  const ExponentTriple e = triple_for_theta(3, cfg.theta), c = e.conjugate();
  SearchState s = initial_state(cfg);
  for (int k = 0; k < 6; ++k) {
    EXPECT_NEAR(lp_norm(s.f, e.p), 1.0, 1e-10);
    EXPECT_NEAR(mixed_norm(s.g, c.q, c.r), 1.0, 1e-10);
    EXPECT_NEAR(bilinear(s.f, s.g, cfg.plan()), s.phi, 1e-8);
    s = ascent_step(s, cfg);
  }
}

TEST(AscentStep, IncreasesFromCubeIndicator) {
  const SearchConfig cfg = small_config();
  const SampledField cube = SampledField::sample(cfg.source, [](std::span<const double> z) {
    return std::fabs(z[0]) <= 1 && std::fabs(z[1]) <= 1 && std::fabs(z[2]) <= 1 ? 1.0 : 0.0;
  });
  const SearchState s0 = make_state(cube, cfg);
  StepInfo info;
  const SearchState s1 = ascent_step(s0, cfg, &info);
  EXPECT_TRUE(info.accepted);
  EXPECT_GT(s1.phi, s0.phi);
  EXPECT_GE(info.phi_ascent, info.phi_before - 1e-8);
}

TEST(AscentStep, FixedPointIsStationary) {
  SearchConfig cfg = small_config();
  cfg.renorm_every = 0;
  SearchState s = initial_state(cfg);
  for (int k = 0; k < 60; ++k) s = ascent_step(s, cfg);
  StepInfo info;
  const SearchState next = ascent_step(s, cfg, &info);
  EXPECT_NEAR(next.phi / s.phi, 1.0, 1e-6);
}

TEST(RunSearch, ZeroItersEchoesInitialPhi) {
  SearchConfig cfg = small_config();
  cfg.max_iters = 0;
  const SearchReport rep = run_search(cfg);
  EXPECT_EQ(rep.iters, 0);
  EXPECT_EQ(rep.best_phi, rep.initial_phi);
  EXPECT_EQ(rep.final_phi, initial_state(cfg).phi);
}

TEST(RunSearch, DeterministicLogAndMonotone) {
  TempDir dir;
  std::vector<std::string> logs;
  for (int run = 0; run < 2; ++run) {
    SearchConfig cfg = small_config();
    cfg.outputs.log = (dir.path / ("log" + std::to_string(run) + ".jsonl")).string();
    cfg.outputs.field = (dir.path / ("f" + std::to_string(run) + ".xrtf")).string();
    cfg.outputs.report = (dir.path / ("r" + std::to_string(run) + ".json")).string();
    const SearchReport rep = run_search(cfg);
    for (const StepInfo& s : rep.history) {
      if (s.accepted) EXPECT_GE(s.phi_ascent, s.phi_before - 1e-8);
    }
    EXPECT_GE(rep.best_phi, rep.initial_phi);
    logs.push_back(slurp(cfg.outputs.log));
    const auto report = nlohmann::json::parse(slurp(cfg.outputs.report));
    EXPECT_EQ(report.at("iters").get<int>(), rep.iters);
  }
  EXPECT_FALSE(logs[0].empty());
  EXPECT_EQ(logs[0], logs[1]);
  std::istringstream lines(logs[0]);
  std::string line;
  std::getline(lines, line);
  const auto first = nlohmann::json::parse(line);
  for (const char* key : {"iter", "phi", "norm_f", "norm_g", "renormApplied"}) EXPECT_TRUE(first.contains(key)) << key;
}

TEST(RunSearch, ResumeContinuesFromState) {
  TempDir dir;
  SearchConfig cfg = small_config();
  cfg.max_iters = 4;
  const SearchReport first = run_search(cfg);
  const std::string path = (dir.path / "state.xrtf").string();
  write_search_state(path, first.final_state);
  const SearchState back = read_search_state(path, cfg);
  EXPECT_EQ(back.iter, first.final_state.iter);
  EXPECT_NEAR(back.phi, first.final_state.phi, 1e-12);
  cfg.max_iters = 8;
  const SearchReport resumed = run_search(cfg, &back);
  EXPECT_GE(resumed.best_phi, first.final_state.phi - 1e-8);
}

TEST(Localization, Properties) {
  const Grid g = Grid::cube(Side::source, 3, -3, 3, 24);
  const Exponent p = ex(3, 2);
  const SampledField bump = SampledField::sample(g, [](std::span<const double> z) {
    const double r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
    return r2 < 1 ? 1.0 - r2 : 0.0;
  });
  EXPECT_EQ(localization_report(bump, p, 1e6), 0.0);
  double previous = 1.0;
  for (double r = 0.1; r < 6.0; r += 0.2) {
    const double frac = localization_report(bump, p, r);
    EXPECT_LE(frac, previous + 1e-15);
    previous = frac;
  }
  const double r95 = localization_radius(bump, p);
  // Smallest radius that leaves at most 5% outside.
  EXPECT_LE(localization_report(bump, p, r95), 0.05);
  EXPECT_GT(localization_report(bump, p, std::nextafter(r95, 0.0)), 0.05);
  EXPECT_THROW(localization_report(SampledField::zeros(g), p, 1.0), Error);
}

TEST(SearchConfig, JsonDefaultsAndValidation) {
  const SearchConfig cfg = search_config_from_json(nlohmann::json::parse(R"({"seed": 4, "theta": "1/2"})"));
  EXPECT_EQ(cfg.seed, 4u);
  EXPECT_EQ(cfg.theta, Rational(1, 2));
  EXPECT_EQ(cfg.max_iters, SearchConfig{}.max_iters);
  const SearchConfig cube = search_config_from_json(nlohmann::json::parse(R"({"source_grid": {"lo": -1, "hi": 1, "n": 8}})"));
  EXPECT_EQ(cube.source, Grid::cube(Side::source, 3, -1, 1, 8));
  const SearchConfig round = search_config_from_json(to_json(cfg));
  EXPECT_EQ(round.theta, cfg.theta);
  EXPECT_EQ(round.target, cfg.target);
  EXPECT_THROW(search_config_from_json(nlohmann::json::parse(R"({"theta": "0.5"})")), Error);
  EXPECT_THROW(search_config_from_json(nlohmann::json::parse(R"({"theta": "1"})")), Error);
  EXPECT_THROW(search_config_from_json(nlohmann::json::parse(R"({"tol_phi": 0})")), Error);
}
