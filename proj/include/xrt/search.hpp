#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xrt/exponents.hpp"
#include "xrt/field.hpp"
#include "xrt/symmetry.hpp"
#include "xrt/xray.hpp"

namespace xrt {

struct SearchOutputs {
  std::string log;     // JSONL, one object per step
  std::string field;   // final iterate, also a resumable state file
  std::string report;  // JSON report
};

struct SearchConfig {
  int d = 3;
  Rational theta{5, 6};
  Grid source = Grid::cube(Side::source, 3, -2.0, 2.0, 32);
  Grid target = Grid::box(Side::target, std::vector<double>{-2.0, -3.0, -3.0}, std::vector<double>{2.0, 3.0, 3.0},
                          std::vector<std::size_t>{32, 32, 32});
  std::size_t s_quad = 0;
  std::size_t t_quad = 0;
  int max_iters = 200;
  double tol_phi = 1e-7;
  std::uint64_t seed = 1;
  int trim_width = 8;
  int renorm_every = 5;
  // Relative amplitude of the multiplicative seed noise on the initial indicator.
  double noise = 0.1;
  SearchOutputs outputs;

  void validate() const;
  TransformPlan plan() const;
};

/// Missing keys keep their defaults. Grids take either a full grid description
/// or the cube shorthand {"lo": a, "hi": b, "n": n}.
SearchConfig search_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SearchConfig& cfg);

struct SearchState {
  int iter = 0;
  SampledField f;  // unit p-norm
  SampledField g;  // unit (q', r')-norm dual witness of Xf
  double phi = 0.0;
  Symmetry sigma_applied;
};

struct StepInfo {
  int iter = 0;
  double phi_before = 0.0;
  double phi_ascent = 0.0;  // after the ascent, before any renormalization
  double phi = 0.0;
  double norm_f = 0.0;
  double norm_g = 0.0;
  double damping = 1.0;  // weight on the new iterate, 0 when the step was rejected
  bool accepted = false;
  bool renorm_applied = false;
  double renorm_change = 0.0;  // relative change of phi the renormalization would cause

  nlohmann::json to_json() const;
};

/// g = h^{r-1} ||h(t,.)||_r^{q-r} / ||h||_{q,r}^{q-1}: unit (q', r')-norm and <h, g> = ||h||_{q,r}.
SampledField dual_map(const SampledField& h, Exponent q, Exponent r);

/// State for f, with g and phi recomputed.
SearchState make_state(SampledField f, const SearchConfig& cfg, Symmetry sigma = {}, int iter = 0);

/// Rasterized unit paraball with seeded multiplicative noise.
SearchState initial_state(const SearchConfig& cfg);

SearchState ascent_step(const SearchState& state, const SearchConfig& cfg, StepInfo* info = nullptr);

struct SearchReport {
  double initial_phi = 0.0;
  double initial_quasi_ratio = 0.0;  // quasi_ratio of the unit paraball pair on the search grids
  double best_phi = 0.0;
  double final_phi = 0.0;
  int iters = 0;
  bool converged = false;
  int rejected_steps = 0;
  int renorms = 0;
  double r95 = 0.0;
  double localization_at_r95 = 0.0;
  int trim_j0 = 0;
  double trim_kept_fraction = 0.0;
  double runtime_seconds = 0.0;
  std::string field_path;
  std::vector<StepInfo> history;
  SearchState final_state;

  nlohmann::json to_json() const;
};

/// Iterates ascent_step until |dphi|/phi < tol_phi or max_iters. Writes the
/// configured outputs when their paths are non-empty.
SearchReport run_search(const SearchConfig& cfg, const SearchState* resume = nullptr);

void write_search_state(const std::string& path, const SearchState& state);
SearchState read_search_state(const std::string& path, const SearchConfig& cfg);

/// After normalize_symmetry, the fraction of |f|^p mass on {|z| >= R} or {|f| >= R ||f||_p}.
double localization_report(const SampledField& f, Exponent p, double radius);

/// Smallest radius whose localization fraction is at most 1 - mass.
double localization_radius(const SampledField& f, Exponent p, double mass = 0.95);

}  // namespace xrt
