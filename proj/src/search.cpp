#include "xrt/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "xrt/decomposition.hpp"
#include "xrt/error.hpp"
#include "xrt/field_io.hpp"
#include "xrt/paraball.hpp"

namespace xrt {

namespace {

constexpr double kAscentSlack = 1e-8;
constexpr double kRenormSlack = 1e-3;
constexpr int kMaxHalvings = 10;

Grid grid_spec(const nlohmann::json& j, Side side, int d) {
  if (j.contains("n")) {
    return Grid::cube(side, d, j.at("lo").get<double>(), j.at("hi").get<double>(), j.at("n").get<std::size_t>());
  }
  nlohmann::json full = j;
  if (!full.contains("side")) full["side"] = std::string(to_string(side));
  Grid g = grid_from_json(full);
  if (g.side() != side) throw Error(ErrorKind::side, "search grid has the wrong side");
  if (g.dim() != d) throw Error(ErrorKind::dimension, "search grid dimension disagrees with d");
  return g;
}

SampledField unit_p(const SampledField& f, Exponent p) {
  const double n = lp_norm(f, p);
  if (!(n > 0.0)) throw Error(ErrorKind::division, "cannot normalize a zero field");
  return f.scaled(1.0 / n);
}

// Pullback by normalize_symmetry, rescaled to unit p-norm.
SampledField normalized_view(const SampledField& f, Exponent p) {
  require_nonnegative(f, "localization");
  return unit_p(pullback_source(normalize_symmetry(f, p), f, p), p);
}

// Radius beyond which a node counts as outside: it is inside iff max(|z|, f) < R.
std::vector<std::pair<double, double>> critical_radii(const SampledField& f, Exponent p) {
  const Grid& grid = f.grid();
  const double pe = p.as_double();
  std::vector<std::pair<double, double>> out(f.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::array<double, kMaxDim> z{};
    std::span<double> zs(z.data(), static_cast<std::size_t>(grid.dim()));
    grid.node(i, zs);
    double r2 = 0.0;
    for (double c : zs) r2 += c * c;
    out[i] = {std::max(std::sqrt(r2), f[i]), std::pow(f[i], pe)};
  }
  return out;
}

}  // namespace

void SearchConfig::validate() const {
  if (d < 3 || d > static_cast<int>(kMaxDim)) throw Error(ErrorKind::dimension, "search needs 3 <= d <= 8");
  if (theta <= Rational(0) || theta >= Rational(1)) throw Error(ErrorKind::domain, "search needs theta in (0,1)");
  if (!(tol_phi > 0.0)) throw Error(ErrorKind::domain, "tol_phi must be positive");
  if (max_iters < 0) throw Error(ErrorKind::domain, "max_iters must be nonnegative");
  if (renorm_every < 0) throw Error(ErrorKind::domain, "renorm_every must be nonnegative");
  if (trim_width < 1) throw Error(ErrorKind::domain, "trim_width must be positive");
  if (!(noise >= 0.0 && noise < 1.0)) throw Error(ErrorKind::domain, "noise must lie in [0,1)");
  if (source.dim() != d || target.dim() != d) throw Error(ErrorKind::dimension, "search grids must have dimension d");
  plan().validate();
}

TransformPlan SearchConfig::plan() const { return TransformPlan{source, target, s_quad, t_quad}; }

SearchConfig search_config_from_json(const nlohmann::json& j) {
  SearchConfig cfg;
  try {
    cfg.d = j.value("d", cfg.d);
    if (j.contains("theta")) cfg.theta = parse_rational(j.at("theta").get<std::string>());
    if (cfg.d != 3 && !j.contains("source_grid")) {
      cfg.source = Grid::cube(Side::source, cfg.d, -2.0, 2.0, 16);
    }
    if (cfg.d != 3 && !j.contains("target_grid")) {
      std::vector<double> lo(static_cast<std::size_t>(cfg.d), -3.0), hi(static_cast<std::size_t>(cfg.d), 3.0);
      lo[0] = -2.0;
      hi[0] = 2.0;
      cfg.target = Grid::box(Side::target, lo, hi, std::vector<std::size_t>(static_cast<std::size_t>(cfg.d), 16));
    }
    if (j.contains("source_grid")) cfg.source = grid_spec(j.at("source_grid"), Side::source, cfg.d);
    if (j.contains("target_grid")) cfg.target = grid_spec(j.at("target_grid"), Side::target, cfg.d);
    cfg.s_quad = j.value("s_quad", cfg.s_quad);
    cfg.t_quad = j.value("t_quad", cfg.t_quad);
    cfg.max_iters = j.value("max_iters", cfg.max_iters);
    cfg.tol_phi = j.value("tol_phi", cfg.tol_phi);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.trim_width = j.value("trim_width", cfg.trim_width);
    cfg.renorm_every = j.value("renorm_every", cfg.renorm_every);
    cfg.noise = j.value("noise", cfg.noise);
    if (j.contains("outputs")) {
      const auto& o = j.at("outputs");
      cfg.outputs.log = o.value("log", std::string());
      cfg.outputs.field = o.value("field", std::string());
      cfg.outputs.report = o.value("report", std::string());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("bad search config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const SearchConfig& cfg) {
  return {{"d", cfg.d},
          {"theta", to_string(cfg.theta)},
          {"source_grid", grid_to_json(cfg.source)},
          {"target_grid", grid_to_json(cfg.target)},
          {"s_quad", cfg.s_quad},
          {"t_quad", cfg.t_quad},
          {"max_iters", cfg.max_iters},
          {"tol_phi", cfg.tol_phi},
          {"seed", cfg.seed},
          {"trim_width", cfg.trim_width},
          {"renorm_every", cfg.renorm_every},
          {"noise", cfg.noise},
          {"outputs", {{"log", cfg.outputs.log}, {"field", cfg.outputs.field}, {"report", cfg.outputs.report}}}};
}

nlohmann::json StepInfo::to_json() const {
  return {{"iter", iter},          {"phi", phi},         {"phi_before", phi_before}, {"phi_ascent", phi_ascent},
          {"norm_f", norm_f},      {"norm_g", norm_g},   {"damping", damping},
          {"accepted", accepted},  {"renormApplied", renorm_applied}, {"renorm_change", renorm_change}};
}

SampledField dual_map(const SampledField& h, Exponent q, Exponent r) {
  if (h.side() != Side::target) throw Error(ErrorKind::side, "dual_map expects a target-side field");
  if (q.is_infinite() || r.is_infinite()) throw Error(ErrorKind::domain, "dual_map needs finite q and r");
  require_nonnegative(h, "dual_map");
  const double total = mixed_norm(h, q, r);
  if (!(total > 0.0)) throw Error(ErrorKind::division, "dual_map of a zero field");
  const double qe = q.as_double(), re = r.as_double();
  const std::vector<double> inner = slice_integrals(h, r);
  const std::size_t per = h.grid().slice_size();
  std::vector<double> out(h.size(), 0.0);
  const double denom = std::pow(total, qe - 1.0);
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < inner.size(); ++k) {
    if (!(inner[k] > 0.0)) continue;
    // ||h(t,.)||_r^{q-r} = (int h^r dy)^{(q-r)/r}
    const double slab = std::pow(inner[k], (qe - re) / re) / denom;
    for (std::size_t i = k * per; i < (k + 1) * per; ++i) {
      const double v = h[i];
      out[i] = v > 0.0 ? std::pow(v, re - 1.0) * slab : 0.0;
    }
  }
  return SampledField(h.grid(), std::move(out));
}

SearchState make_state(SampledField f, const SearchConfig& cfg, Symmetry sigma, int iter) {
  const ExponentTriple e = triple_for_theta(cfg.d, cfg.theta);
  SearchState s;
  s.iter = iter;
  s.f = unit_p(f, e.p);
  const SampledField h = apply_x(s.f, cfg.plan());
  s.phi = mixed_norm(h, e.q, e.r);
  s.g = dual_map(h, e.q, e.r);
  s.sigma_applied = std::move(sigma);
  return s;
}

SearchState initial_state(const SearchConfig& cfg) {
  cfg.validate();
  SampledField f = rasterize(Paraball::unit(cfg.d), BallSide::primal, cfg.source);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> values(f.values().begin(), f.values().end());
  for (double& v : values) v *= 1.0 + cfg.noise * u(rng);
  return make_state(SampledField(f.grid(), std::move(values)), cfg);
}

SearchState ascent_step(const SearchState& state, const SearchConfig& cfg, StepInfo* info) {
  const ExponentTriple e = triple_for_theta(cfg.d, cfg.theta);
  const TransformPlan plan = cfg.plan();
  StepInfo local;
  StepInfo& rec = info ? *info : local;
  rec = StepInfo{};
  rec.iter = state.iter + 1;
  rec.phi_before = state.phi;

  // f+ proportional to (X* g)^{p'-1}.
  const double power = e.p.conjugate().as_double() - 1.0;
  const SampledField u = apply_x_star(state.g, plan).mapped([power](double v) { return v > 0.0 ? std::pow(v, power) : 0.0; });

  SearchState next = state;
  next.iter = state.iter + 1;
  rec.damping = 0.0;
  if (!u.is_zero()) {
    const SampledField fresh = unit_p(u, e.p);
    double lambda = 1.0;
    for (int k = 0; k <= kMaxHalvings; ++k, lambda *= 0.5) {
      SampledField trial = lambda == 1.0 ? fresh : state.f.combined(1.0 - lambda, fresh, lambda);
      SearchState cand = make_state(std::move(trial), cfg, state.sigma_applied, next.iter);
      if (cand.phi >= state.phi - kAscentSlack) {
        next = std::move(cand);
        rec.damping = lambda;
        rec.accepted = true;
        break;
      }
    }
  }

  rec.phi_ascent = next.phi;
  if (rec.accepted && cfg.renorm_every > 0 && next.iter % cfg.renorm_every == 0) {
    try {
      const Symmetry sigma = normalize_symmetry(next.f, e.p);
      SearchState moved = make_state(pullback_source_onto(sigma, next.f, e.p, cfg.source), cfg,
                                     compose(next.sigma_applied, sigma), next.iter);
      rec.renorm_change = (moved.phi - next.phi) / next.phi;
      if (rec.renorm_change >= -kRenormSlack) {
        next = std::move(moved);
        rec.renorm_applied = true;
      }
    } catch (const Error&) {
      // A degenerate mass profile just skips this renormalization.
    }
  }

  const ExponentTriple c = e.conjugate();
  rec.phi = next.phi;
  rec.norm_f = lp_norm(next.f, e.p);
  rec.norm_g = mixed_norm(next.g, c.q, c.r);
  return next;
}

nlohmann::json SearchReport::to_json() const {
  return {{"initial_phi", initial_phi},
          {"initial_quasi_ratio", initial_quasi_ratio},
          {"best_phi", best_phi},
          {"final_phi", final_phi},
          {"iters", iters},
          {"converged", converged},
          {"rejected_steps", rejected_steps},
          {"renorms", renorms},
          {"r95", r95},
          {"localization_at_r95", localization_at_r95},
          {"trim_j0", trim_j0},
          {"trim_kept_fraction", trim_kept_fraction},
          {"sigma_applied", xrt::to_json(final_state.sigma_applied)},
          {"field_path", field_path},
          {"runtime_seconds", runtime_seconds}};
}

SearchReport run_search(const SearchConfig& cfg, const SearchState* resume) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const ExponentTriple e = triple_for_theta(cfg.d, cfg.theta);
  const TransformPlan plan = cfg.plan();

  SearchReport report;
  const Paraball unit = Paraball::unit(cfg.d);
  report.initial_quasi_ratio = quasi_ratio(rasterize(unit, BallSide::primal, cfg.source),
                                           rasterize(unit, BallSide::dual, cfg.target), cfg.theta, plan);

  SearchState state = resume ? make_state(resume->f, cfg, resume->sigma_applied, resume->iter) : initial_state(cfg);
  report.initial_phi = state.phi;
  report.best_phi = state.phi;

  std::ofstream log;
  if (!cfg.outputs.log.empty()) {
    log.open(cfg.outputs.log);
    if (!log) throw Error(ErrorKind::format, "cannot open log '" + cfg.outputs.log + "'");
  }

  for (int it = 0; it < cfg.max_iters; ++it) {
    StepInfo info;
    state = ascent_step(state, cfg, &info);
    report.history.push_back(info);
    if (log.is_open()) log << info.to_json().dump() << '\n';
    report.best_phi = std::max(report.best_phi, state.phi);
    if (!info.accepted) {
      // No damping keeps phi: a fixed point to working precision.
      ++report.rejected_steps;
      report.converged = true;
      break;
    }
    if (info.renorm_applied) {
      ++report.renorms;
      continue;
    }
    if (std::fabs(info.phi - info.phi_before) < cfg.tol_phi * info.phi_before) {
      report.converged = true;
      break;
    }
  }
  report.iters = static_cast<int>(report.history.size());
  report.final_phi = state.phi;

  report.r95 = localization_radius(state.f, e.p, 0.95);
  report.localization_at_r95 = localization_report(state.f, e.p, report.r95);
  const TrimResult trim = trim_frequency(state.f, cfg.trim_width, e.p);
  report.trim_j0 = trim.j0;
  report.trim_kept_fraction = std::pow(lp_norm(trim.trimmed, e.p), e.p.as_double());

  report.field_path = cfg.outputs.field;
  if (!cfg.outputs.field.empty()) write_search_state(cfg.outputs.field, state);
  report.final_state = std::move(state);
  report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!cfg.outputs.report.empty()) {
    std::ofstream out(cfg.outputs.report);
    if (!out) throw Error(ErrorKind::format, "cannot open report '" + cfg.outputs.report + "'");
    out << report.to_json().dump(2) << '\n';
  }
  return report;
}

void write_search_state(const std::string& path, const SearchState& state) {
  write_field(path, state.f, {{"search_state", {{"iter", state.iter}, {"phi", state.phi},
                                                {"sigma_applied", to_json(state.sigma_applied)}}}});
}

SearchState read_search_state(const std::string& path, const SearchConfig& cfg) {
  FieldFile file = read_field_file(path);
  if (file.field.side() != Side::source) throw Error(ErrorKind::side, "search state must hold a source field");
  if (!(file.field.grid() == cfg.source)) throw Error(ErrorKind::plan, "search state grid differs from the config");
  int iter = 0;
  Symmetry sigma;
  if (file.extra.contains("search_state")) {
    const auto& st = file.extra.at("search_state");
    iter = st.value("iter", 0);
    if (st.contains("sigma_applied")) sigma = symmetry_from_json(st.at("sigma_applied"));
  }
  return make_state(std::move(file.field), cfg, std::move(sigma), iter);
}

double localization_report(const SampledField& f, Exponent p, double radius) {
  if (f.is_zero()) throw Error(ErrorKind::division, "localization of a zero field");
  const SampledField v = normalized_view(f, p);
  const auto crit = critical_radii(v, p);
  double outside = 0.0, total = 0.0;
  for (const auto& [c, m] : crit) {
    total += m;
    if (!(c < radius)) outside += m;
  }
  return outside / total;
}

double localization_radius(const SampledField& f, Exponent p, double mass) {
  if (f.is_zero()) throw Error(ErrorKind::division, "localization of a zero field");
  if (!(mass > 0.0 && mass <= 1.0)) throw Error(ErrorKind::domain, "mass fraction must lie in (0,1]");
  const SampledField v = normalized_view(f, p);
  auto crit = critical_radii(v, p);
  std::sort(crit.begin(), crit.end());
  const double total = std::accumulate(crit.begin(), crit.end(), 0.0, [](double a, const auto& c) { return a + c.second; });
  // Walk outward until the mass strictly beyond the current radius is small enough.
  double beyond = total;
  for (std::size_t i = 0; i < crit.size(); ++i) {
    beyond -= crit[i].second;
    const bool tie = i + 1 < crit.size() && crit[i + 1].first == crit[i].first;
    if (!tie && beyond <= (1.0 - mass) * total) return std::nextafter(crit[i].first, HUGE_VAL);
  }
  return std::nextafter(crit.back().first, HUGE_VAL);
}

}  // namespace xrt
