#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <omp.h>

#include "diagnose.hpp"
#include "manifest.hpp"
#include "xrt/decomposition.hpp"
#include "xrt/error.hpp"
#include "xrt/exponents.hpp"
#include "xrt/field.hpp"
#include "xrt/field_io.hpp"
#include "xrt/paraball.hpp"
#include "xrt/search.hpp"
#include "xrt/symmetry.hpp"
#include "xrt/xray.hpp"

using nlohmann::json;

namespace {

constexpr int kUsage = 64;
constexpr int kNotConverged = 2;

// Inline JSON if it starts with '{' or '[', otherwise a path to a JSON file.
json load_json(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw xrt::Error(xrt::ErrorKind::parse, std::string("bad inline JSON: ") + e.what());
    }
  }
  std::ifstream in(text);
  if (!in) throw xrt::Error(xrt::ErrorKind::format, "cannot open '" + text + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw xrt::Error(xrt::ErrorKind::parse, "bad JSON in '" + text + "': " + e.what());
  }
}

// Full grid description or the cube shorthand {"lo", "hi", "n"}.
xrt::Grid load_grid(const std::string& text, xrt::Side side, int d) {
  json j = load_json(text);
  if (j.contains("n")) return xrt::Grid::cube(side, d, j.at("lo").get<double>(), j.at("hi").get<double>(), j.at("n").get<std::size_t>());
  if (!j.contains("side")) j["side"] = std::string(xrt::to_string(side));
  const xrt::Grid g = xrt::grid_from_json(j);
  if (g.side() != side) throw xrt::Error(xrt::ErrorKind::side, "grid has the wrong side");
  return g;
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size()) throw xrt::Error(xrt::ErrorKind::parse, "bad coordinate '" + item + "'");
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    out += (i ? "," : "") + std::string(buf);
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Exact rationals only: "0.5" is refused so that exponents stay exact.
struct RationalValidator : CLI::Validator {
  RationalValidator() {
    name_ = "RATIONAL";
    func_ = [](std::string& s) -> std::string {
      try {
        xrt::parse_rational(s);
        return {};
      } catch (const xrt::Error& e) {
        return e.what();
      }
    };
  }
};

struct ExponentValidator : CLI::Validator {
  ExponentValidator() {
    name_ = "EXPONENT";
    func_ = [](std::string& s) -> std::string {
      try {
        xrt::Exponent::parse(s);
        return {};
      } catch (const xrt::Error& e) {
        return e.what();
      }
    };
  }
};

const RationalValidator kRational;
const ExponentValidator kExponent;

// Writes text to a file (recorded in the manifest) or to stdout.
void emit(const std::string& path, const std::string& text, xrt::cli::RunManifest& manifest) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw xrt::Error(xrt::ErrorKind::format, "cannot write '" + path + "'");
  out << text;
  out.close();
  manifest.add_output(path);
}

struct Options {
  // exponents
  int d = 3;
  std::string theta;
  bool endpoint = false;
  // shared
  std::string input, output, p, q, r, s;
  std::optional<std::uint64_t> seed;
  // transform
  std::string grid;
  bool adjoint = false;
  std::size_t squad = 0, tquad = 0;
  // symmetry
  std::string spec, point, side = "source";
  bool inverse = false;
  // paraball
  std::string ball, other, raster;
  std::size_t samples = 200000;
  std::size_t raster_n = 32;
  int supersample = 1;
  // partition
  std::string delta;
  // mockdist
  std::vector<std::string> balls;
  std::string table;
  // decompose
  std::string mode = "dyadic";
  int floor = xrt::kDefaultFloor;
  // search
  std::string config, resume, log, field, report;
  std::optional<int> max_iters;
};

int run_exponents(const Options& o, xrt::cli::RunManifest& m) {
  const xrt::ExponentTriple e =
      o.endpoint ? xrt::endpoint_triple(o.d) : xrt::triple_for_theta(o.d, xrt::parse_rational(o.theta));
  m.set_config({{"d", o.d}, {"theta", o.endpoint ? "1" : o.theta}});
  std::cout << e.str() << "\n";
  return 0;
}

int run_norm(const Options& o, xrt::cli::RunManifest& m) {
  const xrt::SampledField f = xrt::read_field(o.input);
  json cfg{{"input", o.input}};
  double value = 0.0;
  if (f.side() == xrt::Side::source) {
    if (o.p.empty()) throw CLI::ValidationError("--p", "a source field needs --p");
    const xrt::Exponent p = xrt::Exponent::parse(o.p);
    value = o.s.empty() ? xrt::lp_norm(f, p) : xrt::lorentz_source_norm(f, p, xrt::Exponent::parse(o.s));
    cfg["p"] = o.p;
  } else {
    if (o.q.empty() || o.r.empty()) throw CLI::ValidationError("--q/--r", "a target field needs --q and --r");
    const xrt::Exponent q = xrt::Exponent::parse(o.q), r = xrt::Exponent::parse(o.r);
    value = o.s.empty() ? xrt::mixed_norm(f, q, r) : xrt::lorentz_mixed_norm(f, q, xrt::Exponent::parse(o.s), r);
    cfg["q"] = o.q;
    cfg["r"] = o.r;
  }
  if (!o.s.empty()) cfg["s"] = o.s;
  m.set_config(cfg);
  std::cout << num(value) << "\n";
  return 0;
}

int run_transform(const Options& o, xrt::cli::RunManifest& m) {
  const xrt::SampledField in = xrt::read_field(o.input);
  const xrt::Side want = o.adjoint ? xrt::Side::target : xrt::Side::source;
  if (in.side() != want) {
    throw xrt::Error(xrt::ErrorKind::side, o.adjoint ? "--adjoint needs a target field" : "transform needs a source field");
  }
  const xrt::Side out_side = o.adjoint ? xrt::Side::source : xrt::Side::target;
  const xrt::Grid grid = o.grid.empty() ? in.grid().with_side(out_side) : load_grid(o.grid, out_side, in.dim());
  const xrt::SampledField out = o.adjoint ? xrt::apply_x_star(in, grid, o.tquad) : xrt::apply_x(in, grid, o.squad);
  xrt::write_field(o.output, out);
  m.add_output(o.output);
  m.set_config({{"input", o.input}, {"adjoint", o.adjoint}, {"grid", xrt::grid_to_json(grid)},
                {"squad", o.squad}, {"tquad", o.tquad}});
  return 0;
}

int run_symmetry(const Options& o, xrt::cli::RunManifest& m) {
  xrt::Symmetry sigma = xrt::symmetry_from_json(load_json(o.spec));
  if (o.inverse) sigma = sigma.inverse();
  json cfg{{"symmetry", xrt::to_json(sigma)}};
  if (!o.point.empty()) {
    const std::vector<double> z = parse_point(o.point);
    const xrt::Side side = xrt::parse_side(o.side);
    std::cout << join(side == xrt::Side::source ? xrt::map_source(sigma, z) : xrt::map_target(sigma, z)) << "\n";
    cfg["point"] = z;
    cfg["side"] = o.side;
  } else {
    if (o.input.empty() || o.output.empty()) throw CLI::ValidationError("symmetry", "give --point, or --input and --output");
    const xrt::SampledField f = xrt::read_field(o.input);
    xrt::SampledField out;
    if (f.side() == xrt::Side::source) {
      if (o.p.empty()) throw CLI::ValidationError("--p", "a source field needs --p");
      out = xrt::pullback_source(sigma, f, xrt::Exponent::parse(o.p));
      cfg["p"] = o.p;
    } else {
      if (o.q.empty() || o.r.empty()) throw CLI::ValidationError("--q/--r", "a target field needs --q and --r");
      out = xrt::pullback_target(sigma, f, xrt::Exponent::parse(o.q), xrt::Exponent::parse(o.r));
      cfg["q"] = o.q;
      cfg["r"] = o.r;
    }
    xrt::write_field(o.output, out);
    m.add_output(o.output);
    cfg["input"] = o.input;
  }
  m.set_config(cfg);
  return 0;
}

int run_paraball(const Options& o, xrt::cli::RunManifest& m) {
  const xrt::Paraball b = xrt::paraball_from_json(load_json(o.ball));
  json out{{"ball", xrt::to_json(b)}, {"xbar", b.xbar()}, {"volume", xrt::volume(b)}};
  json cfg{{"ball", xrt::to_json(b)}};
  if (!o.theta.empty()) {
    out["dual_mixed_norm"] = xrt::dual_mixed_norm(b, xrt::parse_rational(o.theta));
    cfg["theta"] = o.theta;
  }
  for (auto side : {xrt::BallSide::primal, xrt::BallSide::dual}) {
    const xrt::Box box = xrt::bounding_box(b, side);
    out[side == xrt::BallSide::primal ? "bounding_box" : "dual_bounding_box"] = {{"lo", box.lo}, {"hi", box.hi}};
  }
  if (!o.point.empty()) {
    const std::vector<double> z = parse_point(o.point);
    const auto side = o.side == "target" || o.side == "dual" ? xrt::BallSide::dual : xrt::BallSide::primal;
    out["member"] = xrt::membership(b, z, side);
    cfg["point"] = z;
    cfg["side"] = o.side;
  }
  if (!o.other.empty()) {
    if (!o.seed) throw CLI::ValidationError("--seed", "intersection sampling needs --seed");
    const xrt::Paraball c = xrt::paraball_from_json(load_json(o.other));
    out["intersection_volume"] = xrt::intersection_volume(b, c, o.samples, *o.seed);
    out["mock_distance"] = xrt::mock_distance(b, c);
    cfg["with"] = xrt::to_json(c);
    cfg["samples"] = o.samples;
  }
  if (!o.raster.empty()) {
    const auto side = o.side == "target" || o.side == "dual" ? xrt::BallSide::dual : xrt::BallSide::primal;
    const xrt::Side grid_side = side == xrt::BallSide::dual ? xrt::Side::target : xrt::Side::source;
    const xrt::Grid grid = o.grid.empty() ? xrt::adapted_grid(b, side, o.raster_n) : load_grid(o.grid, grid_side, b.dim());
    xrt::write_field(o.raster, xrt::rasterize(b, side, grid, o.supersample));
    m.add_output(o.raster);
    cfg["raster"] = {{"side", o.side}, {"grid", xrt::grid_to_json(grid)}, {"supersample", o.supersample}};
  }
  m.set_config(cfg);
  emit(o.output, out.dump(2) + "\n", m);
  return 0;
}

double parse_delta(const std::string& text) {
  if (text.find('/') != std::string::npos) return xrt::to_double(xrt::parse_rational(text));
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw xrt::Error(xrt::ErrorKind::parse, "bad delta '" + text + "'");
  return v;
}

int run_partition(const Options& o, xrt::cli::RunManifest& m) {
  const xrt::Paraball b = xrt::paraball_from_json(load_json(o.ball));
  const double delta = parse_delta(o.delta);
  const xrt::Cover cover = xrt::partition(b, delta, xrt::parse_rational(o.theta));
  json members = json::array();
  for (const xrt::Paraball& member : cover.members) members.push_back(xrt::to_json(member));
  const json out{{"parent", xrt::to_json(b)}, {"delta", delta},          {"eta1", cover.eta1},
                 {"eta2", cover.eta2},        {"count", members.size()}, {"members", members}};
  m.set_config({{"ball", xrt::to_json(b)}, {"delta", o.delta}, {"theta", o.theta}});
  emit(o.output, out.dump(2) + "\n", m);
  return 0;
}

int run_mockdist(const Options& o, xrt::cli::RunManifest& m) {
  std::vector<xrt::Paraball> balls;
  for (const std::string& text : o.balls) balls.push_back(xrt::paraball_from_json(load_json(text)));
  if (!o.table.empty()) {
    for (const json& j : load_json(o.table)) balls.push_back(xrt::paraball_from_json(j));
  }
  json cfg = json::array();
  for (const xrt::Paraball& b : balls) cfg.push_back(xrt::to_json(b));
  m.set_config({{"balls", cfg}});
  if (balls.empty()) throw CLI::ValidationError("mockdist", "give --ball (once or twice) or --table");
  if (o.table.empty() && balls.size() <= 2) {
    std::cout << num(xrt::mock_distance(balls.front(), balls.back())) << "\n";
    return 0;
  }
  std::string csv = "i,j,distance\n";
  for (std::size_t i = 0; i < balls.size(); ++i) {
    for (std::size_t j = 0; j < balls.size(); ++j) {
      csv += std::to_string(i) + "," + std::to_string(j) + "," + num(xrt::mock_distance(balls[i], balls[j])) + "\n";
    }
  }
  emit(o.output, csv, m);
  return 0;
}

xrt::SampledField masked(const xrt::SampledField& f, const xrt::Mask& mask) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= mask[i];
  return xrt::SampledField(f.grid(), std::move(v));
}

int run_decompose(const Options& o, xrt::cli::RunManifest& m) {
  const xrt::SampledField f = xrt::read_field(o.input);
  json cfg{{"input", o.input}, {"mode", o.mode}, {"floor", o.floor}};
  std::string csv;
  if (o.mode == "dyadic") {
    if (o.p.empty()) throw CLI::ValidationError("--p", "dyadic mode needs --p");
    const xrt::Exponent p = xrt::Exponent::parse(o.p);
    const double whole = std::pow(xrt::lp_norm(f, p), p.as_double());
    csv = "j,measure,norm_fraction\n";
    for (const auto& piece : xrt::dyadic_decompose(f, o.floor)) {
      const double part = std::pow(xrt::lp_norm(masked(f, piece.mask), p), p.as_double());
      csv += std::to_string(piece.j) + "," + num(piece.measure) + "," + num(part / whole) + "\n";
    }
    cfg["p"] = o.p;
  } else {
    if (o.q.empty() || o.r.empty()) throw CLI::ValidationError("--q/--r", o.mode + " mode needs --q and --r");
    const xrt::Exponent q = xrt::Exponent::parse(o.q), r = xrt::Exponent::parse(o.r);
    cfg["q"] = o.q;
    cfg["r"] = o.r;
    if (o.mode == "slab") {
      const double whole = std::pow(xrt::mixed_norm(f, q, r), q.as_double());
      csv = "l,slices,norm_fraction\n";
      for (const auto& slab : xrt::slab_decompose(f, r, o.floor)) {
        int slices = 0;
        for (auto b : slab.t_mask) slices += b;
        const double part = std::pow(xrt::mixed_norm(xrt::restrict_to_slab(f, slab), q, r), q.as_double());
        csv += std::to_string(slab.l) + "," + std::to_string(slices) + "," + num(part / whole) + "\n";
      }
    } else if (o.mode == "combined") {
      csv = "k,l,m,measure,level_norm\n";
      for (const auto& piece : xrt::combined_decompose(f, q, r, o.floor)) {
        const double norm = xrt::mixed_norm(xrt::level_indicator(f.grid(), piece.mask, piece.k), q, r);
        csv += std::to_string(piece.k) + "," + std::to_string(piece.l) + "," + std::to_string(piece.m) + "," +
               num(piece.measure) + "," + num(norm) + "\n";
      }
    } else {
      throw CLI::ValidationError("--mode", "unknown mode '" + o.mode + "'");
    }
  }
  m.set_config(cfg);
  emit(o.output, csv, m);
  return 0;
}

int run_search(const Options& o, xrt::cli::RunManifest& m) {
  xrt::SearchConfig cfg = o.config.empty() ? xrt::SearchConfig{} : xrt::search_config_from_json(load_json(o.config));
  cfg.seed = *o.seed;
  if (o.max_iters) cfg.max_iters = *o.max_iters;
  if (!o.log.empty()) cfg.outputs.log = o.log;
  if (!o.field.empty()) cfg.outputs.field = o.field;
  if (!o.report.empty()) cfg.outputs.report = o.report;
  m.set_config(xrt::to_json(cfg));

  std::optional<xrt::SearchState> resume;
  if (!o.resume.empty()) resume = xrt::read_search_state(o.resume, cfg);
  const xrt::SearchReport rep = xrt::run_search(cfg, resume ? &*resume : nullptr);
  for (const std::string& path : {cfg.outputs.log, cfg.outputs.field, cfg.outputs.report}) {
    if (!path.empty()) m.add_output(path);
  }
  std::cout << "iters=" << rep.iters << " converged=" << (rep.converged ? "true" : "false")
            << " best_phi=" << num(rep.best_phi) << " r95=" << num(rep.r95) << "\n";
  return rep.converged ? 0 : kNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"X-ray transform along the moment curve: norms, symmetries, paraballs and extremizer search", "xrt"};
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  app.require_subcommand(1);

  Options o;
  int threads = 0;
  std::string manifest_path = "xrt-manifest.json";
  app.add_option("--threads", threads, "Worker threads (default: all logical cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--manifest", manifest_path, "Run manifest path; '-' for stderr, '' to skip")->capture_default_str();

  auto* exponents = app.add_subcommand("exponents", "Exponent triple (p, q, r) at theta");
  exponents->add_option("--d", o.d, "Dimension")->capture_default_str();
  auto* theta_opt = exponents->add_option("--theta", o.theta, "Interpolation parameter as num/den")->check(kRational);
  exponents->add_flag("--endpoint", o.endpoint, "The theta = 1 endpoint triple")->excludes(theta_opt);

  auto* norm = app.add_subcommand("norm", "Lp, mixed or Lorentz norm of a field file");
  norm->add_option("--input", o.input, "Field file")->required()->check(CLI::ExistingFile);
  norm->add_option("--p", o.p, "Source exponent")->check(kExponent);
  norm->add_option("--q", o.q, "Target time exponent")->check(kExponent);
  norm->add_option("--r", o.r, "Target space exponent")->check(kExponent);
  norm->add_option("--s", o.s, "Lorentz second index")->check(kExponent);

  auto* transform = app.add_subcommand("transform", "Apply X (or X* with --adjoint) to a field file");
  transform->add_option("--input", o.input, "Field file")->required()->check(CLI::ExistingFile);
  transform->add_option("--output", o.output, "Output field file")->required();
  auto* tg = transform->add_option("--target-grid", o.grid, "Output grid for X: JSON or file; {lo,hi,n} for a cube");
  transform->add_option("--source-grid", o.grid, "Output grid for X*")->excludes(tg);
  transform->add_flag("--adjoint", o.adjoint, "Apply X* to a target field");
  transform->add_option("--squad", o.squad, "s-quadrature nodes (0 = automatic)");
  transform->add_option("--tquad", o.tquad, "t-quadrature nodes (0 = automatic)");

  auto* symmetry = app.add_subcommand("symmetry", "Apply a generator list to a point or a field file");
  symmetry->add_option("--spec", o.spec, "Generator list: JSON or file")->required();
  symmetry->add_option("--point", o.point, "Comma-separated coordinates");
  symmetry->add_option("--side", o.side, "Side of --point")->check(CLI::IsMember({"source", "target"}))->capture_default_str();
  symmetry->add_option("--input", o.input, "Field file to pull back")->check(CLI::ExistingFile);
  symmetry->add_option("--output", o.output, "Output field file");
  symmetry->add_option("--p", o.p, "Norm preserved on source fields")->check(kExponent);
  symmetry->add_option("--q", o.q, "Time exponent preserved on target fields")->check(kExponent);
  symmetry->add_option("--r", o.r, "Space exponent preserved on target fields")->check(kExponent);
  symmetry->add_flag("--inverse", o.inverse, "Use the inverse symmetry");

  auto* paraball = app.add_subcommand("paraball", "Volume, dual norm, membership and overlap of a paraball");
  paraball->add_option("--ball", o.ball, "Paraball: JSON or file")->required();
  paraball->add_option("--theta", o.theta, "Theta for the dual mixed norm")->check(kRational);
  paraball->add_option("--point", o.point, "Membership query point");
  paraball->add_option("--side", o.side, "primal/source or dual/target")
      ->check(CLI::IsMember({"source", "target", "primal", "dual"}))
      ->capture_default_str();
  paraball->add_option("--with", o.other, "Second paraball for intersection volume and mock-distance");
  paraball->add_option("--samples", o.samples, "Monte Carlo samples for --with")->capture_default_str();
  paraball->add_option("--seed", o.seed, "Seed for --with sampling");
  paraball->add_option("--output", o.output, "JSON output (default stdout)");
  paraball->add_option("--raster", o.raster, "Write the indicator of B (or B* with --side dual) to this field file");
  paraball->add_option("--grid", o.grid, "Raster grid: JSON or file; default adapted to the ball");
  paraball->add_option("--raster-n", o.raster_n, "Cells per axis of the adapted raster grid")->capture_default_str();
  paraball->add_option("--supersample", o.supersample, "Samples per cell axis when rasterizing")->capture_default_str();

  auto* partition = app.add_subcommand("partition", "Delta-partition cover of a paraball");
  partition->add_option("--ball", o.ball, "Paraball: JSON or file")->required();
  partition->add_option("--delta", o.delta, "Volume fraction in (0,1]")->required();
  partition->add_option("--theta", o.theta, "Theta as num/den")->required()->check(kRational);
  partition->add_option("--output", o.output, "JSON output (default stdout)");

  auto* mockdist = app.add_subcommand("mockdist", "Mock-distance between paraballs");
  mockdist->add_option("--ball", o.balls, "Paraball (once or twice): JSON or file");
  mockdist->add_option("--table", o.table, "JSON list of paraballs; prints the pairwise CSV table");
  mockdist->add_option("--output", o.output, "CSV output for --table (default stdout)");

  auto* decompose = app.add_subcommand("decompose", "Dyadic, slab or combined level decomposition as CSV");
  decompose->add_option("--input", o.input, "Field file")->required()->check(CLI::ExistingFile);
  decompose->add_option("--mode", o.mode, "dyadic, slab or combined")
      ->check(CLI::IsMember({"dyadic", "slab", "combined"}))
      ->capture_default_str();
  decompose->add_option("--p", o.p, "Exponent for dyadic mode")->check(kExponent);
  decompose->add_option("--q", o.q, "Time exponent")->check(kExponent);
  decompose->add_option("--r", o.r, "Space exponent")->check(kExponent);
  decompose->add_option("--floor", o.floor, "Levels below 2^floor count as zero")->capture_default_str();
  decompose->add_option("--output", o.output, "CSV output (default stdout)");

  auto* search = app.add_subcommand("search", "Symmetry-renormalized extremizer search; exit 2 if not converged");
  search->add_option("--config", o.config, "Search configuration: JSON or file");
  search->add_option("--seed", o.seed, "Seed (overrides the config)")->required();
  search->add_option("--resume", o.resume, "Resume from a state file")->check(CLI::ExistingFile);
  search->add_option("--max-iters", o.max_iters, "Override max_iters");
  search->add_option("--log", o.log, "JSONL log path");
  search->add_option("--field", o.field, "Final state field path");
  search->add_option("--report", o.report, "Report JSON path");

  auto* diag = app.add_subcommand("diagnose", "Quick invariant suite; prints a pass/fail table");
  diag->add_option("--seed", o.seed, "Seed")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (argc < 2) std::cerr << app.help();
    return kUsage;
  }
  if (threads > 0) omp_set_num_threads(threads);

  CLI::App* sub = app.get_subcommands().front();
  xrt::cli::RunManifest manifest(sub->get_name(), std::vector<std::string>(argv, argv + argc));
  if (o.seed) manifest.set_seed(*o.seed);
  int code = 0;
  try {
    if (sub == exponents) {
      if (!o.endpoint && o.theta.empty()) throw CLI::ValidationError("--theta", "give --theta or --endpoint");
      code = run_exponents(o, manifest);
    } else if (sub == norm) {
      code = run_norm(o, manifest);
    } else if (sub == transform) {
      code = run_transform(o, manifest);
    } else if (sub == symmetry) {
      code = run_symmetry(o, manifest);
    } else if (sub == paraball) {
      code = run_paraball(o, manifest);
    } else if (sub == partition) {
      code = run_partition(o, manifest);
    } else if (sub == mockdist) {
      code = run_mockdist(o, manifest);
    } else if (sub == decompose) {
      code = run_decompose(o, manifest);
    } else if (sub == search) {
      code = run_search(o, manifest);
    } else if (sub == diag) {
      manifest.set_config({{"seed", *o.seed}});
      code = xrt::cli::diagnose(*o.seed, std::cout) == 0 ? 0 : 1;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "xrt " << sub->get_name() << ": " << e.what() << "\n";
    code = kUsage;
  } catch (const xrt::Error& e) {
    std::cerr << "xrt " << sub->get_name() << ": " << e.what() << "\n";
    code = e.kind() == xrt::ErrorKind::parse ? kUsage : 1;
  } catch (const std::exception& e) {
    std::cerr << "xrt " << sub->get_name() << ": " << e.what() << "\n";
    code = 1;
  }
  manifest.set_exit_code(code);
  try {
    manifest.write(manifest_path);
  } catch (const std::exception& e) {
    std::cerr << "xrt: " << e.what() << "\n";
    return code ? code : 1;
  }
  return code;
}
