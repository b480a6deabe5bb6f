#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "xrt/error.hpp"
#include "xrt/paraball.hpp"

namespace xrt {

namespace {

// Parameter vector: s0, t0, ybar..., log alpha, log beta.
std::vector<double> pack(const Paraball& b) {
  std::vector<double> v{b.s0, b.t0};
  v.insert(v.end(), b.ybar.begin(), b.ybar.end());
  v.push_back(std::log(b.alpha));
  v.push_back(std::log(b.beta));
  return v;
}

Paraball unpack(const std::vector<double>& v) {
  Paraball b;
  b.s0 = v[0];
  b.t0 = v[1];
  b.ybar.assign(v.begin() + 2, v.end() - 2);
  b.alpha = std::exp(v[v.size() - 2]);
  b.beta = std::exp(v.back());
  return b;
}

// Shrinks alpha and beta by a common factor until the volume fits.
Paraball within_budget(Paraball b, double budget) {
  const int d = b.dim();
  const double vol = volume(b);
  if (vol > budget) b = scale(b, std::pow(budget / vol, 1.0 / (d * (d + 1) / 2.0)) * (1.0 - 1e-12));
  return b;
}

class Objective {
 public:
  Objective(const SampledField& f, const SampledField& g, const TransformPlan& plan, double budget, int supersample)
      : f_(f), g_(g), plan_(plan), budget_(budget), supersample_(supersample) {}

  double operator()(const Paraball& b) const {
    if (!(b.alpha > 0.0) || !(b.beta > 0.0) || !std::isfinite(b.alpha) || !std::isfinite(b.beta)) {
      return -std::numeric_limits<double>::infinity();
    }
    if (volume(b) > budget_) return -std::numeric_limits<double>::infinity();
    const SampledField fb = f_.multiplied(rasterize(b, BallSide::primal, f_.grid(), supersample_));
    const SampledField gb = g_.multiplied(rasterize(b, BallSide::dual, g_.grid(), supersample_));
    if (fb.is_zero() || gb.is_zero()) return 0.0;
    return bilinear(fb, gb, plan_);
  }

 private:
  const SampledField& f_;
  const SampledField& g_;
  const TransformPlan& plan_;
  double budget_;
  int supersample_;
};

struct StartResult {
  Paraball ball;
  double value = -std::numeric_limits<double>::infinity();
};

StartResult ascend(const Objective& objective, Paraball start, const FitOptions& options) {
  const int d = start.dim();
  std::vector<double> x = pack(start);
  double best = objective(start);
  double step = options.initial_step;
  const std::size_t n = x.size();
  // Coordinate directions plus one volume-preserving trade between alpha and beta.
  const std::size_t directions = n + 1;
  for (int sweep = 0; sweep < options.sweeps; ++sweep) {
    bool improved = false;
    for (std::size_t dir = 0; dir < directions; ++dir) {
      for (double sign : {1.0, -1.0}) {
        const Paraball cur = unpack(x);
        std::vector<double> trial = x;
        if (dir == 0) {
          trial[0] += sign * step * cur.alpha;
        } else if (dir == 1) {
          trial[1] += sign * step * cur.beta;
        } else if (dir < n - 2) {
          trial[dir] += sign * step * cur.alpha * std::pow(cur.beta, static_cast<double>(dir - 1));
        } else if (dir < n) {
          trial[dir] += sign * step;
        } else {
          trial[n - 2] += sign * step;
          trial[n - 1] -= sign * step * 2.0 / (d - 1);
        }
        const double value = objective(unpack(trial));
        if (value > best) {
          best = value;
          x = std::move(trial);
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {unpack(x), best};
}

}  // namespace

FitResult fit_paraball(const SampledField& f, const SampledField& g, Rational theta, const TransformPlan& plan,
                       const FitOptions& options) {
  if (options.starts < 1) throw Error(ErrorKind::domain, "fit needs at least one start");
  require_nonnegative(f, "fit_paraball");
  require_nonnegative(g, "fit_paraball");
  const double peak = lp_norm(f, Exponent::infinity());
  if (!(peak > 0.0)) throw Error(ErrorKind::fit, "fit_paraball: f is zero");
  const ExponentTriple e = triple_for_theta(f.dim(), theta);

  FitResult result;
  result.budget = lp_norm(f, Exponent(Rational(1))) / peak;
  const Objective objective(f, g, plan, result.budget, options.supersample);

  // First start from the mass statistics of f; the others jitter it.
  const Paraball guess = within_budget(from_symmetry(normalize_symmetry(f, e.p), f.dim()), result.budget);
  std::vector<Paraball> starts{guess};
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  for (int k = 1; k < options.starts; ++k) {
    Paraball b = guess;
    b.s0 += guess.alpha * jitter(rng);
    b.t0 += guess.beta * jitter(rng);
    double width = guess.alpha;
    for (double& c : b.ybar) {
      width *= guess.beta;
      c += width * jitter(rng);
    }
    b.alpha *= std::exp(0.6 * jitter(rng));
    b.beta *= std::exp(0.6 * jitter(rng));
    starts.push_back(within_budget(b, result.budget));
  }

  std::vector<StartResult> found(starts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t k = 0; k < starts.size(); ++k) found[k] = ascend(objective, starts[k], options);

  std::size_t best = 0;
  for (std::size_t k = 0; k < found.size(); ++k) {
    result.start_objectives.push_back(found[k].value);
    if (found[k].value > found[best].value) best = k;
  }
  if (!std::isfinite(found[best].value)) throw Error(ErrorKind::fit, "no feasible start");
  result.ball = found[best].ball;
  result.objective = found[best].value;
  return result;
}

}  // namespace xrt
