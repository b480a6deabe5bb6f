#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "xrt/exponents.hpp"
#include "xrt/field.hpp"
#include "xrt/symmetry.hpp"
#include "xrt/xray.hpp"

namespace xrt {

/// B(s0, t0, ybar, alpha, beta): the image of the unit box {|s|<1, |x_j|<1} under
/// Translate(ybar) o Shear(s0,t0) o Scale(alpha,beta). The dual B* is the image
/// of {|t|<1, |y_j|<1} under the psi maps of the same composition.
struct Paraball {
  double s0 = 0.0;
  double t0 = 0.0;
  std::vector<double> ybar;
  double alpha = 1.0;
  double beta = 1.0;

  static Paraball unit(int d);

  int dim() const { return static_cast<int>(ybar.size()) + 1; }
  /// xbar = ybar + s0 gamma(t0).
  std::vector<double> xbar() const;

  void validate() const;
  friend bool operator==(const Paraball&, const Paraball&) = default;
};

enum class BallSide { primal, dual };

/// Coordinates of z in the unit frame of B; z is inside iff |u_0| < 1 and |u_m| <= 1.
void unit_coordinates(const Paraball& b, std::span<const double> z, BallSide side, std::span<double> u);

bool membership(const Paraball& b, std::span<const double> z, BallSide side);

/// 2^d alpha^d beta^{d(d-1)/2}.
double volume(const Paraball& b);

/// ||chi_{B*}||_{q', r'} = (2 beta)^{1/q'} (2^{d-1} alpha^{d-1} beta^{d(d-1)/2})^{1/r'}.
double dual_mixed_norm(const Paraball& b, Rational theta);

/// lambda B: alpha and beta multiplied by lambda, centre kept.
Paraball scale(const Paraball& b, double lambda);

Symmetry to_symmetry(const Paraball& b);
/// Requires the identity or Symmetry::is_paraball_form().
Paraball from_symmetry(const Symmetry& sigma, int d);

/// Parameters of phi_sigma(B), so that to_symmetry(result) acts as sigma o to_symmetry(B).
Paraball transformed(const Paraball& b, const Symmetry& sigma);

/// Nine-term mock-distance.
double mock_distance(const Paraball& a, const Paraball& b);

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  double volume() const;
};

Box bounding_box(const Paraball& b, BallSide side);

/// Monte Carlo estimate of |A cap B| from uniform samples in the smaller of the two
/// bounding boxes. Deterministic for a fixed seed.
double intersection_volume(const Paraball& a, const Paraball& b, std::size_t samples, std::uint64_t seed);

/// Cell-coverage fraction of B (or B*) at every node, from supersample^d points per cell.
SampledField rasterize(const Paraball& b, BallSide side, const Grid& grid, int supersample = 1);

/// Grid covering the bounding box of B (or B*) with a relative margin. Along axis 0
/// the faces of B (B*) fall on cell edges, so node sampling counts them exactly.
Grid adapted_grid(const Paraball& b, BallSide side, std::size_t n, double margin = 0.05);

/// X(f, g) / (||f||_p ||g||_{q', r'}) at theta.
double quasi_ratio(const SampledField& f, const SampledField& g, Rational theta, const TransformPlan& plan);

/// Members B(s^j, t^k, ybar^i, 2 eta1, 2 eta2) of a delta-partition, expressed in the
/// frame of the parent paraball.
struct Cover {
  Paraball parent;
  double delta = 1.0;
  double eta1 = 1.0;
  double eta2 = 1.0;
  std::vector<double> s_net;
  std::vector<double> t_net;
  std::vector<std::vector<double>> y_net;
  std::vector<Paraball> members;

  /// Member index for (i, j, k) = (y_net, s_net, t_net) positions.
  std::size_t member_index(std::size_t i, std::size_t j, std::size_t k) const;
};

Cover partition(const Paraball& b, double delta, Rational theta);

/// Greedy farthest-point insertion from the origin over a lattice of the box
/// [-1,1]^n; every pair of chosen points is at least `separation` apart.
std::vector<std::vector<double>> separated_net(int n, double separation);

/// Answers "which member contains this point" without scanning the cover.
class CoverIndex {
 public:
  explicit CoverIndex(const Cover& cover);

  /// Index of a member containing z, or -1.
  std::int64_t find(std::span<const double> z, BallSide side) const;
  bool covers(std::span<const double> z, BallSide side) const { return find(z, side) >= 0; }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& key) const;
  };
  using Buckets = std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, KeyHash>;

  std::int64_t search_bucket(std::size_t k, std::size_t j, std::span<const double> w, std::span<const double> z,
                             BallSide side) const;

  const Cover* cover_;
  Symmetry frame_;
  std::vector<double> half_widths_;
  std::vector<Buckets> buckets_;            // per t-net point
  std::vector<std::vector<double>> centres_;  // G_{-t^k} ybar^i, flattened by (k, i)
};

struct FitOptions {
  int starts = 8;
  std::uint64_t seed = 1;
  int sweeps = 12;
  double initial_step = 0.25;
  int supersample = 1;
};

struct FitResult {
  Paraball ball;
  double objective = 0.0;
  double budget = 0.0;
  std::vector<double> start_objectives;
};

/// Multi-start coordinate ascent of X(f chi_B, g chi_{B*}) over the paraball
/// parameters with |B| <= ||f||_1 / ||f||_inf.
FitResult fit_paraball(const SampledField& f, const SampledField& g, Rational theta, const TransformPlan& plan,
                       const FitOptions& options = {});

nlohmann::json to_json(const Paraball& b);
Paraball paraball_from_json(const nlohmann::json& j);

}  // namespace xrt
