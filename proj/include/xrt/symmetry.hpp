#pragma once

#include <span>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "xrt/exponents.hpp"
#include "xrt/field.hpp"

namespace xrt {

// phi(s,x) = (s, x+v),  psi(t,y) = (t, y+v)
struct Translate {
  std::vector<double> v;
};

// phi(s,x) = (a s, a S_b x),  psi(t,y) = (b t, a S_b y),  S_b x = (b x_1, ..., b^{d-1} x_{d-1})
struct Scale {
  double alpha = 1.0;
  double beta = 1.0;
};

// phi(s,x) = (s+s0, G_{t0} x + (s+s0) gamma(t0)),  psi(t,y) = (t+t0, G_{t0}(y - s0 gamma(t)))
struct Shear {
  double s0 = 0.0;
  double t0 = 0.0;
};

using Generator = std::variant<Translate, Scale, Shear>;

/// Lower-triangular (d-1)x(d-1) matrix with entry (m,i) = C(m,i) t0^{m-i}, 1-based.
struct ShearMatrix {
  int n = 0;
  std::vector<double> entries;  // row-major
  double at(int row, int col) const { return entries[static_cast<std::size_t>(row * n + col)]; }
};

ShearMatrix shear_matrix(int d, double t0);

/// y = G_{t0} x for x in R^{d-1}; x and y may alias.
void apply_shear_matrix(double t0, std::span<const double> x, std::span<double> y);

/// A composition of generators. ops()[0] acts first on points.
class Symmetry {
 public:
  Symmetry() = default;
  explicit Symmetry(std::vector<Generator> ops);

  static Symmetry translate(std::vector<double> v);
  static Symmetry scale(double alpha, double beta);
  static Symmetry shear(double s0, double t0);

  const std::vector<Generator>& ops() const { return ops_; }
  bool is_identity() const { return ops_.empty(); }

  Symmetry inverse() const;

  /// True when the ops are exactly Scale, Shear, Translate in action order,
  /// i.e. Translate(ybar) o Shear(s0,t0) o Scale(alpha,beta).
  bool is_paraball_form() const;

 private:
  std::vector<Generator> ops_;
};

/// compose(a, b) acts as a after b.
Symmetry compose(const Symmetry& outer, const Symmetry& inner);

/// Point maps; the input span has length d.
std::vector<double> map_source(const Symmetry& sigma, std::span<const double> z);
std::vector<double> map_target(const Symmetry& sigma, std::span<const double> z);
std::vector<double> unmap_source(const Symmetry& sigma, std::span<const double> z);
std::vector<double> unmap_target(const Symmetry& sigma, std::span<const double> z);

void map_source_inplace(const Symmetry& sigma, std::span<double> z);
void map_target_inplace(const Symmetry& sigma, std::span<double> z);
void unmap_source_inplace(const Symmetry& sigma, std::span<double> z);
void unmap_target_inplace(const Symmetry& sigma, std::span<double> z);

/// Jacobian of phi: alpha^d beta^{d(d-1)/2} per Scale, 1 otherwise.
double source_jacobian(const Symmetry& sigma, int d);
/// t-derivative of psi_1: beta per Scale.
double target_time_factor(const Symmetry& sigma);
/// y-Jacobian of psi': alpha^{d-1} beta^{d(d-1)/2} per Scale.
double target_space_jacobian(const Symmetry& sigma, int d);

/// J^{1/p} f(phi(.)) resampled, same counts, on the box covering phi^{-1} of f's grid box.
SampledField pullback_source(const Symmetry& sigma, const SampledField& f, Exponent p);
/// Same map, resampled on a caller-chosen source grid.
SampledField pullback_source_onto(const Symmetry& sigma, const SampledField& f, Exponent p, const Grid& grid);

/// psi_1'^{1/q'} J_{psi'}^{1/r'} g(psi(.)) on the box covering psi^{-1} of g's grid box.
SampledField pullback_target(const Symmetry& sigma, const SampledField& g, Exponent q, Exponent r);
SampledField pullback_target_onto(const Symmetry& sigma, const SampledField& g, Exponent q, Exponent r,
                                  const Grid& grid);

/// Box [lo, hi] containing phi^{-1} (resp. psi^{-1}) of the grid box.
std::pair<std::vector<double>, std::vector<double>> source_preimage_box(const Symmetry& sigma, const Grid& grid);
std::pair<std::vector<double>, std::vector<double>> target_preimage_box(const Symmetry& sigma, const Grid& grid);

/// Moments of the |f|^p mass used to recentre a source field.
struct MassStatistics {
  double mean_s = 0.0;
  double s_iqr = 0.0;
  double shear_slope = 0.0;  // Cov(s, x_1) / Var(s)
  double sheared_iqr = 0.0;  // IQR of x_1 - slope * s
  std::vector<double> mean_x;
};

MassStatistics mass_statistics(const SampledField& f, Exponent p);

/// Translate(ybar) o Shear(s0,t0) o Scale(alpha,beta) whose pullback puts the
/// |f|^p mass at the origin with unit interquartile s-spread, matching
/// x_1-spread and no (s, x_1) covariance.
Symmetry normalize_symmetry(const SampledField& f, Exponent p);

nlohmann::json to_json(const Symmetry& sigma);
/// Accepts a list of {"translate":[..]}, {"scale":[alpha,beta]}, {"shear":[s0,t0]} in action order.
Symmetry symmetry_from_json(const nlohmann::json& j);

}  // namespace xrt
