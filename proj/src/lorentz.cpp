#include <algorithm>
#include <cmath>

#include "xrt/decomposition.hpp"
#include "xrt/error.hpp"
#include "xrt/field.hpp"

namespace xrt {

namespace {

// (sum_i a_i^s)^{1/s}, or max_i a_i when s is infinite.
double lp_sum(const std::vector<double>& terms, Exponent s) {
  if (terms.empty()) return 0.0;
  if (s.is_infinite()) return *std::max_element(terms.begin(), terms.end());
  const double se = s.as_double();
  double acc = 0.0;
  for (double a : terms) acc += std::pow(a, se);
  return std::pow(acc, 1.0 / se);
}

}  // namespace

double lorentz_source_norm(const SampledField& f, Exponent p, Exponent s) {
  require_nonnegative(f, "lorentz_source_norm");
  std::vector<double> terms;
  for (const DyadicPiece& piece : dyadic_decompose(f)) {
    const double mass = p.is_infinite() ? 1.0 : std::pow(piece.measure, p.reciprocal_double());
    terms.push_back(std::ldexp(mass, piece.j));
  }
  return lp_sum(terms, s);
}

double lorentz_mixed_norm(const SampledField& g, Exponent q, Exponent s, Exponent r) {
  if (g.side() != Side::target) throw Error(ErrorKind::side, "lorentz_mixed_norm expects a target-side field");
  require_nonnegative(g, "lorentz_mixed_norm");
  std::vector<double> terms;
  for (const SlabPiece& slab : slab_decompose(g, r)) terms.push_back(mixed_norm(restrict_to_slab(g, slab), q, r));
  return lp_sum(terms, s);
}

}  // namespace xrt
