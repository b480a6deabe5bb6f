#pragma once

#include <cstdint>
#include <vector>

#include "xrt/exponents.hpp"
#include "xrt/field.hpp"

namespace xrt {

/// Values below 2^kDefaultFloor are treated as zero.
inline constexpr int kDefaultFloor = -40;

using Mask = std::vector<std::uint8_t>;

/// Floor of log2 for a positive finite value, computed exactly.
int dyadic_level(double value);

/// E_j = {2^j <= f < 2^{j+1}} over the grid nodes.
struct DyadicPiece {
  int j = 0;
  Mask mask;
  double measure = 0.0;
};

/// t-slices whose integral of g^r dy lies in [2^l, 2^{l+1}).
struct SlabPiece {
  int l = 0;
  Mask t_mask;
};

/// F_k cut by the slab level l of g and the slab level m of chi_{F_k}.
struct CombinedPiece {
  int k = 0;
  int l = 0;
  int m = 0;
  Mask mask;
  double measure = 0.0;
};

/// Pieces sorted by increasing j.
std::vector<DyadicPiece> dyadic_decompose(const SampledField& f, int floor = kDefaultFloor);

/// Pieces sorted by increasing l. Slices with zero integral belong to no slab.
std::vector<SlabPiece> slab_decompose(const SampledField& g, Exponent r, int floor = kDefaultFloor);

/// g restricted to the slices of one slab (the function g^l).
SampledField restrict_to_slab(const SampledField& g, const SlabPiece& slab);

/// Sorted by (k, l, m). The q exponent is carried for norm bookkeeping by callers.
std::vector<CombinedPiece> combined_decompose(const SampledField& g, Exponent q, Exponent r,
                                              int floor = kDefaultFloor);

/// sum_j 2^{j+shift} chi_{E_j}; shift 0 gives the minorant, shift 1 the majorant.
SampledField dyadic_reconstruct(const Grid& grid, const std::vector<DyadicPiece>& pieces, int shift = 0);

/// 2^k chi_F on the given grid.
SampledField level_indicator(const Grid& grid, const Mask& mask, int k);

struct TrimResult {
  SampledField trimmed;
  int j0 = 0;
  std::vector<int> kept;
};

/// Keeps the dyadic pieces with |j - j0| < width, where j0 maximizes 2^{jp}|E_j|
/// (ties go to the smaller j).
TrimResult trim_frequency(const SampledField& f, int width, Exponent p);

}  // namespace xrt
