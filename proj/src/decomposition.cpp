#include "xrt/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "xrt/error.hpp"

namespace xrt {

int dyadic_level(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw Error(ErrorKind::domain, "dyadic_level needs a positive finite value");
  int e = 0;
  std::frexp(value, &e);  // value = m 2^e with m in [1/2, 1)
  return e - 1;
}

namespace {

// Level index per node, or INT_MIN for nodes below the floor.
constexpr int kNone = std::numeric_limits<int>::min();

std::vector<int> node_levels(const SampledField& f, int floor) {
  const auto v = f.values();
  std::vector<int> levels(v.size(), kNone);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > 0.0) {
      const int j = dyadic_level(v[i]);
      if (j >= floor) levels[i] = j;
    }
  }
  return levels;
}

std::vector<int> slice_levels(const std::vector<double>& integrals, int floor) {
  std::vector<int> out(integrals.size(), kNone);
  for (std::size_t k = 0; k < integrals.size(); ++k) {
    if (integrals[k] > 0.0) {
      const int l = dyadic_level(integrals[k]);
      if (l >= floor) out[k] = l;
    }
  }
  return out;
}

}  // namespace

std::vector<DyadicPiece> dyadic_decompose(const SampledField& f, int floor) {
  require_nonnegative(f, "dyadic_decompose");
  const std::vector<int> levels = node_levels(f, floor);
  std::map<int, DyadicPiece> pieces;
  const double cell = f.grid().cell_volume();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] == kNone) continue;
    auto [it, fresh] = pieces.try_emplace(levels[i]);
    if (fresh) {
      it->second.j = levels[i];
      it->second.mask.assign(levels.size(), 0);
    }
    it->second.mask[i] = 1;
    it->second.measure += cell;
  }
  std::vector<DyadicPiece> out;
  out.reserve(pieces.size());
  for (auto& [j, piece] : pieces) out.push_back(std::move(piece));
  return out;
}

std::vector<SlabPiece> slab_decompose(const SampledField& g, Exponent r, int floor) {
  require_nonnegative(g, "slab_decompose");
  const std::vector<int> levels = slice_levels(slice_integrals(g, r), floor);
  std::map<int, SlabPiece> slabs;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (levels[k] == kNone) continue;
    auto [it, fresh] = slabs.try_emplace(levels[k]);
    if (fresh) {
      it->second.l = levels[k];
      it->second.t_mask.assign(levels.size(), 0);
    }
    it->second.t_mask[k] = 1;
  }
  std::vector<SlabPiece> out;
  for (auto& [l, slab] : slabs) out.push_back(std::move(slab));
  return out;
}

SampledField restrict_to_slab(const SampledField& g, const SlabPiece& slab) {
  const std::size_t per = g.grid().slice_size();
  if (slab.t_mask.size() != g.grid().counts()[0]) throw Error(ErrorKind::plan, "slab does not match grid");
  std::vector<double> v(g.values().begin(), g.values().end());
  for (std::size_t k = 0; k < slab.t_mask.size(); ++k) {
    if (!slab.t_mask[k]) std::fill(v.begin() + static_cast<std::ptrdiff_t>(k * per),
                                   v.begin() + static_cast<std::ptrdiff_t>((k + 1) * per), 0.0);
  }
  return SampledField(g.grid(), std::move(v));
}

std::vector<CombinedPiece> combined_decompose(const SampledField& g, Exponent /*q*/, Exponent r, int floor) {
  require_nonnegative(g, "combined_decompose");
  const Grid& grid = g.grid();
  const std::size_t slices = grid.counts()[0];
  const std::size_t per = grid.slice_size();
  const double dy = grid.slice_cell_volume();
  const double cell = grid.cell_volume();

  const std::vector<int> value_level = node_levels(g, floor);
  const std::vector<int> slab_level = slice_levels(slice_integrals(g, r), floor);

  // |F_k cap {t}| per slice and k, i.e. the integral of chi_{F_k}(t, y) dy.
  std::map<std::tuple<int, int, int>, CombinedPiece> pieces;
  for (std::size_t t = 0; t < slices; ++t) {
    if (slab_level[t] == kNone) continue;
    std::map<int, double> section;
    for (std::size_t i = t * per; i < (t + 1) * per; ++i) {
      if (value_level[i] != kNone) section[value_level[i]] += dy;
    }
    for (std::size_t i = t * per; i < (t + 1) * per; ++i) {
      const int k = value_level[i];
      if (k == kNone) continue;
      const int m = dyadic_level(section[k]);
      auto key = std::make_tuple(k, slab_level[t], m);
      auto [it, fresh] = pieces.try_emplace(key);
      if (fresh) {
        it->second.k = k;
        it->second.l = slab_level[t];
        it->second.m = m;
        it->second.mask.assign(grid.size(), 0);
      }
      it->second.mask[i] = 1;
      it->second.measure += cell;
    }
  }
  std::vector<CombinedPiece> out;
  for (auto& [key, piece] : pieces) out.push_back(std::move(piece));
  return out;
}

SampledField level_indicator(const Grid& grid, const Mask& mask, int k) {
  if (mask.size() != grid.size()) throw Error(ErrorKind::plan, "mask does not match grid");
  const double level = std::ldexp(1.0, k);
  std::vector<double> v(grid.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (mask[i]) v[i] = level;
  }
  return SampledField(grid, std::move(v));
}

SampledField dyadic_reconstruct(const Grid& grid, const std::vector<DyadicPiece>& pieces, int shift) {
  std::vector<double> v(grid.size(), 0.0);
  for (const DyadicPiece& piece : pieces) {
    if (piece.mask.size() != grid.size()) throw Error(ErrorKind::plan, "piece does not match grid");
    const double level = std::ldexp(1.0, piece.j + shift);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (piece.mask[i]) v[i] += level;
    }
  }
  return SampledField(grid, std::move(v));
}

TrimResult trim_frequency(const SampledField& f, int width, Exponent p) {
  if (width < 1) throw Error(ErrorKind::domain, "trim width must be at least 1");
  if (p.is_infinite()) throw Error(ErrorKind::domain, "trim_frequency needs a finite p");
  std::vector<DyadicPiece> pieces = dyadic_decompose(f);
  if (pieces.empty()) throw Error(ErrorKind::division, "trim_frequency of a zero field");

  const double pe = p.as_double();
  // Compare log2(2^{jp}|E_j|); pieces ascend in j so strict > keeps the smaller j on ties.
  auto score = [pe](const DyadicPiece& piece) { return piece.j * pe + std::log2(piece.measure); };
  int j0 = pieces.front().j;
  double best = score(pieces.front());
  for (const DyadicPiece& piece : pieces) {
    if (score(piece) > best) {
      best = score(piece);
      j0 = piece.j;
    }
  }
  TrimResult out;
  out.j0 = j0;
  std::vector<DyadicPiece> kept;
  for (DyadicPiece& piece : pieces) {
    if (std::abs(piece.j - j0) < width) {
      out.kept.push_back(piece.j);
      kept.push_back(std::move(piece));
    }
  }
  out.trimmed = dyadic_reconstruct(f.grid(), kept, 0);
  return out;
}

}  // namespace xrt
