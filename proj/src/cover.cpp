#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "xrt/error.hpp"
#include "xrt/paraball.hpp"

namespace xrt {

std::vector<std::vector<double>> separated_net(int n, double separation) {
  if (n < 1) throw Error(ErrorKind::dimension, "net dimension must be positive");
  if (!(separation > 0.0)) throw Error(ErrorKind::domain, "net separation must be positive");
  // Even lattice count so that 0 and both endpoints are candidates.
  auto per_axis = static_cast<std::size_t>(std::ceil(4.0 / separation));
  per_axis = std::max<std::size_t>(2, per_axis + per_axis % 2);
  const double step = 2.0 / static_cast<double>(per_axis);
  const std::size_t side = per_axis + 1;
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) total *= side;

  auto candidate = [&](std::size_t idx, std::vector<double>& out) {
    for (int a = n - 1; a >= 0; --a) {
      out[static_cast<std::size_t>(a)] = -1.0 + step * static_cast<double>(idx % side);
      idx /= side;
    }
  };

  std::vector<double> nearest(total, std::numeric_limits<double>::infinity());
  std::vector<std::vector<double>> chosen;
  std::vector<double> point(static_cast<std::size_t>(n), 0.0), other(static_cast<std::size_t>(n));
  const double tol = separation * (1.0 - 1e-12);
  // Start from the origin, then repeatedly insert the farthest candidate.
  for (;;) {
    chosen.push_back(point);
    std::size_t best = 0;
    double best_dist = -1.0;
    for (std::size_t c = 0; c < total; ++c) {
      candidate(c, other);
      double r2 = 0.0;
      for (std::size_t a = 0; a < other.size(); ++a) r2 += (other[a] - point[a]) * (other[a] - point[a]);
      nearest[c] = std::min(nearest[c], std::sqrt(r2));
      if (nearest[c] > best_dist) {
        best_dist = nearest[c];
        best = c;
      }
    }
    if (best_dist < tol) break;
    candidate(best, point);
  }
  return chosen;
}

std::size_t Cover::member_index(std::size_t i, std::size_t j, std::size_t k) const {
  return (i * s_net.size() + j) * t_net.size() + k;
}

Cover partition(const Paraball& b, double delta, Rational theta) {
  b.validate();
  if (!(delta > 0.0) || delta > 1.0) throw Error(ErrorKind::domain, "delta must lie in (0,1]");
  if (theta <= Rational(0) || theta >= Rational(1)) throw Error(ErrorKind::domain, "partition needs theta in (0,1)");
  const int d = b.dim();
  const ExponentTriple e = triple_for_theta(d, theta);
  const ExponentTriple c = e.conjugate();

  // eta2^{1/q' + (d-1)/(2r')} = delta^{1/r + 1/(r' d)} and eta1^d eta2^{d(d-1)/2} = delta.
  const double lhs = c.q.reciprocal_double() + (d - 1) * c.r.reciprocal_double() / 2.0;
  const double rhs = e.r.reciprocal_double() + c.r.reciprocal_double() / d;
  Cover cover;
  cover.parent = b;
  cover.delta = delta;
  cover.eta2 = std::pow(delta, rhs / lhs);
  cover.eta1 = std::pow(delta / std::pow(cover.eta2, d * (d - 1) / 2.0), 1.0 / d);

  for (const auto& p : separated_net(1, cover.eta1)) cover.s_net.push_back(p[0]);
  for (const auto& p : separated_net(1, cover.eta2)) cover.t_net.push_back(p[0]);
  cover.y_net = separated_net(d - 1, cover.eta1 * std::pow(cover.eta2, d));

  const Symmetry frame = to_symmetry(b);
  cover.members.reserve(cover.y_net.size() * cover.s_net.size() * cover.t_net.size());
  for (const auto& y : cover.y_net) {
    for (double s : cover.s_net) {
      for (double t : cover.t_net) {
        cover.members.push_back(transformed(Paraball{s, t, y, 2.0 * cover.eta1, 2.0 * cover.eta2}, frame));
      }
    }
  }
  return cover;
}

std::size_t CoverIndex::KeyHash::operator()(const std::vector<std::int64_t>& key) const {
  std::size_t h = 1469598103934665603ull;
  for (std::int64_t k : key) {
    h ^= static_cast<std::size_t>(k) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

CoverIndex::CoverIndex(const Cover& cover) : cover_(&cover), frame_(to_symmetry(cover.parent)) {
  const std::size_t n = cover.parent.ybar.size();
  double width = 2.0 * cover.eta1;
  for (std::size_t m = 0; m < n; ++m) {
    width *= 2.0 * cover.eta2;
    half_widths_.push_back(width);
  }
  // In the unit frame, member (i,j,k) contains (s,x) iff |s - s^j| < 2 eta1 and
  // |[G_{-t^k} x]_m + s(-t^k)^m - c^{ik}_m| <= half_width_m with c^{ik} = G_{-t^k} ybar^i.
  buckets_.resize(cover.t_net.size());
  centres_.resize(cover.t_net.size());
  std::vector<double> c(n);
  std::vector<std::int64_t> key(n);
  for (std::size_t k = 0; k < cover.t_net.size(); ++k) {
    for (std::size_t i = 0; i < cover.y_net.size(); ++i) {
      apply_shear_matrix(-cover.t_net[k], cover.y_net[i], c);
      for (std::size_t m = 0; m < n; ++m) key[m] = static_cast<std::int64_t>(std::floor(c[m] / half_widths_[m]));
      buckets_[k][key].push_back(i);
      centres_[k].insert(centres_[k].end(), c.begin(), c.end());
    }
  }
}

std::int64_t CoverIndex::search_bucket(std::size_t k, std::size_t j, std::span<const double> w,
                                       std::span<const double> z, BallSide side) const {
  const std::size_t n = w.size();
  std::vector<std::int64_t> base(n), key(n);
  for (std::size_t m = 0; m < n; ++m) base[m] = static_cast<std::int64_t>(std::floor(w[m] / half_widths_[m]));
  std::size_t combos = 1;
  for (std::size_t m = 0; m < n; ++m) combos *= 3;
  for (std::size_t combo = 0; combo < combos; ++combo) {
    std::size_t rest = combo;
    for (std::size_t m = 0; m < n; ++m) {
      key[m] = base[m] + static_cast<std::int64_t>(rest % 3) - 1;
      rest /= 3;
    }
    auto it = buckets_[k].find(key);
    if (it == buckets_[k].end()) continue;
    for (std::size_t i : it->second) {
      const double* c = centres_[k].data() + i * n;
      bool inside = true;
      for (std::size_t m = 0; m < n && inside; ++m) inside = std::fabs(w[m] - c[m]) <= half_widths_[m];
      if (!inside) continue;
      // Confirm against the member as stored in the parent frame.
      const std::size_t idx = cover_->member_index(i, j, k);
      if (membership(cover_->members[idx], z, side)) return static_cast<std::int64_t>(idx);
    }
  }
  return -1;
}

std::int64_t CoverIndex::find(std::span<const double> z, BallSide side) const {
  const Cover& cv = *cover_;
  const std::size_t n = cv.parent.ybar.size();
  if (z.size() != n + 1) throw Error(ErrorKind::dimension, "point dimension mismatch");
  std::vector<double> u(z.begin(), z.end());
  if (side == BallSide::primal) {
    unmap_source_inplace(frame_, u);
  } else {
    unmap_target_inplace(frame_, u);
  }
  std::vector<double> w(n);
  const std::span<const double> rest(u.data() + 1, n);

  if (side == BallSide::primal) {
    for (std::size_t j = 0; j < cv.s_net.size(); ++j) {
      if (!(std::fabs(u[0] - cv.s_net[j]) < 2.0 * cv.eta1)) continue;
      for (std::size_t k = 0; k < cv.t_net.size(); ++k) {
        const double t = cv.t_net[k];
        apply_shear_matrix(-t, rest, w);
        double power = -t;
        for (std::size_t m = 0; m < n; ++m) {
          w[m] += u[0] * power;
          power *= -t;
        }
        const std::int64_t hit = search_bucket(k, j, w, z, side);
        if (hit >= 0) return hit;
      }
    }
    return -1;
  }
  for (std::size_t k = 0; k < cv.t_net.size(); ++k) {
    const double t = cv.t_net[k];
    if (!(std::fabs(u[0] - t) < 2.0 * cv.eta2)) continue;
    for (std::size_t j = 0; j < cv.s_net.size(); ++j) {
      apply_shear_matrix(-t, rest, w);
      double power = u[0] - t;
      for (std::size_t m = 0; m < n; ++m) {
        w[m] += cv.s_net[j] * power;
        power *= u[0] - t;
      }
      const std::int64_t hit = search_bucket(k, j, w, z, side);
      if (hit >= 0) return hit;
    }
  }
  return -1;
}

}  // namespace xrt
