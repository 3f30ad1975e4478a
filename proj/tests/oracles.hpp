#pragma once

// Reference computations used by the tests. Each one is deliberately the
// slow, obvious version of what the library does.

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "epsl/core.hpp"

namespace oracle {

using epsl::Vector;

/// Central differences of a scalar function of a flat parameter vector.
inline Vector central_differences(const std::function<double(const Vector&)>& fn, Vector p,
                                  double step) {
  Vector g(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double keep = p[k];
    p[k] = keep + step;
    const double up = fn(p);
    p[k] = keep - step;
    const double down = fn(p);
    p[k] = keep;
    g[k] = (up - down) / (2.0 * step);
  }
  return g;
}

/// max_k |a_k - b_k| / max(1, max_k |b_k|): a relative error that does not blow up
/// on entries that are zero in both.
inline double max_relative_error(const Vector& a, const Vector& b) {
  double scale = 1.0, worst = 0.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst / scale;
}

inline bool dominates(const Vector& a, const Vector& b) {
  bool strict = false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] > b[j]) return false;
    if (a[j] < b[j]) strict = true;
  }
  return strict;
}

/// O(n^2) pairwise scan.
inline std::vector<std::size_t> nondominated(const std::vector<Vector>& pts) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool beaten = false;
    for (std::size_t k = 0; k < pts.size() && !beaten; ++k) beaten = k != i && dominates(pts[k], pts[i]);
    if (!beaten) out.push_back(i);
  }
  return out;
}

/// Union volume of the boxes [p, ref] by coordinate compression: every cell of the
/// grid spanned by all distinct coordinates is either fully covered or not.
inline double union_volume(const std::vector<Vector>& pts, const Vector& ref) {
  const std::size_t m = ref.size();
  std::vector<Vector> cuts(m);
  std::vector<Vector> in;
  for (const auto& p : pts) {
    bool ok = true;
    for (std::size_t j = 0; j < m; ++j) ok = ok && p[j] < ref[j];
    if (ok) in.push_back(p);
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::set<double> s{ref[j]};
    for (const auto& p : in) s.insert(p[j]);
    cuts[j].assign(s.begin(), s.end());
  }
  double total = 0.0;
  std::vector<std::size_t> cell(m, 0);
  std::function<void(std::size_t)> walk = [&](std::size_t d) {
    if (d == m) {
      double vol = 1.0;
      Vector lo(m);
      for (std::size_t j = 0; j < m; ++j) {
        if (cell[j] + 1 >= cuts[j].size()) return;
        lo[j] = cuts[j][cell[j]];
        vol *= cuts[j][cell[j] + 1] - lo[j];
      }
      for (const auto& p : in) {
        bool covers = true;
        for (std::size_t j = 0; j < m; ++j) covers = covers && p[j] <= lo[j];
        if (covers) {
          total += vol;
          return;
        }
      }
      return;
    }
    for (std::size_t c = 0; c + 1 < cuts[d].size(); ++c) {
      cell[d] = c;
      walk(d + 1);
    }
  };
  walk(0);
  return total;
}

/// IGD+ straight from its definition.
inline double igd_plus(const std::vector<Vector>& pts, const std::vector<Vector>& ref) {
  double sum = 0.0;
  for (const auto& z : ref) {
    double best = INFINITY;
    for (const auto& a : pts) {
      double s = 0.0;
      for (std::size_t j = 0; j < z.size(); ++j) s += std::pow(std::max(a[j] - z[j], 0.0), 2);
      best = std::min(best, std::sqrt(s));
    }
    sum += best;
  }
  return sum / static_cast<double>(ref.size());
}

/// Hypervolume of the front f2 = 1 - sqrt(f1), f1 in [0, 1], against reference (r, r):
/// the area under r - f2 on [0, 1] plus the strip f1 in [1, r] below the point (1, 0).
inline double synthetic_front_hv(double r) {
  const double under_curve = (r - 1.0) + 2.0 / 3.0;  // integral of r - (1 - sqrt(t)) dt on [0,1]
  const double strip = (r - 1.0) * r;                  // f1 in [1, r], f2 from 0 to r
  return under_curve + strip;
}

}  // namespace oracle
