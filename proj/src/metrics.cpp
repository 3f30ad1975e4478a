#include "epsl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace epsl {

namespace {

void check_same_size(const ObjectiveVector& a, const ObjectiveVector& b) {
  if (a.size() != b.size()) throw DimensionError("objective vectors differ in length");
}

void check_width(const std::vector<ObjectiveVector>& pts, std::size_t m) {
  for (const auto& p : pts) {
    if (p.size() != m) throw DimensionError("point dimension does not match the reference");
  }
}

// Points strictly inside the reference box.
std::vector<ObjectiveVector> inside(const std::vector<ObjectiveVector>& pts, const Vector& ref) {
  std::vector<ObjectiveVector> out;
  for (const auto& p : pts) {
    bool ok = true;
    for (std::size_t j = 0; j < ref.size(); ++j) ok = ok && p[j] < ref[j];
    if (ok) out.push_back(p);
  }
  return out;
}

double hv2d(std::vector<ObjectiveVector> pts, double r0, double r1) {
  std::sort(pts.begin(), pts.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]); });
  double area = 0.0;
  double level = r1;
  for (const auto& p : pts) {
    if (p[1] < level) {
      area += (r0 - p[0]) * (level - p[1]);
      level = p[1];
    }
  }
  return area;
}

double hv3d(std::vector<ObjectiveVector> pts, const Vector& ref) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a[2] < b[2]; });
  double volume = 0.0;
  std::vector<ObjectiveVector> active;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    active.push_back({pts[k][0], pts[k][1]});
    const double top = k + 1 < pts.size() ? pts[k + 1][2] : ref[2];
    const double height = top - pts[k][2];
    if (height > 0.0) volume += height * hv2d(active, ref[0], ref[1]);
  }
  return volume;
}

}  // namespace

MetricContext::MetricContext(Vector ideal_, Vector nadir_)
    : MetricContext(ideal_, nadir_, Vector(ideal_.size(), 1.1)) {}

MetricContext::MetricContext(Vector ideal_, Vector nadir_, Vector reference_)
    : ideal(std::move(ideal_)), nadir(std::move(nadir_)), reference(std::move(reference_)) {
  if (ideal.size() != nadir.size() || ideal.size() != reference.size() || ideal.size() < 2) {
    throw DimensionError("metric context vectors must share a length of at least 2");
  }
  for (std::size_t j = 0; j < ideal.size(); ++j) {
    if (!(ideal[j] < nadir[j])) throw DomainError("ideal must lie below nadir", j);
  }
}

MetricContext metric_context(const Problem& problem) {
  const auto& spec = problem.spec();
  if (!spec.has_hints()) throw ConfigError("problem '" + spec.name + "' has no ideal/nadir hints");
  return MetricContext(*spec.ideal_hint, *spec.nadir_hint);
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  check_same_size(a, b);
  bool better = false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] > b[j]) return false;
    if (a[j] < b[j]) better = true;
  }
  return better;
}

bool strictly_dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  check_same_size(a, b);
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (!(a[j] < b[j])) return false;
  }
  return true;
}

std::vector<std::size_t> nondominated_filter(const std::vector<ObjectiveVector>& points) {
  if (points.empty()) return {};
  check_width(points, points.front().size());
  // Only a lexicographically smaller point can dominate, so one pass over the
  // sorted order against the survivors so far is enough.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    const bool beaten = std::any_of(kept.begin(), kept.end(),
                                    [&](std::size_t k) { return dominates(points[k], points[idx]); });
    if (!beaten) kept.push_back(idx);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

ObjectiveVector normalize(const ObjectiveVector& f, const MetricContext& ctx) {
  if (f.size() != ctx.size()) throw DimensionError("objective vector does not match metric context");
  ObjectiveVector out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = (f[j] - ctx.ideal[j]) / (ctx.nadir[j] - ctx.ideal[j]);
  return out;
}

std::vector<ObjectiveVector> normalize(const std::vector<ObjectiveVector>& fs,
                                       const MetricContext& ctx) {
  std::vector<ObjectiveVector> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(normalize(f, ctx));
  return out;
}

double hypervolume_exact(const std::vector<ObjectiveVector>& points, const Vector& reference) {
  check_width(points, reference.size());
  auto pts = inside(points, reference);
  if (pts.empty()) return 0.0;
  if (reference.size() == 2) return hv2d(std::move(pts), reference[0], reference[1]);
  if (reference.size() == 3) return hv3d(std::move(pts), reference);
  throw DimensionError("exact hypervolume is implemented for 2 and 3 objectives only");
}

HvEstimate hypervolume_monte_carlo(const std::vector<ObjectiveVector>& points,
                                   const Vector& reference, std::size_t samples, RngStream& rng) {
  check_width(points, reference.size());
  if (samples == 0) throw ConfigError("Monte-Carlo hypervolume needs samples");
  const auto pts = inside(points, reference);
  if (pts.empty()) return {};
  const std::size_t m = reference.size();
  Vector lo(m, 0.0);
  for (const auto& p : pts) {
    for (std::size_t j = 0; j < m; ++j) lo[j] = std::min(lo[j], p[j]);
  }
  double box = 1.0;
  for (std::size_t j = 0; j < m; ++j) box *= reference[j] - lo[j];
  std::size_t hits = 0;
  Vector y(m);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t j = 0; j < m; ++j) y[j] = rng.uniform(lo[j], reference[j]);
    const bool covered = std::any_of(pts.begin(), pts.end(), [&](const ObjectiveVector& p) {
      for (std::size_t j = 0; j < m; ++j) {
        if (p[j] > y[j]) return false;
      }
      return true;
    });
    hits += covered ? 1 : 0;
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(samples);
  return {box * frac, box * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples))};
}

double hypervolume(const std::vector<ObjectiveVector>& points, const MetricContext& ctx) {
  const auto normed = normalize(points, ctx);
  if (ctx.size() <= 3) return hypervolume_exact(normed, ctx.reference);
  RngStream rng(0x4856ULL);
  return hypervolume_monte_carlo(normed, ctx.reference, kMonteCarloHvSamples, rng).value;
}

double hv_gap(const std::vector<ObjectiveVector>& points, const MetricContext& ctx,
              const std::vector<ObjectiveVector>& reference_front) {
  if (reference_front.empty()) throw ConfigError("hypervolume gap needs a reference front");
  return hypervolume(reference_front, ctx) - hypervolume(points, ctx);
}

double igd_plus(const std::vector<ObjectiveVector>& points,
                const std::vector<ObjectiveVector>& reference_front) {
  if (points.empty() || reference_front.empty()) throw ConfigError("IGD+ needs nonempty sets");
  const std::size_t m = reference_front.front().size();
  check_width(points, m);
  check_width(reference_front, m);
  double total = 0.0;
  for (const auto& z : reference_front) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : points) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double d = std::max(a[j] - z[j], 0.0);
        d2 += d * d;
      }
      best = std::min(best, d2);
    }
    total += std::sqrt(best);
  }
  return total / static_cast<double>(reference_front.size());
}

double igd_plus(const std::vector<ObjectiveVector>& points,
                const std::vector<ObjectiveVector>& reference_front, const MetricContext& ctx) {
  return igd_plus(normalize(points, ctx), normalize(reference_front, ctx));
}

}  // namespace epsl
