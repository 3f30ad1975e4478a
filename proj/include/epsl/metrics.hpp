#pragma once

#include <cstddef>
#include <vector>

#include "epsl/core.hpp"
#include "epsl/problems.hpp"

namespace epsl {

/// Normalisation and hypervolume reference used for reporting.
struct MetricContext {
  Vector ideal;
  Vector nadir;
  /// Reference point in normalized space.
  Vector reference;

  /// Reference defaults to 1.1 in every coordinate.
  MetricContext(Vector ideal, Vector nadir);
  MetricContext(Vector ideal, Vector nadir, Vector reference);

  std::size_t size() const noexcept { return ideal.size(); }
};

/// Context from the problem's ideal/nadir hints. Throws ConfigError without hints.
MetricContext metric_context(const Problem& problem);

/// a is no worse everywhere and strictly better somewhere.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);
/// a is strictly better in every objective.
bool strictly_dominates(const ObjectiveVector& a, const ObjectiveVector& b);

/// Indices (ascending) of points not dominated by any other point. Duplicates are kept.
std::vector<std::size_t> nondominated_filter(const std::vector<ObjectiveVector>& points);

ObjectiveVector normalize(const ObjectiveVector& f, const MetricContext& ctx);
std::vector<ObjectiveVector> normalize(const std::vector<ObjectiveVector>& fs,
                                       const MetricContext& ctx);

/// Exact hypervolume for m = 2 (sweep) or m = 3 (slicing) of already-normalized
/// points against `reference`.
double hypervolume_exact(const std::vector<ObjectiveVector>& points, const Vector& reference);

struct HvEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo hypervolume: fraction of uniform draws in [min(points, 0), reference]
/// that some point weakly dominates, times the box volume.
HvEstimate hypervolume_monte_carlo(const std::vector<ObjectiveVector>& points,
                                   const Vector& reference, std::size_t samples, RngStream& rng);

inline constexpr std::size_t kMonteCarloHvSamples = 1000000;

/// Hypervolume of the normalized points under `ctx`; exact for m <= 3, otherwise
/// a seeded Monte-Carlo estimate with kMonteCarloHvSamples draws.
double hypervolume(const std::vector<ObjectiveVector>& points, const MetricContext& ctx);

/// hypervolume(reference_front) - hypervolume(points).
double hv_gap(const std::vector<ObjectiveVector>& points, const MetricContext& ctx,
              const std::vector<ObjectiveVector>& reference_front);

/// Mean over reference points z of min_a || max(a - z, 0) ||, in the given space.
double igd_plus(const std::vector<ObjectiveVector>& points,
                const std::vector<ObjectiveVector>& reference_front);
/// Same, after normalizing both sets with `ctx`.
double igd_plus(const std::vector<ObjectiveVector>& points,
                const std::vector<ObjectiveVector>& reference_front, const MetricContext& ctx);

}  // namespace epsl
