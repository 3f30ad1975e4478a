#include <doctest.h>

#include <cmath>

#include "epsl/metrics.hpp"
#include "oracles.hpp"

using namespace epsl;

namespace {

std::vector<ObjectiveVector> random_points(RngStream& rng, std::size_t count, std::size_t m,
                                           double hi = 1.0) {
  std::vector<ObjectiveVector> pts(count, ObjectiveVector(m));
  for (auto& p : pts) {
    for (auto& v : p) v = rng.uniform(0.0, hi);
  }
  return pts;
}

// Random mutually nondominated 2D front on f2 = 1 - f1^q.
std::vector<ObjectiveVector> random_front(RngStream& rng, std::size_t count) {
  const double q = rng.uniform(0.3, 3.0);
  std::vector<ObjectiveVector> pts;
  for (std::size_t k = 0; k < count; ++k) {
    const double a = rng.uniform();
    pts.push_back({a, 1.0 - std::pow(a, q)});
  }
  return pts;
}

}  // namespace

TEST_CASE("dominance predicates") {
  CHECK(dominates({0.0, 1.0}, {1.0, 1.0}));
  CHECK_FALSE(dominates({1.0, 1.0}, {1.0, 1.0}));
  CHECK_FALSE(dominates({0.0, 2.0}, {1.0, 1.0}));
  CHECK(strictly_dominates({0.0, 0.5}, {1.0, 1.0}));
  CHECK_FALSE(strictly_dominates({0.0, 1.0}, {1.0, 1.0}));
  CHECK_THROWS_AS(dominates({0.0, 1.0}, {0.0, 1.0, 2.0}), DimensionError);
}

TEST_CASE("nondominated filter matches the pairwise oracle") {
  RngStream rng(11);
  CHECK(nondominated_filter({}).empty());
  CHECK(nondominated_filter({{1.0, 1.0}, {1.0, 1.0}}) == std::vector<std::size_t>{0, 1});
  for (int instance = 0; instance < 1000; ++instance) {
    const std::size_t m = 2 + instance % 3;
    const std::size_t count = 1 + rng.index(200);
    auto pts = random_points(rng, count, m);
    // Coarse grid so ties and duplicates occur.
    if (instance % 2 == 0) {
      for (auto& p : pts) {
        for (auto& v : p) v = std::round(v * 8.0) / 8.0;
      }
    }
    REQUIRE(nondominated_filter(pts) == oracle::nondominated(pts));
  }
}

TEST_CASE("exact hypervolume: hand values") {
  const Vector ref{1.1, 1.1};
  CHECK(hypervolume_exact({{0.0, 0.0}}, ref) == doctest::Approx(1.21).epsilon(1e-14));
  CHECK(hypervolume_exact({{0.25, 0.75}, {0.75, 0.25}}, ref) ==
        doctest::Approx(0.4725).epsilon(1e-14));
  CHECK(hypervolume_exact({}, ref) == 0.0);
  CHECK(hypervolume_exact({{1.2, 0.0}, {1.1, 0.5}}, ref) == 0.0);
  // Dominated and duplicate points add nothing.
  CHECK(hypervolume_exact({{0.25, 0.75}, {0.75, 0.25}, {0.8, 0.8}, {0.25, 0.75}}, ref) ==
        doctest::Approx(0.4725).epsilon(1e-14));
}

TEST_CASE("exact hypervolume agrees with the grid oracle in 2D and 3D") {
  RngStream rng(12);
  for (int instance = 0; instance < 200; ++instance) {
    const std::size_t m = 2 + instance % 2;
    const Vector ref(m, 1.1);
    const auto pts = random_points(rng, 1 + rng.index(25), m, 1.2);
    CHECK(hypervolume_exact(pts, ref) == doctest::Approx(oracle::union_volume(pts, ref)).epsilon(1e-12));
  }
}

TEST_CASE("exact 2D hypervolume agrees with Monte-Carlo on 50 random fronts") {
  RngStream rng(13);
  const Vector ref{1.1, 1.1};
  int outside = 0;
  for (int instance = 0; instance < 50; ++instance) {
    const auto pts = random_front(rng, 5 + rng.index(50));
    RngStream mc = rng.child(static_cast<std::uint64_t>(instance));
    const auto est = hypervolume_monte_carlo(pts, ref, 1000000, mc);
    const double exact = hypervolume_exact(pts, ref);
    CHECK(est.std_error > 0.0);
    if (std::abs(est.value - exact) > 3.0 * est.std_error) ++outside;
  }
  // A 3 s.e. band misses with probability 0.0027 per instance.
  CHECK(outside <= 1);
}

TEST_CASE("hypervolume normalizes through the context") {
  const MetricContext ctx({0.0, 10.0}, {2.0, 30.0});
  CHECK(ctx.reference == Vector{1.1, 1.1});
  CHECK(normalize(ObjectiveVector{1.0, 20.0}, ctx) == ObjectiveVector{0.5, 0.5});
  // (0.5, 0.75) and (1.5, 15) map to (0.25, 0.75) and (0.75, 0.25).
  CHECK(hypervolume({{0.5, 25.0}, {1.5, 15.0}}, ctx) == doctest::Approx(0.4725).epsilon(1e-14));
  CHECK_THROWS_AS(MetricContext({0.0, 1.0}, {0.0, 2.0}), DomainError);
  CHECK_THROWS_AS(MetricContext({0.0}, {1.0}), DimensionError);
}

TEST_CASE("hypervolume gap") {
  const MetricContext ctx({0.0, 0.0}, {1.0, 1.0});
  const std::vector<ObjectiveVector> front{{0.25, 0.75}, {0.75, 0.25}};
  CHECK(hv_gap(front, ctx, front) == 0.0);
  CHECK(hv_gap({{0.25, 0.75}}, ctx, front) == doctest::Approx(0.4725 - 0.85 * 0.35).epsilon(1e-14));
  // The synthetic reference sample is a staircase under the analytic front; the
  // missing area is at most the sum of the step rectangles, ds * sum (2s + ds) ds = 5e-4.
  auto syn = make_synthetic_problem();
  const auto gt = ground_truth(*syn);
  REQUIRE(gt.pf_samples.has_value());
  const double missing = oracle::synthetic_front_hv(1.1) - hypervolume(*gt.pf_samples, metric_context(*syn));
  CHECK(missing > 0.0);
  CHECK(missing <= 5e-4 + 1e-12);
}

TEST_CASE("igd+") {
  const std::vector<ObjectiveVector> ref{{0.0, 1.0}, {1.0, 0.0}};
  CHECK(igd_plus({{0.5, 0.5}}, ref) == 0.5);
  CHECK(igd_plus(ref, ref) == 0.0);
  RngStream rng(14);
  for (int instance = 0; instance < 100; ++instance) {
    auto pts = random_points(rng, 1 + rng.index(20), 2);
    const auto front = random_front(rng, 30);
    const double base = igd_plus(pts, front);
    CHECK(base == doctest::Approx(oracle::igd_plus(pts, front)).epsilon(1e-14));
    // A point dominated by an existing one.
    ObjectiveVector worse = pts[0];
    for (auto& v : worse) v += rng.uniform(0.0, 0.5);
    pts.push_back(worse);
    CHECK(igd_plus(pts, front) <= base);
  }
  // Normalized form equals the raw form on normalized inputs.
  const MetricContext ctx({0.0, 10.0}, {2.0, 30.0});
  CHECK(igd_plus({{1.0, 20.0}}, {{0.0, 30.0}, {2.0, 10.0}}, ctx) == 0.5);
}
