#include "epsl/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace epsl {

PreferenceVector::PreferenceVector(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() < 2) {
    throw DimensionError("preference vector needs at least 2 components");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw DomainError("preference weights must be finite and nonnegative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw DomainError("preference weights must sum to 1");
  }
}

BoxBounds::BoxBounds(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.empty()) {
    throw DimensionError("bounds need matching, nonempty lower and upper vectors");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i])) {
      throw DomainError("lower bound must be strictly below upper bound", i);
    }
  }
}

std::size_t BoxBounds::first_violation(std::span<const double> x) const {
  if (x.size() != size()) {
    throw DimensionError("decision vector size does not match bounds");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return i;
  }
  return size();
}

bool BoxBounds::contains(std::span<const double> x) const {
  return first_violation(x) == size();
}

void BoxBounds::clamp(std::span<double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::clamp(x[i], lower_[i], upper_[i]);
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

std::uint64_t RngStream::next_u64() {
  ++draws_;
  return engine_();
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_positive() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::size_t RngStream::index(std::size_t n) {
  if (n == 0) throw DomainError("cannot draw an index from an empty range");
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t r = next_u64();
  while (r >= limit) r = next_u64();
  return static_cast<std::size_t>(r % range);
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller, caching the second variate.
  const double u1 = uniform_positive();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

RngStream RngStream::child(std::uint64_t key) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(key + 0x632be59bd9b4e019ULL)));
}

PreferenceVector sample_preference(std::size_t m, RngStream& rng,
                                   const PreferenceDistribution& dist) {
  if (m < 2) throw DimensionError("preference sampling needs m >= 2");
  if (dist.min_weight < 0.0 || dist.min_weight * static_cast<double>(m) >= 1.0) {
    throw ConfigError("min_weight must lie in [0, 1/m)");
  }
  // Normalised exponential spacings are uniform on the simplex.
  Vector w(m);
  for (auto& v : w) v = -std::log(rng.uniform_positive());
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  const double free_mass = 1.0 - dist.min_weight * static_cast<double>(m);
  for (auto& v : w) v = dist.min_weight + free_mass * (v / sum);
  return PreferenceVector(std::move(w));
}

std::vector<Vector> sample_gaussian(std::size_t n, std::size_t count, RngStream& rng) {
  if (n == 0 || count == 0) throw DimensionError("gaussian sampling needs n >= 1 and K >= 1");
  std::vector<Vector> out(count, Vector(n));
  for (auto& u : out) {
    for (auto& v : u) v = rng.normal();
  }
  return out;
}

Vector clip_preference(const PreferenceVector& pref, double floor) {
  Vector w = pref.weights();
  double sum = 0.0;
  for (auto& v : w) {
    v = std::max(v, floor);
    sum += v;
  }
  for (auto& v : w) v /= sum;
  return w;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace epsl
