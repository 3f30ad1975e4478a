#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace epsl {

using Vector = std::vector<double>;
using DecisionVector = std::vector<double>;
using ObjectiveVector = std::vector<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched or invalid sizes (objective count, decision dimension, shapes).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain of an operation, e.g. a decision vector outside its box.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what, std::size_t index = 0)
      : Error(what), index_(index) {}
  /// Position of the offending item when raised from a batch operation.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A point on the (m-1)-simplex.
class PreferenceVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit PreferenceVector(Vector weights);

  const Vector& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

  friend bool operator==(const PreferenceVector&, const PreferenceVector&) = default;

 private:
  Vector weights_;
};

class BoxBounds {
 public:
  BoxBounds(Vector lower, Vector upper);

  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }
  std::size_t size() const noexcept { return lower_.size(); }
  double width(std::size_t i) const { return upper_[i] - lower_[i]; }

  bool contains(std::span<const double> x) const;
  /// Index of the first coordinate outside the box, or size() if none.
  std::size_t first_violation(std::span<const double> x) const;
  void clamp(std::span<double> x) const;

  friend bool operator==(const BoxBounds&, const BoxBounds&) = default;

 private:
  Vector lower_;
  Vector upper_;
};

/// Seeded random stream. Every random draw in the library goes through one of these.
///
/// Distribution transforms are written out here rather than taken from <random>
/// so the sequence is identical across standard library implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  /// Number of raw 64-bit words consumed so far.
  std::uint64_t draws() const noexcept { return draws_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on (0, 1].
  double uniform_positive();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  double normal();

  /// Independent stream derived from this stream's seed and `key`. Does not
  /// depend on (or advance) the parent's position.
  RngStream child(std::uint64_t key) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Sampling distribution for preferences: flat Dirichlet, optionally restricted
/// to the sub-simplex where every weight is at least `min_weight`.
struct PreferenceDistribution {
  double min_weight = 0.0;

  friend bool operator==(const PreferenceDistribution&, const PreferenceDistribution&) = default;
};

PreferenceVector sample_preference(std::size_t m, RngStream& rng,
                                   const PreferenceDistribution& dist = {});

std::vector<Vector> sample_gaussian(std::size_t n, std::size_t count, RngStream& rng);

/// Raise every weight to at least `floor` and renormalise.
Vector clip_preference(const PreferenceVector& pref, double floor = 1e-6);

bool all_finite(std::span<const double> v);

}  // namespace epsl
