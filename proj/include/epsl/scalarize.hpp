#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "epsl/core.hpp"

namespace epsl {

/// Running ideal-point estimate plus the utopia offset epsilon.
struct UtopiaState {
  Vector z_star;
  double epsilon = 0.1;

  /// Starts with every component at +infinity (no observations yet).
  UtopiaState(std::size_t m, double epsilon);
  UtopiaState(Vector z_star, double epsilon);

  std::size_t size() const noexcept { return z_star.size(); }
  bool initialized() const;
  /// In-place componentwise min with `f`.
  void absorb(std::span<const double> f);

  friend bool operator==(const UtopiaState&, const UtopiaState&) = default;
};

/// Affine map (F - ideal) / (nadir - ideal).
struct ObjectiveNormalizer {
  Vector ideal;
  Vector nadir;

  ObjectiveNormalizer(Vector ideal, Vector nadir);
  ObjectiveVector apply(std::span<const double> f) const;
  double scale(std::size_t j) const { return nadir[j] - ideal[j]; }
};

struct TchebycheffResult {
  double value = 0.0;
  /// Maximising objective (0-based).
  std::size_t argmax = 0;
};

/// Weights below this are raised to it (then renormalised) before use.
inline constexpr double kMinTchebycheffWeight = 1e-6;
/// Terms within this relative distance of the maximum count as tied.
inline constexpr double kTieTolerance = 1e-12;

/// max_j w_j (F_j - (z*_j - eps)) with w the clipped preference. Ties are broken
/// uniformly at random with `rng`; the stream is only consumed when a tie exists.
TchebycheffResult tchebycheff(std::span<const double> f, const PreferenceVector& pref,
                              const UtopiaState& utopia, RngStream& rng);

/// Value only; no tie handling needed.
double tchebycheff_value(std::span<const double> f, const PreferenceVector& pref,
                         const UtopiaState& utopia);
double tchebycheff_value(std::span<const double> f, std::span<const double> clipped_weights,
                         const UtopiaState& utopia);

double weighted_sum(std::span<const double> f, const PreferenceVector& pref);

UtopiaState update_ideal(const UtopiaState& utopia, std::span<const double> f);

}  // namespace epsl
