#include "epsl/scalarize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epsl {

namespace {

void check_epsilon(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw ConfigError("utopia epsilon must be finite and nonnegative");
  }
}

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DimensionError(what);
}

}  // namespace

UtopiaState::UtopiaState(std::size_t m, double eps)
    : z_star(m, std::numeric_limits<double>::infinity()), epsilon(eps) {
  check_epsilon(eps);
}

UtopiaState::UtopiaState(Vector z, double eps) : z_star(std::move(z)), epsilon(eps) {
  check_epsilon(eps);
}

bool UtopiaState::initialized() const {
  return std::all_of(z_star.begin(), z_star.end(), [](double v) { return std::isfinite(v); });
}

void UtopiaState::absorb(std::span<const double> f) {
  check_sizes(f.size(), z_star.size(), "objective vector size does not match utopia");
  for (std::size_t j = 0; j < f.size(); ++j) z_star[j] = std::min(z_star[j], f[j]);
}

ObjectiveNormalizer::ObjectiveNormalizer(Vector ideal_, Vector nadir_)
    : ideal(std::move(ideal_)), nadir(std::move(nadir_)) {
  check_sizes(ideal.size(), nadir.size(), "ideal and nadir sizes differ");
  for (std::size_t j = 0; j < ideal.size(); ++j) {
    if (!(ideal[j] < nadir[j])) throw DomainError("ideal must lie below nadir", j);
  }
}

ObjectiveVector ObjectiveNormalizer::apply(std::span<const double> f) const {
  check_sizes(f.size(), ideal.size(), "objective vector size does not match normalizer");
  ObjectiveVector out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = (f[j] - ideal[j]) / (nadir[j] - ideal[j]);
  return out;
}

double tchebycheff_value(std::span<const double> f, std::span<const double> w,
                         const UtopiaState& utopia) {
  check_sizes(f.size(), w.size(), "objective and preference sizes differ");
  check_sizes(f.size(), utopia.size(), "objective and utopia sizes differ");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < f.size(); ++j) {
    best = std::max(best, w[j] * (f[j] - (utopia.z_star[j] - utopia.epsilon)));
  }
  return best;
}

double tchebycheff_value(std::span<const double> f, const PreferenceVector& pref,
                         const UtopiaState& utopia) {
  const Vector w = clip_preference(pref, kMinTchebycheffWeight);
  return tchebycheff_value(f, w, utopia);
}

TchebycheffResult tchebycheff(std::span<const double> f, const PreferenceVector& pref,
                              const UtopiaState& utopia, RngStream& rng) {
  check_sizes(f.size(), pref.size(), "objective and preference sizes differ");
  check_sizes(f.size(), utopia.size(), "objective and utopia sizes differ");
  const Vector w = clip_preference(pref, kMinTchebycheffWeight);
  Vector terms(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    terms[j] = w[j] * (f[j] - (utopia.z_star[j] - utopia.epsilon));
  }
  const auto top = std::max_element(terms.begin(), terms.end());
  const double best = *top;
  const double tol = kTieTolerance * std::max(std::abs(best), std::numeric_limits<double>::min());

  std::vector<std::size_t> tied;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (best - terms[j] <= tol) tied.push_back(j);
  }
  const std::size_t pick = tied.size() == 1 ? tied.front() : tied[rng.index(tied.size())];
  return {best, pick};
}

double weighted_sum(std::span<const double> f, const PreferenceVector& pref) {
  check_sizes(f.size(), pref.size(), "objective and preference sizes differ");
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += pref[j] * f[j];
  return s;
}

UtopiaState update_ideal(const UtopiaState& utopia, std::span<const double> f) {
  UtopiaState out = utopia;
  out.absorb(f);
  return out;
}

}  // namespace epsl
