#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epsl/core.hpp"
#include "epsl/problems.hpp"
#include "epsl/scalarize.hpp"

namespace epsl {

struct MoeadConfig {
  std::size_t population = 100;
  /// Neighbourhood size Tn.
  std::size_t neighborhood = 20;
  double crossover_eta = 15.0;
  double crossover_prob = 1.0;
  double mutation_eta = 20.0;
  /// Per-variable mutation probability; unset means 1/n.
  std::optional<double> mutation_prob;
  double epsilon = 0.1;
  bool normalize_objectives = true;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const MoeadConfig&, const MoeadConfig&) = default;
};

/// Simplex-lattice weights with `divisions` steps per axis, first component
/// increasing fastest-outermost: for m = 2 the order is (0,1), (1/H, 1 - 1/H), ..., (1,0).
std::vector<PreferenceVector> das_dennis(std::size_t m, std::size_t divisions);
/// C(H + m - 1, m - 1).
std::size_t lattice_size(std::size_t m, std::size_t divisions);

struct WeightSet {
  std::vector<PreferenceVector> weights;
  std::size_t divisions = 0;
  /// Empty when the lattice matched the requested size exactly.
  std::string warning;
};

/// Lattice whose size equals pop_size, or the nearest achievable size with a warning.
WeightSet init_weights(std::size_t m, std::size_t pop_size);

struct Individual {
  DecisionVector x;
  ObjectiveVector f;

  friend bool operator==(const Individual&, const Individual&) = default;
};

struct Population {
  std::vector<Individual> individuals;
  std::vector<PreferenceVector> weights;
  std::vector<std::vector<std::size_t>> neighborhoods;
  /// Running ideal point in the scalarization space.
  UtopiaState utopia;
  std::optional<ObjectiveNormalizer> normalizer;
  std::size_t eval_count = 0;
  std::size_t generations = 0;

  /// Tchebycheff value of individual `i` on subproblem `k`.
  double subproblem_value(std::size_t i, std::size_t k) const;
  std::vector<ObjectiveVector> objectives() const;
};

/// Indices of the `size` nearest weights (Euclidean), nearest first; each list starts with itself.
std::vector<std::vector<std::size_t>> weight_neighborhoods(const std::vector<PreferenceVector>& weights,
                                                           std::size_t size);

/// Uniform random initial individuals, one per weight.
Population init_population(const Problem& problem, std::vector<PreferenceVector> weights,
                           const MoeadConfig& cfg, RngStream& rng);

/// Simulated binary crossover (bounded form); returns two children.
std::pair<DecisionVector, DecisionVector> sbx_crossover(const DecisionVector& a,
                                                        const DecisionVector& b,
                                                        const BoxBounds& bounds, double eta,
                                                        double prob, RngStream& rng);
/// Polynomial mutation (bounded form), in place.
void polynomial_mutation(DecisionVector& x, const BoxBounds& bounds, double eta, double prob,
                         RngStream& rng);

/// MOEA/D generations until `budget` further evaluations are spent. A generation
/// visits subproblems in random order; the budget may end one mid-way.
Population evolve(const Problem& problem, Population pop, std::size_t budget,
                  const MoeadConfig& cfg, RngStream& rng);

struct MoeadRun {
  Population population;
  std::string warning;
};

/// Initialise and evolve with a total budget that includes the initial population.
MoeadRun run_moead(const Problem& problem, const MoeadConfig& cfg, std::size_t total_budget);

}  // namespace epsl
