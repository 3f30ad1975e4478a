#include "epsl/moead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epsl {

namespace {

void lattice_fill(std::size_t m, std::size_t left, std::size_t total, std::vector<std::size_t>& cur,
                  std::vector<PreferenceVector>& out) {
  if (cur.size() + 1 == m) {
    Vector w;
    for (auto c : cur) w.push_back(static_cast<double>(c) / static_cast<double>(total));
    w.push_back(static_cast<double>(left) / static_cast<double>(total));
    out.emplace_back(std::move(w));
    return;
  }
  for (std::size_t c = 0; c <= left; ++c) {
    cur.push_back(c);
    lattice_fill(m, left - c, total, cur, out);
    cur.pop_back();
  }
}

ObjectiveVector scalar_space(const Population& pop, const ObjectiveVector& f) {
  return pop.normalizer ? pop.normalizer->apply(f) : f;
}

}  // namespace

void MoeadConfig::validate() const {
  if (population < 2) throw ConfigError("population must hold at least 2 individuals");
  if (neighborhood < 2) throw ConfigError("neighbourhood must hold at least 2 individuals");
  if (!(crossover_eta >= 0.0) || !(mutation_eta >= 0.0)) throw ConfigError("distribution indices must be nonnegative");
  if (mutation_prob && !(*mutation_prob >= 0.0 && *mutation_prob <= 1.0)) {
    throw ConfigError("mutation probability must lie in [0, 1]");
  }
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) {
    throw ConfigError("crossover probability must lie in [0, 1]");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be finite and nonnegative");
}

std::size_t lattice_size(std::size_t m, std::size_t divisions) {
  // C(H + m - 1, m - 1) computed incrementally; exact for the sizes used here.
  std::size_t c = 1;
  for (std::size_t k = 1; k < m; ++k) c = c * (divisions + k) / k;
  return c;
}

std::vector<PreferenceVector> das_dennis(std::size_t m, std::size_t divisions) {
  if (m < 2) throw DimensionError("weights need m >= 2");
  if (divisions < 1) throw ConfigError("lattice needs at least one division");
  std::vector<PreferenceVector> out;
  std::vector<std::size_t> cur;
  lattice_fill(m, divisions, divisions, cur, out);
  return out;
}

WeightSet init_weights(std::size_t m, std::size_t pop_size) {
  if (m < 2) throw DimensionError("weights need m >= 2");
  if (pop_size < m) throw ConfigError("population must be at least the objective count");
  std::size_t best_h = 1;
  std::size_t best_gap = static_cast<std::size_t>(-1);
  for (std::size_t h = 1;; ++h) {
    const std::size_t size = lattice_size(m, h);
    const std::size_t gap = size > pop_size ? size - pop_size : pop_size - size;
    if (gap < best_gap || (gap == best_gap && size > lattice_size(m, best_h))) {
      best_gap = gap;
      best_h = h;
    }
    if (size >= pop_size) break;
  }
  WeightSet ws{das_dennis(m, best_h), best_h, {}};
  if (ws.weights.size() != pop_size) {
    ws.warning = "no simplex lattice has " + std::to_string(pop_size) + " points for m = " +
                 std::to_string(m) + "; using " + std::to_string(ws.weights.size());
  }
  return ws;
}

double Population::subproblem_value(std::size_t i, std::size_t k) const {
  return tchebycheff_value(scalar_space(*this, individuals[i].f), weights[k], utopia);
}

std::vector<ObjectiveVector> Population::objectives() const {
  std::vector<ObjectiveVector> out;
  out.reserve(individuals.size());
  for (const auto& ind : individuals) out.push_back(ind.f);
  return out;
}

std::vector<std::vector<std::size_t>> weight_neighborhoods(const std::vector<PreferenceVector>& weights,
                                                           std::size_t size) {
  const std::size_t count = weights.size();
  size = std::min(size, count);
  std::vector<std::vector<std::size_t>> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> dist(count);
    for (std::size_t k = 0; k < count; ++k) {
      double d = 0.0;
      for (std::size_t j = 0; j < weights[i].size(); ++j) {
        const double diff = weights[i][j] - weights[k][j];
        d += diff * diff;
      }
      dist[k] = d;
    }
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (a == i || b == i) return a == i && b != i;
      return dist[a] < dist[b];
    });
    order.resize(size);
    out[i] = std::move(order);
  }
  return out;
}

Population init_population(const Problem& problem, std::vector<PreferenceVector> weights,
                           const MoeadConfig& cfg, RngStream& rng) {
  cfg.validate();
  const std::size_t m = problem.num_objectives();
  for (const auto& w : weights) {
    if (w.size() != m) throw DimensionError("weight size does not match the problem");
  }
  Population pop{{}, std::move(weights), {}, UtopiaState(m, cfg.epsilon), std::nullopt, 0, 0};
  if (cfg.normalize_objectives) {
    const auto& spec = problem.spec();
    if (!spec.has_hints()) throw ConfigError("problem '" + spec.name + "' has no ideal/nadir hints");
    pop.normalizer.emplace(*spec.ideal_hint, *spec.nadir_hint);
  }
  pop.neighborhoods = weight_neighborhoods(pop.weights, cfg.neighborhood);
  const auto& b = problem.bounds();
  for (std::size_t k = 0; k < pop.weights.size(); ++k) {
    DecisionVector x(problem.num_variables());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(b.lower()[i], b.upper()[i]);
    auto f = problem.evaluate(x);
    ++pop.eval_count;
    pop.utopia.absorb(scalar_space(pop, f));
    pop.individuals.push_back({std::move(x), std::move(f)});
  }
  return pop;
}

std::pair<DecisionVector, DecisionVector> sbx_crossover(const DecisionVector& a,
                                                        const DecisionVector& b,
                                                        const BoxBounds& bounds, double eta,
                                                        double prob, RngStream& rng) {
  DecisionVector c1 = a, c2 = b;
  if (rng.uniform() > prob) return {c1, c2};
  const double expo = 1.0 / (eta + 1.0);
  auto spread = [&](double beta, double u) {
    const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
    return u <= 1.0 / alpha ? std::pow(u * alpha, expo) : std::pow(1.0 / (2.0 - u * alpha), expo);
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (rng.uniform() > 0.5 || std::abs(a[i] - b[i]) <= 1e-14) continue;
    const double lo = bounds.lower()[i], hi = bounds.upper()[i];
    const double y1 = std::min(a[i], b[i]), y2 = std::max(a[i], b[i]);
    const double u = rng.uniform();
    const double bq1 = spread(1.0 + 2.0 * (y1 - lo) / (y2 - y1), u);
    const double bq2 = spread(1.0 + 2.0 * (hi - y2) / (y2 - y1), u);
    double v1 = std::clamp(0.5 * ((y1 + y2) - bq1 * (y2 - y1)), lo, hi);
    double v2 = std::clamp(0.5 * ((y1 + y2) + bq2 * (y2 - y1)), lo, hi);
    if (rng.uniform() <= 0.5) std::swap(v1, v2);
    c1[i] = v1;
    c2[i] = v2;
  }
  return {c1, c2};
}

void polynomial_mutation(DecisionVector& x, const BoxBounds& bounds, double eta, double prob,
                         RngStream& rng) {
  const double expo = 1.0 / (eta + 1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (rng.uniform() > prob) continue;
    const double lo = bounds.lower()[i], hi = bounds.upper()[i], w = hi - lo;
    const double d1 = (x[i] - lo) / w, d2 = (hi - x[i]) / w;
    const double u = rng.uniform();
    double dq;
    if (u < 0.5) {
      const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
      dq = std::pow(val, expo) - 1.0;
    } else {
      const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
      dq = 1.0 - std::pow(val, expo);
    }
    x[i] = std::clamp(x[i] + dq * w, lo, hi);
  }
}

Population evolve(const Problem& problem, Population pop, std::size_t budget,
                  const MoeadConfig& cfg, RngStream& rng) {
  cfg.validate();
  const auto& bounds = problem.bounds();
  const std::size_t count = pop.individuals.size();
  const double p_mut = cfg.mutation_prob.value_or(1.0 / static_cast<double>(problem.num_variables()));
  std::size_t used = 0;
  std::vector<std::size_t> order(count);
  while (used < budget) {
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t k = count; k > 1; --k) std::swap(order[k - 1], order[rng.index(k)]);
    for (std::size_t i : order) {
      if (used >= budget) break;
      const auto& hood = pop.neighborhoods[i];
      const std::size_t a = hood[rng.index(hood.size())];
      std::size_t b = hood[rng.index(hood.size() - 1)];
      if (b == a) b = hood.back();
      auto children = sbx_crossover(pop.individuals[a].x, pop.individuals[b].x, bounds,
                                    cfg.crossover_eta, cfg.crossover_prob, rng);
      DecisionVector child = std::move(children.first);
      polynomial_mutation(child, bounds, cfg.mutation_eta, p_mut, rng);
      auto f = problem.evaluate(child);
      ++used;
      ++pop.eval_count;
      const auto fs = scalar_space(pop, f);
      pop.utopia.absorb(fs);
      for (std::size_t j : hood) {
        const double mine = tchebycheff_value(fs, pop.weights[j], pop.utopia);
        if (mine <= pop.subproblem_value(j, j)) pop.individuals[j] = {child, f};
      }
    }
    ++pop.generations;
  }
  return pop;
}

MoeadRun run_moead(const Problem& problem, const MoeadConfig& cfg, std::size_t total_budget) {
  cfg.validate();
  auto ws = init_weights(problem.num_objectives(), cfg.population);
  RngStream rng(cfg.seed);
  auto pop = init_population(problem, std::move(ws.weights), cfg, rng);
  const std::size_t spent = pop.eval_count;
  const std::size_t rest = total_budget > spent ? total_budget - spent : 0;
  return {evolve(problem, std::move(pop), rest, cfg, rng), ws.warning};
}

}  // namespace epsl
