#include "epsl/es_optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <string>
#include <thread>

namespace epsl {

namespace {

// Centre followed by the perturbed points (+u, and -u when antithetic) for each u.
struct Perturbations {
  std::vector<Vector> u;
  std::vector<Vector> points;
};

Perturbations perturb(std::span<const double> x, std::span<const double> sigma, const EsConfig& es,
                      RngStream& rng, const BoxBounds* bounds) {
  const std::size_t n = x.size();
  Perturbations p;
  p.u = sample_gaussian(n, es.samples, rng);
  p.points.reserve(1 + es.samples * (es.antithetic ? 2 : 1));
  p.points.emplace_back(x.begin(), x.end());
  for (const auto& u : p.u) {
    for (double sign : {1.0, -1.0}) {
      if (sign < 0 && !es.antithetic) break;
      Vector y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + sign * sigma[i] * u[i];
      if (bounds) bounds->clamp(y);
      p.points.push_back(std::move(y));
    }
  }
  return p;
}

// Centred ranks in [-1/2, 1/2]; equal values keep their point order.
Vector centred_ranks(std::span<const double> g) {
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g[a] < g[b]; });
  Vector r(g.size(), 0.0);
  if (g.size() < 2) return r;
  const double last = static_cast<double>(g.size() - 1);
  for (std::size_t q = 0; q < order.size(); ++q) r[order[q]] = static_cast<double>(q) / last - 0.5;
  return r;
}

// Mean and standard error of the per-sample terms, given g at every point of `p`.
GradientEstimate combine(const Perturbations& p, std::span<const double> values,
                         std::span<const double> sigma, const EsConfig& es) {
  const bool antithetic = es.antithetic;
  const Vector shaped = es.rank_shaping ? centred_ranks(values) : Vector(values.begin(), values.end());
  const std::span<const double> g(shaped);
  const std::size_t n = sigma.size();
  const std::size_t k_count = p.u.size();
  Vector sum(n, 0.0), sum_sq(n, 0.0);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double diff = antithetic ? 0.5 * (g[1 + 2 * k] - g[2 + 2 * k]) : g[1 + k] - g[0];
    for (std::size_t i = 0; i < n; ++i) {
      const double term = diff * p.u[k][i] / sigma[i];
      sum[i] += term;
      sum_sq[i] += term * term;
    }
  }
  GradientEstimate out{Vector(n), Vector(n, 0.0), p.points.size()};
  const double kd = static_cast<double>(k_count);
  for (std::size_t i = 0; i < n; ++i) {
    out.grad[i] = sum[i] / kd;
    if (k_count > 1) {
      const double var = std::max(0.0, (sum_sq[i] - kd * out.grad[i] * out.grad[i]) / (kd - 1.0));
      out.std_error[i] = std::sqrt(var / kd);
    }
  }
  return out;
}

Vector coordinate_sigma(const BoxBounds& bounds, double sigma) {
  Vector s(bounds.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = sigma * bounds.width(i);
  return s;
}

ObjectiveVector to_training_space(ObjectiveVector f, const ObjectiveNormalizer* normalizer) {
  return normalizer ? normalizer->apply(f) : f;
}

// Scalar values at every perturbation point; the branch variant fixes the
// maximising objective at the centre and follows only that term.
Vector scalar_values(const std::vector<ObjectiveVector>& fs, const PreferenceVector& pref,
                     const UtopiaState& utopia, bool branch, RngStream& rng) {
  const Vector w = clip_preference(pref, kMinTchebycheffWeight);
  Vector g(fs.size());
  if (!branch) {
    for (std::size_t k = 0; k < fs.size(); ++k) g[k] = tchebycheff_value(fs[k], w, utopia);
    return g;
  }
  const std::size_t j = tchebycheff(fs[0], pref, utopia, rng).argmax;
  for (std::size_t k = 0; k < fs.size(); ++k) {
    g[k] = w[j] * (fs[k][j] - (utopia.z_star[j] - utopia.epsilon));
  }
  return g;
}

struct PreferenceWork {
  PreferenceVector pref;
  RngStream rng;
  DecisionVector x;
  Perturbations perturbations;
  std::vector<ObjectiveVector> fs;  // training space
  double loss = 0.0;
  ParamGrad grad;
};

template <typename Fn>
void for_each_item(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += threads) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void EsConfig::validate() const {
  if (samples < 1) throw ConfigError("ES needs at least one perturbation");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("ES sigma must be positive");
}

std::string_view to_string(Optimizer o) { return o == Optimizer::sgd ? "sgd" : "adam"; }
std::string_view to_string(GradientSource g) { return g == GradientSource::es ? "es" : "analytic"; }

Optimizer parse_optimizer(std::string_view s) {
  if (s == "sgd") return Optimizer::sgd;
  if (s == "adam") return Optimizer::adam;
  throw ConfigError("unknown optimizer '" + std::string(s) + "'");
}

GradientSource parse_gradient_source(std::string_view s) {
  if (s == "es") return GradientSource::es;
  if (s == "analytic") return GradientSource::analytic;
  throw ConfigError("unknown gradient source '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
  if (preferences < 1) throw ConfigError("need at least one preference per iteration");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("step size must be positive");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be nonnegative");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  es.validate();
}

GradientEstimate estimate_gradient(const ScalarFn& fn, std::span<const double> x,
                                   std::span<const double> scale, const EsConfig& es,
                                   RngStream& rng, const BoxBounds* bounds) {
  es.validate();
  if (scale.size() != x.size()) throw DimensionError("scale length does not match x");
  Vector sigma(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sigma[i] = es.sigma * scale[i];
  const auto p = perturb(x, sigma, es, rng, bounds);
  Vector g(p.points.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = fn(p.points[k]);
  return combine(p, g, sigma, es);
}

std::optional<ObjectiveNormalizer> training_normalizer(const Problem& problem, bool normalize) {
  if (!normalize) return std::nullopt;
  const auto& spec = problem.spec();
  if (!spec.has_hints()) throw ConfigError("problem '" + spec.name + "' has no ideal/nadir hints");
  return ObjectiveNormalizer(*spec.ideal_hint, *spec.nadir_hint);
}

GradientEstimate estimate_grad_x(const Problem& problem, std::span<const double> x,
                                 const PreferenceVector& pref, const UtopiaState& utopia,
                                 const EsConfig& es, RngStream& rng,
                                 const ObjectiveNormalizer* normalizer) {
  es.validate();
  if (pref.size() != problem.num_objectives()) throw DimensionError("preference size mismatch");
  const Vector sigma = coordinate_sigma(problem.bounds(), es.sigma);
  const auto p = perturb(x, sigma, es, rng, &problem.bounds());
  std::vector<ObjectiveVector> fs;
  fs.reserve(p.points.size());
  for (const auto& y : p.points) fs.push_back(to_training_space(problem.evaluate(y), normalizer));
  const Vector g = scalar_values(fs, pref, utopia, es.tchebycheff_variant, rng);
  return combine(p, g, sigma, es);
}

Vector analytic_grad_x(const Problem& problem, std::span<const double> x,
                       const PreferenceVector& pref, const UtopiaState& utopia, RngStream& rng,
                       const ObjectiveNormalizer* normalizer) {
  const auto jac = problem.jacobian(x);
  if (!jac) throw ConfigError("problem '" + problem.spec().name + "' has no analytic Jacobian");
  const auto f = to_training_space(problem.evaluate(x), normalizer);
  const std::size_t j = tchebycheff(f, pref, utopia, rng).argmax;
  const Vector w = clip_preference(pref, kMinTchebycheffWeight);
  const double scale = w[j] / (normalizer ? normalizer->scale(j) : 1.0);
  Vector grad((*jac)[j]);
  for (double& v : grad) v *= scale;
  return grad;
}

ParamGradEstimate estimate_grad_params(const SetModel& model, const Problem& problem,
                                       const PreferenceVector& pref, const UtopiaState& utopia,
                                       const EsConfig& es, RngStream& rng,
                                       const ObjectiveNormalizer* normalizer) {
  const auto x = model.forward(pref, problem.bounds());
  const auto est = estimate_grad_x(problem, x, pref, utopia, es, rng, normalizer);
  return {model.backward(pref, problem.bounds(), est.grad), est.evals};
}

double step_size(const TrainConfig& cfg, std::size_t t) {
  if (!cfg.cosine_decay || cfg.iterations == 0) return cfg.eta;
  const double phase = static_cast<double>(t) / static_cast<double>(cfg.iterations);
  return 0.5 * cfg.eta * (1.0 + std::cos(std::numbers::pi * phase));
}

TrainState make_train_state(const Problem& problem, SetModel model, const TrainConfig& cfg) {
  cfg.validate();
  if (model.config().num_objectives != problem.num_objectives() ||
      model.config().num_variables != problem.num_variables()) {
    throw DimensionError("model dimensions do not match the problem");
  }
  UtopiaState utopia(problem.num_objectives(), cfg.epsilon);
  return TrainState{std::move(model), std::move(utopia), 0, {}, 0, RngStream(cfg.seed), {}, {}};
}

void continue_training(const Problem& problem, TrainState& state, const TrainConfig& cfg,
                       const IterationCallback& on_iteration) {
  cfg.validate();
  const auto normalizer = training_normalizer(problem, cfg.normalize_objectives);
  const ObjectiveNormalizer* norm = normalizer ? &*normalizer : nullptr;
  const BoxBounds& bounds = problem.bounds();
  const Vector sigma = coordinate_sigma(bounds, cfg.es.sigma);
  const std::size_t m = problem.num_objectives();
  const std::size_t n_pref = cfg.preferences;
  const bool analytic = cfg.gradient == GradientSource::analytic;

  while (state.iteration < cfg.iterations) {
    const std::size_t t = state.iteration;
    std::vector<PreferenceWork> work;
    work.reserve(n_pref);
    for (std::size_t i = 0; i < n_pref; ++i) {
      auto pref = sample_preference(m, state.rng, cfg.preference_dist);
      work.push_back({std::move(pref), state.rng.child(t * n_pref + i), {}, {}, {}, 0.0, {}});
    }

    for_each_item(n_pref, cfg.threads, [&](std::size_t i) {
      auto& w = work[i];
      w.x = state.model.forward(w.pref, bounds);
      if (analytic) {
        w.perturbations.points.push_back(w.x);
      } else {
        w.perturbations = perturb(w.x, sigma, cfg.es, w.rng, &bounds);
      }
      w.fs.reserve(w.perturbations.points.size());
      for (const auto& y : w.perturbations.points) {
        w.fs.push_back(to_training_space(problem.evaluate(y), norm));
      }
    });

    for (const auto& w : work) {
      for (const auto& f : w.fs) state.utopia.absorb(f);
      state.eval_count += w.fs.size();
    }

    for_each_item(n_pref, cfg.threads, [&](std::size_t i) {
      auto& w = work[i];
      Vector grad_x;
      if (analytic) {
        grad_x = analytic_grad_x(problem, w.x, w.pref, state.utopia, w.rng, norm);
        w.loss = tchebycheff_value(w.fs[0], w.pref, state.utopia);
      } else {
        const Vector g = scalar_values(w.fs, w.pref, state.utopia, cfg.es.tchebycheff_variant, w.rng);
        grad_x = combine(w.perturbations, g, sigma, cfg.es).grad;
        w.loss = cfg.es.tchebycheff_variant ? tchebycheff_value(w.fs[0], w.pref, state.utopia) : g[0];
      }
      w.grad = state.model.backward(w.pref, bounds, grad_x);
    });

    const std::size_t p_count = state.model.num_parameters();
    Vector grad(p_count, 0.0);
    double loss = 0.0;
    for (const auto& w : work) {
      loss += w.loss;
      for (std::size_t k = 0; k < p_count; ++k) grad[k] += w.grad.values[k];
    }
    loss /= static_cast<double>(n_pref);
    for (double& g : grad) g /= static_cast<double>(n_pref);

    if (!std::isfinite(loss) || !all_finite(grad)) {
      throw TrainingError("non-finite loss or gradient at iteration " + std::to_string(t), state);
    }

    const double eta = step_size(cfg, t);
    auto params = state.model.parameters();
    if (cfg.optimizer == Optimizer::sgd) {
      for (std::size_t k = 0; k < p_count; ++k) params[k] -= eta * grad[k];
    } else {
      constexpr double b1 = 0.9, b2 = 0.999, tiny = 1e-8;
      auto& a = state.adam;
      if (a.m.size() != p_count) {
        a.m.assign(p_count, 0.0);
        a.v.assign(p_count, 0.0);
      }
      ++a.steps;
      const double c1 = 1.0 - std::pow(b1, static_cast<double>(a.steps));
      const double c2 = 1.0 - std::pow(b2, static_cast<double>(a.steps));
      for (std::size_t k = 0; k < p_count; ++k) {
        a.m[k] = b1 * a.m[k] + (1.0 - b1) * grad[k];
        a.v[k] = b2 * a.v[k] + (1.0 - b2) * grad[k] * grad[k];
        params[k] -= eta * (a.m[k] / c1) / (std::sqrt(a.v[k] / c2) + tiny);
      }
    }

    state.loss_history.push_back(loss);
    state.iteration = t + 1;
    state.log.push_back({state.iteration, loss, state.eval_count, state.utopia.z_star});
    if (on_iteration) on_iteration(state);
  }
}

TrainState train(const Problem& problem, SetModel model, const TrainConfig& cfg,
                 const IterationCallback& on_iteration) {
  TrainState state = make_train_state(problem, std::move(model), cfg);
  continue_training(problem, state, cfg, on_iteration);
  return state;
}

}  // namespace epsl
