#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "epsl/core.hpp"
#include "epsl/problems.hpp"
#include "epsl/scalarize.hpp"
#include "epsl/set_model.hpp"

namespace epsl {

struct EsConfig {
  /// Perturbations per estimate (K).
  std::size_t samples = 5;
  /// Smoothing radius relative to each coordinate's box width.
  double sigma = 0.05;
  /// Differentiate only the objective that attains the Tchebycheff max at the centre.
  bool tchebycheff_variant = false;
  /// Evaluate every perturbation at +u and -u (2K + 1 evaluations).
  bool antithetic = false;
  /// Replace the scalar values by their centred ranks before forming the estimate.
  /// Off by default: the estimate is then no longer unbiased for the smoothed gradient.
  bool rank_shaping = false;

  void validate() const;
  friend bool operator==(const EsConfig&, const EsConfig&) = default;
};

enum class Optimizer { sgd, adam };
enum class GradientSource { es, analytic };

std::string_view to_string(Optimizer o);
std::string_view to_string(GradientSource g);
Optimizer parse_optimizer(std::string_view s);
GradientSource parse_gradient_source(std::string_view s);

struct TrainConfig {
  /// Preferences per iteration (N).
  std::size_t preferences = 5;
  /// Iterations (T).
  std::size_t iterations = 1000;
  double eta = 0.01;
  bool cosine_decay = false;
  Optimizer optimizer = Optimizer::sgd;
  EsConfig es;
  std::uint64_t seed = 0;
  double epsilon = 0.1;
  PreferenceDistribution preference_dist;
  /// Scalarize (F - ideal) / (nadir - ideal) using the problem's hints.
  bool normalize_objectives = true;
  GradientSource gradient = GradientSource::es;
  /// Worker threads for the per-preference estimates; results do not depend on it.
  std::size_t threads = 1;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct GradientEstimate {
  Vector grad;
  /// Per-coordinate standard error of the Monte-Carlo mean.
  Vector std_error;
  std::size_t evals = 0;
};

using ScalarFn = std::function<double(std::span<const double>)>;

/// Gaussian-smoothing estimate 1/(sigma_i K) sum_k (f(x + sigma u_k) - f(x)) u_k,
/// with sigma_i = es.sigma * scale[i]. When `bounds` is given, perturbed points
/// are clamped before evaluation while the estimate keeps the unclamped u_k.
GradientEstimate estimate_gradient(const ScalarFn& fn, std::span<const double> x,
                                   std::span<const double> scale, const EsConfig& es,
                                   RngStream& rng, const BoxBounds* bounds = nullptr);

/// Objective-space view used for scalarization during training.
std::optional<ObjectiveNormalizer> training_normalizer(const Problem& problem, bool normalize);

/// ES estimate of grad_x g_tch(x | pref) for a problem. Evaluations include the centre.
GradientEstimate estimate_grad_x(const Problem& problem, std::span<const double> x,
                                 const PreferenceVector& pref, const UtopiaState& utopia,
                                 const EsConfig& es, RngStream& rng,
                                 const ObjectiveNormalizer* normalizer = nullptr);

/// Exact grad_x g_tch from the problem's Jacobian on the branch that attains the max.
/// Throws ConfigError when the problem has no Jacobian.
Vector analytic_grad_x(const Problem& problem, std::span<const double> x,
                       const PreferenceVector& pref, const UtopiaState& utopia, RngStream& rng,
                       const ObjectiveNormalizer* normalizer = nullptr);

struct ParamGradEstimate {
  ParamGrad grad;
  std::size_t evals = 0;
};

/// backward(model, pref, estimate_grad_x(forward(model, pref))).
ParamGradEstimate estimate_grad_params(const SetModel& model, const Problem& problem,
                                       const PreferenceVector& pref, const UtopiaState& utopia,
                                       const EsConfig& es, RngStream& rng,
                                       const ObjectiveNormalizer* normalizer = nullptr);

struct TrainLogRecord {
  std::size_t iteration = 0;
  double mean_loss = 0.0;
  std::size_t eval_count = 0;
  Vector z_star;

  friend bool operator==(const TrainLogRecord&, const TrainLogRecord&) = default;
};

struct AdamState {
  Vector m;
  Vector v;
  std::size_t steps = 0;

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

struct TrainState {
  SetModel model;
  /// Running ideal point in the scalarization space (normalized when enabled).
  UtopiaState utopia;
  std::size_t iteration = 0;
  std::vector<double> loss_history;
  std::size_t eval_count = 0;
  RngStream rng;
  std::vector<TrainLogRecord> log;
  AdamState adam;
};

class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, TrainState state)
      : Error(what), state_(std::move(state)) {}
  const TrainState& state() const noexcept { return state_; }

 private:
  TrainState state_;
};

using IterationCallback = std::function<void(const TrainState&)>;

TrainState make_train_state(const Problem& problem, SetModel model, const TrainConfig& cfg);

/// Runs the remaining iterations of `state` up to cfg.iterations.
void continue_training(const Problem& problem, TrainState& state, const TrainConfig& cfg,
                       const IterationCallback& on_iteration = {});

TrainState train(const Problem& problem, SetModel model, const TrainConfig& cfg,
                 const IterationCallback& on_iteration = {});

/// Step size at iteration t (0-based).
double step_size(const TrainConfig& cfg, std::size_t t);

}  // namespace epsl
