#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "epsl/core.hpp"
#include "epsl/problems.hpp"

namespace epsl {

enum class ModelVariant { plain, shared, relation, chain };
enum class RelationKind { sine, polynomial };
/// Coordinates in which a variable relation is expressed: raw decision values,
/// or the unit cube obtained by rescaling each coordinate's box to [0, 1].
enum class RelationSpace { native, unit };

std::string_view to_string(ModelVariant v);
std::string_view to_string(RelationKind k);
std::string_view to_string(RelationSpace s);
ModelVariant parse_variant(std::string_view s);
RelationKind parse_relation(std::string_view s);
RelationSpace parse_relation_space(std::string_view s);

struct ModelConfig {
  ModelVariant variant = ModelVariant::plain;
  std::size_t num_objectives = 2;
  std::size_t num_variables = 2;
  std::size_t hidden = 128;
  /// Hidden activation softplus(b z) / b. Preferences live on the unit simplex,
  /// so a unit-sharpness ramp is nearly linear over the whole input range.
  double sharpness = 20.0;
  /// Chain vertex count K.
  std::size_t vertices = 4;
  /// Shared-component indices s (shared variant).
  std::vector<std::size_t> shared;
  /// Base indices p produced by the network (relation variant). The relation
  /// reads the first base coordinate; every other index is dependent.
  std::vector<std::size_t> base = {0};
  RelationKind relation = RelationKind::sine;
  /// Defaults to native for sine and unit for polynomial.
  std::optional<RelationSpace> relation_space;

  RelationSpace effective_relation_space() const;
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct MlpShape {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::size_t outputs = 0;
  std::size_t size() const { return hidden * inputs + hidden + outputs * hidden + outputs; }

  friend bool operator==(const MlpShape&, const MlpShape&) = default;
};

/// Gradient of a scalar with respect to every trainable parameter of a model,
/// laid out exactly like SetModel::parameters().
struct ParamGrad {
  Vector values;
};

/// Preference-conditioned set model lambda -> x. A two-layer network (softplus
/// hidden layer, outputs mapped onto the box by lo + w (1 + sin z) / 2) plus the trainable blocks
/// of its structure-constraint variant, all stored in one flat parameter vector:
///
///   [W1 (h x m) | b1 (h) | W2 (out x h) | b2 (out) | variant block]
///
/// Variant blocks: shared -> raw beta (|s|); relation -> alpha (|s|), beta (|s|);
/// chain -> raw vertex coordinates (K x n, row-major).
class SetModel {
 public:
  /// Random initialisation: W ~ N(0, 1/fan_in), zero biases, shared beta at
  /// mid-box, relation alpha = 1 and beta at mid-range of the base coordinate,
  /// chain vertices evenly spaced on a random in-box segment.
  static SetModel create(const ModelConfig& config, const BoxBounds& bounds, RngStream& rng);

  SetModel(ModelConfig config, Vector params);

  const ModelConfig& config() const noexcept { return config_; }
  ModelVariant variant() const noexcept { return config_.variant; }
  MlpShape mlp_shape() const noexcept { return mlp_; }

  std::span<const double> parameters() const noexcept { return params_; }
  std::span<double> parameters() noexcept { return params_; }
  std::size_t num_parameters() const noexcept { return params_.size(); }

  /// Coordinates produced by the network (all of them for plain).
  const std::vector<std::size_t>& network_indices() const noexcept { return network_idx_; }
  /// Shared coordinates (shared variant) or dependent coordinates (relation variant).
  const std::vector<std::size_t>& constrained_indices() const noexcept { return constrained_idx_; }

  std::span<const double> shared_raw() const;
  std::span<double> shared_raw();
  std::span<const double> relation_alpha() const;
  std::span<double> relation_alpha();
  std::span<const double> relation_beta() const;
  std::span<double> relation_beta();
  std::span<const double> chain_raw() const;
  std::span<double> chain_raw();

  /// In-box vertex positions of the chain variant.
  std::vector<Vector> chain_vertices(const BoxBounds& bounds) const;
  /// Places vertex k (0-based) at `point`, which must lie strictly inside the box.
  void set_chain_vertex(std::size_t k, std::span<const double> point, const BoxBounds& bounds);
  /// Chain tracer t in [1, K] for a preference.
  double tracer(const PreferenceVector& pref) const;

  DecisionVector forward(const PreferenceVector& pref, const BoxBounds& bounds) const;
  /// Exact vector-Jacobian product grad_x^T d forward / d params.
  ParamGrad backward(const PreferenceVector& pref, const BoxBounds& bounds,
                     std::span<const double> grad_x) const;

  friend bool operator==(const SetModel&, const SetModel&) = default;

 private:
  void check_inputs(const PreferenceVector& pref, const BoxBounds& bounds) const;
  std::size_t extra_offset() const noexcept { return mlp_.size(); }

  ModelConfig config_;
  MlpShape mlp_;
  std::vector<std::size_t> network_idx_;
  std::vector<std::size_t> constrained_idx_;
  Vector params_;
};

std::size_t parameter_count(const ModelConfig& config);

DecisionVector forward(const SetModel& model, const PreferenceVector& pref, const BoxBounds& bounds);
ParamGrad backward(const SetModel& model, const PreferenceVector& pref, const BoxBounds& bounds,
                   std::span<const double> grad_x);

/// Point on a polygonal chain for tracer t in [1, K]: with k = min(floor(t), K-1),
/// x = p_k + (t - k)(p_{k+1} - p_k) (1-based vertex numbering).
Vector chain_point(std::span<const Vector> vertices, double t);
/// 0-based index of the segment that t falls on.
std::size_t chain_segment(std::size_t vertex_count, double t);

struct ChainGradient {
  std::vector<Vector> vertices;
  double tracer = 0.0;
};
ChainGradient chain_point_vjp(std::span<const Vector> vertices, double t,
                              std::span<const double> grad_x);

struct SampleTriple {
  PreferenceVector preference;
  DecisionVector x;
  ObjectiveVector f;

  friend bool operator==(const SampleTriple&, const SampleTriple&) = default;
};

/// `count` i.i.d. preferences drawn in order from `rng`, mapped through the
/// model and evaluated. A longer draw with the same seed extends a shorter one.
std::vector<SampleTriple> sample_set(const SetModel& model, const Problem& problem,
                                     std::size_t count, RngStream& rng,
                                     const PreferenceDistribution& dist = {});

}  // namespace epsl
