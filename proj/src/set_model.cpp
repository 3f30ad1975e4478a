#include "epsl/set_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace epsl {

namespace {

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_slope(double z) {
  const double s = logistic(z);
  return s * (1.0 - s);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

double softplus(double z, double b) {
  z *= b;
  return (std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)))) / b;
}

// Chain vertices: logistic onto the box.
double squash(double z, double lo, double hi) {
  return std::clamp(lo + (hi - lo) * logistic(z), lo, hi);
}

// Network outputs and shared values: (1 + sin z) / 2 onto the box. Unlike the
// logistic it reaches the faces at finite z and turns back past them, so a
// coordinate whose optimum runs along a face and leaves it again stays trainable.
double wave(double z, double lo, double hi) {
  return std::clamp(lo + (hi - lo) * 0.5 * (1.0 + std::sin(z)), lo, hi);
}

double wave_slope(double z) { return 0.5 * std::cos(z); }

// Activations of the two-layer network for one input.
struct MlpTrace {
  Vector pre;     // hidden pre-activations
  Vector hidden;  // softplus(pre)
  Vector out;
};

MlpTrace mlp_forward(const MlpShape& shape, double sharpness, std::span<const double> p,
                     std::span<const double> in) {
  const std::size_t m = shape.inputs, h = shape.hidden, o = shape.outputs;
  const double* w1 = p.data();
  const double* b1 = w1 + h * m;
  const double* w2 = b1 + h;
  const double* b2 = w2 + o * h;
  MlpTrace t{Vector(h), Vector(h), Vector(o)};
  for (std::size_t k = 0; k < h; ++k) {
    double a = b1[k];
    for (std::size_t j = 0; j < m; ++j) a += w1[k * m + j] * in[j];
    t.pre[k] = a;
    t.hidden[k] = softplus(a, sharpness);
  }
  for (std::size_t i = 0; i < o; ++i) {
    double a = b2[i];
    for (std::size_t k = 0; k < h; ++k) a += w2[i * h + k] * t.hidden[k];
    t.out[i] = a;
  }
  return t;
}

void mlp_backward(const MlpShape& shape, double sharpness, std::span<const double> p,
                  std::span<const double> in, const MlpTrace& t, std::span<const double> grad_out,
                  std::span<double> grad) {
  const std::size_t m = shape.inputs, h = shape.hidden, o = shape.outputs;
  const double* w2 = p.data() + h * m + h;
  double* gw1 = grad.data();
  double* gb1 = gw1 + h * m;
  double* gw2 = gb1 + h;
  double* gb2 = gw2 + o * h;
  Vector grad_hidden(h, 0.0);
  for (std::size_t i = 0; i < o; ++i) {
    const double g = grad_out[i];
    gb2[i] += g;
    if (g == 0.0) continue;
    for (std::size_t k = 0; k < h; ++k) {
      gw2[i * h + k] += g * t.hidden[k];
      grad_hidden[k] += g * w2[i * h + k];
    }
  }
  for (std::size_t k = 0; k < h; ++k) {
    const double ga = grad_hidden[k] * logistic(sharpness * t.pre[k]);
    gb1[k] += ga;
    for (std::size_t j = 0; j < m; ++j) gw1[k * m + j] += ga * in[j];
  }
}

// Relation prior and its partial derivatives at input u.
struct RelationEval {
  double value;
  double d_input;
  double d_alpha;
  double d_beta;
};

RelationEval relation_eval(RelationKind kind, double u, double alpha, double beta) {
  const double d = u - beta;
  if (kind == RelationKind::sine) {
    const double c = std::cos(alpha * d);
    return {std::sin(alpha * d), alpha * c, d * c, -alpha * c};
  }
  return {1.0 - alpha * d * d, -2.0 * alpha * d, -d * d, 2.0 * alpha * d};
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& idx) {
  std::vector<bool> taken(n, false);
  for (auto i : idx) taken[i] = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!taken[i]) out.push_back(i);
  }
  return out;
}

std::size_t network_outputs(const ModelConfig& c) {
  switch (c.variant) {
    case ModelVariant::plain: return c.num_variables;
    case ModelVariant::shared: return c.num_variables - c.shared.size();
    case ModelVariant::relation: return c.base.size();
    case ModelVariant::chain: return 1;
  }
  return 0;
}

std::size_t extra_size(const ModelConfig& c) {
  switch (c.variant) {
    case ModelVariant::plain: return 0;
    case ModelVariant::shared: return c.shared.size();
    case ModelVariant::relation: return 2 * (c.num_variables - c.base.size());
    case ModelVariant::chain: return c.vertices * c.num_variables;
  }
  return 0;
}

void check_index_set(const std::vector<std::size_t>& idx, std::size_t n, const char* what) {
  std::vector<bool> seen(n, false);
  for (auto i : idx) {
    if (i >= n) throw ConfigError(std::string(what) + " index out of range");
    if (seen[i]) throw ConfigError(std::string(what) + " index repeated");
    seen[i] = true;
  }
}

}  // namespace

std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::plain: return "plain";
    case ModelVariant::shared: return "shared";
    case ModelVariant::relation: return "relation";
    case ModelVariant::chain: return "chain";
  }
  return "?";
}

std::string_view to_string(RelationKind k) {
  return k == RelationKind::sine ? "sine" : "poly";
}

std::string_view to_string(RelationSpace s) {
  return s == RelationSpace::native ? "native" : "unit";
}

ModelVariant parse_variant(std::string_view s) {
  if (s == "plain") return ModelVariant::plain;
  if (s == "shared") return ModelVariant::shared;
  if (s == "relation") return ModelVariant::relation;
  if (s == "chain") return ModelVariant::chain;
  throw ConfigError("unknown model variant '" + std::string(s) + "'");
}

RelationKind parse_relation(std::string_view s) {
  if (s == "sine" || s == "sin") return RelationKind::sine;
  if (s == "poly" || s == "polynomial") return RelationKind::polynomial;
  throw ConfigError("unknown relation kind '" + std::string(s) + "'");
}

RelationSpace parse_relation_space(std::string_view s) {
  if (s == "native") return RelationSpace::native;
  if (s == "unit") return RelationSpace::unit;
  throw ConfigError("unknown relation space '" + std::string(s) + "'");
}

RelationSpace ModelConfig::effective_relation_space() const {
  if (relation_space) return *relation_space;
  return relation == RelationKind::sine ? RelationSpace::native : RelationSpace::unit;
}

void ModelConfig::validate() const {
  if (num_objectives < 2) throw ConfigError("model needs m >= 2");
  if (num_variables < 1) throw ConfigError("model needs n >= 1");
  if (hidden < 1) throw ConfigError("hidden width must be positive");
  if (!(sharpness > 0.0) || !std::isfinite(sharpness)) throw ConfigError("sharpness must be positive");
  switch (variant) {
    case ModelVariant::plain: break;
    case ModelVariant::shared:
      check_index_set(shared, num_variables, "shared");
      if (shared.empty() || shared.size() >= num_variables) {
        throw ConfigError("shared variant needs 1 <= |s| < n");
      }
      break;
    case ModelVariant::relation:
      check_index_set(base, num_variables, "base");
      if (base.empty() || base.size() >= num_variables) {
        throw ConfigError("relation variant needs 1 <= |p| < n");
      }
      break;
    case ModelVariant::chain:
      if (vertices < 2) throw ConfigError("chain needs at least 2 vertices");
      break;
  }
}

std::size_t parameter_count(const ModelConfig& c) {
  c.validate();
  const MlpShape shape{c.num_objectives, c.hidden, network_outputs(c)};
  return shape.size() + extra_size(c);
}

SetModel::SetModel(ModelConfig config, Vector params)
    : config_(std::move(config)), params_(std::move(params)) {
  config_.validate();
  mlp_ = {config_.num_objectives, config_.hidden, network_outputs(config_)};
  if (params_.size() != mlp_.size() + extra_size(config_)) {
    throw DimensionError("parameter vector length does not match the model configuration");
  }
  const std::size_t n = config_.num_variables;
  switch (config_.variant) {
    case ModelVariant::plain:
    case ModelVariant::chain:
      for (std::size_t i = 0; i < n; ++i) network_idx_.push_back(i);
      break;
    case ModelVariant::shared:
      constrained_idx_ = config_.shared;
      network_idx_ = complement(n, config_.shared);
      break;
    case ModelVariant::relation:
      network_idx_ = config_.base;
      constrained_idx_ = complement(n, config_.base);
      break;
  }
  if (config_.variant == ModelVariant::chain) network_idx_.clear();
}

SetModel SetModel::create(const ModelConfig& config, const BoxBounds& bounds, RngStream& rng) {
  config.validate();
  if (bounds.size() != config.num_variables) {
    throw DimensionError("bounds do not match the model's decision dimension");
  }
  SetModel model(config, Vector(parameter_count(config), 0.0));
  const MlpShape s = model.mlp_;
  auto p = model.params_.begin();
  const double scale1 = 1.0 / std::sqrt(static_cast<double>(s.inputs));
  const double scale2 = 1.0 / std::sqrt(static_cast<double>(s.hidden));
  for (std::size_t i = 0; i < s.hidden * s.inputs; ++i) *p++ = scale1 * rng.normal();
  p += static_cast<std::ptrdiff_t>(s.hidden);
  for (std::size_t i = 0; i < s.outputs * s.hidden; ++i) *p++ = scale2 * rng.normal();

  switch (config.variant) {
    case ModelVariant::plain:
    case ModelVariant::shared:  // raw beta = 0 squashes to mid-box
      break;
    case ModelVariant::relation: {
      auto alpha = model.relation_alpha();
      auto beta = model.relation_beta();
      const std::size_t b = model.network_idx_.front();
      const double mid = config.effective_relation_space() == RelationSpace::unit
                             ? 0.5
                             : 0.5 * (bounds.lower()[b] + bounds.upper()[b]);
      std::fill(alpha.begin(), alpha.end(), 1.0);
      std::fill(beta.begin(), beta.end(), mid);
      break;
    }
    case ModelVariant::chain: {
      const std::size_t n = config.num_variables, k_count = config.vertices;
      Vector a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.uniform(0.1, 0.9);
        b[i] = rng.uniform(0.1, 0.9);
      }
      auto raw = model.chain_raw();
      for (std::size_t k = 0; k < k_count; ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(k_count - 1);
        for (std::size_t i = 0; i < n; ++i) raw[k * n + i] = logit(a[i] + f * (b[i] - a[i]));
      }
      break;
    }
  }
  return model;
}

std::span<const double> SetModel::shared_raw() const {
  if (variant() != ModelVariant::shared) throw ConfigError("not a shared-component model");
  return std::span<const double>(params_).subspan(extra_offset(), config_.shared.size());
}
std::span<double> SetModel::shared_raw() {
  if (variant() != ModelVariant::shared) throw ConfigError("not a shared-component model");
  return std::span<double>(params_).subspan(extra_offset(), config_.shared.size());
}
std::span<const double> SetModel::relation_alpha() const {
  if (variant() != ModelVariant::relation) throw ConfigError("not a relation model");
  return std::span<const double>(params_).subspan(extra_offset(), constrained_idx_.size());
}
std::span<double> SetModel::relation_alpha() {
  if (variant() != ModelVariant::relation) throw ConfigError("not a relation model");
  return std::span<double>(params_).subspan(extra_offset(), constrained_idx_.size());
}
std::span<const double> SetModel::relation_beta() const {
  if (variant() != ModelVariant::relation) throw ConfigError("not a relation model");
  return std::span<const double>(params_).subspan(extra_offset() + constrained_idx_.size(),
                                                  constrained_idx_.size());
}
std::span<double> SetModel::relation_beta() {
  if (variant() != ModelVariant::relation) throw ConfigError("not a relation model");
  return std::span<double>(params_).subspan(extra_offset() + constrained_idx_.size(),
                                            constrained_idx_.size());
}
std::span<const double> SetModel::chain_raw() const {
  if (variant() != ModelVariant::chain) throw ConfigError("not a chain model");
  return std::span<const double>(params_).subspan(extra_offset());
}
std::span<double> SetModel::chain_raw() {
  if (variant() != ModelVariant::chain) throw ConfigError("not a chain model");
  return std::span<double>(params_).subspan(extra_offset());
}

std::vector<Vector> SetModel::chain_vertices(const BoxBounds& bounds) const {
  const auto raw = chain_raw();
  const std::size_t n = config_.num_variables;
  std::vector<Vector> out(config_.vertices, Vector(n));
  for (std::size_t k = 0; k < config_.vertices; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      out[k][i] = squash(raw[k * n + i], bounds.lower()[i], bounds.upper()[i]);
    }
  }
  return out;
}

void SetModel::set_chain_vertex(std::size_t k, std::span<const double> point,
                                const BoxBounds& bounds) {
  const std::size_t n = config_.num_variables;
  if (k >= config_.vertices || point.size() != n) throw DimensionError("bad chain vertex");
  auto raw = chain_raw();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (point[i] - bounds.lower()[i]) / bounds.width(i);
    if (!(u > 0.0 && u < 1.0)) throw DomainError("chain vertex must lie strictly inside the box", i);
    raw[k * n + i] = logit(u);
  }
}

void SetModel::check_inputs(const PreferenceVector& pref, const BoxBounds& bounds) const {
  if (pref.size() != config_.num_objectives) {
    throw DimensionError("preference size does not match the model");
  }
  if (bounds.size() != config_.num_variables) {
    throw DimensionError("bounds do not match the model's decision dimension");
  }
}

double SetModel::tracer(const PreferenceVector& pref) const {
  if (variant() != ModelVariant::chain) throw ConfigError("not a chain model");
  const auto t = mlp_forward(mlp_, config_.sharpness, params_, pref.weights());
  return 1.0 + static_cast<double>(config_.vertices - 1) * logistic(t.out[0]);
}

DecisionVector SetModel::forward(const PreferenceVector& pref, const BoxBounds& bounds) const {
  check_inputs(pref, bounds);
  const auto& lo = bounds.lower();
  const auto& hi = bounds.upper();
  const auto trace = mlp_forward(mlp_, config_.sharpness, params_, pref.weights());
  DecisionVector x(config_.num_variables);

  if (variant() == ModelVariant::chain) {
    const double t = 1.0 + static_cast<double>(config_.vertices - 1) * logistic(trace.out[0]);
    const auto verts = chain_vertices(bounds);
    x = chain_point(verts, t);
    bounds.clamp(x);
    return x;
  }

  for (std::size_t j = 0; j < network_idx_.size(); ++j) {
    const std::size_t i = network_idx_[j];
    x[i] = wave(trace.out[j], lo[i], hi[i]);
  }
  if (variant() == ModelVariant::shared) {
    const auto beta = shared_raw();
    for (std::size_t j = 0; j < constrained_idx_.size(); ++j) {
      const std::size_t i = constrained_idx_[j];
      x[i] = wave(beta[j], lo[i], hi[i]);
    }
  } else if (variant() == ModelVariant::relation) {
    const auto alpha = relation_alpha();
    const auto beta = relation_beta();
    const std::size_t b = network_idx_.front();
    const bool unit = config_.effective_relation_space() == RelationSpace::unit;
    const double u = unit ? (x[b] - lo[b]) / bounds.width(b) : x[b];
    for (std::size_t j = 0; j < constrained_idx_.size(); ++j) {
      const std::size_t i = constrained_idx_[j];
      const double r = relation_eval(config_.relation, u, alpha[j], beta[j]).value;
      x[i] = unit ? lo[i] + bounds.width(i) * std::clamp(r, 0.0, 1.0) : std::clamp(r, lo[i], hi[i]);
    }
  }
  return x;
}

ParamGrad SetModel::backward(const PreferenceVector& pref, const BoxBounds& bounds,
                             std::span<const double> grad_x) const {
  check_inputs(pref, bounds);
  if (grad_x.size() != config_.num_variables) {
    throw DimensionError("grad_x length does not match the decision dimension");
  }
  const auto& lo = bounds.lower();
  ParamGrad grad{Vector(params_.size(), 0.0)};
  std::span<double> g_all(grad.values);
  std::span<double> g_extra = g_all.subspan(extra_offset());
  const auto trace = mlp_forward(mlp_, config_.sharpness, params_, pref.weights());
  Vector grad_out(mlp_.outputs, 0.0);

  if (variant() == ModelVariant::chain) {
    const double z = trace.out[0];
    const double span_t = static_cast<double>(config_.vertices - 1);
    const double t = 1.0 + span_t * logistic(z);
    const auto verts = chain_vertices(bounds);
    const auto cg = chain_point_vjp(verts, t, grad_x);
    grad_out[0] = cg.tracer * span_t * logistic_slope(z);
    const auto raw = chain_raw();
    const std::size_t n = config_.num_variables;
    for (std::size_t k = 0; k < config_.vertices; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        g_extra[k * n + i] = cg.vertices[k][i] * bounds.width(i) * logistic_slope(raw[k * n + i]);
      }
    }
    mlp_backward(mlp_, config_.sharpness, params_, pref.weights(), trace, grad_out, g_all);
    return grad;
  }

  // Gradient reaching each network-produced coordinate, before the squash.
  Vector grad_net(network_idx_.size());
  for (std::size_t j = 0; j < network_idx_.size(); ++j) grad_net[j] = grad_x[network_idx_[j]];

  if (variant() == ModelVariant::shared) {
    const auto beta = shared_raw();
    for (std::size_t j = 0; j < constrained_idx_.size(); ++j) {
      const std::size_t i = constrained_idx_[j];
      g_extra[j] = grad_x[i] * bounds.width(i) * wave_slope(beta[j]);
    }
  } else if (variant() == ModelVariant::relation) {
    const auto alpha = relation_alpha();
    const auto beta = relation_beta();
    const std::size_t b = network_idx_.front();
    const bool unit = config_.effective_relation_space() == RelationSpace::unit;
    const double xb = wave(trace.out[0], lo[b], bounds.upper()[b]);
    const double u = unit ? (xb - lo[b]) / bounds.width(b) : xb;
    const std::size_t s = constrained_idx_.size();
    for (std::size_t j = 0; j < s; ++j) {
      const std::size_t i = constrained_idx_[j];
      const auto rel = relation_eval(config_.relation, u, alpha[j], beta[j]);
      const double r_lo = unit ? 0.0 : lo[i];
      const double r_hi = unit ? 1.0 : bounds.upper()[i];
      if (rel.value < r_lo || rel.value > r_hi) continue;  // clamped: no gradient
      const double out_scale = unit ? bounds.width(i) : 1.0;
      const double in_scale = unit ? 1.0 / bounds.width(b) : 1.0;
      const double g = grad_x[i] * out_scale;
      g_extra[j] = g * rel.d_alpha;
      g_extra[s + j] = g * rel.d_beta;
      grad_net[0] += g * rel.d_input * in_scale;
    }
  }

  for (std::size_t j = 0; j < network_idx_.size(); ++j) {
    const std::size_t i = network_idx_[j];
    grad_out[j] = grad_net[j] * bounds.width(i) * wave_slope(trace.out[j]);
  }
  mlp_backward(mlp_, config_.sharpness, params_, pref.weights(), trace, grad_out, g_all);
  return grad;
}

DecisionVector forward(const SetModel& model, const PreferenceVector& pref, const BoxBounds& bounds) {
  return model.forward(pref, bounds);
}

ParamGrad backward(const SetModel& model, const PreferenceVector& pref, const BoxBounds& bounds,
                   std::span<const double> grad_x) {
  return model.backward(pref, bounds, grad_x);
}

std::size_t chain_segment(std::size_t vertex_count, double t) {
  if (vertex_count < 2) throw ConfigError("chain needs at least 2 vertices");
  const double k = std::floor(t) - 1.0;
  const double last = static_cast<double>(vertex_count - 2);
  return static_cast<std::size_t>(std::clamp(k, 0.0, last));
}

Vector chain_point(std::span<const Vector> vertices, double t) {
  const std::size_t k = chain_segment(vertices.size(), t);
  const double frac = t - static_cast<double>(k + 1);
  const Vector& a = vertices[k];
  const Vector& b = vertices[k + 1];
  Vector x(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) x[i] = a[i] + frac * (b[i] - a[i]);
  return x;
}

ChainGradient chain_point_vjp(std::span<const Vector> vertices, double t,
                              std::span<const double> grad_x) {
  const std::size_t k = chain_segment(vertices.size(), t);
  const double frac = t - static_cast<double>(k + 1);
  const std::size_t n = vertices.front().size();
  ChainGradient out{std::vector<Vector>(vertices.size(), Vector(n, 0.0)), 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    out.vertices[k][i] = (1.0 - frac) * grad_x[i];
    out.vertices[k + 1][i] = frac * grad_x[i];
    out.tracer += grad_x[i] * (vertices[k + 1][i] - vertices[k][i]);
  }
  return out;
}

std::vector<SampleTriple> sample_set(const SetModel& model, const Problem& problem,
                                     std::size_t count, RngStream& rng,
                                     const PreferenceDistribution& dist) {
  if (count < 1) throw ConfigError("sample count must be at least 1");
  std::vector<SampleTriple> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto pref = sample_preference(problem.num_objectives(), rng, dist);
    auto x = model.forward(pref, problem.bounds());
    auto f = problem.evaluate(x);
    out.push_back({std::move(pref), std::move(x), std::move(f)});
  }
  return out;
}

}  // namespace epsl
