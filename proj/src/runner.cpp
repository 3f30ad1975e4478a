#include "epsl/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace epsl {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string sample_label(std::size_t index, std::size_t size) {
  return index == 0 ? std::string("EPSL") : "EPSL(" + std::to_string(size) + ")";
}

Json variant_json(const SetModel& model, const BoxBounds& bounds) {
  const auto& c = model.config();
  Json j{{"tag", to_string(c.variant)},
         {"network_indices", model.network_indices()},
         {"shared_indices", Json::array()},
         {"dependent_indices", Json::array()},
         {"relation", nullptr},
         {"chain", nullptr}};
  switch (c.variant) {
    case ModelVariant::plain: break;
    case ModelVariant::shared: {
      j["shared_indices"] = model.constrained_indices();
      // Shared values as they appear in every solution.
      const PreferenceVector any(Vector(c.num_objectives, 1.0 / static_cast<double>(c.num_objectives)));
      const auto x = model.forward(any, bounds);
      Vector values;
      for (auto i : model.constrained_indices()) values.push_back(x[i]);
      j["shared_values"] = values;
      break;
    }
    case ModelVariant::relation: {
      j["dependent_indices"] = model.constrained_indices();
      const auto a = model.relation_alpha();
      const auto b = model.relation_beta();
      j["relation"] = {{"kind", to_string(c.relation)},
                       {"space", to_string(c.effective_relation_space())},
                       {"base_index", model.network_indices().front()},
                       {"alpha", Vector(a.begin(), a.end())},
                       {"beta", Vector(b.begin(), b.end())}};
      break;
    }
    case ModelVariant::chain:
      j["chain"] = {{"K", c.vertices}, {"vertices", model.chain_vertices(bounds)}};
      break;
  }
  return j;
}

}  // namespace

std::unique_ptr<Problem> problem_for(const RunConfig& cfg, const std::filesystem::path& data_dir) {
  ProblemOptions opts;
  opts.dimension = cfg.dimension;
  opts.data_dir = data_dir;
  return make_problem(cfg.problem, opts);
}

ModelConfig model_config_for(const RunConfig& cfg, const Problem& problem) {
  ModelConfig mc = cfg.model;
  mc.num_objectives = problem.num_objectives();
  mc.num_variables = problem.num_variables();
  return mc;
}

SetModel initial_model(const RunConfig& cfg, const Problem& problem) {
  RngStream rng = RngStream(cfg.train.seed).child(kModelInitKey);
  return SetModel::create(model_config_for(cfg, problem), problem.bounds(), rng);
}

std::vector<SampleTriple> draw_samples(const SetModel& model, const Problem& problem,
                                       std::size_t count, std::uint64_t seed,
                                       const PreferenceDistribution& dist) {
  RngStream rng = RngStream(seed).child(kSamplingKey);
  return sample_set(model, problem, count, rng, dist);
}

std::size_t evals_per_preference(const TrainConfig& cfg) {
  if (cfg.gradient == GradientSource::analytic) return 1;
  return 1 + cfg.es.samples * (cfg.es.antithetic ? 2 : 1);
}

std::size_t iterations_for_budget(const TrainConfig& cfg, std::size_t budget) {
  return budget / (cfg.preferences * evals_per_preference(cfg));
}

MetricsRecord measure(const Problem& problem, const std::string& method, std::uint64_t seed,
                      const std::vector<ObjectiveVector>& points, std::size_t eval_count,
                      double wall_time_ms) {
  const auto ctx = metric_context(problem);
  MetricsRecord r;
  r.problem = problem.spec().name;
  r.method = method;
  r.seed = seed;
  r.solutions = points.size();
  r.hv = hypervolume(points, ctx);
  const auto truth = problem.ground_truth();
  if (truth.pf_samples && !truth.pf_samples->empty()) {
    r.delta_hv = hypervolume(*truth.pf_samples, ctx) - r.hv;
    if (!points.empty()) r.igd_plus = igd_plus(points, *truth.pf_samples, ctx);
  }
  r.eval_count = eval_count;
  r.wall_time_ms = wall_time_ms;
  return r;
}

RunArtifact run_epsl(const RunConfig& cfg, const Problem& problem) {
  RunArtifact a;
  a.config = cfg;
  a.config.method = Method::epsl;
  const auto start = Clock::now();
  auto state = train(problem, initial_model(cfg, problem), cfg.train);
  a.timings.optimize_ms = ms_since(start);

  std::size_t largest = 0;
  for (auto s : cfg.sample_sizes) largest = std::max(largest, s);
  const auto sample_start = Clock::now();
  if (largest > 0) {
    a.samples = draw_samples(state.model, problem, largest, cfg.train.seed, cfg.train.preference_dist);
  }
  a.timings.sample_ms = ms_since(sample_start);
  a.sample_eval_count = a.samples.size();

  for (std::size_t k = 0; k < cfg.sample_sizes.size(); ++k) {
    const std::size_t size = cfg.sample_sizes[k];
    std::vector<ObjectiveVector> fs;
    for (std::size_t i = 0; i < size; ++i) fs.push_back(a.samples[i].f);
    const double wall = a.timings.optimize_ms + a.timings.sample_ms * size / std::max<std::size_t>(largest, 1);
    a.metrics.push_back(measure(problem, sample_label(k, size), cfg.train.seed, fs, state.eval_count, wall));
  }
  a.model = std::move(state.model);
  a.log = std::move(state.log);
  a.loss_history = std::move(state.loss_history);
  a.eval_count = state.eval_count;
  a.z_star = state.utopia.z_star;
  return a;
}

RunArtifact run_baseline(const RunConfig& cfg, const Problem& problem) {
  RunArtifact a;
  a.config = cfg;
  a.config.method = Method::moead;
  const auto start = Clock::now();
  auto result = run_moead(problem, cfg.moead, cfg.budget);
  a.timings.optimize_ms = ms_since(start);
  a.population = result.population.individuals;
  a.eval_count = result.population.eval_count;
  a.z_star = result.population.utopia.z_star;
  a.metrics.push_back(measure(problem, "MOEA/D-TCH", cfg.moead.seed, result.population.objectives(),
                              a.eval_count, a.timings.optimize_ms));
  return a;
}

RunArtifact run(const RunConfig& cfg, const Problem& problem) {
  return cfg.method == Method::epsl ? run_epsl(cfg, problem) : run_baseline(cfg, problem);
}

double median(std::vector<double> values) {
  if (values.empty()) throw ConfigError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  return values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

CompareReport compare(const RunConfig& base, const Problem& problem,
                      const std::vector<std::uint64_t>& seeds, std::size_t budget) {
  if (seeds.empty()) throw ConfigError("compare needs at least one seed");
  CompareReport report;
  report.problem = problem.spec().name;
  report.budget = budget;
  std::vector<std::string> methods;
  for (auto seed : seeds) {
    RunConfig cfg = base;
    cfg.train.seed = seed;
    cfg.moead.seed = seed;
    cfg.budget = budget;
    cfg.train.iterations = iterations_for_budget(cfg.train, budget);
    auto epsl = run_epsl(cfg, problem);
    auto moead = run_baseline(cfg, problem);
    for (const auto* art : {&epsl, &moead}) {
      for (const auto& r : art->metrics) {
        report.rows.push_back(r);
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
          methods.push_back(r.method);
        }
      }
    }
  }
  for (const auto& method : methods) {
    std::vector<double> hv, gap, igd;
    for (const auto& r : report.rows) {
      if (r.method != method) continue;
      hv.push_back(r.hv);
      if (r.delta_hv) gap.push_back(*r.delta_hv);
      if (r.igd_plus) igd.push_back(*r.igd_plus);
    }
    MethodSummary s{method, median(hv), std::nullopt, std::nullopt};
    if (!gap.empty()) s.median_delta_hv = median(gap);
    if (!igd.empty()) s.median_igd_plus = median(igd);
    report.summary.push_back(s);
  }
  return report;
}

Json to_json(const CompareReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  Json summary = Json::array();
  for (const auto& s : r.summary) {
    summary.push_back({{"method", s.method},
                       {"median_hv", s.median_hv},
                       {"median_delta_hv", s.median_delta_hv ? Json(*s.median_delta_hv) : Json(nullptr)},
                       {"median_igd_plus", s.median_igd_plus ? Json(*s.median_igd_plus) : Json(nullptr)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"problem", r.problem},
          {"budget", r.budget},
          {"space", "normalized"},
          {"rows", std::move(rows)},
          {"summary", std::move(summary)}};
}

std::vector<PreferenceVector> preference_grid(std::size_t m, std::size_t grid) {
  if (grid < 2) throw ConfigError("preference grid needs at least 2 points per axis");
  if (m == 2) {
    std::vector<PreferenceVector> out;
    for (std::size_t i = 0; i < grid; ++i) {
      const double w = static_cast<double>(i) / static_cast<double>(grid - 1);
      out.emplace_back(Vector{w, 1.0 - w});
    }
    return out;
  }
  return das_dennis(m, grid - 1);
}

Json export_ui_bundle(const RunArtifact& artifact, const Problem& problem, std::size_t grid) {
  if (!artifact.model) throw ConfigError("artifact holds no set model to export");
  const auto& model = *artifact.model;
  const auto& bounds = problem.bounds();
  const auto& spec = problem.spec();
  const std::size_t m = problem.num_objectives();

  Json triples = Json::array();
  double worst = 0.0;
  for (const auto& pref : preference_grid(m, grid)) {
    const auto x = model.forward(pref, bounds);
    const auto f = problem.evaluate(x);
    const auto again = problem.evaluate(x);
    for (std::size_t j = 0; j < m; ++j) worst = std::max(worst, std::abs(again[j] - f[j]));
    triples.push_back({{"lambda", pref.weights()}, {"x", x}, {"f", f}});
  }

  const auto truth = problem.ground_truth();
  Json bundle{{"schema_version", kSchemaVersion},
              {"kind", "epsl-ui-bundle"},
              {"problem",
               {{"name", spec.name},
                {"n", spec.n},
                {"m", spec.m},
                {"ideal", spec.ideal_hint ? Json(*spec.ideal_hint) : Json(nullptr)},
                {"nadir", spec.nadir_hint ? Json(*spec.nadir_hint) : Json(nullptr)}}},
              {"bounds", {{"lower", bounds.lower()}, {"upper", bounds.upper()}}},
              {"variant", variant_json(model, bounds)},
              {"reference_front", truth.pf_samples ? Json(*truth.pf_samples) : Json(nullptr)},
              {"grid",
               {{"layout", m == 2 ? "line" : "simplex-lattice"},
                {"points_per_axis", grid},
                {"count", triples.size()}}},
              {"triples", std::move(triples)},
              {"consistency", {{"reevaluated", true}, {"max_abs_error", worst}, {"consistent", worst == 0.0}}},
              {"source", {{"seed", artifact.config.train.seed}, {"eval_count", artifact.eval_count}}}};
  return bundle;
}

}  // namespace epsl
