#include "epsl/artifact.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace epsl {

namespace {

// The running ideal starts at +inf, which JSON cannot hold; it is written as null.
Json finite_or_null(const Vector& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(std::isfinite(x) ? Json(x) : Json(nullptr));
  return out;
}

Vector null_as_infinity(const Json& j) {
  Vector out;
  for (const auto& x : j) {
    out.push_back(x.is_null() ? std::numeric_limits<double>::infinity() : x.get<double>());
  }
  return out;
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

void check_schema(const Json& j, const char* what) {
  const int version = j.value("schema_version", -1);
  if (version != kSchemaVersion) {
    throw ConfigError(std::string(what) + " has schema version " + std::to_string(version) +
                      ", expected " + std::to_string(kSchemaVersion));
  }
}

}  // namespace

std::string_view to_string(Method m) { return m == Method::epsl ? "epsl" : "moead"; }

Method parse_method(std::string_view s) {
  if (s == "epsl") return Method::epsl;
  if (s == "moead" || s == "moead-tch") return Method::moead;
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

Json to_json(const ModelConfig& c) {
  Json j{{"variant", to_string(c.variant)},
         {"m", c.num_objectives},
         {"n", c.num_variables},
         {"hidden", c.hidden},
         {"sharpness", c.sharpness},
         {"vertices", c.vertices},
         {"shared", c.shared},
         {"base", c.base},
         {"relation", to_string(c.relation)},
         {"relation_space", nullptr}};
  if (c.relation_space) j["relation_space"] = to_string(*c.relation_space);
  return j;
}

ModelConfig model_config_from_json(const Json& j) {
  ModelConfig c;
  c.variant = parse_variant(j.at("variant").get<std::string>());
  c.num_objectives = j.at("m").get<std::size_t>();
  c.num_variables = j.at("n").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.sharpness = j.at("sharpness").get<double>();
  c.vertices = j.at("vertices").get<std::size_t>();
  c.shared = j.at("shared").get<std::vector<std::size_t>>();
  c.base = j.at("base").get<std::vector<std::size_t>>();
  c.relation = parse_relation(j.at("relation").get<std::string>());
  if (auto s = optional_from<std::string>(j, "relation_space")) {
    c.relation_space = parse_relation_space(*s);
  }
  return c;
}

Json to_json(const TrainConfig& c) {
  return {{"preferences", c.preferences},
          {"iterations", c.iterations},
          {"eta", c.eta},
          {"cosine_decay", c.cosine_decay},
          {"optimizer", to_string(c.optimizer)},
          {"es",
           {{"samples", c.es.samples},
            {"sigma", c.es.sigma},
            {"tchebycheff_variant", c.es.tchebycheff_variant},
            {"antithetic", c.es.antithetic},
            {"rank_shaping", c.es.rank_shaping}}},
          {"seed", c.seed},
          {"epsilon", c.epsilon},
          {"min_weight", c.preference_dist.min_weight},
          {"normalize_objectives", c.normalize_objectives},
          {"gradient", to_string(c.gradient)},
          {"threads", c.threads}};
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig c;
  c.preferences = j.at("preferences").get<std::size_t>();
  c.iterations = j.at("iterations").get<std::size_t>();
  c.eta = j.at("eta").get<double>();
  c.cosine_decay = j.at("cosine_decay").get<bool>();
  c.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  const auto& es = j.at("es");
  c.es.samples = es.at("samples").get<std::size_t>();
  c.es.sigma = es.at("sigma").get<double>();
  c.es.tchebycheff_variant = es.at("tchebycheff_variant").get<bool>();
  c.es.antithetic = es.at("antithetic").get<bool>();
  c.es.rank_shaping = es.at("rank_shaping").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.epsilon = j.at("epsilon").get<double>();
  c.preference_dist.min_weight = j.at("min_weight").get<double>();
  c.normalize_objectives = j.at("normalize_objectives").get<bool>();
  c.gradient = parse_gradient_source(j.at("gradient").get<std::string>());
  c.threads = j.at("threads").get<std::size_t>();
  return c;
}

Json to_json(const MoeadConfig& c) {
  return {{"population", c.population},
          {"neighborhood", c.neighborhood},
          {"crossover_eta", c.crossover_eta},
          {"crossover_prob", c.crossover_prob},
          {"mutation_eta", c.mutation_eta},
          {"mutation_prob", optional_json(c.mutation_prob)},
          {"epsilon", c.epsilon},
          {"normalize_objectives", c.normalize_objectives},
          {"seed", c.seed}};
}

MoeadConfig moead_config_from_json(const Json& j) {
  MoeadConfig c;
  c.population = j.at("population").get<std::size_t>();
  c.neighborhood = j.at("neighborhood").get<std::size_t>();
  c.crossover_eta = j.at("crossover_eta").get<double>();
  c.crossover_prob = j.at("crossover_prob").get<double>();
  c.mutation_eta = j.at("mutation_eta").get<double>();
  c.mutation_prob = optional_from<double>(j, "mutation_prob");
  c.epsilon = j.at("epsilon").get<double>();
  c.normalize_objectives = j.at("normalize_objectives").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

Json to_json(const RunConfig& c) {
  return {{"problem", c.problem},
          {"dimension", c.dimension},
          {"method", to_string(c.method)},
          {"model", to_json(c.model)},
          {"train", to_json(c.train)},
          {"moead", to_json(c.moead)},
          {"budget", c.budget},
          {"sample_sizes", c.sample_sizes}};
}

RunConfig run_config_from_json(const Json& j) {
  RunConfig c;
  c.problem = j.at("problem").get<std::string>();
  c.dimension = j.at("dimension").get<std::size_t>();
  c.method = parse_method(j.at("method").get<std::string>());
  c.model = model_config_from_json(j.at("model"));
  c.train = train_config_from_json(j.at("train"));
  c.moead = moead_config_from_json(j.at("moead"));
  c.budget = j.at("budget").get<std::size_t>();
  c.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
  return c;
}

Json model_to_json(const SetModel& model, const BoxBounds& bounds,
                   const std::optional<TrainConfig>& train) {
  const auto shape = model.mlp_shape();
  const auto p = model.parameters();
  Json j{{"schema_version", kSchemaVersion},
         {"config", to_json(model.config())},
         {"dimensions",
          {{"m", model.config().num_objectives},
           {"n", model.config().num_variables},
           {"h", model.config().hidden},
           {"K", model.config().vertices},
           {"network_outputs", shape.outputs}}},
         {"parameters", Vector(p.begin(), p.end())},
         {"bounds", {{"lower", bounds.lower()}, {"upper", bounds.upper()}}},
         {"train", train ? to_json(*train) : Json(nullptr)}};
  return j;
}

SetModel model_from_json(const Json& j) {
  check_schema(j, "model document");
  return SetModel(model_config_from_json(j.at("config")), j.at("parameters").get<Vector>());
}

Json to_json(const MetricsRecord& r) {
  return {{"problem", r.problem},         {"method", r.method},
          {"seed", r.seed},               {"solutions", r.solutions},
          {"hv", r.hv},                   {"delta_hv", optional_json(r.delta_hv)},
          {"igd_plus", optional_json(r.igd_plus)}, {"eval_count", r.eval_count},
          {"wall_time_ms", r.wall_time_ms}};
}

MetricsRecord metrics_record_from_json(const Json& j) {
  MetricsRecord r;
  r.problem = j.at("problem").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.solutions = j.at("solutions").get<std::size_t>();
  r.hv = j.at("hv").get<double>();
  r.delta_hv = optional_from<double>(j, "delta_hv");
  r.igd_plus = optional_from<double>(j, "igd_plus");
  r.eval_count = j.at("eval_count").get<std::size_t>();
  r.wall_time_ms = j.at("wall_time_ms").get<double>();
  return r;
}

Json to_json(const TrainLogRecord& r) {
  return {{"iteration", r.iteration},
          {"mean_loss", r.mean_loss},
          {"eval_count", r.eval_count},
          {"z_star", finite_or_null(r.z_star)}};
}

TrainLogRecord log_record_from_json(const Json& j) {
  return {j.at("iteration").get<std::size_t>(), j.at("mean_loss").get<double>(),
          j.at("eval_count").get<std::size_t>(), null_as_infinity(j.at("z_star"))};
}

Json to_json(const SampleTriple& t) {
  return {{"lambda", t.preference.weights()}, {"x", t.x}, {"f", t.f}};
}

SampleTriple sample_from_json(const Json& j) {
  return {PreferenceVector(j.at("lambda").get<Vector>()), j.at("x").get<Vector>(),
          j.at("f").get<Vector>()};
}

Json to_json(const RunArtifact& a) {
  Json j{{"schema_version", a.schema_version}, {"config", to_json(a.config)}};
  if (a.model) {
    j["model"] = {{"config", to_json(a.model->config())},
                  {"parameters", Vector(a.model->parameters().begin(), a.model->parameters().end())}};
  } else {
    j["model"] = nullptr;
  }
  Json pop = Json::array();
  for (const auto& ind : a.population) pop.push_back({{"x", ind.x}, {"f", ind.f}});
  j["population"] = std::move(pop);
  Json samples = Json::array();
  for (const auto& s : a.samples) samples.push_back(to_json(s));
  j["samples"] = std::move(samples);
  j["sample_eval_count"] = a.sample_eval_count;
  Json metrics = Json::array();
  for (const auto& r : a.metrics) metrics.push_back(to_json(r));
  j["metrics"] = std::move(metrics);
  Json log = Json::array();
  for (const auto& r : a.log) log.push_back(to_json(r));
  j["log"] = std::move(log);
  j["loss_history"] = a.loss_history;
  j["eval_count"] = a.eval_count;
  j["z_star"] = finite_or_null(a.z_star);
  j["timings"] = {{"optimize_ms", a.timings.optimize_ms}, {"sample_ms", a.timings.sample_ms}};
  return j;
}

RunArtifact artifact_from_json(const Json& j) {
  check_schema(j, "run artifact");
  RunArtifact a;
  a.schema_version = j.at("schema_version").get<int>();
  a.config = run_config_from_json(j.at("config"));
  if (!j.at("model").is_null()) {
    const auto& mj = j.at("model");
    a.model.emplace(model_config_from_json(mj.at("config")), mj.at("parameters").get<Vector>());
  }
  for (const auto& p : j.at("population")) {
    a.population.push_back({p.at("x").get<Vector>(), p.at("f").get<Vector>()});
  }
  for (const auto& s : j.at("samples")) a.samples.push_back(sample_from_json(s));
  a.sample_eval_count = j.at("sample_eval_count").get<std::size_t>();
  for (const auto& r : j.at("metrics")) a.metrics.push_back(metrics_record_from_json(r));
  for (const auto& r : j.at("log")) a.log.push_back(log_record_from_json(r));
  a.loss_history = j.at("loss_history").get<std::vector<double>>();
  a.eval_count = j.at("eval_count").get<std::size_t>();
  a.z_star = null_as_infinity(j.at("z_star"));
  const auto& t = j.at("timings");
  a.timings = {t.at("optimize_ms").get<double>(), t.at("sample_ms").get<double>()};
  return a;
}

Json deterministic_view(const RunArtifact& a) {
  Json j = to_json(a);
  j.erase("timings");
  for (auto& r : j["metrics"]) r.erase("wall_time_ms");
  return j;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void save_artifact(const std::filesystem::path& path, const RunArtifact& a) {
  write_json(path, to_json(a));
}

RunArtifact load_artifact(const std::filesystem::path& path) {
  return artifact_from_json(read_json(path));
}

void write_training_log(const std::filesystem::path& path, const std::vector<TrainLogRecord>& log) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& r : log) out << to_json(r).dump() << '\n';
}

}  // namespace epsl
