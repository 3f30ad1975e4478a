#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "epsl/es_optim.hpp"
#include "epsl/moead.hpp"
#include "epsl/set_model.hpp"

namespace epsl {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class Method { epsl, moead };
std::string_view to_string(Method m);
Method parse_method(std::string_view s);

/// Everything needed to reproduce a run.
struct RunConfig {
  std::string problem = "syn";
  /// Decision dimension for problems that accept one (0 = problem default).
  std::size_t dimension = 0;
  Method method = Method::epsl;
  ModelConfig model;
  TrainConfig train;
  MoeadConfig moead;
  /// Total evaluation budget for the MOEA/D baseline.
  std::size_t budget = 30000;
  /// Sample sizes drawn from a trained set model; each is a prefix of the next.
  std::vector<std::size_t> sample_sizes = {100, 1000};

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// One row of a metrics report.
struct MetricsRecord {
  std::string problem;
  std::string method;
  std::uint64_t seed = 0;
  std::size_t solutions = 0;
  double hv = 0.0;
  std::optional<double> delta_hv;
  std::optional<double> igd_plus;
  std::size_t eval_count = 0;
  double wall_time_ms = 0.0;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

struct Timings {
  double optimize_ms = 0.0;
  double sample_ms = 0.0;

  friend bool operator==(const Timings&, const Timings&) = default;
};

struct RunArtifact {
  int schema_version = kSchemaVersion;
  RunConfig config;
  /// Trained set model (EPSL runs).
  std::optional<SetModel> model;
  /// Final population (MOEA/D runs): decision vectors and objectives.
  std::vector<Individual> population;
  std::vector<SampleTriple> samples;
  /// Evaluations spent on sampling, counted apart from the optimisation budget.
  std::size_t sample_eval_count = 0;
  std::vector<MetricsRecord> metrics;
  std::vector<TrainLogRecord> log;
  std::vector<double> loss_history;
  std::size_t eval_count = 0;
  Vector z_star;
  Timings timings;

  friend bool operator==(const RunArtifact&, const RunArtifact&) = default;
};

Json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const Json& j);
Json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const Json& j);
Json to_json(const MoeadConfig& c);
MoeadConfig moead_config_from_json(const Json& j);
Json to_json(const RunConfig& c);
RunConfig run_config_from_json(const Json& j);

/// Model document: variant tag, dimensions, flat parameters, bounds, index sets,
/// relation settings and, when given, the producing training config.
Json model_to_json(const SetModel& model, const BoxBounds& bounds,
                   const std::optional<TrainConfig>& train = std::nullopt);
SetModel model_from_json(const Json& j);

Json to_json(const MetricsRecord& r);
MetricsRecord metrics_record_from_json(const Json& j);
Json to_json(const TrainLogRecord& r);
TrainLogRecord log_record_from_json(const Json& j);
Json to_json(const SampleTriple& t);
SampleTriple sample_from_json(const Json& j);

Json to_json(const RunArtifact& a);
RunArtifact artifact_from_json(const Json& j);

/// Artifact without its timings, for reproducibility comparisons.
Json deterministic_view(const RunArtifact& a);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);
void save_artifact(const std::filesystem::path& path, const RunArtifact& a);
RunArtifact load_artifact(const std::filesystem::path& path);

/// One JSON object per line: iteration, mean_loss, eval_count, z_star.
void write_training_log(const std::filesystem::path& path, const std::vector<TrainLogRecord>& log);

}  // namespace epsl
