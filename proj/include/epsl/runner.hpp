#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "epsl/artifact.hpp"
#include "epsl/metrics.hpp"

namespace epsl {

/// Child-stream keys of the run seed: model initialisation and set sampling
/// draw from streams that training never touches.
inline constexpr std::uint64_t kModelInitKey = 0x6d6f64656c000001ULL;
inline constexpr std::uint64_t kSamplingKey = 0x73616d706c000001ULL;

std::unique_ptr<Problem> problem_for(const RunConfig& cfg, const std::filesystem::path& data_dir = {});

/// Fills the model's m and n from the problem.
ModelConfig model_config_for(const RunConfig& cfg, const Problem& problem);

SetModel initial_model(const RunConfig& cfg, const Problem& problem);

/// `count` triples from the run's sampling stream; a larger count extends a smaller one.
std::vector<SampleTriple> draw_samples(const SetModel& model, const Problem& problem,
                                       std::size_t count, std::uint64_t seed,
                                       const PreferenceDistribution& dist = {});

/// Evaluations consumed per preference by one ES estimate.
std::size_t evals_per_preference(const TrainConfig& cfg);
/// Largest iteration count whose ES budget fits in `budget`.
std::size_t iterations_for_budget(const TrainConfig& cfg, std::size_t budget);

MetricsRecord measure(const Problem& problem, const std::string& method, std::uint64_t seed,
                      const std::vector<ObjectiveVector>& points, std::size_t eval_count,
                      double wall_time_ms);

RunArtifact run_epsl(const RunConfig& cfg, const Problem& problem);
RunArtifact run_baseline(const RunConfig& cfg, const Problem& problem);
RunArtifact run(const RunConfig& cfg, const Problem& problem);

struct MethodSummary {
  std::string method;
  double median_hv = 0.0;
  std::optional<double> median_delta_hv;
  std::optional<double> median_igd_plus;
};

struct CompareReport {
  std::string problem;
  std::size_t budget = 0;
  std::vector<MetricsRecord> rows;
  std::vector<MethodSummary> summary;
};

/// EPSL and MOEA/D-TCH on the same problem with equal evaluation budgets, one run per seed.
CompareReport compare(const RunConfig& base, const Problem& problem,
                      const std::vector<std::uint64_t>& seeds, std::size_t budget);
Json to_json(const CompareReport& r);

double median(std::vector<double> values);

/// Preference grid for the explorer: for m = 2, lambda_1 = i/(grid-1) with
/// lambda_1 increasing; otherwise the simplex lattice with grid-1 divisions.
std::vector<PreferenceVector> preference_grid(std::size_t m, std::size_t grid);

/// Explorer bundle: problem metadata, bounds, reference front, variant metadata and
/// the (lambda, x, F) grid, with a re-evaluation consistency stamp.
Json export_ui_bundle(const RunArtifact& artifact, const Problem& problem, std::size_t grid);

}  // namespace epsl
