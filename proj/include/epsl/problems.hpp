#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epsl/core.hpp"

namespace epsl {

struct ProblemSpec {
  std::string name;
  std::size_t n = 0;
  std::size_t m = 0;
  BoxBounds bounds;
  std::optional<ObjectiveVector> ideal_hint;
  std::optional<ObjectiveVector> nadir_hint;
  /// True when the hints were estimated by random sampling rather than loaded.
  bool hints_estimated = false;

  ProblemSpec(std::string name, std::size_t n, std::size_t m, BoxBounds bounds);
  void set_hints(ObjectiveVector ideal, ObjectiveVector nadir, bool estimated = false);
  bool has_hints() const { return ideal_hint.has_value() && nadir_hint.has_value(); }
};

/// Analytic Pareto-set relation: dependent coordinates as a function of the base ones.
struct PsRelation {
  std::vector<std::size_t> base;
  std::vector<std::size_t> dependent;
  std::function<Vector(std::span<const double>)> map;
};

struct GroundTruth {
  std::optional<PsRelation> ps_relation;
  /// Dense, mutually nondominated front samples; empty optional when no data exists.
  std::optional<std::vector<ObjectiveVector>> pf_samples;
};

/// A box-constrained multiobjective minimisation problem. Evaluation is pure
/// and safe to call concurrently.
class Problem {
 public:
  virtual ~Problem() = default;

  const ProblemSpec& spec() const noexcept { return spec_; }
  std::size_t num_variables() const noexcept { return spec_.n; }
  std::size_t num_objectives() const noexcept { return spec_.m; }
  const BoxBounds& bounds() const noexcept { return spec_.bounds; }

  /// Throws DomainError for out-of-box input or a non-finite result.
  ObjectiveVector evaluate(std::span<const double> x) const;

  virtual GroundTruth ground_truth() const { return {}; }

  /// Objective Jacobian (m rows of length n) when analytically available.
  virtual std::optional<std::vector<Vector>> jacobian(std::span<const double> x) const;

 protected:
  explicit Problem(ProblemSpec spec) : spec_(std::move(spec)) {}
  virtual void compute(std::span<const double> x, std::span<double> f) const = 0;

  ProblemSpec spec_;
};

ObjectiveVector evaluate(const Problem& problem, std::span<const double> x);

/// Maps evaluate over `xs`; a DomainError carries the index of the failing point.
std::vector<ObjectiveVector> evaluate_batch(const Problem& problem,
                                            const std::vector<DecisionVector>& xs);

GroundTruth ground_truth(const Problem& problem);

struct ProblemOptions {
  /// Decision dimension for the synthetic problem (0 selects the default of 3).
  std::size_t dimension = 0;
  /// Directory holding ref_front_<name>.txt and bounds_<name>.txt; empty uses default_data_dir().
  std::filesystem::path data_dir;
};

/// Builds a registered problem: "syn" (alias "synthetic"), RE21, RE23, RE24, RE25, RE33, RE37.
std::unique_ptr<Problem> make_problem(std::string_view name, const ProblemOptions& options = {});
std::vector<std::string> problem_names();

/// `EPSL_DATA_DIR` when set, otherwise the data directory of the source tree.
std::filesystem::path default_data_dir();

/// Reads one vector per line of whitespace-separated decimals; blank lines and
/// lines starting with '#' are skipped.
std::vector<Vector> load_vectors(const std::filesystem::path& path);
void save_vectors(const std::filesystem::path& path, const std::vector<Vector>& rows);

/// Synthetic sine-curve problem with n variables: x1 in [0,1], the rest in [-1,1].
std::unique_ptr<Problem> make_synthetic_problem(std::size_t n = 3);

}  // namespace epsl
