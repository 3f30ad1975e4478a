#include "epsl/cli.hpp"

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>

#include "epsl/runner.hpp"

namespace epsl {

namespace {

struct RunFlags {
  RunConfig cfg;
  std::string method = "epsl";
  std::string variant = "plain";
  std::string relation = "sine";
  std::string relation_space;
  std::string optimizer = "sgd";
  std::string gradient = "es";
  std::vector<std::size_t> shared_idx;
  std::vector<std::size_t> base_idx;
  std::size_t budget = 0;
  std::string data_dir;
};

// Model and training flags shared by `train` and `compare`.
void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--problem", f.cfg.problem, "Problem name (syn, RE21, RE23, RE24, RE25, RE33, RE37)")
      ->required();
  app->add_option("--dim", f.cfg.dimension, "Decision dimension for the synthetic problem");
  app->add_option("--data-dir", f.data_dir, "Directory with reference fronts and bounds files");
  app->add_option("--variant", f.variant, "Set model variant")
      ->check(CLI::IsMember({"plain", "shared", "relation", "chain"}));
  app->add_option("--shared-idx", f.shared_idx, "Shared coordinates (0-based), shared variant")
      ->delimiter(',');
  app->add_option("--base-idx", f.base_idx, "Network-produced coordinates (0-based), relation variant")
      ->delimiter(',');
  app->add_option("--relation", f.relation, "Variable relation prior")
      ->check(CLI::IsMember({"sine", "poly"}));
  app->add_option("--relation-space", f.relation_space, "Relation coordinates")
      ->check(CLI::IsMember({"native", "unit"}));
  app->add_option("--vertices", f.cfg.model.vertices, "Polygonal chain vertex count K");
  app->add_option("--hidden", f.cfg.model.hidden, "Hidden layer width");
  app->add_option("--sharpness", f.cfg.model.sharpness, "Hidden softplus sharpness");
  app->add_option("--iters", f.cfg.train.iterations, "Training iterations T");
  app->add_option("--n-pref", f.cfg.train.preferences, "Preferences per iteration N");
  app->add_option("--k-es", f.cfg.train.es.samples, "Gaussian perturbations per preference K");
  app->add_option("--sigma", f.cfg.train.es.sigma, "ES smoothing radius, relative to box width");
  app->add_option("--eta", f.cfg.train.eta, "Step size");
  app->add_flag("--cosine", f.cfg.train.cosine_decay, "Cosine step-size decay");
  app->add_option("--optimizer", f.optimizer, "Parameter update rule")
      ->check(CLI::IsMember({"sgd", "adam"}));
  app->add_option("--gradient", f.gradient, "Gradient source (analytic needs a Jacobian)")
      ->check(CLI::IsMember({"es", "analytic"}));
  app->add_flag("--antithetic", f.cfg.train.es.antithetic, "Antithetic perturbation pairs");
  app->add_flag("--rank-shaping", f.cfg.train.es.rank_shaping, "Centred-rank fitness shaping in the ES estimate");
  app->add_flag("--tch-variant", f.cfg.train.es.tchebycheff_variant,
                "Follow only the maximising objective in the ES estimate");
  app->add_option("--epsilon", f.cfg.train.epsilon, "Utopia offset");
  app->add_option("--threads", f.cfg.train.threads, "Worker threads");
  app->add_option("--budget", f.budget, "Evaluation budget (sets iterations for EPSL)");
  app->add_option("--population", f.cfg.moead.population, "MOEA/D population size");
  app->add_option("--samples", f.cfg.sample_sizes, "Sample sizes drawn from the trained model")
      ->delimiter(',');
}

void finish_flags(RunFlags& f) {
  auto& c = f.cfg;
  c.method = parse_method(f.method);
  c.model.variant = parse_variant(f.variant);
  c.model.relation = parse_relation(f.relation);
  if (!f.relation_space.empty()) c.model.relation_space = parse_relation_space(f.relation_space);
  c.model.shared = f.shared_idx;
  if (c.model.variant == ModelVariant::shared && c.model.shared.empty()) {
    throw ConfigError("--variant shared needs --shared-idx");
  }
  if (!f.base_idx.empty()) c.model.base = f.base_idx;
  c.train.optimizer = parse_optimizer(f.optimizer);
  c.train.gradient = parse_gradient_source(f.gradient);
  c.moead.epsilon = c.train.epsilon;
  c.moead.seed = c.train.seed;
  if (f.budget > 0) {
    c.budget = f.budget;
    if (c.method == Method::epsl) c.train.iterations = iterations_for_budget(c.train, f.budget);
  }
}

std::filesystem::path resolve_out(const std::string& flag, const std::string& default_name) {
  if (flag.empty()) return default_out_dir() / default_name;
  std::filesystem::path p(flag);
  if (p.extension() == ".json") return p;
  return p / default_name;
}

std::filesystem::path log_path_for(const std::filesystem::path& artifact) {
  auto p = artifact;
  p.replace_extension(".log.jsonl");
  return p;
}

void print_metrics(std::ostream& out, const std::vector<MetricsRecord>& rows) {
  out << "# metrics in normalized objective space (ideal -> 0, nadir -> 1), HV reference 1.1\n";
  out << std::left << std::setw(12) << "method" << std::setw(8) << "seed" << std::setw(8) << "size"
      << std::setw(14) << "HV" << std::setw(14) << "dHV" << std::setw(14) << "IGD+" << "evals\n";
  for (const auto& r : rows) {
    out << std::left << std::setw(12) << r.method << std::setw(8) << r.seed << std::setw(8)
        << r.solutions << std::setw(14) << r.hv << std::setw(14)
        << (r.delta_hv ? std::to_string(*r.delta_hv) : "-") << std::setw(14)
        << (r.igd_plus ? std::to_string(*r.igd_plus) : "-") << r.eval_count << '\n';
  }
}

std::string artifact_name(const RunConfig& c) {
  const std::string tag = c.method == Method::epsl ? std::string(to_string(c.model.variant)) : "moead";
  return c.problem + "_" + tag + "_s" + std::to_string(c.train.seed) + ".json";
}

}  // namespace

std::filesystem::path default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("runs");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evolutionary Pareto set learning"};
  app.require_subcommand(1);

  RunFlags train_flags;
  std::string train_out;
  auto* train_cmd = app.add_subcommand("train", "Train a set model (or run the MOEA/D baseline) and write a run artifact");
  add_run_flags(train_cmd, train_flags);
  train_cmd->add_option("--seed", train_flags.cfg.train.seed, "Run seed");
  train_cmd->add_option("--method", train_flags.method, "Optimiser")
      ->check(CLI::IsMember({"epsl", "moead"}));
  train_cmd->add_option("--out", train_out, "Artifact file (.json) or directory");

  std::string sample_artifact, sample_out;
  std::size_t sample_count = 1000;
  std::optional<std::uint64_t> sample_seed;
  auto* sample_cmd = app.add_subcommand("sample", "Draw (lambda, x, F) triples from a trained model");
  sample_cmd->add_option("--artifact", sample_artifact, "Run artifact")->required();
  sample_cmd->add_option("--count", sample_count, "Number of samples");
  sample_cmd->add_option("--seed", sample_seed, "Sampling seed (default: the run seed)");
  sample_cmd->add_option("--out", sample_out, "Output file (.json) or directory");

  RunFlags cmp_flags;
  std::string cmp_out;
  std::size_t cmp_seeds = 1;
  std::uint64_t cmp_first_seed = 1;
  auto* cmp_cmd = app.add_subcommand("compare", "EPSL vs MOEA/D-TCH under equal evaluation budgets");
  add_run_flags(cmp_cmd, cmp_flags);
  cmp_cmd->add_option("--seeds", cmp_seeds, "Number of seeds");
  cmp_cmd->add_option("--seed", cmp_first_seed, "First seed");
  cmp_cmd->add_option("--out", cmp_out, "Report file (.json) or directory");

  std::vector<std::string> metric_artifacts;
  std::string metrics_out;
  auto* metrics_cmd = app.add_subcommand("metrics", "Report HV, dHV and IGD+ of run artifacts");
  metrics_cmd->add_option("--artifact", metric_artifacts, "Run artifacts")->required();
  metrics_cmd->add_option("--out", metrics_out, "Write records to this JSON file");

  std::string ui_artifact, ui_out;
  std::size_t ui_grid = 201;
  auto* ui_cmd = app.add_subcommand("export-ui", "Write the explorer bundle for a trained model");
  ui_cmd->add_option("--artifact", ui_artifact, "Run artifact")->required();
  ui_cmd->add_option("--grid", ui_grid, "Grid points per preference axis");
  ui_cmd->add_option("--out", ui_out, "Bundle file (.json) or directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*train_cmd) {
      finish_flags(train_flags);
      const auto& cfg = train_flags.cfg;
      auto problem = problem_for(cfg, train_flags.data_dir);
      const auto artifact = run(cfg, *problem);
      const auto path = resolve_out(train_out, artifact_name(cfg));
      save_artifact(path, artifact);
      if (!artifact.log.empty()) write_training_log(log_path_for(path), artifact.log);
      print_metrics(out, artifact.metrics);
      out << "evaluations: " << artifact.eval_count << " (+" << artifact.sample_eval_count
          << " for sampling)\nartifact: " << path.string() << '\n';
    } else if (*sample_cmd) {
      const auto artifact = load_artifact(sample_artifact);
      if (!artifact.model) throw ConfigError("artifact holds no set model");
      auto problem = problem_for(artifact.config);
      const auto seed = sample_seed.value_or(artifact.config.train.seed);
      const auto samples = draw_samples(*artifact.model, *problem, sample_count, seed,
                                        artifact.config.train.preference_dist);
      Json rows = Json::array();
      for (const auto& s : samples) rows.push_back(to_json(s));
      const auto path = resolve_out(sample_out, artifact.config.problem + "_samples.json");
      write_json(path, {{"schema_version", kSchemaVersion}, {"seed", seed}, {"samples", rows}});
      out << samples.size() << " samples: " << path.string() << '\n';
    } else if (*cmp_cmd) {
      finish_flags(cmp_flags);
      const std::size_t budget = cmp_flags.budget > 0 ? cmp_flags.budget : cmp_flags.cfg.budget;
      auto problem = problem_for(cmp_flags.cfg, cmp_flags.data_dir);
      std::vector<std::uint64_t> seeds(cmp_seeds);
      std::iota(seeds.begin(), seeds.end(), cmp_first_seed);
      const auto report = compare(cmp_flags.cfg, *problem, seeds, budget);
      print_metrics(out, report.rows);
      out << "# medians\n";
      for (const auto& s : report.summary) {
        out << std::left << std::setw(12) << s.method << " HV " << s.median_hv << "  dHV "
            << (s.median_delta_hv ? std::to_string(*s.median_delta_hv) : "-") << "  IGD+ "
            << (s.median_igd_plus ? std::to_string(*s.median_igd_plus) : "-") << '\n';
      }
      const auto path = resolve_out(cmp_out, cmp_flags.cfg.problem + "_compare.json");
      write_json(path, to_json(report));
      out << "report: " << path.string() << '\n';
    } else if (*metrics_cmd) {
      std::vector<MetricsRecord> rows;
      for (const auto& file : metric_artifacts) {
        const auto artifact = load_artifact(file);
        auto problem = problem_for(artifact.config);
        if (artifact.model) {
          for (std::size_t k = 0; k < artifact.config.sample_sizes.size(); ++k) {
            const std::size_t size = std::min(artifact.config.sample_sizes[k], artifact.samples.size());
            std::vector<ObjectiveVector> fs;
            for (std::size_t i = 0; i < size; ++i) fs.push_back(artifact.samples[i].f);
            const std::string label = k == 0 ? "EPSL" : "EPSL(" + std::to_string(size) + ")";
            rows.push_back(measure(*problem, label, artifact.config.train.seed, fs,
                                   artifact.eval_count, artifact.timings.optimize_ms));
          }
        } else {
          std::vector<ObjectiveVector> fs;
          for (const auto& ind : artifact.population) fs.push_back(ind.f);
          rows.push_back(measure(*problem, "MOEA/D-TCH", artifact.config.moead.seed, fs,
                                 artifact.eval_count, artifact.timings.optimize_ms));
        }
      }
      print_metrics(out, rows);
      if (!metrics_out.empty()) {
        Json j = Json::array();
        for (const auto& r : rows) j.push_back(to_json(r));
        write_json(metrics_out, {{"schema_version", kSchemaVersion}, {"space", "normalized"}, {"records", j}});
      }
    } else if (*ui_cmd) {
      const auto artifact = load_artifact(ui_artifact);
      auto problem = problem_for(artifact.config);
      const auto bundle = export_ui_bundle(artifact, *problem, ui_grid);
      const auto path = resolve_out(ui_out, artifact.config.problem + "_bundle.json");
      write_json(path, bundle);
      out << bundle["grid"]["count"].get<std::size_t>() << " grid points: " << path.string() << '\n';
    }
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"epsl"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace epsl
