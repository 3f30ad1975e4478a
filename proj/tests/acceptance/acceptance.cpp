// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "epsl/cli.hpp"
#include "epsl/es_optim.hpp"
#include "epsl/metrics.hpp"
#include "epsl/moead.hpp"
#include "epsl/runner.hpp"
#include "oracles.hpp"

using namespace epsl;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(bool pass, const char* name, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
}

void info(const char* name, const std::string& detail) {
  std::printf("INFO %s: %s\n", name, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) s += fmt(k ? " %.4f" : "%.4f", v[k]);
  return s + "]";
}

const std::vector<std::uint64_t> kSeeds = {1000, 1001, 1002, 1003, 1004};

// Training setup shared by every learning criterion: N = 5, K = 5, T = 1000
// (30000 evaluations), Adam with step 0.003, sigma = 0.01 of the box width.
RunConfig training_config(const std::string& problem, ModelVariant variant) {
  RunConfig cfg;
  cfg.problem = problem;
  cfg.model.variant = variant;
  if (variant == ModelVariant::shared) cfg.model.shared = {2};
  cfg.model.vertices = 4;
  cfg.train.preferences = 5;
  cfg.train.es.samples = 5;
  cfg.train.iterations = 1000;
  cfg.train.optimizer = Optimizer::adam;
  cfg.train.eta = 0.003;
  cfg.train.es.sigma = 0.01;
  cfg.sample_sizes = {100, 1000};
  return cfg;
}

struct SeedRun {
  RunArtifact artifact;
  double seconds = 0.0;
};

std::vector<SeedRun> run_seeds(const RunConfig& base, const Problem& problem) {
  std::vector<SeedRun> out;
  for (auto seed : kSeeds) {
    RunConfig cfg = base;
    cfg.train.seed = seed;
    const auto t0 = Clock::now();
    auto a = run_epsl(cfg, problem);
    out.push_back({std::move(a), seconds_since(t0)});
  }
  return out;
}

// Delta HV of the 1000-solution sample of each run.
std::vector<double> delta_hvs(const std::vector<SeedRun>& runs, std::size_t which = 1) {
  std::vector<double> out;
  for (const auto& r : runs) out.push_back(*r.artifact.metrics.at(which).delta_hv);
  return out;
}

double max_seconds(const std::vector<SeedRun>& runs) {
  double s = 0.0;
  for (const auto& r : runs) s = std::max(s, r.seconds);
  return s;
}

void gradient_fidelity() {
  const auto t0 = Clock::now();
  auto syn = make_synthetic_problem();
  const auto& bounds = syn->bounds();
  double worst = 0.0;
  std::size_t probes = 0;
  for (auto variant : {ModelVariant::plain, ModelVariant::shared, ModelVariant::relation,
                       ModelVariant::chain}) {
    RunConfig cfg = training_config("syn", variant);
    const ModelConfig mc = model_config_for(cfg, *syn);
    RngStream rng(static_cast<std::uint64_t>(variant) + 31);
    for (int probe = 0; probe < 20; ++probe) {
      auto model = SetModel::create(mc, bounds, rng);
      // Random parameters around the initialisation.
      for (auto& p : model.parameters()) p += 0.3 * rng.normal();
      const auto pref = sample_preference(2, rng);
      Vector g(3);
      for (auto& v : g) v = rng.normal();
      const auto analytic = model.backward(pref, bounds, g).values;
      const Vector theta(model.parameters().begin(), model.parameters().end());
      const auto numeric = oracle::central_differences(
          [&](const Vector& p) {
            SetModel probe_model(mc, p);
            const auto x = probe_model.forward(pref, bounds);
            return g[0] * x[0] + g[1] * x[1] + g[2] * x[2];
          },
          theta, 1e-6);
      worst = std::max(worst, oracle::max_relative_error(analytic, numeric));
      ++probes;
    }
  }
  const double secs = seconds_since(t0);
  report(worst < 1e-4 && secs < 10.0, "gradient fidelity",
         fmt("4 variants x 20 probes (%zu), max relative error %.2e (< 1e-4), %.2f s (< 10 s)", probes,
             worst, secs));
}

void es_soundness() {
  const auto t0 = Clock::now();
  EsConfig es;
  es.samples = 100000;
  es.sigma = 0.01;
  RngStream rng(2024);
  const auto sq = estimate_gradient([](std::span<const double> x) { return x[0] * x[0]; }, Vector{1.0},
                                    Vector{1.0}, es, rng);
  const double z_sq = std::abs(sq.grad[0] - 2.0) / sq.std_error[0];
  const Vector c{1.5, -2.0, 0.25};
  const auto lin = estimate_gradient(
      [&](std::span<const double> x) { return c[0] * x[0] + c[1] * x[1] + c[2] * x[2]; },
      Vector{0.3, -0.7, 2.0}, Vector(3, 1.0), es, rng);
  double z_lin = 0.0;
  for (std::size_t i = 0; i < 3; ++i) z_lin = std::max(z_lin, std::abs(lin.grad[i] - c[i]) / lin.std_error[i]);
  const double secs = seconds_since(t0);
  report(z_sq <= 3.0 && z_lin <= 3.0 && secs < 5.0, "ES estimator soundness",
         fmt("x^2 at 1: %.5f (s.e. %.5f, %.2f s.e. from 2); linear: max %.2f s.e.; %.2f s (< 5 s)",
             sq.grad[0], sq.std_error[0], z_sq, z_lin, secs));
}

void synthetic_recovery(const std::vector<SeedRun>& runs, const Problem& syn) {
  const auto dh = delta_hvs(runs);
  std::vector<double> dev;
  for (const auto& r : runs) {
    std::vector<double> d;
    for (const auto& s : r.artifact.samples) {
      const double target = std::sin(10.0 * (s.x[0] - 0.5));
      d.push_back(std::abs(s.x[1] - target));
      d.push_back(std::abs(s.x[2] - target));
    }
    dev.push_back(median(d));
  }
  const double mdh = median(dh), mdev = median(dev), secs = max_seconds(runs);
  report(mdh < 2e-2 && mdev < 0.1 && secs < 60.0, "synthetic recovery",
         fmt("plain, seeds 1000-1004: median dHV %.4f (< 2e-2) %s, median |x_i - sin(10(x1-0.5))| %.3f (< 0.1), "
             "slowest run %.1f s (< 60 s)",
             mdh, list(dh).c_str(), mdev, secs));

  // Same runs with centred-rank shaping of the scalar values (not the plain estimator).
  RunConfig shaped = training_config("syn", ModelVariant::plain);
  shaped.train.es.rank_shaping = true;
  const auto shaped_runs = run_seeds(shaped, syn);
  const auto sdh = delta_hvs(shaped_runs);
  info("synthetic recovery with rank shaping",
       fmt("median dHV %.4f %s (informational, not the criterion)", median(sdh), list(sdh).c_str()));
}

void sine_relation(const std::vector<SeedRun>& plain, const Problem& syn) {
  const auto runs = run_seeds(training_config("syn", ModelVariant::relation), syn);
  int recovered = 0;
  std::string params;
  for (const auto& r : runs) {
    const auto alpha = r.artifact.model->relation_alpha();
    const auto beta = r.artifact.model->relation_beta();
    bool ok = true;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      ok = ok && std::abs(alpha[j] - 10.0) <= 0.5 && std::abs(beta[j] - 0.5) <= 0.05;
    }
    recovered += ok;
    params += fmt(" (%.2f,%.3f)", alpha[0], beta[0]);
  }
  const double rel = median(delta_hvs(runs)), base = median(delta_hvs(plain));
  const bool parity = std::abs(rel - base) <= 1e-2;
  report(recovered >= 3 || parity, "sine-relation recovery",
         fmt("alpha/beta within 0.5/0.05 of (10, 0.5) on %d of 5 seeds (need 3), (alpha,beta):%s; "
             "fallback dHV parity |%.4f - %.4f| = %.4f (<= 1e-2)",
             recovered, params.c_str(), rel, base, std::abs(rel - base)));
}

void shared_invariant(const Problem& syn) {
  std::size_t models = 0, mismatches = 0;
  for (const std::vector<std::size_t>& shared :
       {std::vector<std::size_t>{2}, std::vector<std::size_t>{1, 2}}) {
    RunConfig cfg = training_config("syn", ModelVariant::shared);
    cfg.model.shared = shared;
    for (auto seed : {kSeeds[0], kSeeds[1]}) {
      cfg.train.seed = seed;
      const auto a = run_epsl(cfg, syn);
      ++models;
      for (const auto& s : a.samples) {
        for (std::size_t i : shared) {
          if (std::bit_cast<std::uint64_t>(s.x[i]) != std::bit_cast<std::uint64_t>(a.samples[0].x[i])) {
            ++mismatches;
          }
        }
      }
    }
  }
  report(mismatches == 0, "shared-component invariant",
         fmt("%zu trained models x 1000 samples, %zu shared-coordinate mismatches at bit level", models,
             mismatches));
}

void chain_variant(const std::vector<SeedRun>& plain, const Problem& syn) {
  const auto runs = run_seeds(training_config("syn", ModelVariant::chain), syn);
  double worst = 0.0;
  for (const auto& r : runs) {
    const auto verts = r.artifact.model->chain_vertices(syn.bounds());
    for (const auto& s : r.artifact.samples) {
      double best = INFINITY;
      for (std::size_t k = 0; k + 1 < verts.size(); ++k) {
        double ab2 = 0.0, t = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
          ab2 += (verts[k + 1][i] - verts[k][i]) * (verts[k + 1][i] - verts[k][i]);
          t += (s.x[i] - verts[k][i]) * (verts[k + 1][i] - verts[k][i]);
        }
        t = ab2 > 0.0 ? std::clamp(t / ab2, 0.0, 1.0) : 0.0;
        double d = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
          const double q = verts[k][i] + t * (verts[k + 1][i] - verts[k][i]) - s.x[i];
          d += q * q;
        }
        best = std::min(best, std::sqrt(d));
      }
      worst = std::max(worst, best);
    }
  }
  const auto dh = delta_hvs(runs);
  const double mdh = median(dh);
  report(mdh < 5e-2 && worst < 1e-12, "polygonal chain",
         fmt("K=4: median dHV %.4f (< 5e-2) %s, max distance to chain %.1e (< 1e-12); plain median %.4f",
             mdh, list(dh).c_str(), worst, median(delta_hvs(plain))));
}

void metrics_oracles() {
  const auto t0 = Clock::now();
  RngStream rng(77);
  const Vector ref{1.1, 1.1};
  int outside = 0;
  for (int k = 0; k < 50; ++k) {
    const double q = rng.uniform(0.3, 3.0);
    std::vector<ObjectiveVector> front;
    const std::size_t count = 5 + rng.index(50);
    for (std::size_t i = 0; i < count; ++i) {
      const double a = rng.uniform();
      front.push_back({a, 1.0 - std::pow(a, q)});
    }
    RngStream mc = rng.child(static_cast<std::uint64_t>(k));
    const auto est = hypervolume_monte_carlo(front, ref, 1000000, mc);
    if (std::abs(est.value - hypervolume_exact(front, ref)) > 3.0 * est.std_error) ++outside;
  }
  int filter_mismatch = 0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t m = 2 + k % 3;
    std::vector<ObjectiveVector> pts(1 + rng.index(200), ObjectiveVector(m));
    for (auto& p : pts) {
      for (auto& v : p) v = k % 2 ? rng.uniform() : std::round(rng.uniform() * 8.0) / 8.0;
    }
    filter_mismatch += nondominated_filter(pts) != oracle::nondominated(pts);
  }
  const double igd = igd_plus({{0.5, 0.5}}, {{0.0, 1.0}, {1.0, 0.0}});
  // At 3 s.e. each instance misses with probability 0.0027; one miss in 50 is tolerated.
  report(outside <= 1 && filter_mismatch == 0 && igd == 0.5, "metrics oracle equivalence",
         fmt("HV sweep vs Monte-Carlo: %d of 50 outside 3 s.e.; filter vs O(n^2): %d of 1000 differ; "
             "IGD+ = %.17g; %.1f s",
             outside, filter_mismatch, igd, seconds_since(t0)));
}

void baseline_parity(const std::vector<SeedRun>& plain, const Problem& syn) {
  const double target = oracle::synthetic_front_hv(1.1);
  const auto ctx = metric_context(syn);
  std::vector<double> epsl_hv, moead_hv;
  int monotone = 0;
  std::size_t max_evals = 0;
  for (std::size_t k = 0; k < plain.size(); ++k) {
    const auto& a = plain[k].artifact;
    epsl_hv.push_back(a.metrics[1].hv);
    monotone += *a.metrics[1].delta_hv <= *a.metrics[0].delta_hv;
    max_evals = std::max(max_evals, a.eval_count);
    MoeadConfig mc;
    mc.population = 100;
    mc.seed = kSeeds[k];
    const auto run = run_moead(syn, mc, 30000);
    moead_hv.push_back(hypervolume(run.population.objectives(), ctx));
    max_evals = std::max(max_evals, run.population.eval_count);
  }
  const double ge = std::abs(median(epsl_hv) - target), gm = std::abs(median(moead_hv) - target);
  report(ge <= 0.05 && gm <= 0.05 && monotone == static_cast<int>(plain.size()) && max_evals <= 30000,
         "baseline parity",
         fmt("analytic front HV %.5f; median HV EPSL %.5f (gap %.4f), MOEA/D-TCH %.5f (gap %.4f), limit 0.05; "
             "EPSL(1000) dHV <= EPSL(100) dHV on %d of %zu seeds; max evaluations %zu (<= 30000)",
             target, median(epsl_hv), ge, median(moead_hv), gm, monotone, plain.size(), max_evals));
}

void determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "epsl_acceptance_determinism";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::vector<std::vector<std::string>> commands = {
      {"--problem", "syn", "--variant", "plain"},
      {"--problem", "syn", "--variant", "shared", "--shared-idx", "2"},
      {"--problem", "syn", "--variant", "relation", "--relation", "sine"},
      {"--problem", "syn", "--variant", "chain", "--vertices", "4"},
      {"--problem", "syn", "--method", "moead", "--budget", "3000"},
      {"--problem", "RE21", "--variant", "plain"}};
  int identical = 0;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    RunArtifact art[2];
    for (int rep = 0; rep < 2; ++rep) {
      std::vector<std::string> args{"train", "--iters", "200", "--seed", "9"};
      args.insert(args.end(), commands[c].begin(), commands[c].end());
      const auto path = dir / ("run" + std::to_string(c) + "_" + std::to_string(rep) + ".json");
      args.insert(args.end(), {"--out", path.string()});
      std::ostringstream out, err;
      if (run_cli(args, out, err) != 0) break;
      art[rep] = load_artifact(path);
    }
    identical += art[0].loss_history == art[1].loss_history && art[0].samples == art[1].samples &&
                 art[0].population == art[1].population && art[0].eval_count > 0;
  }
  report(identical == static_cast<int>(commands.size()), "determinism",
         fmt("%d of %zu train commands reproduce loss_history and sampled triples exactly", identical,
             commands.size()));
}

void re21(const Problem& re) {
  const auto runs = run_seeds(training_config("RE21", ModelVariant::plain), re);
  const auto dh = delta_hvs(runs);
  report(median(dh) < 5e-2, "RE21 order of magnitude",
         fmt("plain, seeds 1000-1004: median dHV %.4f (< 5e-2) %s", median(dh), list(dh).c_str()));
}

}  // namespace

int main() {
  auto syn = problem_for(training_config("syn", ModelVariant::plain));
  auto re = problem_for(training_config("RE21", ModelVariant::plain));

  gradient_fidelity();
  es_soundness();
  const auto plain = run_seeds(training_config("syn", ModelVariant::plain), *syn);
  synthetic_recovery(plain, *syn);
  sine_relation(plain, *syn);
  shared_invariant(*syn);
  chain_variant(plain, *syn);
  metrics_oracles();
  baseline_parity(plain, *syn);
  determinism();
  re21(*re);

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
