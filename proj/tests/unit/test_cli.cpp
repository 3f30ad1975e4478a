#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>

#include "epsl/artifact.hpp"
#include "epsl/cli.hpp"
#include "epsl/runner.hpp"

using namespace epsl;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("epsl_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Squared distance from p to the segment [a, b].
double segment_distance2(const Vector& p, const Vector& a, const Vector& b) {
  double ab2 = 0.0, t = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    ab2 += (b[i] - a[i]) * (b[i] - a[i]);
    t += (p[i] - a[i]) * (b[i] - a[i]);
  }
  t = ab2 > 0.0 ? std::clamp(t / ab2, 0.0, 1.0) : 0.0;
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = a[i] + t * (b[i] - a[i]) - p[i];
    d += q * q;
  }
  return d;
}

// Artifact text with the wall-clock fields removed.
std::string without_timings(const fs::path& path) {
  Json j = read_json(path);
  j.erase("timings");
  for (auto& r : j["metrics"]) r.erase("wall_time_ms");
  return j.dump();
}

}  // namespace

TEST_CASE("train: default ES budget") {
  const auto dir = scratch_dir("budget");
  const auto path = (dir / "run.json").string();
  const auto r = cli({"train", "--problem", "syn", "--variant", "plain", "--iters", "1000", "--n-pref", "5",
                      "--k-es", "5", "--seed", "1", "--out", path});
  REQUIRE(r.code == 0);
  const auto art = load_artifact(path);
  CHECK(art.eval_count == 1000 * 5 * 6);
  CHECK(art.eval_count <= 30000);
  CHECK(art.loss_history.size() == 1000);
  REQUIRE(art.model.has_value());
  CHECK(art.samples.size() == 1000);
  CHECK(art.metrics.size() == 2);
  CHECK(fs::exists(dir / "run.log.jsonl"));
  // Sampled triples re-evaluate exactly.
  auto syn = make_synthetic_problem();
  for (const auto& s : art.samples) CHECK(syn->evaluate(s.x) == s.f);
}

TEST_CASE("train: chain samples lie on the chain") {
  const auto dir = scratch_dir("chain");
  const auto path = (dir / "chain.json").string();
  const auto r = cli({"train", "--problem", "syn", "--variant", "chain", "--vertices", "4", "--iters", "20",
                      "--n-pref", "3", "--k-es", "3", "--seed", "2", "--out", path});
  REQUIRE(r.code == 0);
  const auto art = load_artifact(path);
  REQUIRE(art.model.has_value());
  auto syn = make_synthetic_problem();
  const auto vertices = art.model->chain_vertices(syn->bounds());
  REQUIRE(vertices.size() == 4);
  for (const auto& s : art.samples) {
    double best = INFINITY;
    for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
      best = std::min(best, segment_distance2(s.x, vertices[k], vertices[k + 1]));
    }
    CHECK(best < 1e-24);
  }
}

TEST_CASE("train: repeated runs give identical artifacts") {
  const auto dir = scratch_dir("repeat");
  const std::vector<std::string> base{"train", "--problem", "syn", "--variant", "shared", "--shared-idx", "2",
                                      "--iters", "30", "--n-pref", "4", "--k-es", "4", "--seed", "3"};
  auto first = base, second = base;
  first.insert(first.end(), {"--out", (dir / "a.json").string()});
  second.insert(second.end(), {"--out", (dir / "b.json").string()});
  REQUIRE(cli(first).code == 0);
  REQUIRE(cli(second).code == 0);
  CHECK(without_timings(dir / "a.json") == without_timings(dir / "b.json"));
}

TEST_CASE("train: output directory from the environment") {
  const auto dir = scratch_dir("env");
  ::setenv(kOutDirEnv, dir.c_str(), 1);
  const auto r = cli({"train", "--problem", "syn", "--iters", "5", "--n-pref", "2", "--k-es", "2", "--seed", "4"});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "syn_plain_s4.json"));
  CHECK(default_out_dir() == dir);
}

TEST_CASE("train: budget sets the iteration count") {
  const auto dir = scratch_dir("budget_flag");
  const auto path = (dir / "b.json").string();
  REQUIRE(cli({"train", "--problem", "syn", "--budget", "600", "--n-pref", "5", "--k-es", "5", "--out", path})
              .code == 0);
  const auto art = load_artifact(path);
  CHECK(art.eval_count == 600);
  CHECK(art.config.train.iterations == 20);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(cli({"train", "--problem", "nope"}).code == 2);
  CHECK(cli({"train", "--variant", "tree"}).code == 2);
  CHECK(cli({"train", "--variant", "shared"}).code == 2);
  CHECK(cli({"train", "--relation", "cubic"}).code == 2);
  CHECK(cli({"train", "--iters", "ten"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"sample"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("sample, metrics and export-ui") {
  const auto dir = scratch_dir("tools");
  const auto art_path = (dir / "run.json").string();
  REQUIRE(cli({"train", "--problem", "syn", "--iters", "10", "--n-pref", "3", "--k-es", "3", "--seed", "6",
               "--out", art_path})
              .code == 0);
  const auto art = load_artifact(art_path);

  SUBCASE("sample") {
    const auto out = (dir / "s.json").string();
    REQUIRE(cli({"sample", "--artifact", art_path, "--count", "50", "--out", out}).code == 0);
    const auto j = read_json(out);
    REQUIRE(j.at("samples").size() == 50);
    // Same seed: a prefix of the stored samples.
    for (std::size_t k = 0; k < 50; ++k) CHECK(sample_from_json(j.at("samples")[k]) == art.samples[k]);
  }

  SUBCASE("metrics") {
    const auto out = (dir / "m.json").string();
    const auto r = cli({"metrics", "--artifact", art_path, "--out", out});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("EPSL(1000)") != std::string::npos);
    const auto j = read_json(out);
    REQUIRE(j.at("records").size() == 2);
    CHECK(metrics_record_from_json(j.at("records")[0]).hv == art.metrics[0].hv);
    CHECK(cli({"metrics", "--artifact", (dir / "absent.json").string()}).code == 1);
  }

  SUBCASE("export-ui grid endpoints") {
    const auto out = (dir / "g2.json").string();
    REQUIRE(cli({"export-ui", "--artifact", art_path, "--grid", "2", "--out", out}).code == 0);
    const auto j = read_json(out);
    CHECK(j.at("kind") == "epsl-ui-bundle");
    CHECK(j.at("schema_version") == kSchemaVersion);
    REQUIRE(j.at("triples").size() == 2);
    CHECK(j.at("triples")[0].at("lambda").get<Vector>() == Vector{0.0, 1.0});
    CHECK(j.at("triples")[1].at("lambda").get<Vector>() == Vector{1.0, 0.0});
    CHECK(j.at("consistency").at("consistent") == true);
    CHECK(j.at("reference_front").size() == 2001);
  }

  SUBCASE("export-ui dense grid re-evaluates exactly") {
    const auto out = (dir / "g201.json").string();
    REQUIRE(cli({"export-ui", "--artifact", art_path, "--grid", "201", "--out", out}).code == 0);
    const auto j = read_json(out);
    REQUIRE(j.at("triples").size() == 201);
    auto syn = make_synthetic_problem();
    double prev = -1.0;
    for (const auto& t : j.at("triples")) {
      const auto lambda = t.at("lambda").get<Vector>();
      CHECK(lambda[0] > prev);
      prev = lambda[0];
      const auto x = t.at("x").get<Vector>();
      CHECK(syn->evaluate(x) == t.at("f").get<Vector>());
      CHECK(art.model->forward(PreferenceVector(lambda), syn->bounds()) == x);
    }
  }
}

TEST_CASE("export-ui needs a set model") {
  const auto dir = scratch_dir("moead");
  const auto path = (dir / "m.json").string();
  REQUIRE(cli({"train", "--problem", "syn", "--method", "moead", "--budget", "300", "--population", "20",
               "--out", path})
              .code == 0);
  CHECK(cli({"export-ui", "--artifact", path, "--out", (dir / "b.json").string()}).code == 2);
  CHECK(cli({"sample", "--artifact", path}).code == 2);
  const auto r = cli({"metrics", "--artifact", path});
  CHECK(r.code == 0);
  CHECK(r.out.find("MOEA/D-TCH") != std::string::npos);
}

TEST_CASE("compare: one row per method and seed") {
  const auto dir = scratch_dir("compare");
  const auto out = (dir / "c.json").string();
  const auto r = cli({"compare", "--problem", "syn", "--seeds", "2", "--budget", "600", "--n-pref", "5",
                      "--k-es", "5", "--population", "20", "--out", out});
  REQUIRE(r.code == 0);
  const auto j = read_json(out);
  const auto& rows = j.at("rows");
  CHECK(rows.size() == 6);
  std::map<std::string, int> per_method;
  for (const auto& row : rows) ++per_method[row.at("method").get<std::string>()];
  CHECK(per_method["EPSL"] == 2);
  CHECK(per_method["EPSL(1000)"] == 2);
  CHECK(per_method["MOEA/D-TCH"] == 2);
  // Prefix-consistent samples: the larger set never loses hypervolume.
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    if (rows[k].at("method") == "EPSL" && rows[k + 1].at("method") == "EPSL(1000)") {
      CHECK(rows[k + 1].at("delta_hv").get<double>() <= rows[k].at("delta_hv").get<double>());
    }
  }
  for (const auto& row : rows) CHECK(row.at("eval_count").get<std::size_t>() <= 600);
  CHECK(j.at("summary").size() == 3);
}
