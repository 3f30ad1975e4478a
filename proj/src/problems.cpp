#include "epsl/problems.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#ifndef EPSL_DEFAULT_DATA_DIR
#define EPSL_DEFAULT_DATA_DIR "data"
#endif

namespace epsl {

ProblemSpec::ProblemSpec(std::string name_, std::size_t n_, std::size_t m_, BoxBounds bounds_)
    : name(std::move(name_)), n(n_), m(m_), bounds(std::move(bounds_)) {
  if (n < 2 || m < 2) throw DimensionError("problem needs n >= 2 and m >= 2");
  if (bounds.size() != n) throw DimensionError("bounds size does not match n");
}

void ProblemSpec::set_hints(ObjectiveVector ideal, ObjectiveVector nadir, bool estimated) {
  if (ideal.size() != m || nadir.size() != m) {
    throw DimensionError("ideal/nadir hints must have m components");
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!(ideal[j] < nadir[j])) {
      throw DomainError("ideal hint must lie strictly below nadir hint", j);
    }
  }
  ideal_hint = std::move(ideal);
  nadir_hint = std::move(nadir);
  hints_estimated = estimated;
}

ObjectiveVector Problem::evaluate(std::span<const double> x) const {
  if (x.size() != spec_.n) {
    throw DimensionError(spec_.name + ": decision vector has wrong dimension");
  }
  const std::size_t bad = spec_.bounds.first_violation(x);
  if (bad != spec_.n) {
    std::ostringstream msg;
    msg << spec_.name << ": x[" << bad << "] = " << x[bad] << " outside ["
        << spec_.bounds.lower()[bad] << ", " << spec_.bounds.upper()[bad] << "]";
    throw DomainError(msg.str());
  }
  ObjectiveVector f(spec_.m, 0.0);
  compute(x, f);
  if (!all_finite(f)) throw DomainError(spec_.name + ": non-finite objective value");
  return f;
}

std::optional<std::vector<Vector>> Problem::jacobian(std::span<const double>) const {
  return std::nullopt;
}

ObjectiveVector evaluate(const Problem& problem, std::span<const double> x) {
  return problem.evaluate(x);
}

std::vector<ObjectiveVector> evaluate_batch(const Problem& problem,
                                            const std::vector<DecisionVector>& xs) {
  std::vector<ObjectiveVector> out;
  out.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    try {
      out.push_back(problem.evaluate(xs[i]));
    } catch (const DomainError& e) {
      throw DomainError("batch item " + std::to_string(i) + ": " + e.what(), i);
    }
  }
  return out;
}

GroundTruth ground_truth(const Problem& problem) { return problem.ground_truth(); }

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("EPSL_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return EPSL_DEFAULT_DATA_DIR;
}

std::vector<Vector> load_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<Vector> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    Vector row;
    double v = 0.0;
    while (fields >> v) row.push_back(v);
    if (!fields.eof()) throw Error("malformed number in " + path.string());
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DimensionError("ragged rows in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void save_vectors(const std::filesystem::path& path, const std::vector<Vector>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17);
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << row[j];
    out << '\n';
  }
}

namespace {

// f1 = x1, f2 = (1+g)(1 - sqrt(x1/(1+g))), g = mean_i (x_i - sin(10(x1 - 0.5)))^2.
class SyntheticProblem final : public Problem {
 public:
  explicit SyntheticProblem(std::size_t n) : Problem(make_spec(n)) {}

  GroundTruth ground_truth() const override {
    GroundTruth truth;
    PsRelation rel;
    rel.base = {0};
    for (std::size_t i = 1; i < spec_.n; ++i) rel.dependent.push_back(i);
    const std::size_t dependents = rel.dependent.size();
    rel.map = [dependents](std::span<const double> base) {
      return Vector(dependents, std::sin(10.0 * (base[0] - 0.5)));
    };
    truth.ps_relation = std::move(rel);

    // f1 = s^2 spreads samples evenly in f2 and densely near the steep end.
    constexpr std::size_t kSamples = 2001;
    std::vector<ObjectiveVector> front;
    front.reserve(kSamples);
    for (std::size_t k = 0; k < kSamples; ++k) {
      const double s = static_cast<double>(k) / static_cast<double>(kSamples - 1);
      front.push_back({s * s, 1.0 - s});
    }
    truth.pf_samples = std::move(front);
    return truth;
  }

  std::optional<std::vector<Vector>> jacobian(std::span<const double> x) const override {
    const std::size_t n = x.size();
    const double nd = static_cast<double>(n - 1);
    const double target = std::sin(10.0 * (x[0] - 0.5));
    const double slope = 10.0 * std::cos(10.0 * (x[0] - 0.5));
    double g = 0.0;
    Vector dg(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
      const double d = x[i] - target;
      g += d * d / nd;
      dg[i] = 2.0 * d / nd;
      dg[0] -= 2.0 * d * slope / nd;
    }
    // f2 = G - sqrt(x1 G) with G = 1 + g; x1 is kept off zero where the root is singular.
    const double big_g = 1.0 + g;
    const double x1 = std::max(x[0], 1e-12);
    const double df_dg = 1.0 - std::sqrt(x1) / (2.0 * std::sqrt(big_g));
    std::vector<Vector> jac(2, Vector(n, 0.0));
    jac[0][0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) jac[1][i] = df_dg * dg[i];
    jac[1][0] -= std::sqrt(big_g) / (2.0 * std::sqrt(x1));
    return jac;
  }

 protected:
  void compute(std::span<const double> x, std::span<double> f) const override {
    const double target = std::sin(10.0 * (x[0] - 0.5));
    double g = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
      const double d = x[i] - target;
      g += d * d;
    }
    g /= static_cast<double>(x.size() - 1);
    f[0] = x[0];
    f[1] = (1.0 + g) * (1.0 - std::sqrt(x[0] / (1.0 + g)));
  }

 private:
  static ProblemSpec make_spec(std::size_t n) {
    if (n < 2) throw DimensionError("synthetic problem needs n >= 2");
    Vector lo(n, -1.0), hi(n, 1.0);
    lo[0] = 0.0;
    ProblemSpec spec("syn", n, 2, BoxBounds(std::move(lo), std::move(hi)));
    spec.set_hints({0.0, 0.0}, {1.0, 1.0});
    return spec;
  }
};

// Engineering design problems from the RE suite. Constraint violations are
// folded into the last objective exactly as the suite does.

double violation(double g) { return g < 0.0 ? -g : 0.0; }

void re21(std::span<const double> x, std::span<double> f) {
  constexpr double force = 10.0, e = 2.0e5, length = 200.0;
  const double r2 = std::numbers::sqrt2;
  f[0] = length * (2.0 * x[0] + r2 * x[1] + std::sqrt(x[2]) + x[3]);
  f[1] = (force * length / e) * (2.0 / x[0] + 2.0 * r2 / x[1] - 2.0 * r2 / x[2] + 2.0 / x[3]);
}

void re23(std::span<const double> x, std::span<double> f) {
  // Thicknesses are integer multiples of 0.0625 in.
  const double x1 = 0.0625 * std::nearbyint(x[0]);
  const double x2 = 0.0625 * std::nearbyint(x[1]);
  const double x3 = x[2], x4 = x[3];
  f[0] = 0.6224 * x1 * x3 * x4 + 1.7781 * x2 * x3 * x3 + 3.1661 * x1 * x1 * x4 +
         19.84 * x1 * x1 * x3;
  const double g0 = x1 - 0.0193 * x3;
  const double g1 = x2 - 0.00954 * x3;
  const double g2 = std::numbers::pi * x3 * x3 * x4 +
                    (4.0 / 3.0) * std::numbers::pi * x3 * x3 * x3 - 1296000.0;
  f[1] = violation(g0) + violation(g1) + violation(g2);
}

void re24(std::span<const double> x, std::span<double> f) {
  const double x1 = x[0], x2 = x[1];
  constexpr double e = 700000.0, sigma_b_max = 700.0, tau_max = 450.0, delta_max = 1.5;
  const double sigma_k = e * x1 * x1 / 100.0;
  const double sigma_b = 4500.0 / (x1 * x2);
  const double tau = 1800.0 / x2;
  const double delta = 56.2 * 10000.0 / (e * x1 * x2 * x2);
  f[0] = x1 + 120.0 * x2;
  f[1] = violation(1.0 - sigma_b / sigma_b_max) + violation(1.0 - tau / tau_max) +
         violation(1.0 - delta / delta_max) + violation(1.0 - sigma_b / sigma_k);
}

constexpr std::array<double, 42> kSpringWireDiameters = {
    0.009,  0.0095, 0.0104, 0.0118, 0.0128, 0.0132, 0.014, 0.015, 0.0162, 0.0173, 0.018,
    0.02,   0.023,  0.025,  0.028,  0.032,  0.035,  0.041, 0.047, 0.054,  0.063,  0.072,
    0.08,   0.092,  0.105,  0.12,   0.135,  0.148,  0.162, 0.177, 0.192,  0.207,  0.225,
    0.244,  0.263,  0.283,  0.307,  0.331,  0.362,  0.394, 0.4375, 0.5};

double nearest_wire_diameter(double v) {
  double best = kSpringWireDiameters[0];
  double best_diff = std::abs(best - v);
  for (double d : kSpringWireDiameters) {
    if (const double diff = std::abs(d - v); diff < best_diff) {
      best = d;
      best_diff = diff;
    }
  }
  return best;
}

void re25(std::span<const double> x, std::span<double> f) {
  const double x1 = std::nearbyint(x[0]);
  const double x2 = x[1];
  const double x3 = nearest_wire_diameter(x[2]);
  const double pi = std::numbers::pi;
  f[0] = pi * pi * x2 * x3 * x3 * (x1 + 2.0) / 4.0;

  const double cf = (4.0 * (x2 / x3) - 1.0) / (4.0 * (x2 / x3) - 4.0) + 0.615 * x3 / x2;
  constexpr double f_max = 1000.0, s = 189000.0, g_mod = 11.5e6, l_max = 14.0;
  constexpr double fp = 300.0, sigma_pm = 6.0, sigma_w = 1.25;
  const double k = g_mod * x3 * x3 * x3 * x3 / (8.0 * x1 * x2 * x2 * x2);
  const double lf = f_max / k + 1.05 * (x1 + 2.0) * x3;
  const double sigma_p = fp / k;

  const std::array<double, 6> g = {
      -(8.0 * cf * f_max * x2) / (pi * x3 * x3 * x3) + s,
      -lf + l_max,
      -3.0 + x2 / x3,
      -sigma_p + sigma_pm,
      -sigma_p - (f_max - fp) / k - 1.05 * (x1 + 2.0) * x3 + lf,
      sigma_w - (f_max - fp) / k,
  };
  f[1] = 0.0;
  for (double gi : g) f[1] += violation(gi);
}

void re33(std::span<const double> x, std::span<double> f) {
  const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3];
  const double sq = x2 * x2 - x1 * x1;
  const double cu = x2 * x2 * x2 - x1 * x1 * x1;
  f[0] = 4.9e-5 * sq * (x4 - 1.0);
  f[1] = 9.82e6 * sq / (x3 * x4 * cu);
  // The suite uses 3.14 here rather than pi.
  const double g0 = (x2 - x1) - 20.0;
  const double g1 = 0.4 - x3 / (3.14 * sq);
  const double g2 = 1.0 - 2.22e-3 * x3 * cu / (sq * sq);
  const double g3 = 2.66e-2 * x3 * x4 * cu / sq - 900.0;
  f[2] = violation(g0) + violation(g1) + violation(g2) + violation(g3);
}

void re37(std::span<const double> x, std::span<double> f) {
  const double a = x[0], ha = x[1], oa = x[2], optt = x[3];
  f[0] = 0.692 + 0.477 * a - 0.687 * ha - 0.080 * oa - 0.0650 * optt - 0.167 * a * a -
         0.0129 * ha * a + 0.0796 * ha * ha - 0.0634 * oa * a - 0.0257 * oa * ha +
         0.0877 * oa * oa - 0.0521 * optt * a + 0.00156 * optt * ha + 0.00198 * optt * oa +
         0.0184 * optt * optt;
  f[1] = 0.153 - 0.322 * a + 0.396 * ha + 0.424 * oa + 0.0226 * optt + 0.175 * a * a +
         0.0185 * ha * a - 0.0701 * ha * ha - 0.251 * oa * a + 0.179 * oa * ha +
         0.0150 * oa * oa + 0.0134 * optt * a + 0.0296 * optt * ha + 0.0752 * optt * oa +
         0.0192 * optt * optt;
  f[2] = 0.370 - 0.205 * a + 0.0307 * ha + 0.108 * oa + 1.019 * optt - 0.135 * a * a +
         0.0141 * ha * a + 0.0998 * ha * ha + 0.208 * oa * a - 0.0301 * oa * ha -
         0.226 * oa * oa + 0.353 * optt * a - 0.0497 * optt * oa - 0.423 * optt * optt +
         0.202 * ha * a * a - 0.281 * oa * a * a - 0.342 * ha * ha * a - 0.245 * ha * ha * oa +
         0.281 * oa * oa * ha - 0.184 * optt * optt * a - 0.281 * ha * a * oa;
}

using ObjectiveFn = void (*)(std::span<const double>, std::span<double>);

struct ReEntry {
  const char* name;
  std::size_t m;
  Vector lower;
  Vector upper;
  ObjectiveFn fn;
};

const std::vector<ReEntry>& re_registry() {
  static const std::vector<ReEntry> entries = [] {
    const double r2 = std::numbers::sqrt2;
    return std::vector<ReEntry>{
        {"RE21", 2, {1.0, r2, r2, 1.0}, {3.0, 3.0, 3.0, 3.0}, &re21},
        {"RE23", 2, {1.0, 1.0, 10.0, 10.0}, {100.0, 100.0, 200.0, 240.0}, &re23},
        {"RE24", 2, {0.5, 0.5}, {4.0, 50.0}, &re24},
        {"RE25", 2, {1.0, 0.6, 0.09}, {70.0, 3.0, 0.5}, &re25},
        {"RE33", 3, {55.0, 75.0, 1000.0, 11.0}, {80.0, 110.0, 3000.0, 20.0}, &re33},
        {"RE37", 3, {0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0}, &re37},
    };
  }();
  return entries;
}

class ReProblem final : public Problem {
 public:
  ReProblem(const ReEntry& entry, std::filesystem::path data_dir)
      : Problem(ProblemSpec(entry.name, entry.lower.size(), entry.m,
                            BoxBounds(entry.lower, entry.upper))),
        fn_(entry.fn),
        data_dir_(std::move(data_dir)) {
    load_or_estimate_hints();
  }

  GroundTruth ground_truth() const override {
    GroundTruth truth;
    const auto path = data_dir_ / ("ref_front_" + spec_.name + ".txt");
    if (std::filesystem::exists(path)) {
      auto rows = load_vectors(path);
      for (const auto& r : rows) {
        if (r.size() != spec_.m) throw DimensionError("reference front has wrong width: " + path.string());
      }
      truth.pf_samples = std::move(rows);
    }
    return truth;
  }

 protected:
  void compute(std::span<const double> x, std::span<double> f) const override { fn_(x, f); }

 private:
  void load_or_estimate_hints() {
    const auto path = data_dir_ / ("bounds_" + spec_.name + ".txt");
    if (std::filesystem::exists(path)) {
      auto rows = load_vectors(path);
      if (rows.size() != 2) throw Error("expected ideal and nadir rows in " + path.string());
      spec_.set_hints(rows[0], rows[1]);
      return;
    }
    // Min/max over uniform random designs, seeded so every run agrees.
    constexpr std::size_t kProbes = 100000;
    RngStream rng(0x5eed0000ULL + spec_.n * 31 + spec_.m);
    Vector lo(spec_.m, std::numeric_limits<double>::infinity());
    Vector hi(spec_.m, -std::numeric_limits<double>::infinity());
    Vector x(spec_.n), f(spec_.m);
    for (std::size_t k = 0; k < kProbes; ++k) {
      for (std::size_t i = 0; i < spec_.n; ++i) {
        x[i] = rng.uniform(spec_.bounds.lower()[i], spec_.bounds.upper()[i]);
      }
      fn_(x, f);
      for (std::size_t j = 0; j < spec_.m; ++j) {
        if (!std::isfinite(f[j])) continue;
        lo[j] = std::min(lo[j], f[j]);
        hi[j] = std::max(hi[j], f[j]);
      }
    }
    for (std::size_t j = 0; j < spec_.m; ++j) {
      if (!(lo[j] < hi[j])) hi[j] = lo[j] + 1.0;
    }
    spec_.set_hints(std::move(lo), std::move(hi), true);
  }

  ObjectiveFn fn_;
  std::filesystem::path data_dir_;
};

std::string upper_case(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::unique_ptr<Problem> make_synthetic_problem(std::size_t n) {
  return std::make_unique<SyntheticProblem>(n);
}

std::unique_ptr<Problem> make_problem(std::string_view name, const ProblemOptions& options) {
  const std::string key = upper_case(name);
  if (key == "SYN" || key == "SYNTHETIC") {
    return make_synthetic_problem(options.dimension == 0 ? 3 : options.dimension);
  }
  for (const auto& entry : re_registry()) {
    if (key == entry.name) {
      if (options.dimension != 0 && options.dimension != entry.lower.size()) {
        throw ConfigError(std::string(entry.name) + " has a fixed dimension of " +
                          std::to_string(entry.lower.size()));
      }
      return std::make_unique<ReProblem>(
          entry, options.data_dir.empty() ? default_data_dir() : options.data_dir);
    }
  }
  throw ConfigError("unknown problem '" + std::string(name) + "'");
}

std::vector<std::string> problem_names() {
  std::vector<std::string> names{"syn"};
  for (const auto& entry : re_registry()) names.emplace_back(entry.name);
  return names;
}

}  // namespace epsl
