// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 when
// any criterion fails.  Tolerances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fmab/harness.hpp"

using namespace fmab;
namespace fs = std::filesystem;

namespace {

constexpr double kCertificateSlack = 1e-12;
constexpr double kPlateauRelative = 1e-6;
constexpr double kNonsmoothValueTol = 0.05;
constexpr double kSlopeTarget = 0.5;
constexpr double kSlopeTol = 0.1;
constexpr double kLogRatioMax = 2.0;
constexpr double kMabRatioMax = 2.0;
constexpr double kHighBudgetRank = 1.5;
constexpr double kCertificateSeconds = 60.0;
constexpr double kReplicationSeconds = 10.0;
constexpr double kMabSeconds = 120.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RealVector cube_point(int dim, double bound, Rng& rng) {
  RealVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = bound * (2.0 * uniform_open01(rng) - 1.0);
  return v;
}

// mu/2 |x - x*|^2 + a |x - x*|_1 + c on [-1, 1]^d: strongly convex, Lipschitz.
ProblemPtr strongly_convex_vee(int d, const RealVector& xs, double a, double c) {
  BlackBox bb;
  bb.value = [xs, a, c](const RealVector& x) {
    const RealVector z = x - xs;
    return 0.5 * z.squaredNorm() + a * z.lpNorm<1>() + c;
  };
  bb.subgradient = [xs, a](const RealVector& x) {
    const RealVector z = x - xs;
    RealVector g = z;
    for (Eigen::Index j = 0; j < z.size(); ++j) g[j] += a * static_cast<double>((z[j] > 0) - (z[j] < 0));
    return g;
  };
  FunctionClass fc;
  fc.mu = 1.0;
  fc.R = 2.0 * std::sqrt(static_cast<double>(d));
  fc.M = fc.R + a * std::sqrt(static_cast<double>(d));
  return std::make_shared<const Problem>(
      make_black_box("sc_vee", d, bb, FeasibleSet::cube(d, 1.0), fc, KnownOptimum{c, xs}));
}

// 1/2 sum_j lambda_j (x_j - x*_j)^2 + c on [-1, 1]^d with lambda in [mu, L].
ProblemPtr strongly_convex_quadratic(const RealVector& lambda, const RealVector& xs, double c) {
  BlackBox bb;
  bb.value = [lambda, xs, c](const RealVector& x) {
    const RealVector z = x - xs;
    return 0.5 * z.dot(lambda.cwiseProduct(z)) + c;
  };
  bb.subgradient = [lambda, xs](const RealVector& x) -> RealVector { return lambda.cwiseProduct(x - xs); };
  const int d = static_cast<int>(xs.size());
  FunctionClass fc;
  fc.mu = lambda.minCoeff();
  fc.L = lambda.maxCoeff();
  fc.R = 2.0 * std::sqrt(static_cast<double>(d));
  fc.M = fc.L * fc.R;
  return std::make_shared<const Problem>(
      make_black_box("sc_quadratic", d, bb, FeasibleSet::cube(d, 1.0), fc, KnownOptimum{c, xs}));
}

int certificate_violations(const ProblemPtr& p, const OptimizerConfig& config, int horizon) {
  FirstOrderOracle oracle(p, NoiseModel::none(), 1);
  OptimizerState s = init_state(config, *p);
  const RateFunction g = certified_rate(config, *p, NoiseModel::none(), 0.0);
  int violations = 0;
  for (int k = 1; k <= horizon; ++k) {
    optimizer_step(s, config, oracle);
    if (evaluate(*p, s.x) - p->f_star() > g(k) + kCertificateSlack) ++violations;
  }
  return violations;
}

// Per-round and cumulative certificate checks recomputed from the trace.
std::int64_t trace_violations(const AllocatorState& state, const RegretTrace& trace) {
  std::vector<std::int64_t> counts(state.arms.size(), 1);
  std::int64_t bad = 0;
  for (const auto& e : trace.rounds) {
    const auto& rate = state.arms[static_cast<std::size_t>(e.arm)].rate;
    counts[static_cast<std::size_t>(e.arm)] = e.k_arm;
    if (!e.step_regret || !e.cum_regret) return -1;
    if (*e.step_regret > rate(e.k_arm - 1) + kCertificateSlack) ++bad;
    double certificates = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      for (std::int64_t k = 1; k <= counts[i]; ++k) certificates += state.arms[i].rate(k);
    }
    if (*e.cum_regret > certificates + kCertificateSlack) ++bad;
  }
  return bad;
}

std::vector<ArmSpec> homogeneous_half_arms(std::uint64_t seed) {
  Rng rng(seed);
  OptimizerConfig oc;
  oc.schedule = PgdSchedule::kLipschitz;
  std::vector<ArmSpec> arms;
  for (int i = 0; i < 3; ++i) {
    const RealVector xs = cube_point(20, 1.0, rng);
    arms.push_back({std::make_shared<const Problem>(make_max_affine(20, 10, xs, 0.0, 4.0, seed * 7 + i)), oc,
                    NoiseModel::none()});
  }
  return arms;
}

std::vector<ArmSpec> homogeneous_one_arms(std::uint64_t seed) {
  Rng rng(seed);
  OptimizerConfig oc;
  oc.schedule = PgdSchedule::kStronglyConvex;
  std::vector<ArmSpec> arms;
  for (int i = 0; i < 3; ++i) {
    const RealVector xs = cube_point(5, 0.5, rng);
    arms.push_back({strongly_convex_vee(5, xs, 1.0, 0.0), oc, NoiseModel::none()});
  }
  return arms;
}

constexpr std::int64_t kScalingGrid[] = {100, 1000, 10000};
constexpr int kScalingSeeds = 10;

std::vector<double> mean_regret_on_grid(const std::function<std::vector<ArmSpec>(std::uint64_t)>& family,
                                        std::int64_t& violations) {
  std::vector<double> out;
  for (std::int64_t T : kScalingGrid) {
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= kScalingSeeds; ++seed) {
      AllocatorState s = init(family(seed), 0.0, 0.0, seed);
      s.check_invariants = true;
      const RegretTrace trace = run_fmab(s, T);
      violations += trace.certificate_violations;
      total += trace.final_regret();
    }
    out.push_back(total / kScalingSeeds);
  }
  return out;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double exhaustive_infimum(const std::vector<double>& G, std::int64_t T, std::int64_t K) {
  if (K == 1) return G[static_cast<std::size_t>(T)];
  double best = kInf;
  for (std::int64_t k = 0; k <= T; ++k) {
    best = std::min(best, G[static_cast<std::size_t>(k)] + exhaustive_infimum(G, T - k, K - 1));
  }
  return best;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class Runner {
 public:
  Runner(fs::path config_dir, fs::path work_dir) : config_dir_(std::move(config_dir)), work_(std::move(work_dir)) {}

  ExperimentConfig config(const std::string& name, const std::string& tag) const {
    ExperimentConfig c = ExperimentConfig::load(config_dir_ / (name + ".cfg"));
    c.set("out", (work_ / tag / name).string());
    return c;
  }

  // First run of each config, kept for the reproducibility check.
  const ExperimentResult& result(const std::string& name) { return entry(name).first; }
  double seconds(const std::string& name) { return entry(name).second; }

  const fs::path& work() const { return work_; }

 private:
  fs::path config_dir_;
  fs::path work_;
  std::map<std::string, std::pair<ExperimentResult, double>> cache_;

  std::pair<ExperimentResult, double>& entry(const std::string& name) {
    if (auto it = cache_.find(name); it != cache_.end()) return it->second;
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentResult r = run_experiment(config(name, "a"));
    return cache_.emplace(name, std::make_pair(std::move(r), seconds_since(t0))).first->second;
  }
};

const std::vector<double>& values(const ExperimentResult& r, const std::string& metric) {
  return r.summary.per_repeat.at(metric);
}

// ---------------------------------------------------------------------------

Outcome rate_certificates() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kInstances = 20;
  int instances = 0, violations = 0;
  Rng rng(2024);
  const int pieces[] = {5, 10, 12};
  for (int n = 0; n < kInstances; ++n) {
    // convex Lipschitz: projected subgradient and triple averaging
    const RealVector xs = cube_point(20, 1.0, rng);
    const auto ma = std::make_shared<const Problem>(make_max_affine(20, pieces[n % 3], xs, 0.5 * (n % 3), 4.0, 500 + n));
    OptimizerConfig pgd;
    pgd.schedule = PgdSchedule::kLipschitz;
    violations += certificate_violations(ma, pgd, 1000);
    OptimizerConfig ta;
    ta.kind = OptimizerKind::kTripleAveraging;
    violations += certificate_violations(ma, ta, 1000);

    // convex smooth: accelerated gradient
    const RealVector xq = cube_point(20, 1.0, rng);
    const auto sq = std::make_shared<const Problem>(make_smooth_convex(20, xq, 0.0, 600 + n, xq.norm()));
    OptimizerConfig agd;
    agd.kind = OptimizerKind::kAgd;
    violations += certificate_violations(sq, agd, 500);

    // strongly convex Lipschitz: projected subgradient, 2 / (mu (k + 1))
    OptimizerConfig sc;
    sc.schedule = PgdSchedule::kStronglyConvex;
    violations += certificate_violations(strongly_convex_vee(5, cube_point(5, 0.8, rng), 1.0, 0.0), sc, 1000);
    const auto qa = std::make_shared<const Problem>(make_quadratic_arm(0.9 * (2.0 * uniform_open01(rng) - 1.0)));
    violations += certificate_violations(qa, sc, 1000);

    // strongly convex smooth: accelerated gradient with constant momentum
    RealVector lambda(10);
    for (int j = 0; j < 10; ++j) lambda[j] = 0.5 + 1.5 * uniform_open01(rng);
    violations += certificate_violations(strongly_convex_quadratic(lambda, cube_point(10, 0.9, rng), 0.0), agd, 300);
    instances += 6;
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < kCertificateSeconds,
          format("%d optimizer runs, %d violations, %.2f s", instances, violations, secs)};
}

Outcome regret_certificates(Runner& run) {
  std::int64_t harness = 0, recomputed = 0;
  int runs = 0;
  for (const char* name : {"smooth_det", "nonsmooth_det"}) {
    for (double v : values(run.result(name), "certificate_violations")) harness += static_cast<std::int64_t>(v);
    const ExperimentConfig c = run.config(name, "certs");
    for (int r = 0; r < c.repeats(); ++r) {
      const std::uint64_t seed = c.repeat_seed(r);
      AllocatorState s = init(build_arms(c, seed), 0.0, 0.0, seed);
      s.check_invariants = true;
      const RegretTrace trace = run_fmab(s, c.get_int("T", 0));
      harness += trace.certificate_violations;
      const auto bad = trace_violations(s, trace);
      recomputed += bad < 0 ? 1 : bad;
      ++runs;
    }
  }
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    AllocatorState s = init(build_bfi_instance(seed).arms, 0.0, 0.0, seed);
    s.check_invariants = true;
    const RegretTrace trace = run_fmab(s, 200);
    harness += trace.certificate_violations;
    const auto bad = trace_violations(s, trace);
    recomputed += bad < 0 ? 1 : bad;
    ++runs;
  }
  return {harness == 0 && recomputed == 0,
          format("%d deterministic runs, %lld allocator-flagged and %lld recomputed violations", runs,
                 static_cast<long long>(harness), static_cast<long long>(recomputed))};
}

Outcome smooth_plateau(Runner& run) {
  const auto& r = run.result("smooth_det");
  const auto& inc = values(r, "final_quarter_increase");
  const auto& arms = values(r, "final_quarter_arms");
  const auto& total = values(r, "final_regret");
  int ok = 0;
  for (std::size_t i = 0; i < inc.size(); ++i) {
    if (inc[i] <= kPlateauRelative * std::max(1.0, total[i]) && arms[i] == 1.0) ++ok;
  }
  const double secs = run.seconds("smooth_det");
  return {ok >= 9 && inc.size() == 10 && secs < kReplicationSeconds,
          format("%d/%zu seeds flat with one arm in the final quarter, %.2f s", ok, inc.size(), secs)};
}

Outcome nonsmooth_identification(Runner& run) {
  const auto& r = run.result("nonsmooth_det");
  const auto& correct = values(r, "identified_correct");
  const auto& value = values(r, "identified_value");
  int ok = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < correct.size(); ++i) {
    worst = std::max(worst, std::abs(value[i] - 0.5));
    if (correct[i] == 1.0 && std::abs(value[i] - 0.5) <= kNonsmoothValueTol) ++ok;
  }
  return {ok >= 9 && correct.size() == 10,
          format("%d/%zu seeds identify the 0.5 arm, max |value - 0.5| = %.4f", ok, correct.size(), worst)};
}

Outcome stochastic_pulls(Runner& run) {
  const auto& r = run.result("smooth_stoch");
  const auto& pulls = r.summary.extra.at("mean_pulls");
  std::string list;
  for (const auto& p : pulls) list += format("%s%.1f", list.empty() ? "" : " ", p.get<double>());
  return {r.summary.extra.at("best_arm_has_most_mean_pulls").get<bool>() && r.summary.repeats == 10,
          "mean pulls per arm: " + list + format(" (best arm %d)", r.summary.extra.at("best_arm_by_optimum").get<int>())};
}

Outcome bfi_stopping(Runner& run) {
  const auto& r = run.result("bfi_synthetic");
  const auto& stopped = values(r, "stopped");
  const auto& budget = values(r, "within_budget");
  const auto& eps = values(r, "regret_within_eps");
  int ok = 0;
  for (std::size_t i = 0; i < stopped.size(); ++i) {
    if (stopped[i] == 1.0 && budget[i] == 1.0 && eps[i] == 1.0) ++ok;
  }

  Eigen::MatrixXd slopes(2, 1);
  slopes << 0.5, -0.5;
  OptimizerConfig oc;
  oc.schedule = PgdSchedule::kLipschitz;
  const RealVector zero = RealVector::Zero(1);
  const RealVector off = RealVector::Constant(1, 0.3);
  std::vector<ArmSpec> arms = {
      {std::make_shared<const Problem>(make_max_affine_with_slopes(slopes, zero, 0.0, 1.0)), oc, NoiseModel::none()},
      {std::make_shared<const Problem>(make_max_affine_with_slopes(slopes, off, 1.0, 1.0)), oc, NoiseModel::none()}};
  AllocatorState s = init(arms, 0.0, 0.0, 1);
  std::vector<RateFunction> rates = {s.arms[0].rate, s.arms[1].rate};
  const std::vector<double> gaps = {0.0, 1.0};
  const std::int64_t bound = bfi_budget_bound(gaps, rates, 0.5);
  const BfiResult b = run_bfi(s, 0.5, 1000);
  const std::int64_t total = b.rounds_used + 2;
  const bool example = bound == 19 && !b.budget_limited && total <= 19 && b.r_b && *b.r_b <= 0.5;

  return {ok == 50 && stopped.size() == 50 && example,
          format("%d/%zu random instances stop within budget and eps; worked example budget %lld, pulls %lld, R_B %.3g",
                 ok, stopped.size(), static_cast<long long>(bound), static_cast<long long>(total),
                 b.r_b.value_or(kInf))};
}

Outcome regret_scaling() {
  std::int64_t violations = 0;
  const auto half = mean_regret_on_grid(homogeneous_half_arms, violations);
  const auto one = mean_regret_on_grid(homogeneous_one_arms, violations);
  std::vector<double> lt, lr, per_log;
  for (std::size_t i = 0; i < half.size(); ++i) {
    const double T = static_cast<double>(kScalingGrid[i]);
    lt.push_back(std::log(T));
    lr.push_back(std::log(half[i]));
    per_log.push_back(one[i] / std::log(T));
  }
  const double slope = least_squares_slope(lt, lr);
  const double spread = *std::max_element(per_log.begin(), per_log.end()) / *std::min_element(per_log.begin(), per_log.end());
  return {std::abs(slope - kSlopeTarget) <= kSlopeTol && spread <= kLogRatioMax && violations == 0,
          format("r=1/2 slope %.3f (R_O %.1f, %.1f, %.1f); r=1 R_O/log T in [%.2f, %.2f], spread %.3f",
                 slope, half[0], half[1], half[2], *std::min_element(per_log.begin(), per_log.end()),
                 *std::max_element(per_log.begin(), per_log.end()), spread)};
}

Outcome infimum_oracle() {
  std::vector<std::function<double(std::int64_t)>> tables;
  for (auto cls : {HardnessClass::kConvexLipschitz, HardnessClass::kSmoothConvex,
                   HardnessClass::kStronglyConvexLipschitz, HardnessClass::kStronglyConvexSmooth}) {
    HardnessFunction h;
    h.cls = cls;
    h.kappa = 4.0;
    tables.push_back([h](std::int64_t m) { return hardness_G(h, m); });
  }
  for (double p : {0.25, 0.5, 0.75}) tables.push_back([p](std::int64_t m) { return std::pow(static_cast<double>(m), p); });
  tables.push_back([](std::int64_t m) { return std::log1p(static_cast<double>(m)); });
  tables.push_back([](std::int64_t m) { return 1.0 - std::exp(-static_cast<double>(m)); });

  int cases = 0, mismatches = 0;
  for (const auto& G : tables) {
    std::vector<double> g;
    for (std::int64_t m = 0; m <= 16; ++m) g.push_back(G(m));
    for (std::int64_t K = 1; K <= 4; ++K) {
      for (std::int64_t T = 1; T <= 16; ++T) {
        ++cases;
        if (allocation_infimum(g, T, K) != exhaustive_infimum(g, T, K)) ++mismatches;
      }
    }
  }
  return {mismatches == 0, format("%d (G, K, T) cases, %d mismatches", cases, mismatches)};
}

Outcome mab_reduction(Runner& run) {
  const auto& r = run.result("mab_reduction");
  const bool decreasing = r.summary.extra.at("per_round_regret_decreasing").get<bool>();
  const double ratio = r.summary.extra.at("final_regret_ratio").get<double>();
  const double secs = run.seconds("mab_reduction");
  return {decreasing && ratio >= 1.0 / kMabRatioMax && ratio <= kMabRatioMax && secs < kMabSeconds,
          format("per-round regret decreasing: %s, functional/rucb final regret %.3f, %.2f s",
                 decreasing ? "yes" : "no", ratio, secs)};
}

Outcome allocator_comparison(Runner& run) {
  const auto& m = run.result("baseline_compare").summary.metrics;
  auto rank = [&](const std::string& a, int b) { return m.at("rank_" + a + "_B" + std::to_string(b)).mean; };
  bool ok = true;
  std::string detail;
  for (int b : {50, 100}) {
    ok = ok && rank("flcb", b) <= rank("sh", b);
    detail += format("B%d flcb %.2f vs sh %.2f; ", b, rank("flcb", b), rank("sh", b));
  }
  for (int b : {350, 500}) {
    ok = ok && rank("flcb", b) <= kHighBudgetRank;
    detail += format("B%d flcb %.2f; ", b, rank("flcb", b));
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome reproducibility(Runner& run) {
  int files = 0, differing = 0;
  for (const char* name : {"smooth_det", "nonsmooth_det", "smooth_stoch", "bfi_synthetic", "baseline_compare",
                           "mab_reduction"}) {
    run.result(name);
    run_experiment(run.config(name, "b"));
    const fs::path a = run.work() / "a" / name / "traces";
    const fs::path b = run.work() / "b" / name / "traces";
    if (!fs::exists(a)) continue;
    for (const auto& entry : fs::directory_iterator(a)) {
      ++files;
      const fs::path other = b / entry.path().filename();
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
    }
  }
  return {files > 0 && differing == 0, format("%d trace files compared, %d differ", files, differing)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria runner"};
  std::string config_dir = FMAB_CONFIG_DIR;
  std::string work_dir = (fs::temp_directory_path() / "fmab_acceptance").string();
  app.add_option("--configs", config_dir, "directory holding the experiment configs");
  app.add_option("--work", work_dir, "scratch directory for run outputs");
  CLI11_PARSE(app, argc, argv);

  std::error_code ec;
  fs::remove_all(work_dir, ec);
  Runner run(config_dir, work_dir);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"rate certificates", rate_certificates},
      {"allocator regret certificates", [&] { return regret_certificates(run); }},
      {"smooth deterministic plateau", [&] { return smooth_plateau(run); }},
      {"nonsmooth identification", [&] { return nonsmooth_identification(run); }},
      {"stochastic pull counts", [&] { return stochastic_pulls(run); }},
      {"stopping rule budget", [&] { return bfi_stopping(run); }},
      {"regret scaling", regret_scaling},
      {"allocation infimum", infimum_oracle},
      {"bandit reduction", [&] { return mab_reduction(run); }},
      {"allocator comparison", [&] { return allocator_comparison(run); }},
      {"reproducibility", [&] { return reproducibility(run); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(work_dir, ec);
  return failed == 0 ? 0 : 1;
}
