#include "fmab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <thread>

#include "fmab/random.hpp"

namespace fmab {

namespace {

// ---------------------------------------------------------------------------
// Config helpers

NoiseModel noise_from(const ExperimentConfig& c, const std::string& fallback) {
  const std::string kind = c.get_string("noise", fallback);
  if (kind == "none") return NoiseModel::none();
  if (kind == "gaussian_gradient") return NoiseModel::gaussian_gradient(c.get_double("sigma", 2.0));
  if (kind == "gaussian_value") return NoiseModel::gaussian_value(c.get_double("sigma", 1.0));
  if (kind == "cauchy") return NoiseModel::cauchy(c.get_double("noise_scale", 1.0));
  throw Error(ErrorCode::kConfiguration, "unknown noise model '" + kind + "'");
}

PgdSchedule schedule_from(const std::string& name) {
  if (name == "auto") return PgdSchedule::kAuto;
  if (name == "lipschitz") return PgdSchedule::kLipschitz;
  if (name == "strongly_convex") return PgdSchedule::kStronglyConvex;
  throw Error(ErrorCode::kConfiguration, "unknown schedule '" + name + "'");
}

OptimizerConfig optimizer_from(const ExperimentConfig& c, const std::string& fallback) {
  OptimizerConfig oc;
  oc.kind = optimizer_from_name(c.get_string("optimizer", fallback));
  oc.schedule = schedule_from(c.get_string("schedule", "auto"));
  oc.rate_scale = c.get_double("rate_scale", 1.0);
  oc.gamma = c.get_double("gamma", 1.0);
  if (c.has("lipschitz")) oc.lipschitz_override = c.get_double("lipschitz", 1.0);
  return oc;
}

struct Defaults {
  int K;
  int dim;
  std::int64_t T;
  const char* optimizer;
  const char* noise;
  double delta;
  std::vector<double> minima;
};

Defaults defaults_for(const std::string& experiment) {
  if (experiment == "smooth_det") return {3, 20, 200, "agd", "none", 0.0, {0.0, 0.5, 1.0}};
  if (experiment == "nonsmooth_det") return {3, 20, 1000, "triple_avg", "none", 0.0, {0.5, 1.0, 1.5}};
  if (experiment == "smooth_stoch") return {3, 20, 1500, "sagd", "gaussian_gradient", 0.05, {0.0, 0.5, 1.0}};
  if (experiment == "baseline_compare") return {10, 10, 500, "sagd", "gaussian_gradient", 0.05, {}};
  if (experiment == "mab_reduction") return {10, 1, 5000, "pgd", "cauchy", 0.0, {}};
  return {3, 20, 200, "pgd", "none", 0.0, {}};
}

int config_K(const ExperimentConfig& c, const Defaults& d) {
  const auto K = c.get_int("K", d.K);
  if (K < 1) throw Error(ErrorCode::kConfiguration, "K must be >= 1");
  return static_cast<int>(K);
}

std::vector<double> minima_for(const ExperimentConfig& c, const Defaults& d, int K, double step) {
  std::vector<double> minima = c.get_list("minima", {});
  if (minima.empty()) {
    if (static_cast<int>(d.minima.size()) == K) return d.minima;
    for (int i = 0; i < K; ++i) minima.push_back(step * i);
    return minima;
  }
  if (static_cast<int>(minima.size()) != K) throw Error(ErrorCode::kConfiguration, "minima needs K entries");
  return minima;
}

RealVector uniform_cube(int dim, Rng& rng) {
  RealVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = 2.0 * uniform_open01(rng) - 1.0;
  return v;
}

RealVector unit_direction(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RealVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = normal(rng);
  return v / v.norm();
}

// ---------------------------------------------------------------------------
// Parallel repeats

template <class R>
std::vector<R> run_repeats(const ExperimentConfig& c, const std::function<R(int)>& body) {
  const int repeats = c.repeats();
  std::int64_t threads = c.get_int("threads", 0);
  if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<std::int64_t>(threads, repeats);
  std::vector<R> results(static_cast<std::size_t>(repeats));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(repeats));
  auto worker = [&](int first) {
    for (int r = first; r < repeats; r += static_cast<int>(threads)) {
      try {
        results[static_cast<std::size_t>(r)] = body(r);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::string repeat_name(const char* prefix, int r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "traces/%s%03d.csv", prefix, r);
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int argmin(const std::vector<double>& xs) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(xs.size()); ++i) {
    if (xs[static_cast<std::size_t>(i)] < xs[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

int rank_of(const std::vector<ArmSpec>& arms, int pick) {
  const double f = arms[static_cast<std::size_t>(pick)].problem->f_star();
  int rank = 1;
  for (const auto& a : arms) {
    if (a.problem->f_star() < f) ++rank;
  }
  return rank;
}

nlohmann::json finish_manifest(const ExperimentConfig& c, const std::string& experiment, ExperimentResult& res) {
  nlohmann::json seeds = nlohmann::json::array();
  for (int r = 0; r < c.repeats(); ++r) seeds.push_back(c.repeat_seed(r));
  nlohmann::json arts = nlohmann::json::array();
  for (const auto& a : res.artifacts) arts.push_back({{"path", a.path}, {"sha256", a.sha256}});
  return {{"experiment", experiment}, {"config", c.echo()}, {"repeats", c.repeats()}, {"seeds", seeds},
          {"artifacts", arts}};
}

void write_outputs(const ExperimentConfig& c, const std::string& experiment, ExperimentResult& res,
                   const std::vector<std::pair<std::string, std::string>>& files) {
  const std::string out = c.out_dir();
  if (!out.empty()) {
    for (const auto& [rel, bytes] : files) write_artifact(out, rel, bytes, res.artifacts);
    write_artifact(out, "summary.json", res.summary.to_json().dump(2) + "\n", res.artifacts);
  }
  res.manifest = finish_manifest(c, experiment, res);
  if (!out.empty()) {
    std::vector<Artifact> ignored;
    write_artifact(out, "manifest.json", res.manifest.dump(2) + "\n", ignored);
  }
}

// ---------------------------------------------------------------------------
// FMAB family: smooth_det, nonsmooth_det, smooth_stoch

struct FmabRepeat {
  RegretTrace trace;
  std::vector<double> init_values;
  std::vector<double> final_values;  // observed current values
  std::vector<double> final_lcb;
  std::vector<double> arm_optima;
  double f_star = 0.0;
};

std::string curves_csv(const std::vector<FmabRepeat>& reps) {
  const int K = static_cast<int>(reps.front().init_values.size());
  std::vector<std::vector<std::vector<double>>> curves;
  std::size_t rows = 0;
  for (const auto& r : reps) {
    curves.push_back(arm_value_curves(r.init_values, r.trace, r.f_star));
    rows = std::max(rows, curves.back().size());
  }
  std::string out = "t,cum_regret_mean";
  for (int i = 0; i < K; ++i) out += ",gap_arm" + std::to_string(i) + "_mean";
  for (int i = 0; i < K; ++i) out += ",value_arm" + std::to_string(i) + "_mean";
  out += '\n';
  const double n = static_cast<double>(reps.size());
  for (std::size_t t = 0; t < rows; ++t) {
    double cum = 0.0;
    std::vector<double> gap(static_cast<std::size_t>(K), 0.0);
    std::vector<double> val(static_cast<std::size_t>(K), 0.0);
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const auto& rounds = reps[r].trace.rounds;
      if (t > 0 && !rounds.empty()) cum += rounds[std::min(t, rounds.size()) - 1].cum_regret.value_or(0.0);
      const auto& row = curves[r][std::min(t, curves[r].size() - 1)];
      for (int i = 0; i < K; ++i) {
        gap[static_cast<std::size_t>(i)] += row[static_cast<std::size_t>(i)] - reps[r].arm_optima[static_cast<std::size_t>(i)];
        val[static_cast<std::size_t>(i)] += row[static_cast<std::size_t>(i)];
      }
    }
    out += std::to_string(t) + "," + fmt(cum / n);
    for (double g : gap) out += "," + fmt(g / n);
    for (double v : val) out += "," + fmt(v / n);
    out += '\n';
  }
  return out;
}

ExperimentResult run_fmab_family(const ExperimentConfig& c, const std::string& experiment) {
  const Defaults d = defaults_for(experiment);
  const std::int64_t T = c.get_int("T", d.T);
  if (T < 1) throw Error(ErrorCode::kConfiguration, "T must be >= 1");
  const double delta = c.get_double("delta", d.delta);
  const double eps = c.get_double("eps", 0.0);
  const bool heuristic = c.get_bool("heuristic", false);
  const bool check = c.get_bool("check_invariants", true);

  const auto reps = run_repeats<FmabRepeat>(c, [&](int r) {
    const std::uint64_t seed = c.repeat_seed(r);
    const auto arms = build_arms(c, seed);
    AllocatorState state = init(arms, delta, eps, seed);
    if (heuristic) heuristic_rate_mode(state);
    state.check_invariants = check;
    FmabRepeat out;
    for (const auto& a : state.arms) {
      out.init_values.push_back(a.exact_value());
      out.arm_optima.push_back(a.problem->f_star());
    }
    out.f_star = state.f_star.value_or(0.0);
    out.trace = run_fmab(state, T);
    for (const auto& a : state.arms) {
      out.final_values.push_back(a.current_value);
      out.final_lcb.push_back(a.lcb);
    }
    return out;
  });

  ExperimentResult res;
  res.summary.experiment = experiment;
  res.summary.repeats = c.repeats();
  std::vector<std::pair<std::string, std::string>> files;
  const bool write_traces = c.get_bool("write_traces", true);
  const int K = static_cast<int>(reps.front().init_values.size());
  for (int r = 0; r < static_cast<int>(reps.size()); ++r) {
    const FmabRepeat& rep = reps[static_cast<std::size_t>(r)];
    const auto& rounds = rep.trace.rounds;
    const auto n = static_cast<std::int64_t>(rounds.size());
    const std::int64_t quarter = n / 4;
    const double final_r = rep.trace.final_regret();
    const double before = n - quarter > 0 ? rounds[static_cast<std::size_t>(n - quarter - 1)].cum_regret.value_or(0.0) : 0.0;
    std::vector<int> seen;
    for (std::int64_t t = n - quarter; t < n; ++t) {
      const int a = rounds[static_cast<std::size_t>(t)].arm;
      if (std::find(seen.begin(), seen.end(), a) == seen.end()) seen.push_back(a);
    }
    const int best_true = argmin(rep.arm_optima);
    const int identified = argmin(rep.final_values);
    const int lcb_arm = argmin(rep.final_lcb);
    std::int64_t most = 0;
    for (auto p : rep.trace.pulls) most = std::max(most, p);

    auto& s = res.summary;
    s.add("final_regret", final_r);
    s.add("final_quarter_increase", final_r - before);
    s.add("final_quarter_arms", static_cast<double>(seen.size()));
    s.add("identified_arm", identified);
    s.add("identified_value", rep.final_values[static_cast<std::size_t>(identified)]);
    s.add("identified_correct", rep.arm_optima[static_cast<std::size_t>(identified)] == rep.arm_optima[static_cast<std::size_t>(best_true)] ? 1.0 : 0.0);
    s.add("lcb_arm", lcb_arm);
    s.add("best_arm_most_pulled", rep.trace.pulls[static_cast<std::size_t>(best_true)] == most ? 1.0 : 0.0);
    s.add("certificate_violations", static_cast<double>(rep.trace.certificate_violations));
    s.add("rounds", static_cast<double>(n));
    for (int i = 0; i < K; ++i) s.add("pulls_arm" + std::to_string(i), static_cast<double>(rep.trace.pulls[static_cast<std::size_t>(i)]));
    if (write_traces) files.emplace_back(repeat_name("repeat_", r), rep.trace.to_csv());
  }
  res.summary.finalize();
  std::vector<double> mean_pulls;
  for (int i = 0; i < K; ++i) mean_pulls.push_back(res.summary.metrics.at("pulls_arm" + std::to_string(i)).mean);
  const int best0 = argmin(reps.front().arm_optima);
  res.summary.extra["mean_pulls"] = mean_pulls;
  res.summary.extra["best_arm_by_optimum"] = best0;
  res.summary.extra["best_arm_has_most_mean_pulls"] =
      *std::max_element(mean_pulls.begin(), mean_pulls.end()) == mean_pulls[static_cast<std::size_t>(best0)];
  files.emplace_back("curves.csv", curves_csv(reps));
  for (auto& r : reps) res.traces.push_back(r.trace);
  write_outputs(c, experiment, res, files);
  return res;
}

// ---------------------------------------------------------------------------
// bfi_synthetic

struct BfiRepeat {
  BfiResult result;
  std::int64_t budget = 0;
  std::int64_t K = 0;
  double eps = 0.0;
};

ExperimentResult run_bfi_family(const ExperimentConfig& c) {
  const std::int64_t T_max = c.get_int("T_max", 1000000);
  const auto reps = run_repeats<BfiRepeat>(c, [&](int r) {
    const std::uint64_t seed = c.repeat_seed(r);
    BfiInstance inst = build_bfi_instance(seed);
    if (c.has("eps")) inst.eps = c.get_double("eps", inst.eps);
    AllocatorState state = init(inst.arms, 0.0, inst.eps, seed);
    std::vector<RateFunction> rates;
    for (const auto& a : state.arms) rates.push_back(a.rate);
    BfiRepeat out;
    out.budget = bfi_budget_bound(inst.gaps, rates, inst.eps);
    out.K = static_cast<std::int64_t>(inst.arms.size());
    out.eps = inst.eps;
    out.result = run_bfi(state, inst.eps, T_max);
    return out;
  });
  ExperimentResult res;
  res.summary.experiment = "bfi_synthetic";
  res.summary.repeats = c.repeats();
  std::vector<std::pair<std::string, std::string>> files;
  const bool write_traces = c.get_bool("write_traces", true);
  for (int r = 0; r < static_cast<int>(reps.size()); ++r) {
    const auto& rep = reps[static_cast<std::size_t>(r)];
    const std::int64_t total = rep.result.rounds_used + rep.K;
    const double rb = rep.result.r_b.value_or(kInf);
    auto& s = res.summary;
    s.add("K", static_cast<double>(rep.K));
    s.add("eps", rep.eps);
    s.add("stopped", rep.result.budget_limited ? 0.0 : 1.0);
    s.add("rounds_used", static_cast<double>(rep.result.rounds_used));
    s.add("total_pulls", static_cast<double>(total));
    s.add("budget_bound", static_cast<double>(rep.budget));
    s.add("within_budget", total <= rep.budget ? 1.0 : 0.0);
    s.add("simple_regret", rb);
    s.add("regret_within_eps", rb <= rep.eps ? 1.0 : 0.0);
    if (write_traces) files.emplace_back(repeat_name("repeat_", r), rep.result.trace.to_csv());
    res.traces.push_back(rep.result.trace);
  }
  res.summary.finalize();
  write_outputs(c, "bfi_synthetic", res, files);
  return res;
}

// ---------------------------------------------------------------------------
// mab_reduction

struct MabRepeat {
  RegretTrace functional;
  RegretTrace rucb;
};

ExperimentResult run_mab_family(const ExperimentConfig& c) {
  const Defaults d = defaults_for("mab_reduction");
  const int K = config_K(c, d);
  const std::int64_t T = c.get_int("T", d.T);
  std::vector<double> mu;
  for (int i = 0; i < K; ++i) mu.push_back(static_cast<double>(i) / K);
  const NoiseModel noise = noise_from(c, d.noise);
  RobustIndexConfig rc;
  rc.C = c.get_double("C", rc.C);
  rc.block_size = static_cast<int>(c.get_int("block_size", rc.block_size));
  rc.step_power = c.get_double("step_power", rc.step_power);

  const auto reps = run_repeats<MabRepeat>(c, [&](int r) {
    const std::uint64_t seed = c.repeat_seed(r);
    return MabRepeat{functional_mab_reduction(mu, noise, rc, T, seed), rucb_median(mu, noise, rc, T, seed)};
  });
  ExperimentResult res;
  res.summary.experiment = "mab_reduction";
  res.summary.repeats = c.repeats();
  std::vector<std::pair<std::string, std::string>> files;
  const bool write_traces = c.get_bool("write_traces", true);
  std::vector<double> mean_f(static_cast<std::size_t>(T), 0.0);
  std::vector<double> mean_r(static_cast<std::size_t>(T), 0.0);
  const double n = static_cast<double>(reps.size());
  for (int r = 0; r < static_cast<int>(reps.size()); ++r) {
    const auto& rep = reps[static_cast<std::size_t>(r)];
    res.summary.add("final_regret_functional", rep.functional.final_regret());
    res.summary.add("final_regret_rucb", rep.rucb.final_regret());
    for (std::int64_t t = 0; t < T; ++t) {
      mean_f[static_cast<std::size_t>(t)] += *rep.functional.rounds[static_cast<std::size_t>(t)].cum_regret / n;
      mean_r[static_cast<std::size_t>(t)] += *rep.rucb.rounds[static_cast<std::size_t>(t)].cum_regret / n;
    }
    if (write_traces) {
      files.emplace_back(repeat_name("functional_", r), rep.functional.to_csv());
      files.emplace_back(repeat_name("rucb_", r), rep.rucb.to_csv());
    }
  }
  res.summary.finalize();
  // Mean per-round regret R(t)/t on 11 checkpoints spanning the last half.
  std::vector<double> checkpoints;
  bool decreasing = true;
  for (int j = 0; j <= 10; ++j) {
    const std::int64_t t = T / 2 + (T - T / 2) * j / 10;
    const double v = mean_f[static_cast<std::size_t>(std::max<std::int64_t>(t, 1) - 1)] / static_cast<double>(std::max<std::int64_t>(t, 1));
    if (!checkpoints.empty() && !(v < checkpoints.back())) decreasing = false;
    checkpoints.push_back(v);
  }
  const double ratio = res.summary.metrics.at("final_regret_functional").mean /
                       res.summary.metrics.at("final_regret_rucb").mean;
  res.summary.extra["per_round_regret_checkpoints"] = checkpoints;
  res.summary.extra["per_round_regret_decreasing"] = decreasing;
  res.summary.extra["final_regret_ratio"] = ratio;
  std::string curve = "t,functional_cum_mean,rucb_cum_mean,functional_per_round,rucb_per_round\n";
  for (std::int64_t t = 0; t < T; ++t) {
    const double tt = static_cast<double>(t + 1);
    curve += std::to_string(t + 1) + "," + fmt(mean_f[static_cast<std::size_t>(t)]) + "," + fmt(mean_r[static_cast<std::size_t>(t)]) + "," +
             fmt(mean_f[static_cast<std::size_t>(t)] / tt) + "," + fmt(mean_r[static_cast<std::size_t>(t)] / tt) + "\n";
  }
  files.emplace_back("curves.csv", curve);
  for (const auto& rep : reps) {
    res.traces.push_back(rep.functional);
    res.traces.push_back(rep.rucb);
  }
  write_outputs(c, "mab_reduction", res, files);
  return res;
}

// ---------------------------------------------------------------------------
// baseline_compare

int select_flcb(const std::vector<ArmSpec>& arms, std::int64_t budget, double delta, bool heuristic,
                std::uint64_t seed) {
  AllocatorState state = init(arms, delta, 0.0, seed);
  if (heuristic) heuristic_rate_mode(state);
  const auto K = static_cast<std::int64_t>(arms.size());
  if (budget > K) run_fmab(state, budget - K);
  std::vector<double> best;
  for (const auto& a : state.arms) best.push_back(a.opt.best_value_seen);
  return argmin(best);
}

int select_round_robin(const std::vector<ArmSpec>& arms, std::int64_t budget, double delta, std::uint64_t seed) {
  AllocatorState state = init(arms, delta, 0.0, seed);
  const auto K = static_cast<std::int64_t>(arms.size());
  for (std::int64_t r = 0; r < budget - K; ++r) pull_arm(state, static_cast<int>(r % K));
  std::vector<double> best;
  for (const auto& a : state.arms) best.push_back(a.opt.best_value_seen);
  return argmin(best);
}

ExperimentResult run_compare_family(const ExperimentConfig& c) {
  const auto rows = compare_allocators(c);
  ExperimentResult res;
  res.summary.experiment = "baseline_compare";
  res.summary.repeats = c.repeats();
  for (const auto& row : rows) {
    const std::string key = "rank_" + row.allocator + "_B" + std::to_string(row.budget);
    for (int r : row.ranks) res.summary.add(key, r);
  }
  res.summary.finalize();
  res.summary.extra["rank_table"] = rank_table_json(rows);
  std::string csv = "budget,allocator,mean_rank,std_rank\n";
  for (const auto& row : rows) {
    csv += std::to_string(row.budget) + "," + row.allocator + "," + fmt(row.mean_rank) + "," + fmt(row.std_rank) + "\n";
  }
  write_outputs(c, "baseline_compare", res, {{"rank_table.csv", csv}});
  return res;
}

ExperimentResult run_bounds_family(const ExperimentConfig& c) {
  ExperimentResult res;
  res.summary.experiment = "bounds_report";
  res.summary.repeats = 1;
  res.summary.extra = emit_bounds_report(c);
  write_outputs(c, "bounds_report", res, {{"bounds.json", res.summary.extra.dump(2) + "\n"}});
  return res;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<ArmSpec> build_arms(const ExperimentConfig& c, std::uint64_t seed) {
  const std::string experiment = c.experiment();
  const Defaults d = defaults_for(experiment);
  const int K = config_K(c, d);
  const auto dim = static_cast<int>(c.get_int("dim", d.dim));
  if (dim < 1) throw Error(ErrorCode::kInvalidDimension, "dim must be >= 1");
  const OptimizerConfig oc = optimizer_from(c, d.optimizer);
  const NoiseModel noise = noise_from(c, d.noise);
  const auto samples = static_cast<int>(c.get_int("samples_per_step", 1));
  const double value_sigma = c.get_double("value_sigma", 0.0);
  Rng rng(derive_seed(seed, 0xA7));
  std::vector<ArmSpec> arms;
  auto add = [&](Problem p) {
    arms.push_back({std::make_shared<const Problem>(std::move(p)), oc, noise, samples, value_sigma});
  };
  if (experiment == "smooth_det" || experiment == "smooth_stoch") {
    const auto minima = minima_for(c, d, K, 0.5);
    for (int i = 0; i < K; ++i) {
      const RealVector xs = uniform_cube(dim, rng);
      add(make_smooth_convex(dim, xs, minima[static_cast<std::size_t>(i)], derive_seed(seed, 100 + i), xs.norm())
              .with_id("arm" + std::to_string(i)));
    }
  } else if (experiment == "nonsmooth_det") {
    const auto minima = minima_for(c, d, K, 0.5);
    std::vector<double> pieces = c.get_list("pieces", {5, 10, 12});
    if (static_cast<int>(pieces.size()) != K) throw Error(ErrorCode::kConfiguration, "pieces needs K entries");
    const double bound = c.get_double("bound", 4.0);
    for (int i = 0; i < K; ++i) {
      const RealVector xs = uniform_cube(dim, rng);
      add(make_max_affine(dim, static_cast<int>(pieces[static_cast<std::size_t>(i)]), xs,
                          minima[static_cast<std::size_t>(i)], bound, derive_seed(seed, 100 + i))
              .with_id("arm" + std::to_string(i)));
    }
  } else if (experiment == "baseline_compare") {
    const auto minima = minima_for(c, d, K, c.get_double("minima_step", 0.05));
    const double far = c.get_double("far", 3.0);
    for (int i = 0; i < K; ++i) {
      const double radius = far * (1.0 - static_cast<double>(i) / K) + 0.2;
      const RealVector xs = radius * unit_direction(dim, rng);
      add(make_smooth_convex(dim, xs, minima[static_cast<std::size_t>(i)], derive_seed(seed, 100 + i), xs.norm())
              .with_id("arm" + std::to_string(i)));
    }
  } else {
    throw Error(ErrorCode::kConfiguration, "experiment '" + experiment + "' has no arm family");
  }
  return arms;
}

BfiInstance build_bfi_instance(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xBF1));
  BfiInstance inst;
  const int K = 2 + static_cast<int>(uniform_open01(rng) * 3.0);
  const int optimal = static_cast<int>(uniform_open01(rng) * K);
  OptimizerConfig oc;
  oc.kind = OptimizerKind::kPgd;
  oc.schedule = PgdSchedule::kLipschitz;
  for (int i = 0; i < K; ++i) {
    const double a = 0.5 + 1.5 * uniform_open01(rng);
    const double x_star = uniform_open01(rng) - 0.5;
    const double c = i == optimal ? 0.0 : 0.05 + 0.95 * uniform_open01(rng);
    Eigen::MatrixXd slopes(2, 1);
    slopes << a, -a;
    Problem p = make_max_affine_with_slopes(slopes, RealVector::Constant(1, x_star), c, 1.0)
                    .with_id("arm" + std::to_string(i));
    inst.arms.push_back({std::make_shared<const Problem>(std::move(p)), oc, NoiseModel::none()});
    inst.gaps.push_back(c);
  }
  inst.eps = 0.2 + 0.4 * uniform_open01(rng);
  return inst;
}

std::vector<std::vector<double>> arm_value_curves(const std::vector<double>& init_values, const RegretTrace& trace,
                                                  double f_star) {
  std::vector<std::vector<double>> rows;
  rows.reserve(trace.rounds.size() + 1);
  rows.push_back(init_values);
  for (const auto& e : trace.rounds) {
    std::vector<double> row = rows.back();
    if (e.step_regret) row[static_cast<std::size_t>(e.arm)] = *e.step_regret + f_star;
    rows.push_back(std::move(row));
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const std::string experiment = config.experiment();
  if (experiment == "smooth_det" || experiment == "nonsmooth_det" || experiment == "smooth_stoch") {
    return run_fmab_family(config, experiment);
  }
  if (experiment == "bfi_synthetic") return run_bfi_family(config);
  if (experiment == "mab_reduction") return run_mab_family(config);
  if (experiment == "baseline_compare") return run_compare_family(config);
  return run_bounds_family(config);
}

std::vector<RankRow> compare_allocators(const ExperimentConfig& c) {
  if (c.experiment() != "baseline_compare") {
    throw Error(ErrorCode::kConfiguration, "compare needs experiment = baseline_compare");
  }
  const Defaults d = defaults_for("baseline_compare");
  const auto budgets = c.get_list("budgets", {50, 100, 200, 350, 500});
  const auto allocators = c.get_names("allocators", {"flcb", "sh", "hyperband"});
  for (const auto& a : allocators) {
    if (a != "flcb" && a != "sh" && a != "hyperband" && a != "round_robin") {
      throw Error(ErrorCode::kConfiguration, "unknown allocator '" + a + "'");
    }
  }
  const double delta = c.get_double("delta", d.delta);
  const bool heuristic = c.get_bool("heuristic", false);
  const auto eta = static_cast<int>(c.get_int("eta", 2));

  // ranks[repeat][budget][allocator]
  using Grid = std::vector<std::vector<int>>;
  const auto grid = run_repeats<Grid>(c, [&](int r) {
    const std::uint64_t seed = c.repeat_seed(r);
    const auto arms = build_arms(c, seed);
    Grid g;
    for (double bd : budgets) {
      const auto B = static_cast<std::int64_t>(bd);
      std::vector<int> row;
      for (const auto& a : allocators) {
        int pick = 0;
        if (a == "flcb") pick = select_flcb(arms, B, delta, heuristic, seed);
        if (a == "sh") pick = successive_halving(arms, B, eta, seed).winner;
        if (a == "hyperband") pick = hyperband(arms, B, eta, seed).winner;
        if (a == "round_robin") pick = select_round_robin(arms, B, delta, seed);
        row.push_back(rank_of(arms, pick));
      }
      g.push_back(row);
    }
    return g;
  });

  std::vector<RankRow> rows;
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    for (std::size_t a = 0; a < allocators.size(); ++a) {
      RankRow row;
      row.budget = static_cast<std::int64_t>(budgets[b]);
      row.allocator = allocators[a];
      std::vector<double> xs;
      for (const auto& g : grid) {
        row.ranks.push_back(g[b][a]);
        xs.push_back(g[b][a]);
      }
      const MetricSummary m = summarize(xs);
      row.mean_rank = m.mean;
      row.std_rank = m.std;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

nlohmann::json rank_table_json(const std::vector<RankRow>& rows) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : rows) {
    doc.push_back({{"budget", r.budget}, {"allocator", r.allocator}, {"mean_rank", r.mean_rank},
                   {"std_rank", r.std_rank}, {"ranks", r.ranks}});
  }
  return doc;
}

}  // namespace fmab
