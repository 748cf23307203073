#pragma once

// Experiment registry: flat key = value configs, seeded repeats, summary
// statistics and on-disk artifacts (trace CSVs, curves, summary, manifest).

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "fmab/baselines.hpp"
#include "fmab/flcb.hpp"

namespace fmab {

/// Flat key = value document.  '#' starts a comment; blank lines are
/// ignored; list values are comma separated.  Unknown keys are rejected.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_names(const std::string& key, const std::vector<std::string>& fallback) const;

  std::string experiment() const;
  int repeats() const;
  std::uint64_t base_seed() const;
  std::uint64_t repeat_seed(int repeat) const { return base_seed() + static_cast<std::uint64_t>(repeat); }
  std::string out_dir() const { return get_string("out", ""); }

  /// Config echo for manifests: every key with its raw text.
  nlohmann::json echo() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Experiment names accepted by run_experiment.
const std::vector<std::string>& experiment_names();

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (0 for one repeat)
  double q10 = 0.0;
  double q90 = 0.0;
};

/// Linear-interpolation quantile of an unsorted sample.
double quantile(std::vector<double> xs, double q);
MetricSummary summarize(const std::vector<double>& xs);

struct SummaryStats {
  std::string experiment;
  int repeats = 0;
  std::map<std::string, std::vector<double>> per_repeat;
  std::map<std::string, MetricSummary> metrics;
  nlohmann::json extra = nlohmann::json::object();

  void add(const std::string& metric, double value) { per_repeat[metric].push_back(value); }
  void finalize();
  nlohmann::json to_json() const;
};

struct Artifact {
  std::string path;  // relative to the output directory
  std::string sha256;
};

struct ExperimentResult {
  SummaryStats summary;
  std::vector<RegretTrace> traces;  // one per repeat when the experiment has traces
  std::vector<Artifact> artifacts;
  nlohmann::json manifest;
};

/// Arms for the named instance family at one repeat seed:
///   smooth_det / smooth_stoch  sqrt-quadratic arms, minima from `minima`
///   nonsmooth_det              max-affine arms, pieces from `pieces`
///   baseline_compare           sqrt-quadratic arms whose better optima start farther away
std::vector<ArmSpec> build_arms(const ExperimentConfig& config, std::uint64_t seed);

struct BfiInstance {
  std::vector<ArmSpec> arms;
  std::vector<double> gaps;
  double eps = 0.0;
};

/// Random two-to-four arm instance for the stopping-rule experiment:
/// f_i(x) = a_i |x - x*_i| + c_i on [-1, 1], one arm with c = 0 at a random
/// position, optimized by PGD with the Lipschitz schedule; eps ~ U[0.2, 0.6].
BfiInstance build_bfi_instance(std::uint64_t seed);

/// Per-arm exact values after every round, reconstructed from the trace and
/// the post-init values; row t holds the values after round t (row 0 = init).
std::vector<std::vector<double>> arm_value_curves(const std::vector<double>& init_values, const RegretTrace& trace,
                                                  double f_star);

ExperimentResult run_experiment(const ExperimentConfig& config);

struct RankRow {
  std::int64_t budget = 0;
  std::string allocator;
  double mean_rank = 0.0;
  double std_rank = 0.0;
  std::vector<int> ranks;
};

/// Mean rank (1 = best optimum) of each allocator's selected arm per budget.
/// Every allocator selects the arm with the best observed value.
std::vector<RankRow> compare_allocators(const ExperimentConfig& config);

nlohmann::json rank_table_json(const std::vector<RankRow>& rows);

/// Upper and lower bounds, stopping budgets and hitting times for the
/// configured class constants.
nlohmann::json emit_bounds_report(const ExperimentConfig& config);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Writes `bytes` to out_dir / rel and records the artifact.
void write_artifact(const std::filesystem::path& out_dir, const std::string& rel, const std::string& bytes,
                    std::vector<Artifact>& artifacts);

}  // namespace fmab
