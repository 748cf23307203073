#pragma once

// The F-LCB allocator: every arm is a rate-certified optimizer, each round the
// arm with the smallest lower confidence bound value - g(k) advances one step.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fmab/optimizers.hpp"

namespace fmab {

/// Everything needed to build one arm.
struct ArmSpec {
  ProblemPtr problem;
  OptimizerConfig optimizer;
  NoiseModel noise;
  int samples_per_step = 1;
  double value_sigma = 0.0;
};

struct ArmRecord {
  ProblemPtr problem;
  OptimizerConfig config;
  FirstOrderOracle oracle;
  OptimizerState opt;
  RateFunction rate;
  std::int64_t k = 0;
  double current_value = 0.0;
  double lcb = 0.0;
  double first_value = 0.0;  // observed f(x^1)
  bool heuristic = false;

  /// Exact f at the reported point (ground truth, not an oracle call).
  double exact_value() const;
};

/// Builds the arm and runs its first optimizer step (k = 1).
ArmRecord make_arm(const ArmSpec& spec, std::uint64_t seed, double delta);

/// Advances the arm one step and refreshes current_value (lcb untouched).
void advance(ArmRecord& arm);

struct StepEvent {
  std::int64_t t = 0;
  int arm = 0;
  std::int64_t k_arm = 0;  // pull count after the step
  double value = 0.0;      // current_value after the step
  double g_value = 0.0;    // g(k_arm)
  double lcb = 0.0;
  std::optional<double> step_regret;
  std::optional<double> cum_regret;
};

struct RegretTrace {
  std::vector<StepEvent> rounds;
  std::vector<std::int64_t> pulls;  // final k_i, init pull included
  std::optional<int> chosen;
  std::optional<double> r_b;
  bool budget_limited = false;
  std::int64_t certificate_violations = 0;  // only with check_invariants

  double final_regret() const;
  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
};

inline constexpr const char* kTraceHeader = "t,arm,k_arm,value,g_value,lcb,step_regret,cum_regret";

struct AllocatorState {
  std::vector<ArmRecord> arms;
  double delta = 0.0;
  double eps = 0.0;  // 0 disables the stopping rule
  std::int64_t t = 0;
  std::optional<int> stopped;
  std::optional<double> f_star;  // global optimum when every arm knows its own
  double cum_regret = 0.0;
  bool check_invariants = false;
  std::int64_t certificate_violations = 0;
};

/// One step per arm, k_i = 1, LCB_i = f_i(x^1) - g_i(1).  Oracle streams are
/// derived from `seed` and the arm index.
AllocatorState init(const std::vector<ArmSpec>& arms, double delta, double eps, std::uint64_t seed);

/// argmin LCB, lowest index on ties.
int select_arm(const AllocatorState& state);

/// Advances arm i as one round: refreshes its LCB with the new count and
/// records regret.  No selection and no stopping test.
StepEvent pull_arm(AllocatorState& state, int i);

/// One round: select, advance, refresh LCB with k + 1, test g(k + 1) < eps / 2.
StepEvent step(AllocatorState& state);

/// Up to T rounds (fewer when the stop fires).
RegretTrace run_fmab(AllocatorState& state, std::int64_t T);

struct BfiResult {
  int arm = 0;
  std::int64_t rounds_used = 0;
  std::optional<double> r_b;
  bool budget_limited = false;
  RegretTrace trace;
};

/// Runs until the stop fires or T_max rounds; without a stop the current
/// argmin-LCB arm is returned and flagged as budget-limited.
BfiResult run_bfi(AllocatorState& state, double eps, std::int64_t T_max);

/// Switches every arm to g(t) = 2 f(x^1) / sqrt(t) with current_value equal
/// to the running best observed value.
void heuristic_rate_mode(AllocatorState& state);

/// f_{J}^* - f^* for an arm index when optima are known.
std::optional<double> simple_regret(const AllocatorState& state, int arm);

/// Global optimum when all arms carry one.
std::optional<double> global_optimum(const std::vector<ArmSpec>& arms);

}  // namespace fmab
