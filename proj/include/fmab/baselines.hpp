#pragma once

// Comparison allocators: round-robin, successive halving, hyperband, and the
// robust index policies for the heavy-tailed bandit reduction.

#include <cstdint>
#include <span>
#include <vector>

#include "fmab/flcb.hpp"

namespace fmab {

/// Init pass over every arm, then T cyclic rounds starting at arm 0.  `delta`
/// only sets the confidence level of stochastic certificates in the trace.
RegretTrace round_robin(const std::vector<ArmSpec>& arms, std::int64_t T, std::uint64_t seed, double delta = 0.05);

struct Rung {
  int survivors = 0;
  std::int64_t pulls_per_arm = 0;
};

struct HalvingSchedule {
  int eta = 2;
  std::vector<Rung> rungs;
};

struct SelectionResult {
  int winner = 0;
  double winner_value = 0.0;           // best observed value of the winner
  std::int64_t total_pulls = 0;
  std::vector<std::int64_t> pulls;     // per arm, summed over brackets
  std::vector<HalvingSchedule> brackets;
};

/// Planned rung arithmetic for n arms: max(1, ceil(log_eta n)) rungs, each
/// splitting the remaining budget evenly over the remaining rungs.
HalvingSchedule plan_halving(int n, std::int64_t budget, int eta);

/// Successive halving.  Survivors of each rung are the top ceil(n / eta) by
/// best observed value (lowest index on ties); optimizer state carries over.
SelectionResult successive_halving(const std::vector<ArmSpec>& arms, std::int64_t budget, int eta,
                                   std::uint64_t seed);

/// Hyperband over brackets s = s_max..0 with s_max = floor(log_eta K).
/// Bracket s runs successive halving on ceil(K eta^{s - s_max}) arms drawn
/// without replacement, on fresh arm copies, with budget / brackets pulls.
/// Brackets are dropped (smallest s first) until each can afford one pull
/// per arm.  `max_brackets` caps s_max + 1 when positive.
SelectionResult hyperband(const std::vector<ArmSpec>& arms, std::int64_t budget, int eta, std::uint64_t seed,
                          int max_brackets = 0);

/// Median of block means over consecutive blocks; block sizes differ by at
/// most one.  The median of an even count is the mean of the middle pair.
double median_of_means(std::span<const double> samples, int blocks);

struct RobustIndexConfig {
  double C = 1.5;        // exploration constant
  int block_size = 1;    // samples per median-of-means block
  double step_power = 1.0;  // surrogate step size 1 / n^step_power
};

/// Functional reduction: each arm holds the quadratic surrogate
/// f_i(x) = x^2 / 2 - mu_i x, updated by a gradient step with the
/// median-of-means gradient estimate x - MoM(rewards).  The index is the
/// median-of-means loss estimate minus C / sqrt(n) (argmin is played).
/// Trace columns: value = loss estimate, g_value = C / sqrt(n), lcb = index,
/// step_regret = max mu - mu_i.
RegretTrace functional_mab_reduction(std::span<const double> mu, const NoiseModel& noise,
                                     const RobustIndexConfig& config, std::int64_t T, std::uint64_t seed);

/// Robust UCB with a median-of-means reward estimate plus C / sqrt(n); the
/// lcb column carries the upper index.
RegretTrace rucb_median(std::span<const double> mu, const NoiseModel& noise, const RobustIndexConfig& config,
                        std::int64_t T, std::uint64_t seed);

}  // namespace fmab
