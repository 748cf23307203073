#pragma once

// Base optimizers acting as bandit arms.  Each exposes a one-step update that
// consumes exactly one first-order oracle call, plus the rate certificate it
// guarantees for a given problem class.

#include <cstdint>
#include <optional>
#include <string>

#include "fmab/oracles.hpp"
#include "fmab/problems.hpp"
#include "fmab/rates.hpp"

namespace fmab {

enum class OptimizerKind { kPgd, kAgd, kTripleAveraging, kStochasticAgd };

const char* to_string(OptimizerKind kind);

/// "pgd", "agd", "triple_avg", "sagd".
OptimizerKind optimizer_from_name(const std::string& name);

enum class PgdSchedule {
  kAuto,            // strongly convex schedule when mu > 0, Lipschitz otherwise
  kLipschitz,       // eta_k = R / (M sqrt(k)),  g(k) = RM / sqrt(k)
  kStronglyConvex,  // eta_k = 2 / (mu (k + 1)), g(k) = M^2 / (mu k)
};

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kPgd;
  PgdSchedule schedule = PgdSchedule::kAuto;
  double rate_scale = 1.0;        // multiplier on the certified rate
  std::optional<RealVector> x0;   // starting point; zero vector when absent
  double gamma = 1.0;             // stochastic AGD prox parameter
  std::optional<double> lipschitz_override;  // M used in the stochastic rate
};

/// Iteration state.  `x` is always the reported point (the one the bandit
/// observes); the other registers depend on the method:
///   pgd         y = raw iterate
///   agd         y = accepted iterate x_k, v = previous accepted iterate
///   triple_avg  y = running primal average, v = dual accumulator
///   sagd        y = prox sequence, x = aggregated point
struct OptimizerState {
  RealVector x0;
  RealVector x;
  RealVector y;
  RealVector v;
  std::int64_t k = 0;
  double theta = 1.0;
  double value = kInf;            // observed value at x
  double best_value_seen = kInf;  // running minimum of observed values
  double y_value = kInf;          // observed value at y (agd acceptance test)
};

OptimizerState init_state(const OptimizerConfig& config, const Problem& problem);

/// Projected subgradient step.  The reported point is the best raw iterate so
/// far, which keeps the reported value nonincreasing.
void pgd_step(OptimizerState& state, FirstOrderOracle& oracle, PgdSchedule schedule);

/// Monotone accelerated gradient step (step 1/L).  A candidate that would
/// increase f is rejected: x_k is kept and momentum restarts.
void agd_step(OptimizerState& state, FirstOrderOracle& oracle);

/// Quasi-monotone subgradient method with a dual accumulator, a prox point
/// around x0 and a running primal average.  Requires a bounded set.
void triple_averaging_step(OptimizerState& state, FirstOrderOracle& oracle);

/// Accelerated stochastic approximation with averaging; reports the
/// aggregated point.
void stochastic_agd_step(OptimizerState& state, FirstOrderOracle& oracle, double gamma);

/// Dispatch on config.kind.
void optimizer_step(OptimizerState& state, const OptimizerConfig& config, FirstOrderOracle& oracle);

/// Constant M used by the stochastic rate: the override, else the class M.
double stochastic_lipschitz(const OptimizerConfig& config, const Problem& problem);

/// Rate certified by the optimizer on this problem:
///   pgd          Polynomial(RM, 1/2) or Polynomial(M^2/mu, 1)
///   agd          AcceleratedSmooth(2 L ||x0 - x*||^2), or Exponential(R^2, sqrt(kappa)) when mu > 0
///   triple_avg   Polynomial(MR, 1/2)
///   sagd         Polynomial(2 gamma R + 4 sqrt(2) (M^2 + sigma^2) / (3 gamma), 1/2) times log(1/delta)
/// each multiplied by config.rate_scale.
RateFunction certified_rate(const OptimizerConfig& config, const Problem& problem, const NoiseModel& noise,
                            double delta);

}  // namespace fmab
