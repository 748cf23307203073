#include "fmab/optimizers.hpp"

#include <algorithm>
#include <cmath>

namespace fmab {

const char* to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::kPgd: return "pgd";
    case OptimizerKind::kAgd: return "agd";
    case OptimizerKind::kTripleAveraging: return "triple_avg";
    case OptimizerKind::kStochasticAgd: return "sagd";
  }
  return "unknown";
}

OptimizerKind optimizer_from_name(const std::string& name) {
  for (auto kind : {OptimizerKind::kPgd, OptimizerKind::kAgd, OptimizerKind::kTripleAveraging,
                    OptimizerKind::kStochasticAgd}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorCode::kConfiguration, "unknown optimizer '" + name + "'");
}

namespace {

PgdSchedule resolve(PgdSchedule schedule, const FunctionClass& fc) {
  if (schedule != PgdSchedule::kAuto) return schedule;
  return fc.strongly_convex() ? PgdSchedule::kStronglyConvex : PgdSchedule::kLipschitz;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw Error(ErrorCode::kMissingConstant, std::string("optimizer needs a finite positive ") + what);
  }
}

void record(OptimizerState& s, const RealVector& point, double observed) {
  s.x = point;
  s.value = observed;
  s.best_value_seen = std::min(s.best_value_seen, observed);
}

}  // namespace

OptimizerState init_state(const OptimizerConfig& config, const Problem& problem) {
  OptimizerState s;
  RealVector start = config.x0.value_or(RealVector::Zero(problem.dim()));
  if (start.size() != problem.dim()) throw Error(ErrorCode::kDimensionMismatch, "x0 has the wrong dimension");
  s.x0 = project(problem.feasible(), start);
  s.x = s.x0;
  s.y = s.x0;
  s.v = config.kind == OptimizerKind::kTripleAveraging ? RealVector::Zero(problem.dim()) : s.x0;
  return s;
}

void pgd_step(OptimizerState& s, FirstOrderOracle& oracle, PgdSchedule schedule) {
  const Problem& p = oracle.problem();
  const FunctionClass& fc = p.fclass();
  const double t = static_cast<double>(s.k + 1);
  double eta = 0.0;
  switch (resolve(schedule, fc)) {
    case PgdSchedule::kLipschitz:
      require_finite(fc.M, "M");
      eta = fc.R / (fc.M * std::sqrt(t));
      break;
    case PgdSchedule::kStronglyConvex:
      require_finite(fc.mu, "mu");
      eta = 2.0 / (fc.mu * (t + 1.0));
      break;
    case PgdSchedule::kAuto: break;
  }
  const OracleReply reply = oracle.query(s.y);
  s.y = project(p.feasible(), s.y - eta * *reply.gradient);
  ++s.k;
  const double observed = oracle.observe_value(s.y);
  if (observed < s.best_value_seen) record(s, s.y, observed);
}

void agd_step(OptimizerState& s, FirstOrderOracle& oracle) {
  const Problem& p = oracle.problem();
  const FunctionClass& fc = p.fclass();
  if (!fc.smooth()) throw Error(ErrorCode::kIncompatible, "accelerated gradient needs a smooth problem");
  double beta = 0.0;
  double theta_next = 1.0;
  if (fc.strongly_convex()) {
    const double sk = std::sqrt(*fc.kappa());
    beta = (sk - 1.0) / (sk + 1.0);
  } else {
    theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * s.theta * s.theta));
    beta = (s.theta - 1.0) / theta_next;
  }
  const RealVector w = s.y + beta * (s.y - s.v);
  const OracleReply reply = oracle.query(w);
  const RealVector candidate = project(p.feasible(), w - *reply.gradient / fc.L);
  ++s.k;
  const double observed = oracle.observe_value(candidate);
  if (observed <= s.y_value) {
    s.v = s.y;
    s.y = candidate;
    s.y_value = observed;
    s.theta = theta_next;
  } else {
    s.v = s.y;
    s.theta = 1.0;
  }
  record(s, s.y, s.y_value);
}

void triple_averaging_step(OptimizerState& s, FirstOrderOracle& oracle) {
  const Problem& p = oracle.problem();
  const FunctionClass& fc = p.fclass();
  if (!p.feasible().is_bounded()) throw Error(ErrorCode::kIncompatible, "triple averaging needs a bounded set");
  require_finite(fc.M, "M");
  const double t = static_cast<double>(s.k + 1);
  const OracleReply reply = oracle.query(s.y);
  s.v += *reply.gradient;
  const double gamma = fc.M / fc.R * std::sqrt(t + 1.0);
  const RealVector prox = project(p.feasible(), s.x0 - s.v / gamma);
  s.y = (t * s.y + prox) / (t + 1.0);
  ++s.k;
  const double observed = oracle.observe_value(s.y);
  if (observed < s.best_value_seen) record(s, s.y, observed);
}

void stochastic_agd_step(OptimizerState& s, FirstOrderOracle& oracle, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::kMissingConstant, "stochastic AGD needs gamma > 0");
  const Problem& p = oracle.problem();
  const FunctionClass& fc = p.fclass();
  const double t = static_cast<double>(s.k + 1);
  const double alpha = 2.0 / (t + 1.0);
  const RealVector md = (1.0 - alpha) * s.x + alpha * s.y;
  const OracleReply reply = oracle.query(md);
  double step = 1.0 / (gamma * std::pow(t + 1.0, 1.5));
  if (fc.smooth()) step = std::min(step, 1.0 / (4.0 * fc.L));
  step *= (t + 1.0) / 2.0;
  s.y = project(p.feasible(), s.y - step * *reply.gradient);
  const RealVector aggregated = (1.0 - alpha) * s.x + alpha * s.y;
  ++s.k;
  record(s, aggregated, oracle.observe_value(aggregated));
}

void optimizer_step(OptimizerState& state, const OptimizerConfig& config, FirstOrderOracle& oracle) {
  switch (config.kind) {
    case OptimizerKind::kPgd: pgd_step(state, oracle, config.schedule); return;
    case OptimizerKind::kAgd: agd_step(state, oracle); return;
    case OptimizerKind::kTripleAveraging: triple_averaging_step(state, oracle); return;
    case OptimizerKind::kStochasticAgd: stochastic_agd_step(state, oracle, config.gamma); return;
  }
}

double stochastic_lipschitz(const OptimizerConfig& config, const Problem& problem) {
  const double M = config.lipschitz_override.value_or(problem.fclass().M);
  if (!std::isfinite(M) || M < 0.0) throw Error(ErrorCode::kMissingConstant, "stochastic AGD rate needs M");
  return M;
}

RateFunction certified_rate(const OptimizerConfig& config, const Problem& problem, const NoiseModel& noise,
                            double delta) {
  const FunctionClass& fc = problem.fclass();
  const double scale = config.rate_scale;
  if (!(scale > 0.0)) throw Error(ErrorCode::kConfiguration, "rate_scale must be > 0");
  switch (config.kind) {
    case OptimizerKind::kPgd:
      if (resolve(config.schedule, fc) == PgdSchedule::kStronglyConvex) {
        require_finite(fc.M, "M");
        require_finite(fc.mu, "mu");
        return RateFunction::polynomial(scale * fc.M * fc.M / fc.mu, 1.0);
      }
      require_finite(fc.M, "M");
      return RateFunction::polynomial(scale * fc.R * fc.M, 0.5);
    case OptimizerKind::kAgd: {
      if (!fc.smooth()) throw Error(ErrorCode::kIncompatible, "accelerated gradient needs a smooth problem");
      if (fc.strongly_convex()) {
        return RateFunction::exponential(scale * fc.R * fc.R, std::sqrt(*fc.kappa()));
      }
      double dist2 = fc.R * fc.R;
      if (problem.known_opt()) {
        const RealVector x0 = init_state(config, problem).x0;
        dist2 = (x0 - problem.known_opt()->x_star).squaredNorm();
      }
      if (!(dist2 > 0.0)) dist2 = fc.R * fc.R;
      return RateFunction::accelerated_smooth(scale * 2.0 * fc.L * dist2);
    }
    case OptimizerKind::kTripleAveraging:
      if (!problem.feasible().is_bounded()) {
        throw Error(ErrorCode::kIncompatible, "triple averaging needs a bounded set");
      }
      require_finite(fc.M, "M");
      return RateFunction::polynomial(scale * fc.M * fc.R, 0.5);
    case OptimizerKind::kStochasticAgd: {
      if (!(config.gamma > 0.0)) throw Error(ErrorCode::kMissingConstant, "stochastic AGD needs gamma > 0");
      const double M = stochastic_lipschitz(config, problem);
      const double sigma = noise.gradient_sigma();
      const double beta = 2.0 * config.gamma * fc.R + 4.0 * std::sqrt(2.0) * (M * M + sigma * sigma) / (3.0 * config.gamma);
      return RateFunction::polynomial(scale * beta, 0.5, ConfidenceKind::kLogInvDelta, delta);
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown optimizer");
}

}  // namespace fmab
