#include "fmab/flcb.hpp"

#include <cstdio>
#include <ostream>

#include "fmab/random.hpp"

namespace fmab {

namespace {

constexpr double kCertificateSlack = 1e-12;

void format_real(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

RateFunction heuristic_for(double first_value) {
  if (!(first_value > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "heuristic rate needs f(x^1) > 0");
  }
  return RateFunction::heuristic(2.0 * first_value);
}

}  // namespace

double ArmRecord::exact_value() const { return evaluate(*problem, opt.x); }

ArmRecord make_arm(const ArmSpec& spec, std::uint64_t seed, double delta) {
  if (!spec.problem) throw Error(ErrorCode::kInvalidArgument, "arm without a problem");
  RateFunction rate = certified_rate(spec.optimizer, *spec.problem, spec.noise, delta);
  ArmRecord arm{spec.problem,
                spec.optimizer,
                FirstOrderOracle(spec.problem, spec.noise, seed, spec.samples_per_step, spec.value_sigma),
                init_state(spec.optimizer, *spec.problem),
                std::move(rate)};
  advance(arm);
  arm.first_value = arm.opt.value;
  arm.lcb = arm.current_value - arm.rate(arm.k);
  return arm;
}

void advance(ArmRecord& arm) {
  optimizer_step(arm.opt, arm.config, arm.oracle);
  ++arm.k;
  arm.current_value = arm.heuristic ? arm.opt.best_value_seen : arm.opt.value;
}

double RegretTrace::final_regret() const {
  if (rounds.empty() || !rounds.back().cum_regret) return 0.0;
  return *rounds.back().cum_regret;
}

void RegretTrace::write_csv(std::ostream& out) const { out << to_csv(); }

std::string RegretTrace::to_csv() const {
  std::string out = kTraceHeader;
  out += '\n';
  for (const auto& e : rounds) {
    out += std::to_string(e.t);
    out += ',';
    out += std::to_string(e.arm);
    out += ',';
    out += std::to_string(e.k_arm);
    for (double v : {e.value, e.g_value, e.lcb}) {
      out += ',';
      format_real(out, v);
    }
    out += ',';
    if (e.step_regret) format_real(out, *e.step_regret);
    out += ',';
    if (e.cum_regret) format_real(out, *e.cum_regret);
    out += '\n';
  }
  return out;
}

std::optional<double> global_optimum(const std::vector<ArmSpec>& arms) {
  std::optional<double> best;
  for (const auto& a : arms) {
    if (!a.problem->known_opt()) return std::nullopt;
    const double f = a.problem->f_star();
    if (!best || f < *best) best = f;
  }
  return best;
}

AllocatorState init(const std::vector<ArmSpec>& arms, double delta, double eps, std::uint64_t seed) {
  if (arms.empty()) throw Error(ErrorCode::kInvalidArgument, "allocator needs at least one arm");
  if (!(eps >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be >= 0");
  AllocatorState state;
  state.delta = delta;
  state.eps = eps;
  state.f_star = global_optimum(arms);
  state.arms.reserve(arms.size());
  for (std::size_t i = 0; i < arms.size(); ++i) {
    state.arms.push_back(make_arm(arms[i], derive_seed(seed, i), delta));
  }
  return state;
}

int select_arm(const AllocatorState& state) {
  if (state.stopped) throw Error(ErrorCode::kStopped, "allocator already stopped");
  int best = 0;
  for (int i = 1; i < static_cast<int>(state.arms.size()); ++i) {
    if (state.arms[i].lcb < state.arms[best].lcb) best = i;
  }
  return best;
}

StepEvent pull_arm(AllocatorState& state, int i) {
  ArmRecord& arm = state.arms.at(static_cast<std::size_t>(i));
  advance(arm);
  const double g_next = arm.rate(arm.k);
  arm.lcb = arm.current_value - g_next;
  ++state.t;
  StepEvent e{state.t, i, arm.k, arm.current_value, g_next, arm.lcb, std::nullopt, std::nullopt};
  if (state.f_star) {
    const double regret = arm.exact_value() - *state.f_star;
    state.cum_regret += regret;
    e.step_regret = regret;
    e.cum_regret = state.cum_regret;
  }
  return e;
}

StepEvent step(AllocatorState& state) {
  const int i = select_arm(state);
  StepEvent e = pull_arm(state, i);
  const ArmRecord& arm = state.arms[static_cast<std::size_t>(i)];
  if (state.eps > 0.0 && e.g_value < state.eps / 2.0) state.stopped = i;
  if (state.check_invariants && e.step_regret && !arm.heuristic &&
      *e.step_regret > arm.rate(e.k_arm - 1) + kCertificateSlack) {
    ++state.certificate_violations;
  }
  return e;
}

namespace {

double certificate_sum(const AllocatorState& state) {
  double total = 0.0;
  for (const auto& a : state.arms) {
    for (std::int64_t k = 1; k <= a.k; ++k) total += a.rate(k);
  }
  return total;
}

void finish(const AllocatorState& state, RegretTrace& trace) {
  trace.pulls.clear();
  for (const auto& a : state.arms) trace.pulls.push_back(a.k);
  trace.certificate_violations = state.certificate_violations;
}

}  // namespace

RegretTrace run_fmab(AllocatorState& state, std::int64_t T) {
  if (T < 1) throw Error(ErrorCode::kInvalidArgument, "T must be >= 1");
  RegretTrace trace;
  trace.rounds.reserve(static_cast<std::size_t>(T));
  // Running sum of sum_i sum_{k <= k_i} g_i(k) for the cumulative check.
  double certificates = state.check_invariants ? certificate_sum(state) : 0.0;
  for (std::int64_t r = 0; r < T && !state.stopped; ++r) {
    StepEvent e = step(state);
    if (state.check_invariants && e.cum_regret && !state.arms[e.arm].heuristic) {
      certificates += e.g_value;
      if (*e.cum_regret > certificates + kCertificateSlack) ++state.certificate_violations;
    }
    trace.rounds.push_back(e);
  }
  if (state.stopped) {
    trace.chosen = state.stopped;
    trace.r_b = simple_regret(state, *state.stopped);
  }
  finish(state, trace);
  return trace;
}

BfiResult run_bfi(AllocatorState& state, double eps, std::int64_t T_max) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "BFI needs eps > 0");
  state.eps = eps;
  BfiResult result;
  const std::int64_t t0 = state.t;
  result.trace = run_fmab(state, T_max);
  result.rounds_used = state.t - t0;
  if (state.stopped) {
    result.arm = *state.stopped;
  } else {
    result.arm = select_arm(state);
    result.budget_limited = true;
  }
  result.r_b = simple_regret(state, result.arm);
  result.trace.chosen = result.arm;
  result.trace.r_b = result.r_b;
  result.trace.budget_limited = result.budget_limited;
  return result;
}

void heuristic_rate_mode(AllocatorState& state) {
  for (auto& arm : state.arms) {
    arm.rate = heuristic_for(arm.first_value);
    arm.heuristic = true;
    arm.current_value = arm.opt.best_value_seen;
    arm.lcb = arm.current_value - arm.rate(arm.k);
  }
}

std::optional<double> simple_regret(const AllocatorState& state, int arm) {
  if (!state.f_star) return std::nullopt;
  return state.arms.at(static_cast<std::size_t>(arm)).problem->f_star() - *state.f_star;
}

}  // namespace fmab
