#include "fmab/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fmab/random.hpp"

namespace fmab {

RegretTrace round_robin(const std::vector<ArmSpec>& arms, std::int64_t T, std::uint64_t seed, double delta) {
  if (T < static_cast<std::int64_t>(arms.size())) throw Error(ErrorCode::kInvalidArgument, "round robin needs T >= K");
  AllocatorState state = init(arms, delta, 0.0, seed);
  RegretTrace trace;
  const int K = static_cast<int>(state.arms.size());
  for (std::int64_t r = 0; r < T; ++r) trace.rounds.push_back(pull_arm(state, static_cast<int>(r % K)));
  for (const auto& a : state.arms) trace.pulls.push_back(a.k);
  return trace;
}

namespace {

/// An arm without a certificate: baselines only look at observed values.
struct PlainArm {
  OptimizerConfig config;
  FirstOrderOracle oracle;
  OptimizerState opt;
  std::int64_t pulls = 0;

  void pull() {
    optimizer_step(opt, config, oracle);
    ++pulls;
  }
  double best() const { return opt.best_value_seen; }
};

PlainArm make_plain(const ArmSpec& spec, std::uint64_t seed) {
  return PlainArm{spec.optimizer,
                  FirstOrderOracle(spec.problem, spec.noise, seed, spec.samples_per_step, spec.value_sigma),
                  init_state(spec.optimizer, *spec.problem)};
}

int halving_rungs(int n, int eta) {
  int rungs = 0;
  for (std::int64_t reach = 1; reach < n; reach *= eta) ++rungs;
  return std::max(1, rungs);
}

void check_budget(std::size_t K, std::int64_t budget, int eta) {
  if (K == 0) throw Error(ErrorCode::kInvalidArgument, "no arms");
  if (eta < 2) throw Error(ErrorCode::kInvalidArgument, "eta must be >= 2");
  if (budget < static_cast<std::int64_t>(K)) throw Error(ErrorCode::kInvalidArgument, "budget must be >= K");
}

int ceil_div(int n, int eta) { return (n + eta - 1) / eta; }

/// Successive halving over `members` (indices into `pool`).  Returns the
/// winning member.
int run_halving(std::vector<PlainArm>& pool, std::vector<int> members, std::int64_t budget, int eta,
                HalvingSchedule& schedule) {
  schedule.eta = eta;
  const int rungs = halving_rungs(static_cast<int>(members.size()), eta);
  std::int64_t remaining = budget;
  for (int r = 0; r < rungs && members.size() > 1; ++r) {
    const auto n = static_cast<std::int64_t>(members.size());
    std::int64_t per = remaining / (n * (rungs - r));
    if (per == 0 && remaining >= n) per = 1;
    if (per == 0) break;
    for (int m : members) {
      for (std::int64_t j = 0; j < per; ++j) pool[static_cast<std::size_t>(m)].pull();
    }
    remaining -= per * n;
    schedule.rungs.push_back({static_cast<int>(n), per});
    std::stable_sort(members.begin(), members.end(), [&](int a, int b) {
      return pool[static_cast<std::size_t>(a)].best() < pool[static_cast<std::size_t>(b)].best();
    });
    const int keep = r + 1 == rungs ? 1 : ceil_div(static_cast<int>(n), eta);
    members.resize(static_cast<std::size_t>(keep));
  }
  if (members.size() == 1 && remaining > 0) {
    // A lone survivor (n = 1, or the final rung) spends what is left.
    PlainArm& arm = pool[static_cast<std::size_t>(members.front())];
    schedule.rungs.push_back({1, remaining});
    for (std::int64_t j = 0; j < remaining; ++j) arm.pull();
  }
  return *std::min_element(members.begin(), members.end(), [&](int a, int b) {
    const double va = pool[static_cast<std::size_t>(a)].best();
    const double vb = pool[static_cast<std::size_t>(b)].best();
    return va < vb || (va == vb && a < b);
  });
}

}  // namespace

HalvingSchedule plan_halving(int n, std::int64_t budget, int eta) {
  check_budget(static_cast<std::size_t>(n), budget, eta);
  HalvingSchedule s;
  s.eta = eta;
  const int rungs = halving_rungs(n, eta);
  std::int64_t remaining = budget;
  for (int r = 0; r < rungs && n > 1; ++r) {
    std::int64_t per = remaining / (static_cast<std::int64_t>(n) * (rungs - r));
    if (per == 0 && remaining >= n) per = 1;
    if (per == 0) break;
    s.rungs.push_back({n, per});
    remaining -= per * n;
    n = r + 1 == rungs ? 1 : ceil_div(n, eta);
  }
  if (n == 1 && remaining > 0) s.rungs.push_back({1, remaining});
  return s;
}

SelectionResult successive_halving(const std::vector<ArmSpec>& arms, std::int64_t budget, int eta,
                                   std::uint64_t seed) {
  check_budget(arms.size(), budget, eta);
  std::vector<PlainArm> pool;
  for (std::size_t i = 0; i < arms.size(); ++i) pool.push_back(make_plain(arms[i], derive_seed(seed, i)));
  std::vector<int> members(arms.size());
  std::iota(members.begin(), members.end(), 0);
  SelectionResult out;
  out.brackets.emplace_back();
  out.winner = run_halving(pool, members, budget, eta, out.brackets.back());
  out.winner_value = pool[static_cast<std::size_t>(out.winner)].best();
  for (const auto& a : pool) {
    out.pulls.push_back(a.pulls);
    out.total_pulls += a.pulls;
  }
  return out;
}

SelectionResult hyperband(const std::vector<ArmSpec>& arms, std::int64_t budget, int eta, std::uint64_t seed,
                          int max_brackets) {
  check_budget(arms.size(), budget, eta);
  const int K = static_cast<int>(arms.size());
  int s_max = 0;
  for (std::int64_t reach = eta; reach <= K; reach *= eta) ++s_max;
  if (max_brackets > 0) s_max = std::min(s_max, max_brackets - 1);

  auto bracket_arms = [&](int s) {
    const double n = std::ceil(K * std::pow(static_cast<double>(eta), s - s_max) - 1e-12);
    return std::clamp(static_cast<int>(n), 1, K);
  };
  int brackets = s_max + 1;
  while (brackets > 1 && budget / brackets < bracket_arms(s_max)) --brackets;
  const std::int64_t per_bracket = budget / brackets;

  SelectionResult out;
  out.pulls.assign(arms.size(), 0);
  Rng rng(derive_seed(seed, 0x4879706572ULL));
  bool have_winner = false;
  for (int b = 0; b < brackets; ++b) {
    const int s = s_max - b;
    const int n = bracket_arms(s);
    std::vector<int> order(static_cast<std::size_t>(K));
    std::iota(order.begin(), order.end(), 0);
    for (int i = K - 1; i > 0; --i) {
      const auto j = static_cast<int>(uniform_open01(rng) * (i + 1));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(std::min(j, i))]);
    }
    order.resize(static_cast<std::size_t>(n));
    std::sort(order.begin(), order.end());

    std::vector<PlainArm> pool;
    for (int i = 0; i < K; ++i) {
      pool.push_back(make_plain(arms[static_cast<std::size_t>(i)], derive_seed(seed, static_cast<std::uint64_t>(b) * 1000003ULL + i)));
    }
    out.brackets.emplace_back();
    const int w = run_halving(pool, order, per_bracket, eta, out.brackets.back());
    const double value = pool[static_cast<std::size_t>(w)].best();
    if (!have_winner || value < out.winner_value) {
      out.winner = w;
      out.winner_value = value;
      have_winner = true;
    }
    for (int i = 0; i < K; ++i) {
      out.pulls[static_cast<std::size_t>(i)] += pool[static_cast<std::size_t>(i)].pulls;
      out.total_pulls += pool[static_cast<std::size_t>(i)].pulls;
    }
  }
  return out;
}

double median_of_means(std::span<const double> samples, int blocks) {
  if (samples.empty()) throw Error(ErrorCode::kInvalidArgument, "median of means needs samples");
  if (blocks < 1) throw Error(ErrorCode::kInvalidArgument, "blocks must be >= 1");
  const std::size_t n = samples.size();
  const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(blocks), n);
  std::vector<double> means;
  means.reserve(b);
  std::size_t start = 0;
  for (std::size_t j = 0; j < b; ++j) {
    const std::size_t len = n / b + (j < n % b ? 1 : 0);
    double sum = 0.0;
    for (std::size_t i = start; i < start + len; ++i) sum += samples[i];
    means.push_back(sum / static_cast<double>(len));
    start += len;
  }
  const std::size_t mid = b / 2;
  std::nth_element(means.begin(), means.begin() + static_cast<std::ptrdiff_t>(mid), means.end());
  const double upper = means[mid];
  if (b % 2 == 1) return upper;
  const double lower = *std::max_element(means.begin(), means.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

namespace {

struct RobustArm {
  std::vector<double> rewards;
  double x = 0.0;
  double estimate = 0.0;  // MoM of rewards
};

void check_bandit(std::span<const double> mu, const RobustIndexConfig& c, std::int64_t T) {
  if (mu.empty()) throw Error(ErrorCode::kInvalidArgument, "no arms");
  if (T < static_cast<std::int64_t>(mu.size())) throw Error(ErrorCode::kInvalidArgument, "T must be >= K");
  if (c.block_size < 1) throw Error(ErrorCode::kInvalidArgument, "block_size must be >= 1");
  if (!(c.C >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "C must be >= 0");
}

void observe(RobustArm& arm, double mu, const NoiseModel& noise, const RobustIndexConfig& c, Rng& rng) {
  arm.rewards.push_back(query_zero_order_reward(mu, noise, rng));
  const int blocks = std::max<int>(1, static_cast<int>(arm.rewards.size()) / c.block_size);
  arm.estimate = median_of_means(arm.rewards, blocks);
}

/// Generic index loop.  `estimate(arm)` is the point estimate; the played
/// arm minimizes estimate - C/sqrt(n) when `minimize`, else maximizes
/// estimate + C/sqrt(n).
template <class Update, class Estimate>
RegretTrace run_index_policy(std::span<const double> mu, const NoiseModel& noise, const RobustIndexConfig& c,
                             std::int64_t T, std::uint64_t seed, bool minimize, Update update, Estimate estimate) {
  check_bandit(mu, c, T);
  noise.validate();
  const double best_mu = *std::max_element(mu.begin(), mu.end());
  const int K = static_cast<int>(mu.size());
  const double sign = minimize ? 1.0 : -1.0;
  std::vector<RobustArm> arms(static_cast<std::size_t>(K));
  auto index = [&](const RobustArm& a) {
    return estimate(a) - sign * c.C / std::sqrt(static_cast<double>(a.rewards.size()));
  };
  Rng rng(seed);
  RegretTrace trace;
  trace.rounds.reserve(static_cast<std::size_t>(T));
  trace.pulls.assign(static_cast<std::size_t>(K), 0);
  double cum = 0.0;
  for (std::int64_t t = 0; t < T; ++t) {
    int pick = 0;
    if (t < K) {
      pick = static_cast<int>(t);
    } else {
      double best = kInf;
      for (int i = 0; i < K; ++i) {
        const double v = sign * index(arms[static_cast<std::size_t>(i)]);
        if (v < best) {
          best = v;
          pick = i;
        }
      }
    }
    RobustArm& arm = arms[static_cast<std::size_t>(pick)];
    observe(arm, mu[static_cast<std::size_t>(pick)], noise, c, rng);
    update(arm);
    const auto n = static_cast<std::int64_t>(arm.rewards.size());
    trace.pulls[static_cast<std::size_t>(pick)] = n;
    const double regret = best_mu - mu[static_cast<std::size_t>(pick)];
    cum += regret;
    trace.rounds.push_back({t + 1, pick, n, estimate(arm), c.C / std::sqrt(static_cast<double>(n)), index(arm),
                            regret, cum});
  }
  return trace;
}

}  // namespace

RegretTrace functional_mab_reduction(std::span<const double> mu, const NoiseModel& noise,
                                     const RobustIndexConfig& config, std::int64_t T, std::uint64_t seed) {
  auto update = [&](RobustArm& a) {
    // Gradient step on x^2/2 - x r with the robust gradient x - MoM(r).
    const double n = static_cast<double>(a.rewards.size());
    a.x -= std::pow(n, -config.step_power) * (a.x - a.estimate);
  };
  // MoM of the losses x^2/2 - x r_j equals x^2/2 - x MoM(r) (affine equivariance).
  auto loss = [](const RobustArm& a) { return 0.5 * a.x * a.x - a.x * a.estimate; };
  return run_index_policy(mu, noise, config, T, seed, true, update, loss);
}

RegretTrace rucb_median(std::span<const double> mu, const NoiseModel& noise, const RobustIndexConfig& config,
                        std::int64_t T, std::uint64_t seed) {
  auto update = [](RobustArm&) {};
  auto reward = [](const RobustArm& a) { return a.estimate; };
  return run_index_policy(mu, noise, config, T, seed, false, update, reward);
}

}  // namespace fmab
