#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "fmab/flcb.hpp"

using namespace fmab;

namespace {

RealVector scalar(double x) { return RealVector::Constant(1, x); }

ArmSpec quadratic_arm(double mu, PgdSchedule schedule) {
  OptimizerConfig c;
  c.schedule = schedule;
  return {std::make_shared<const Problem>(make_quadratic_arm(mu)), c, NoiseModel::none()};
}

// |x| * slope + c on [-1, 1]: PGD certifies beta = 2 * slope, r = 1/2.
ArmSpec vee_arm(double slope, double c, double x_star = 0.0) {
  Eigen::MatrixXd slopes(2, 1);
  slopes << slope, -slope;
  OptimizerConfig oc;
  oc.schedule = PgdSchedule::kLipschitz;
  return {std::make_shared<const Problem>(make_max_affine_with_slopes(slopes, scalar(x_star), c, 1.0)), oc,
          NoiseModel::none()};
}

std::vector<ArmSpec> smooth_family(std::uint64_t seed, double shift = 0.0) {
  Rng rng(seed);
  OptimizerConfig c;
  c.kind = OptimizerKind::kAgd;
  std::vector<ArmSpec> arms;
  for (int i = 0; i < 3; ++i) {
    RealVector xs(20);
    for (int j = 0; j < 20; ++j) xs[j] = 2.0 * uniform_open01(rng) - 1.0;
    Problem p = make_smooth_convex(20, xs, 0.5 * i, seed * 10 + i, xs.norm());
    if (shift != 0.0) p = p.shifted(shift);
    arms.push_back({std::make_shared<const Problem>(std::move(p)), c, NoiseModel::none()});
  }
  return arms;
}

std::vector<int> arm_sequence(const RegretTrace& t) {
  std::vector<int> seq;
  for (const auto& e : t.rounds) seq.push_back(e.arm);
  return seq;
}

// Independent replay of the allocator for one-dimensional quadratic arms on
// [-1, 1] under the Lipschitz projected-gradient schedule.
struct SimArm {
  double mu, M, beta, y = 0.0, x = 0.0, best = 1e300, value = 0.0;
  int k = 0;
  double f(double z) const { return 0.5 * (z - mu) * (z - mu) - 0.5 * mu * mu; }
  void step() {
    const double eta = 2.0 / (M * std::sqrt(k + 1.0));
    y = std::clamp(y - eta * (y - mu), -1.0, 1.0);
    ++k;
    if (f(y) < best) {
      best = f(y);
      x = y;
    }
    value = f(x);
  }
  double lcb() const { return value - beta / std::sqrt(static_cast<double>(k)); }
};

}  // namespace

TEST_SUITE("flcb") {
  TEST_CASE("init advances every arm once") {
    const auto arms = smooth_family(3);
    const AllocatorState s = init(arms, 0.0, 0.0, 1);
    REQUIRE(s.arms.size() == 3);
    for (const auto& a : s.arms) {
      CHECK(a.k == 1);
      CHECK(a.opt.k == 1);
      CHECK(a.lcb == doctest::Approx(a.current_value - a.rate(1)));
    }
    const AllocatorState one = init({arms[0]}, 0.0, 0.0, 1);
    CHECK(one.arms.size() == 1);
  }

  TEST_CASE("stochastic rates need a confidence level") {
    OptimizerConfig c;
    c.kind = OptimizerKind::kStochasticAgd;
    ArmSpec a{std::make_shared<const Problem>(make_smooth_convex(3, RealVector::Zero(3), 0.0, 1, 1.0)), c,
              NoiseModel::gaussian_gradient(1.0)};
    try {
      init({a}, 0.0, 0.0, 1);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfiguration);
    }
    CHECK_NOTHROW(init({a}, 0.05, 0.0, 1));
  }

  TEST_CASE("selection is argmin with lowest-index ties") {
    AllocatorState s = init({vee_arm(1, 0), vee_arm(1, 0), vee_arm(1, 0)}, 0.0, 0.0, 1);
    s.arms[0].lcb = 0.5;
    s.arms[1].lcb = 0.2;
    s.arms[2].lcb = 0.9;
    CHECK(select_arm(s) == 1);
    s.arms[0].lcb = 0.3;
    s.arms[1].lcb = 0.3;
    CHECK(select_arm(s) == 0);
  }

  TEST_CASE("strongly convex quadratic arms follow the hand-computed order") {
    AllocatorState s = init({quadratic_arm(0.9, PgdSchedule::kAuto), quadratic_arm(0.1, PgdSchedule::kAuto)}, 0.0,
                            0.0, 1);
    CHECK(s.arms[0].lcb == doctest::Approx(-0.405 - 3.61));
    CHECK(s.arms[1].lcb == doctest::Approx(-0.005 - 1.21));
    const RegretTrace t = run_fmab(s, 6);
    CHECK(arm_sequence(t) == std::vector<int>{0, 0, 0, 0, 1, 0});
    CHECK(t.rounds[3].lcb == doctest::Approx(-0.405 - 3.61 / 5.0));
    CHECK(*t.rounds[4].step_regret == doctest::Approx(0.4));
    CHECK(*t.rounds[5].cum_regret == doctest::Approx(0.4));
  }

  TEST_CASE("replay matches an independent simulation") {
    AllocatorState s = init({quadratic_arm(0.9, PgdSchedule::kLipschitz), quadratic_arm(0.1, PgdSchedule::kLipschitz)},
                            0.0, 0.0, 1);
    std::vector<SimArm> sim = {{0.9, 1.9, 3.8}, {0.1, 1.1, 2.2}};
    for (auto& a : sim) a.step();
    const double f_star = -0.405;
    double cum = 0.0;
    const RegretTrace t = run_fmab(s, 12);
    REQUIRE(t.rounds.size() == 12);
    for (int r = 0; r < 12; ++r) {
      const int i = sim[1].lcb() < sim[0].lcb() ? 1 : 0;
      sim[static_cast<std::size_t>(i)].step();
      const SimArm& a = sim[static_cast<std::size_t>(i)];
      cum += a.value - f_star;
      const StepEvent& e = t.rounds[static_cast<std::size_t>(r)];
      CHECK(e.t == r + 1);
      CHECK(e.arm == i);
      CHECK(e.k_arm == a.k);
      CHECK(e.value == doctest::Approx(a.value).epsilon(1e-12));
      CHECK(e.lcb == doctest::Approx(a.lcb()).epsilon(1e-12));
      CHECK(*e.step_regret == doctest::Approx(a.value - f_star).epsilon(1e-12));
      CHECK(*e.cum_regret == doctest::Approx(cum).epsilon(1e-12));
    }
  }

  TEST_CASE("stopping rule") {
    AllocatorState s = init({quadratic_arm(0.0, PgdSchedule::kStronglyConvex)}, 0.0, 0.5, 1);
    CHECK(s.arms[0].rate(4) == doctest::Approx(0.25));
    const RegretTrace t = run_fmab(s, 100);
    CHECK(t.rounds.size() == 4);
    CHECK(s.arms[0].k == 5);
    REQUIRE(s.stopped);
    CHECK(*s.stopped == 0);
    CHECK_THROWS_AS(step(s), Error);
    try {
      select_arm(s);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kStopped);
    }

    AllocatorState never = init({quadratic_arm(0.0, PgdSchedule::kStronglyConvex)}, 0.0, 0.0, 1);
    CHECK(run_fmab(never, 500).rounds.size() == 500);
    CHECK_FALSE(never.stopped);
  }

  TEST_CASE("two-arm stopping example") {
    AllocatorState s = init({vee_arm(0.5, 0.0), vee_arm(0.5, 1.0, 0.3)}, 0.0, 0.0, 1);
    const BfiResult r = run_bfi(s, 0.5, 1000);
    CHECK_FALSE(r.budget_limited);
    CHECK(r.rounds_used + 2 <= 19);
    REQUIRE(r.r_b);
    CHECK(*r.r_b <= 0.5);

    AllocatorState same = init({vee_arm(1, 0.2), vee_arm(1, 0.2, 0.5), vee_arm(1, 0.2, -0.5)}, 0.0, 0.0, 1);
    CHECK(*run_bfi(same, 0.3, 10000).r_b == 0.0);

    AllocatorState quick = init({vee_arm(0.5, 0.0), vee_arm(0.5, 1.0, 0.3)}, 0.0, 0.0, 1);
    CHECK(run_bfi(quick, 2.0, 1000).rounds_used <= 3);

    AllocatorState starved = init({vee_arm(0.5, 0.0), vee_arm(0.5, 1.0, 0.3)}, 0.0, 0.0, 1);
    const BfiResult b = run_bfi(starved, 0.01, 5);
    CHECK(b.budget_limited);
    CHECK(b.rounds_used == 5);
  }

  TEST_CASE("deterministic certified invariants") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      AllocatorState s = init(smooth_family(seed), 0.0, 0.0, seed);
      s.check_invariants = true;
      for (int r = 0; r < 150; ++r) {
        step(s);
        std::int64_t pulls = 0;
        for (const auto& a : s.arms) {
          CHECK(a.current_value - a.rate(a.k) <= a.problem->f_star() + 1e-12);
          CHECK(a.lcb == a.current_value - a.rate(a.k));
          CHECK(a.k == a.opt.k);
          pulls += a.k;
        }
        CHECK(pulls == s.t + 3);
      }
      CHECK(s.certificate_violations == 0);
    }
  }

  TEST_CASE("single arm regret is the summed suboptimality") {
    AllocatorState s = init({vee_arm(1.0, 0.5, 0.2)}, 0.0, 0.0, 1);
    double sum = 0.0;
    const RegretTrace t = run_fmab(s, 50);
    for (const auto& e : t.rounds) sum += *e.step_regret;
    CHECK(t.final_regret() == doctest::Approx(sum));
  }

  TEST_CASE("uniform shifts leave the selection unchanged") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      AllocatorState a = init(smooth_family(seed), 0.0, 0.0, seed);
      AllocatorState b = init(smooth_family(seed, 3.5), 0.0, 0.0, seed);
      CHECK(arm_sequence(run_fmab(a, 100)) == arm_sequence(run_fmab(b, 100)));
    }
  }

  TEST_CASE("identical seeds give identical traces") {
    OptimizerConfig c;
    c.kind = OptimizerKind::kStochasticAgd;
    std::vector<ArmSpec> arms;
    for (int i = 0; i < 3; ++i) {
      arms.push_back({std::make_shared<const Problem>(make_smooth_convex(5, RealVector::Constant(5, 0.2 * i), 0.1 * i, i, 1.0)),
                      c, NoiseModel::gaussian_gradient(2.0)});
    }
    AllocatorState a = init(arms, 0.05, 0.0, 9);
    AllocatorState b = init(arms, 0.05, 0.0, 9);
    CHECK(run_fmab(a, 300).to_csv() == run_fmab(b, 300).to_csv());
  }

  TEST_CASE("trace csv schema") {
    AllocatorState s = init({vee_arm(1.0, 0.0)}, 0.0, 0.0, 1);
    const std::string csv = run_fmab(s, 2).to_csv();
    CHECK(csv.rfind("t,arm,k_arm,value,g_value,lcb,step_regret,cum_regret\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  }

  TEST_CASE("heuristic mode") {
    AllocatorState s = init({vee_arm(1.0, 3.5, 0.5)}, 0.0, 0.0, 1);
    heuristic_rate_mode(s);
    const double f1 = s.arms[0].first_value;
    CHECK(s.arms[0].rate(4) == doctest::Approx(f1));
    double last = kInf;
    for (int r = 0; r < 50; ++r) {
      step(s);
      CHECK(s.arms[0].current_value <= last);
      CHECK(s.arms[0].current_value == s.arms[0].opt.best_value_seen);
      last = s.arms[0].current_value;
    }

    BlackBox bb{[](const RealVector& x) { return 0.5 * x.squaredNorm() - 1.0; }, [](const RealVector& x) { return x; }};
    FunctionClass fc;
    fc.M = 2.0;
    fc.R = 2.0;
    OptimizerConfig c;
    c.x0 = scalar(0.5);
    ArmSpec neg{std::make_shared<const Problem>(make_black_box("neg", 1, bb, FeasibleSet::cube(1, 1.0), fc, std::nullopt)),
                c, NoiseModel::none()};
    AllocatorState bad = init({neg}, 0.0, 0.0, 1);
    CHECK_THROWS_AS(heuristic_rate_mode(bad), Error);
  }

  TEST_CASE("heuristic and certified modes agree on the smooth family") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      AllocatorState a = init(smooth_family(seed), 0.0, 0.0, seed);
      AllocatorState b = init(smooth_family(seed), 0.0, 0.0, seed);
      heuristic_rate_mode(b);
      run_fmab(a, 200);
      run_fmab(b, 200);
      auto winner = [](const AllocatorState& s) {
        int best = 0;
        for (int i = 1; i < static_cast<int>(s.arms.size()); ++i) {
          if (s.arms[i].opt.best_value_seen < s.arms[best].opt.best_value_seen) best = i;
        }
        return best;
      };
      CHECK(winner(a) == winner(b));
    }
  }
}
