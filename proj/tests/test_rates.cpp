#include "doctest.h"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "fmab/random.hpp"
#include "fmab/rates.hpp"

using namespace fmab;

namespace {

std::int64_t linear_inverse(const RateFunction& g, double eps) {
  std::int64_t k = 1;
  while (g(k) > eps) ++k;
  return k;
}

// Exhaustive minimum of sum_i G(k_i) over compositions of T into K parts.
double exhaustive_infimum(const std::vector<double>& G, std::int64_t T, std::int64_t K) {
  if (K == 1) return G[static_cast<std::size_t>(T)];
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t k = 0; k <= T; ++k) {
    best = std::min(best, G[static_cast<std::size_t>(k)] + exhaustive_infimum(G, T - k, K - 1));
  }
  return best;
}

void for_each_allocation(std::int64_t tau, std::size_t K, std::vector<std::int64_t>& counts,
                         const std::function<void(const std::vector<std::int64_t>&)>& visit) {
  if (counts.size() + 1 == K) {
    counts.push_back(tau);
    visit(counts);
    counts.pop_back();
    return;
  }
  for (std::int64_t k = 0; k <= tau; ++k) {
    counts.push_back(k);
    for_each_allocation(tau - k, K, counts, visit);
    counts.pop_back();
  }
}

}  // namespace

TEST_SUITE("rates") {
  TEST_CASE("evaluation") {
    CHECK(rate_eval(RateFunction::polynomial(1.0, 2.0), 3) == doctest::Approx(1.0 / 9.0));
    CHECK(rate_eval(RateFunction::exponential(1.0, 2.0), 2) == doctest::Approx(std::exp(-1.0)));
    const auto clipped = RateFunction::polynomial(1.0, 0.5, ConfidenceKind::kLogInvDelta, std::exp(-1.0));
    CHECK(rate_eval(clipped, 4) == doctest::Approx(0.5));
    CHECK(rate_eval(RateFunction::accelerated_smooth(2.0), 1) == doctest::Approx(1.0 / 6.0));
    CHECK(rate_eval(RateFunction::heuristic(8.0), 4) == doctest::Approx(4.0));
    const auto mx = RateFunction::max_of(RateFunction::polynomial(1.0, 2.0), RateFunction::polynomial(0.5, 0.5));
    CHECK(rate_eval(mx, 1) == doctest::Approx(1.0));
    CHECK(rate_eval(mx, 4) == doctest::Approx(0.25));
    CHECK_THROWS_AS(rate_eval(RateFunction::polynomial(1.0, 1.0), 0), Error);
    CHECK_THROWS_AS(RateFunction::polynomial(1.0, 1.0, ConfidenceKind::kLogInvDelta, 0.0), Error);
  }

  TEST_CASE("inverse closed forms") {
    CHECK(rate_inverse(RateFunction::polynomial(1.0, 0.5), 0.1) == 100);
    CHECK(rate_inverse(RateFunction::exponential(1.0, 2.0), std::exp(-1.0)) == 2);
    CHECK_THROWS_AS(rate_inverse(RateFunction::polynomial(1.0, 0.5), 0.0), Error);
  }

  TEST_CASE("inverse agrees with a linear scan") {
    Rng rng(2024);
    auto u = [&](double lo, double hi) { return lo + (hi - lo) * uniform_open01(rng); };
    for (int trial = 0; trial < 1000; ++trial) {
      RateFunction g = RateFunction::polynomial(1.0, 1.0);
      switch (trial % 5) {
        case 0: g = RateFunction::polynomial(u(0.1, 5.0), u(0.3, 2.5)); break;
        case 1: g = RateFunction::exponential(u(0.1, 5.0), u(0.5, 20.0)); break;
        case 2: g = RateFunction::accelerated_smooth(u(0.5, 50.0)); break;
        case 3:
          g = RateFunction::max_of(RateFunction::polynomial(u(0.1, 2.0), 2.0), RateFunction::polynomial(u(0.1, 2.0), 0.5),
                                   ConfidenceKind::kLogInvDelta, u(0.01, 0.2));
          break;
        default: g = RateFunction::heuristic(u(0.1, 4.0)); break;
      }
      const double eps = g(1) * u(0.01, 1.2);
      const auto k = rate_inverse(g, eps);
      CHECK(k == linear_inverse(g, eps));
      CHECK(g(k) <= eps);
      if (k > 1) CHECK(g(k - 1) > eps);
    }
  }

  TEST_CASE("rates are nonincreasing") {
    const std::vector<RateFunction> rates = {
        RateFunction::polynomial(2.0, 0.5), RateFunction::exponential(3.0, 4.0),
        RateFunction::accelerated_smooth(5.0), RateFunction::heuristic(1.0),
        RateFunction::max_of(RateFunction::exponential(1.0, 2.0), RateFunction::polynomial(0.1, 1.0))};
    for (const auto& g : rates) {
      for (std::int64_t k = 1; k < 2000; ++k) {
        CHECK(g(k + 1) <= g(k));
        CHECK(g(k) > 0.0);
      }
    }
  }

  TEST_CASE("stopping budget") {
    const std::vector<RateFunction> two = {RateFunction::polynomial(1.0, 0.5), RateFunction::polynomial(1.0, 0.5)};
    const std::vector<double> gaps = {0.0, 1.0};
    CHECK(bfi_budget_bound(gaps, two, 0.5) == 19);
    const std::vector<RateFunction> one = {RateFunction::polynomial(1.0, 1.0)};
    const std::vector<double> zero = {0.0};
    CHECK(bfi_budget_bound(zero, one, 1.0) == 3);
    const std::vector<double> no_zero = {0.1, 1.0};
    CHECK_THROWS_AS(bfi_budget_bound(no_zero, two, 0.5), Error);
    CHECK_THROWS_AS(bfi_budget_bound(gaps, two, 0.0), Error);
  }

  TEST_CASE("fmab upper bound") {
    const std::vector<RateFunction> four(4, RateFunction::polynomial(1.0, 0.5));
    CHECK(fmab_upper_bound(four, 100) == doctest::Approx(20.0));
    const std::vector<RateFunction> two(2, RateFunction::polynomial(1.0, 1.0));
    CHECK(fmab_upper_bound(two, static_cast<std::int64_t>(std::round(std::exp(2.0)))) ==
          doctest::Approx(2.0 * std::log(7.0)));
    const std::vector<RateFunction> steep(3, RateFunction::polynomial(1.0, 2.0));
    CHECK(fmab_upper_bound(steep, 50) == doctest::Approx(6.0));
    const std::vector<RateFunction> mixed = {RateFunction::polynomial(1.0, 0.5), RateFunction::polynomial(1.0, 1.0)};
    CHECK_THROWS_AS(fmab_upper_bound(mixed, 10), Error);
  }

  TEST_CASE("summed certificates never exceed the explicit upper bound") {
    Rng rng(6);
    for (double r : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0}) {
      for (int inst = 0; inst < 4; ++inst) {
        const std::size_t K = 1 + inst % 3;
        std::vector<RateFunction> rates;
        for (std::size_t i = 0; i < K; ++i) rates.push_back(RateFunction::polynomial(0.2 + 3.0 * uniform_open01(rng), r));
        for (std::int64_t tau = 1; tau <= 12; ++tau) {
          const double bound = fmab_upper_bound_explicit(rates, tau);
          std::vector<std::int64_t> counts;
          for_each_allocation(tau, K, counts, [&](const std::vector<std::int64_t>& c) {
            CHECK(summed_certificates(rates, c) <= bound * (1.0 + 1e-9));
          });
        }
      }
    }
  }

  TEST_CASE("hardness family") {
    HardnessFunction h;
    h.cls = HardnessClass::kConvexLipschitz;
    CHECK(hardness_eval(h, 4.0) == doctest::Approx(0.5));
    CHECK(hardness_G(h, 0) == 0.0);
    CHECK(hardness_G(h, 4) == doctest::Approx(1.0 + std::pow(2.0, -0.5) + std::pow(3.0, -0.5) + 0.5));
    CHECK(fmab_lower_bound(h, 4, 3) == doctest::Approx(2.7845).epsilon(1e-4));
    CHECK(bfi_lower_bound(h, 12, 3) == doctest::Approx(0.5));
    CHECK(vicinity_hitting_time(h, 0.1) == 100);
    CHECK_THROWS_AS(bfi_lower_bound(h, 2, 3), Error);

    HardnessFunction sc;
    sc.cls = HardnessClass::kStronglyConvexSmooth;
    sc.kappa = 4.0;
    CHECK(vicinity_hitting_time(sc, std::exp(-3.0)) == 6);

    for (auto cls : {HardnessClass::kConvexLipschitz, HardnessClass::kSmoothConvex,
                     HardnessClass::kStronglyConvexLipschitz, HardnessClass::kStronglyConvexSmooth}) {
      HardnessFunction f;
      f.cls = cls;
      f.kappa = 9.0;
      for (double s = 1.0; s < 300.0; s += 0.5) CHECK(hardness_eval(f, s + 0.5) <= hardness_eval(f, s));
      for (std::int64_t T : {1, 5, 40}) CHECK(fmab_lower_bound(f, T, 1) == doctest::Approx(hardness_G(f, T)));
    }
  }

  TEST_CASE("strongly convex Lipschitz lower bound grows logarithmically") {
    HardnessFunction h;
    h.cls = HardnessClass::kStronglyConvexLipschitz;
    h.M = 2.0;
    h.mu = 0.5;
    for (std::int64_t T : {1000, 4000, 16000}) {
      const double ratio = fmab_lower_bound(h, 2 * T, 3) / fmab_lower_bound(h, T, 3);
      CHECK(ratio == doctest::Approx(std::log(2.0 * T) / std::log(static_cast<double>(T))).epsilon(0.02));
    }
  }

  TEST_CASE("allocation infimum equals exhaustive search") {
    for (auto cls : {HardnessClass::kConvexLipschitz, HardnessClass::kSmoothConvex,
                     HardnessClass::kStronglyConvexLipschitz, HardnessClass::kStronglyConvexSmooth}) {
      HardnessFunction h;
      h.cls = cls;
      h.kappa = 4.0;
      std::vector<double> G;
      for (std::int64_t m = 0; m <= 16; ++m) G.push_back(hardness_G(h, m));
      for (std::int64_t K = 1; K <= 4; ++K) {
        for (std::int64_t T = 1; T <= 16; ++T) {
          const double brute = exhaustive_infimum(G, T, K);
          CHECK(allocation_infimum(G, T, K) == brute);
          CHECK(fmab_lower_bound(h, T, K) == brute);
          CHECK(G[static_cast<std::size_t>(T)] == brute);
        }
      }
    }
  }

  TEST_CASE("allocation infimum spreads a convex G") {
    // G(m) = m^2 prefers the balanced split.
    std::vector<double> G;
    for (int m = 0; m <= 8; ++m) G.push_back(static_cast<double>(m * m));
    CHECK(allocation_infimum(G, 8, 2) == 32.0);
    CHECK(allocation_infimum(G, 8, 4) == 16.0);
  }

  TEST_CASE("class rate tables") {
    const std::vector<ArmConstants> four(4, ArmConstants{1.0, 1.0, 1.0, 1.0, 0.0});
    CHECK(deterministic_regret_order(HardnessClass::kConvexLipschitz, four, 100) == doctest::Approx(20.0));
    const auto g = deterministic_class_rate(HardnessClass::kConvexLipschitz, ArmConstants{2.0, 1.0, 1.0, 4.0, 0.0});
    CHECK(g(4) == doctest::Approx(4.0));
    const std::vector<ArmConstants> pair = {ArmConstants{1.0, 1.0, 1.0, 1.0, 0.0}, ArmConstants{1.0, 1.0, 1.0, 1.0, 1.0}};
    CHECK(deterministic_bfi_iterations(HardnessClass::kConvexLipschitz, pair, 0.5) == 18);
  }

  TEST_CASE("stochastic rates") {
    StochasticConstants c;
    c.R = 1.0;
    c.M = 0.0;
    c.sigma = 1.0;
    c.mu = 1e9;
    const auto g = stochastic_method_rate(StochasticMethod::kStochasticAgd, c, std::exp(-1.0));
    CHECK(g(3) == doctest::Approx(2.0 / std::sqrt(9.0)));
    CHECK(stochastic_delta(2, 10, 5.0) == doctest::Approx(1.0 / 1000.0));
    c.alpha = 2.0;
    c.L = 1.0;
    const auto clipped = stochastic_method_rate(StochasticMethod::kClippedSstm, c, std::exp(-1.0));
    CHECK(clipped(4) == doctest::Approx(0.5));
    const double small = stochastic_regret_order(StochasticMethod::kClippedSstm, c, 3, 100, 1.0);
    const double large = stochastic_regret_order(StochasticMethod::kClippedSstm, c, 3, 10000, 1.0);
    CHECK(large > small);
  }
}
