#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "fmab/oracles.hpp"

using namespace fmab;

namespace {

ProblemPtr abs_plus_half() {
  Eigen::MatrixXd slopes(2, 1);
  slopes << 1.0, -1.0;
  return std::make_shared<const Problem>(make_max_affine_with_slopes(slopes, RealVector::Zero(1), 0.5, 4.0));
}

}  // namespace

TEST_SUITE("oracles") {
  TEST_CASE("noise-free first-order reply") {
    Rng rng(1);
    const auto p = abs_plus_half();
    const auto reply = query_first_order(*p, RealVector::Constant(1, 2.0), NoiseModel::none(), rng);
    CHECK(reply.value == 2.5);
    REQUIRE(reply.gradient);
    CHECK((*reply.gradient)[0] == 1.0);
  }

  TEST_CASE("gaussian gradient noise is unbiased") {
    const int d = 20;
    const double sigma = 2.0;
    auto p = std::make_shared<const Problem>(make_smooth_convex(d, RealVector::Constant(d, 0.5), 0.0, 4));
    FirstOrderOracle oracle(p, NoiseModel::gaussian_gradient(sigma), 77);
    const RealVector x = RealVector::Constant(d, -0.25);
    const RealVector exact = subgradient(*p, x);
    const int n = 10000;
    RealVector mean = RealVector::Zero(d);
    for (int i = 0; i < n; ++i) mean += *oracle.query(x).gradient;
    mean /= n;
    const double tol = 4.0 * sigma / std::sqrt(d * static_cast<double>(n));
    for (int i = 0; i < d; ++i) CHECK(std::abs(mean[i] - exact[i]) <= tol);
    CHECK(oracle.query_count() == n);
  }

  TEST_CASE("values stay exact under gradient noise") {
    auto p = abs_plus_half();
    FirstOrderOracle oracle(p, NoiseModel::gaussian_gradient(1.0), 3);
    CHECK(oracle.query(RealVector::Constant(1, 1.0)).value == 1.5);
    CHECK(oracle.observe_value(RealVector::Constant(1, -1.0)) == 1.5);
    CHECK(oracle.value_count() == 1);
  }

  TEST_CASE("cauchy quantile transform") {
    CHECK(cauchy_quantile(0.5) == 0.0);
    CHECK(cauchy_quantile(0.75) == doctest::Approx(1.0));
    Rng rng(9);
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i) xs.push_back(query_zero_order_reward(0.0, NoiseModel::cauchy(1.0), rng));
    std::nth_element(xs.begin(), xs.begin() + 50000, xs.end());
    CHECK(std::abs(xs[50000]) <= 0.02);
  }

  TEST_CASE("zero-order rewards center on the arm mean") {
    Rng rng(4);
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) sum += query_zero_order_reward(0.7, NoiseModel::gaussian_value(1.0), rng);
    CHECK(sum / 20000.0 == doctest::Approx(0.7).epsilon(0.03));
    CHECK(query_zero_order_reward(0.4, NoiseModel::none(), rng) == 0.4);
  }

  TEST_CASE("identical seeds give identical replies") {
    auto p = std::make_shared<const Problem>(make_smooth_convex(5, RealVector::Constant(5, 0.1), 0.0, 4));
    for (const auto& noise : {NoiseModel::none(), NoiseModel::gaussian_gradient(1.0)}) {
      FirstOrderOracle a(p, noise, 12), b(p, noise, 12);
      for (int i = 0; i < 50; ++i) {
        const RealVector x = RealVector::Constant(5, 0.01 * i);
        const auto ra = a.query(x);
        const auto rb = b.query(x);
        CHECK(ra.value == rb.value);
        CHECK(*ra.gradient == *rb.gradient);
        CHECK(ra.query_count == i + 1);
      }
    }
  }

  TEST_CASE("invalid noise parameters") {
    CHECK_THROWS_AS(NoiseModel::gaussian_gradient(-1.0).validate(), Error);
    CHECK_THROWS_AS(NoiseModel::cauchy(0.0).validate(), Error);
  }
}
