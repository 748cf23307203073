#include "doctest.h"

#include <cmath>

#include "fmab/problems.hpp"
#include "fmab/random.hpp"

using namespace fmab;

namespace {

RealVector vec(std::initializer_list<double> xs) {
  RealVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

RealVector random_point(int dim, double bound, Rng& rng) {
  RealVector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = bound * (2.0 * uniform_open01(rng) - 1.0);
  return v;
}

Problem abs_plus_half() {
  Eigen::MatrixXd slopes(2, 1);
  slopes << 1.0, -1.0;
  return make_max_affine_with_slopes(slopes, vec({0.0}), 0.5, 4.0);
}

}  // namespace

TEST_SUITE("problems") {
  TEST_CASE("smooth convex family") {
    const Problem p = make_smooth_convex_with_sigma(vec({1.0, 1.0}), vec({0.0, 0.0}), 0.5, 1.0);
    CHECK(evaluate(p, vec({0.0, 0.0})) == doctest::Approx(1.5));
    CHECK(p.f_star() == doctest::Approx(1.5));
    CHECK(subgradient(p, vec({0.0, 0.0})).norm() == 0.0);

    const Problem q = make_smooth_convex(20, RealVector::Constant(20, 0.3), 1.0, 7);
    const auto& body = std::get<SqrtQuadratic>(q.body());
    CHECK(body.sigma[0] == 1.0);
    for (int i = 1; i < 20; ++i) {
      CHECK(body.sigma[i] > std::exp(-5.0) - 1e-15);
      CHECK(body.sigma[i] <= 1.0);
    }
    CHECK(q.fclass().L == doctest::Approx(body.sigma.maxCoeff()));
    CHECK(q.f_star() == doctest::Approx(2.0));
    CHECK_FALSE(q.feasible().is_bounded());
    CHECK_THROWS_AS(make_smooth_convex(0, RealVector(0), 0.0, 1), Error);
  }

  TEST_CASE("sqrt-quadratic gradient matches central differences") {
    Rng rng(11);
    const Problem p = make_smooth_convex(20, random_point(20, 1.0, rng), 0.0, 3);
    for (int trial = 0; trial < 20; ++trial) {
      const RealVector x = random_point(20, 2.0, rng);
      const RealVector g = subgradient(p, x);
      RealVector fd(20);
      const double h = 1e-6;
      for (int i = 0; i < 20; ++i) {
        RealVector a = x, b = x;
        a[i] += h;
        b[i] -= h;
        fd[i] = (evaluate(p, a) - evaluate(p, b)) / (2 * h);
      }
      CHECK((g - fd).norm() / std::max(1e-12, g.norm()) <= 1e-6);
    }
  }

  TEST_CASE("max-affine family") {
    const Problem p = abs_plus_half();
    CHECK(evaluate(p, vec({2.0})) == doctest::Approx(2.5));
    CHECK(subgradient(p, vec({2.0}))[0] == 1.0);
    CHECK(p.f_star() == 0.5);

    Rng rng(5);
    const RealVector xs = random_point(20, 1.0, rng);
    for (int pieces : {5, 10, 12}) {
      const Problem q = make_max_affine(20, pieces, xs, 0.5, 4.0, 99);
      const auto& body = std::get<MaxAffine>(q.body());
      CHECK(body.slopes.rows() == 2 * ((pieces + 1) / 2));
      CHECK(evaluate(q, xs) == doctest::Approx(0.5));
      double maxnorm = 0.0;
      for (int r = 0; r < body.slopes.rows(); ++r) maxnorm = std::max(maxnorm, body.slopes.row(r).norm());
      CHECK(q.fclass().M == doctest::Approx(maxnorm));
      for (int trial = 0; trial < 100; ++trial) CHECK(evaluate(q, random_point(20, 4.0, rng)) >= 0.5 - 1e-12);
    }
    CHECK_THROWS_AS(make_max_affine(2, 4, vec({5.0, 0.0}), 0.0, 4.0, 1), Error);
  }

  TEST_CASE("max-affine subgradient inequality") {
    Rng rng(8);
    const Problem q = make_max_affine(5, 6, random_point(5, 1.0, rng), 1.0, 2.0, 4);
    for (int trial = 0; trial < 200; ++trial) {
      const RealVector x = random_point(5, 2.0, rng);
      const RealVector y = random_point(5, 2.0, rng);
      CHECK(evaluate(q, y) >= evaluate(q, x) + subgradient(q, x).dot(y - x) - 1e-12);
    }
  }

  TEST_CASE("quadratic arms") {
    const Problem p = make_quadratic_arm(0.3);
    CHECK(p.f_star() == doctest::Approx(-0.045));
    CHECK(p.known_opt()->x_star[0] == doctest::Approx(0.3));
    CHECK(make_quadratic_arm(0.0).f_star() == 0.0);
    const Problem q = make_quadratic_arm(0.9);
    CHECK(evaluate(q, vec({0.0})) == 0.0);
    CHECK(subgradient(q, vec({0.0}))[0] == doctest::Approx(-0.9));
    CHECK(q.fclass().mu == 1.0);
    CHECK(q.fclass().L == 1.0);
  }

  TEST_CASE("projection") {
    const auto box = FeasibleSet::cube(2, 4.0);
    CHECK(project(box, vec({5.0, -5.0})) == vec({4.0, -4.0}));
    CHECK(project(box, vec({1.0, 2.0})) == vec({1.0, 2.0}));
    CHECK(box.diameter() == doctest::Approx(std::sqrt(128.0)));
    const auto ball = FeasibleSet::ball(vec({0.0, 0.0}), 1.0);
    const RealVector p = project(ball, vec({3.0, 4.0}));
    CHECK(p[0] == doctest::Approx(0.6));
    CHECK(p[1] == doctest::Approx(0.8));
    CHECK(ball.diameter() == 2.0);
    const auto free = FeasibleSet::unbounded(3.0);
    CHECK(project(free, vec({9.0, 9.0})) == vec({9.0, 9.0}));
    CHECK_THROWS_AS(FeasibleSet::ball(vec({0.0}), 0.0), Error);
    CHECK_THROWS_AS(FeasibleSet::box(vec({1.0}), vec({0.0})), Error);
  }

  TEST_CASE("projection is idempotent and non-expansive") {
    Rng rng(2);
    const auto sets = {FeasibleSet::cube(3, 1.0), FeasibleSet::ball(vec({0.5, 0.0, -0.5}), 0.7)};
    for (const auto& s : sets) {
      for (int trial = 0; trial < 200; ++trial) {
        const RealVector x = random_point(3, 3.0, rng);
        const RealVector y = random_point(3, 3.0, rng);
        const RealVector px = project(s, x);
        CHECK((project(s, px) - px).norm() <= 1e-15);
        CHECK((px - project(s, y)).norm() <= (x - y).norm() + 1e-12);
      }
    }
  }

  TEST_CASE("dimension mismatch") {
    const Problem p = make_quadratic_arm(0.1);
    CHECK_THROWS_AS(evaluate(p, vec({0.0, 1.0})), Error);
    try {
      subgradient(p, vec({0.0, 1.0}));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDimensionMismatch);
    }
  }

  TEST_CASE("json round trip is byte stable") {
    Rng rng(3);
    const Problem a = make_smooth_convex(4, random_point(4, 1.0, rng), 0.5, 12);
    const Problem b = make_max_affine(3, 5, random_point(3, 1.0, rng), 1.0, 4.0, 13);
    const Problem c = make_quadratic_arm(0.4);
    for (const Problem* p : {&a, &b, &c}) {
      const auto doc = to_json(*p);
      for (const char* key : {"id", "kind", "dim", "diameter"}) CHECK(doc.contains(key));
      if (p->kind() != ProblemKind::kQuadraticArm) {
        CHECK(doc.contains("x_star"));
        CHECK(doc.contains("c"));
      }
      const Problem back = problem_from_json(doc);
      CHECK(to_json(back).dump() == doc.dump());
      const RealVector x = RealVector::Constant(p->dim(), 0.2);
      CHECK(evaluate(back, x) == evaluate(*p, x));
    }
    CHECK(to_json(make_smooth_convex(4, RealVector::Constant(4, 0.1), 0.0, 12)).dump() ==
          to_json(make_smooth_convex(4, RealVector::Constant(4, 0.1), 0.0, 12)).dump());
  }

  TEST_CASE("synthetic instances are lower bounded by their optimum") {
    Rng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
      const RealVector xs = random_point(6, 1.0, rng);
      const Problem p = make_smooth_convex(6, xs, 0.2 * trial, 100 + trial);
      for (int s = 0; s < 50; ++s) CHECK(evaluate(p, random_point(6, 3.0, rng)) >= p.f_star() - 1e-12);
    }
    const Problem q = make_quadratic_arm(-0.7);
    for (int s = 0; s < 50; ++s) CHECK(evaluate(q, random_point(1, 1.0, rng)) >= q.f_star() - 1e-12);
  }

  TEST_CASE("shifting moves every value and the optimum") {
    const Problem p = make_quadratic_arm(0.5).shifted(2.0);
    CHECK(p.f_star() == doctest::Approx(2.0 - 0.125));
    CHECK(evaluate(p, vec({0.0})) == doctest::Approx(2.0));
  }
}
