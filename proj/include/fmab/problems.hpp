#pragma once

// Synthetic convex problem instances with known optima.
//
// Three closed families are supported plus a black-box adapter:
//   SqrtQuadratic  f(x) = sqrt(1 + (x - x*)^T diag(sigma) (x - x*)) + c
//   MaxAffine      f(x) = max_k (a_k^T x + b_k) + c, every piece vanishing at x*
//   QuadraticArm   f(x) = (x - m)^2 / 2 - m^2 / 2   (bandit arm with mean m)
//   BlackBox       caller-supplied value/subgradient callbacks

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "fmab/error.hpp"

namespace fmab {

using RealVector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Feasible sets

struct BoxSet {
  RealVector lower;
  RealVector upper;
};

struct BallSet {
  RealVector center;
  double radius = 1.0;
};

/// Whole space; carries a declared diameter so that rates depending on R stay
/// evaluable.
struct UnboundedSet {
  double nominal_diameter = 1.0;
};

class FeasibleSet {
 public:
  static FeasibleSet box(RealVector lower, RealVector upper);
  static FeasibleSet cube(int dim, double bound);
  static FeasibleSet ball(RealVector center, double radius);
  static FeasibleSet unbounded(double nominal_diameter);

  bool is_bounded() const { return !std::holds_alternative<UnboundedSet>(set_); }
  double diameter() const { return diameter_; }
  const std::variant<BoxSet, BallSet, UnboundedSet>& variant() const { return set_; }

  /// Euclidean distance from x to the set (0 for the unbounded variant).
  double distance(const RealVector& x) const;

 private:
  explicit FeasibleSet(std::variant<BoxSet, BallSet, UnboundedSet> set, double diameter)
      : set_(std::move(set)), diameter_(diameter) {}

  std::variant<BoxSet, BallSet, UnboundedSet> set_;
  double diameter_;
};

/// Euclidean projection: clamp for boxes, radial scaling for balls, identity
/// for the whole space.
RealVector project(const FeasibleSet& set, const RealVector& x);

// ---------------------------------------------------------------------------
// Function class constants

struct FunctionClass {
  double mu = 0.0;   // strong convexity
  double L = kInf;   // smoothness
  double M = kInf;   // Lipschitz constant on the feasible set
  double R = 1.0;    // feasible diameter

  bool smooth() const { return std::isfinite(L); }
  bool lipschitz() const { return std::isfinite(M); }
  bool strongly_convex() const { return mu > 0.0; }
  std::optional<double> kappa() const;
};

// ---------------------------------------------------------------------------
// Problem kinds

struct SqrtQuadratic {
  RealVector sigma;
  RealVector x_star;
  double c = 0.0;
};

struct MaxAffine {
  Eigen::MatrixXd slopes;  // one row per piece
  RealVector offsets;
  RealVector x_star;
  double c = 0.0;
  double bound = 0.0;
};

struct QuadraticArm {
  double mu_arm = 0.0;
};

struct BlackBox {
  std::function<double(const RealVector&)> value;
  std::function<RealVector(const RealVector&)> subgradient;
};

struct KnownOptimum {
  double f_star;
  RealVector x_star;
};

enum class ProblemKind { kSqrtQuadratic, kMaxAffine, kQuadraticArm, kBlackBox };

const char* to_string(ProblemKind kind);

class Problem {
 public:
  using Body = std::variant<SqrtQuadratic, MaxAffine, QuadraticArm, BlackBox>;

  Problem(std::string id, int dim, Body body, FeasibleSet feasible, FunctionClass fclass,
          std::optional<KnownOptimum> known_opt);

  const std::string& id() const { return id_; }
  int dim() const { return dim_; }
  ProblemKind kind() const;
  const Body& body() const { return body_; }
  const FeasibleSet& feasible() const { return feasible_; }
  const FunctionClass& fclass() const { return fclass_; }
  const std::optional<KnownOptimum>& known_opt() const { return known_opt_; }

  /// Optimal value; throws kInvalidInstance for black boxes without one.
  double f_star() const;

  /// Copy with every objective value shifted by `delta` (optimum included).
  Problem shifted(double delta) const;
  Problem with_id(std::string id) const;
  double shift() const { return shift_; }

 private:
  std::string id_;
  int dim_;
  Body body_;
  FeasibleSet feasible_;
  FunctionClass fclass_;
  std::optional<KnownOptimum> known_opt_;
  double shift_ = 0.0;

  friend double evaluate(const Problem&, const RealVector&);
  friend RealVector subgradient(const Problem&, const RealVector&);
};

using ProblemPtr = std::shared_ptr<const Problem>;

// ---------------------------------------------------------------------------
// Factories

/// sigma_1 = 1, sigma_i = exp(-5 xi_i) with xi_i ~ U[0, 1].  L = max sigma.
/// The instance is unconstrained; `nominal_diameter` defaults to 2 ||x*||
/// when not given.
Problem make_smooth_convex(int dim, const RealVector& x_star, double c, std::uint64_t rng_seed,
                           std::optional<double> nominal_diameter = std::nullopt);

/// Same family with the diagonal given explicitly.
Problem make_smooth_convex_with_sigma(const RealVector& sigma, const RealVector& x_star, double c,
                                      double nominal_diameter);

/// ceil(p / 2) Gaussian slopes and their mirror images; every piece is zero
/// at x*, which must lie strictly inside [-bound, bound]^dim.
Problem make_max_affine(int dim, int pieces, const RealVector& x_star, double c, double bound,
                        std::uint64_t rng_seed);

/// Explicit slopes; offsets are chosen so every piece vanishes at x*.
/// Slopes must contain mirrored pairs so that 0 is a subgradient at x*.
Problem make_max_affine_with_slopes(const Eigen::MatrixXd& slopes, const RealVector& x_star,
                                    double c, double bound);

/// One-dimensional arm on the box [-bound, bound]; mu = L = 1.
Problem make_quadratic_arm(double mu_arm, double bound = 1.0);

Problem make_black_box(std::string id, int dim, BlackBox callbacks, FeasibleSet feasible,
                       FunctionClass fclass, std::optional<KnownOptimum> known_opt);

// ---------------------------------------------------------------------------
// Evaluation

double evaluate(const Problem& problem, const RealVector& x);

/// Analytic gradient for SqrtQuadratic and QuadraticArm; for MaxAffine the
/// slope of the maximizing piece with the lowest index.
RealVector subgradient(const Problem& problem, const RealVector& x);

// ---------------------------------------------------------------------------
// JSON: {id, kind, dim, sigma[], x_star[], c, slopes[][], offsets[], bound,
// mu_arm, diameter}.  Black boxes cannot be serialized.

nlohmann::json to_json(const Problem& problem);
Problem problem_from_json(const nlohmann::json& doc);

}  // namespace fmab
