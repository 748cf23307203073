#include "fmab/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fmab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDimension: return "invalid-dimension";
    case ErrorCode::kInvalidInstance: return "invalid-instance";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kMissingConstant: return "missing-constant";
    case ErrorCode::kIncompatible: return "incompatible";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kStopped: return "stopped";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kSqrtQuadratic: return "sqrt_quadratic";
    case ProblemKind::kMaxAffine: return "max_affine";
    case ProblemKind::kQuadraticArm: return "quadratic_arm";
    case ProblemKind::kBlackBox: return "black_box";
  }
  return "unknown";
}

namespace {

void check_finite(const RealVector& v, const char* what) {
  if (!v.allFinite()) throw Error(ErrorCode::kInvalidInstance, std::string(what) + " has non-finite entries");
}

void check_dim(const Problem& p, const RealVector& x) {
  if (x.size() != p.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "problem '" + p.id() + "' has dim " +
                                                   std::to_string(p.dim()) + ", point has " +
                                                   std::to_string(x.size()));
  }
}

RealVector json_vector(const nlohmann::json& arr) {
  RealVector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

std::vector<double> std_vector(const RealVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

// ---------------------------------------------------------------------------

FeasibleSet FeasibleSet::box(RealVector lower, RealVector upper) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw Error(ErrorCode::kInvalidInstance, "box bounds must be non-empty and of equal size");
  }
  check_finite(lower, "box lower bound");
  check_finite(upper, "box upper bound");
  if ((lower.array() > upper.array()).any()) {
    throw Error(ErrorCode::kInvalidInstance, "box requires lower <= upper coordinatewise");
  }
  const double diam = (upper - lower).norm();
  return FeasibleSet(BoxSet{std::move(lower), std::move(upper)}, diam);
}

FeasibleSet FeasibleSet::cube(int dim, double bound) {
  if (dim < 1) throw Error(ErrorCode::kInvalidDimension, "dim must be >= 1");
  return box(RealVector::Constant(dim, -bound), RealVector::Constant(dim, bound));
}

FeasibleSet FeasibleSet::ball(RealVector center, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::kInvalidInstance, "ball radius must be positive");
  check_finite(center, "ball center");
  return FeasibleSet(BallSet{std::move(center), radius}, 2.0 * radius);
}

FeasibleSet FeasibleSet::unbounded(double nominal_diameter) {
  if (!(nominal_diameter > 0.0) || !std::isfinite(nominal_diameter)) {
    throw Error(ErrorCode::kInvalidInstance, "nominal diameter must be positive and finite");
  }
  return FeasibleSet(UnboundedSet{nominal_diameter}, nominal_diameter);
}

double FeasibleSet::distance(const RealVector& x) const { return (project(*this, x) - x).norm(); }

RealVector project(const FeasibleSet& set, const RealVector& x) {
  return std::visit(
      [&](const auto& s) -> RealVector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSet>) {
          if (x.size() != s.lower.size()) throw Error(ErrorCode::kDimensionMismatch, "projection onto box");
          return x.cwiseMax(s.lower).cwiseMin(s.upper);
        } else if constexpr (std::is_same_v<T, BallSet>) {
          if (x.size() != s.center.size()) throw Error(ErrorCode::kDimensionMismatch, "projection onto ball");
          const RealVector d = x - s.center;
          const double n = d.norm();
          if (n <= s.radius) return x;
          return s.center + d * (s.radius / n);
        } else {
          return x;
        }
      },
      set.variant());
}

std::optional<double> FunctionClass::kappa() const {
  if (mu > 0.0 && std::isfinite(L)) return L / mu;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

Problem::Problem(std::string id, int dim, Body body, FeasibleSet feasible, FunctionClass fclass,
                 std::optional<KnownOptimum> known_opt)
    : id_(std::move(id)),
      dim_(dim),
      body_(std::move(body)),
      feasible_(std::move(feasible)),
      fclass_(fclass),
      known_opt_(std::move(known_opt)) {
  if (dim_ < 1) throw Error(ErrorCode::kInvalidDimension, "dim must be >= 1");
  if (!fclass_.smooth() && !fclass_.lipschitz()) {
    throw Error(ErrorCode::kInvalidInstance, "at least one of L, M must be finite");
  }
  if (fclass_.mu < 0.0) throw Error(ErrorCode::kInvalidInstance, "mu must be >= 0");
  if (auto k = fclass_.kappa(); k && *k < 1.0) {
    throw Error(ErrorCode::kInvalidInstance, "kappa = L / mu must be >= 1");
  }
}

ProblemKind Problem::kind() const { return static_cast<ProblemKind>(body_.index()); }

double Problem::f_star() const {
  if (!known_opt_) throw Error(ErrorCode::kInvalidInstance, "problem '" + id_ + "' has no known optimum");
  return known_opt_->f_star;
}

Problem Problem::shifted(double delta) const {
  Problem p = *this;
  p.shift_ += delta;
  if (p.known_opt_) p.known_opt_->f_star += delta;
  return p;
}

Problem Problem::with_id(std::string id) const {
  Problem p = *this;
  p.id_ = std::move(id);
  return p;
}

// ---------------------------------------------------------------------------

Problem make_smooth_convex_with_sigma(const RealVector& sigma, const RealVector& x_star, double c,
                                      double nominal_diameter) {
  const auto dim = static_cast<int>(sigma.size());
  if (dim < 1) throw Error(ErrorCode::kInvalidDimension, "dim must be >= 1");
  if (x_star.size() != sigma.size()) throw Error(ErrorCode::kDimensionMismatch, "x_star vs sigma");
  check_finite(sigma, "sigma");
  check_finite(x_star, "x_star");
  if ((sigma.array() <= 0.0).any()) throw Error(ErrorCode::kInvalidInstance, "sigma entries must be > 0");

  FunctionClass fc;
  fc.mu = 0.0;
  fc.L = sigma.maxCoeff();
  // ||grad f||^2 = ||S d||^2 / (1 + d^T S d) < max(sigma).
  fc.M = std::sqrt(sigma.maxCoeff());
  fc.R = nominal_diameter;
  return Problem("sqrt_quadratic", dim, SqrtQuadratic{sigma, x_star, c},
                 FeasibleSet::unbounded(nominal_diameter), fc, KnownOptimum{1.0 + c, x_star});
}

Problem make_smooth_convex(int dim, const RealVector& x_star, double c, std::uint64_t rng_seed,
                           std::optional<double> nominal_diameter) {
  if (dim < 1) throw Error(ErrorCode::kInvalidDimension, "dim must be >= 1");
  if (x_star.size() != dim) throw Error(ErrorCode::kDimensionMismatch, "x_star size differs from dim");
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RealVector sigma(dim);
  sigma[0] = 1.0;
  for (int i = 1; i < dim; ++i) sigma[i] = std::exp(-5.0 * unif(rng));
  double diam = nominal_diameter.value_or(2.0 * x_star.norm());
  if (!(diam > 0.0)) diam = 1.0;
  return make_smooth_convex_with_sigma(sigma, x_star, c, diam);
}

Problem make_max_affine_with_slopes(const Eigen::MatrixXd& slopes, const RealVector& x_star,
                                    double c, double bound) {
  const auto dim = static_cast<int>(x_star.size());
  if (dim < 1) throw Error(ErrorCode::kInvalidDimension, "dim must be >= 1");
  if (slopes.cols() != dim) throw Error(ErrorCode::kDimensionMismatch, "slopes vs x_star");
  if (slopes.rows() < 2) throw Error(ErrorCode::kInvalidInstance, "need at least two pieces");
  check_finite(x_star, "x_star");
  if (!(bound > 0.0) || (x_star.array().abs() >= bound).any()) {
    throw Error(ErrorCode::kInvalidInstance, "x_star must lie strictly inside [-bound, bound]^dim");
  }
  // 0 must be in the subdifferential at x*: every slope needs its mirror.
  for (Eigen::Index k = 0; k < slopes.rows(); ++k) {
    bool mirrored = false;
    for (Eigen::Index j = 0; j < slopes.rows() && !mirrored; ++j) {
      mirrored = (slopes.row(k) + slopes.row(j)).cwiseAbs().maxCoeff() <= 1e-15;
    }
    if (!mirrored) throw Error(ErrorCode::kInvalidInstance, "slopes must come in mirrored pairs");
  }
  RealVector offsets = -(slopes * x_star);
  FunctionClass fc;
  fc.mu = 0.0;
  fc.L = kInf;
  fc.M = slopes.rowwise().norm().maxCoeff();
  auto feasible = FeasibleSet::cube(dim, bound);
  fc.R = feasible.diameter();
  return Problem("max_affine", dim, MaxAffine{slopes, offsets, x_star, c, bound}, std::move(feasible),
                 fc, KnownOptimum{c, x_star});
}

Problem make_max_affine(int dim, int pieces, const RealVector& x_star, double c, double bound,
                        std::uint64_t rng_seed) {
  if (dim < 1) throw Error(ErrorCode::kInvalidDimension, "dim must be >= 1");
  if (pieces < 2) throw Error(ErrorCode::kInvalidInstance, "need at least two pieces");
  if (x_star.size() != dim) throw Error(ErrorCode::kDimensionMismatch, "x_star size differs from dim");
  const int half = (pieces + 1) / 2;
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(dim)));
  Eigen::MatrixXd slopes(2 * half, dim);
  for (int k = 0; k < half; ++k) {
    for (int j = 0; j < dim; ++j) slopes(2 * k, j) = normal(rng);
    slopes.row(2 * k + 1) = -slopes.row(2 * k);
  }
  return make_max_affine_with_slopes(slopes, x_star, c, bound);
}

Problem make_quadratic_arm(double mu_arm, double bound) {
  if (!std::isfinite(mu_arm)) throw Error(ErrorCode::kInvalidInstance, "mu_arm must be finite");
  if (!(bound > std::abs(mu_arm))) throw Error(ErrorCode::kInvalidInstance, "mu_arm must lie inside the box");
  FunctionClass fc;
  fc.mu = 1.0;
  fc.L = 1.0;
  fc.M = bound + std::abs(mu_arm);
  auto feasible = FeasibleSet::cube(1, bound);
  fc.R = feasible.diameter();
  RealVector x_star = RealVector::Constant(1, mu_arm);
  return Problem("quadratic_arm", 1, QuadraticArm{mu_arm}, std::move(feasible), fc,
                 KnownOptimum{-mu_arm * mu_arm / 2.0, x_star});
}

Problem make_black_box(std::string id, int dim, BlackBox callbacks, FeasibleSet feasible,
                       FunctionClass fclass, std::optional<KnownOptimum> known_opt) {
  if (!callbacks.value || !callbacks.subgradient) {
    throw Error(ErrorCode::kInvalidInstance, "black box needs value and subgradient callbacks");
  }
  return Problem(std::move(id), dim, std::move(callbacks), std::move(feasible), fclass, std::move(known_opt));
}

// ---------------------------------------------------------------------------

double evaluate(const Problem& problem, const RealVector& x) {
  check_dim(problem, x);
  const double raw = std::visit(
      [&](const auto& b) -> double {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, SqrtQuadratic>) {
          const RealVector d = x - b.x_star;
          return std::sqrt(1.0 + d.dot(b.sigma.cwiseProduct(d))) + b.c;
        } else if constexpr (std::is_same_v<T, MaxAffine>) {
          return (b.slopes * x + b.offsets).maxCoeff() + b.c;
        } else if constexpr (std::is_same_v<T, QuadraticArm>) {
          const double d = x[0] - b.mu_arm;
          return 0.5 * d * d - 0.5 * b.mu_arm * b.mu_arm;
        } else {
          return b.value(x);
        }
      },
      problem.body_);
  return raw + problem.shift_;
}

RealVector subgradient(const Problem& problem, const RealVector& x) {
  check_dim(problem, x);
  return std::visit(
      [&](const auto& b) -> RealVector {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, SqrtQuadratic>) {
          const RealVector d = x - b.x_star;
          const RealVector sd = b.sigma.cwiseProduct(d);
          return sd / std::sqrt(1.0 + d.dot(sd));
        } else if constexpr (std::is_same_v<T, MaxAffine>) {
          const RealVector vals = b.slopes * x + b.offsets;
          Eigen::Index best = 0;
          for (Eigen::Index k = 1; k < vals.size(); ++k) {
            if (vals[k] > vals[best]) best = k;  // strict: lowest index wins ties
          }
          return b.slopes.row(best).transpose();
        } else if constexpr (std::is_same_v<T, QuadraticArm>) {
          return RealVector::Constant(1, x[0] - b.mu_arm);
        } else {
          RealVector g = b.subgradient(x);
          if (g.size() != x.size()) throw Error(ErrorCode::kDimensionMismatch, "black-box subgradient");
          return g;
        }
      },
      problem.body_);
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const Problem& problem) {
  nlohmann::json doc;
  doc["id"] = problem.id();
  doc["kind"] = to_string(problem.kind());
  doc["dim"] = problem.dim();
  doc["diameter"] = problem.feasible().diameter();
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, SqrtQuadratic>) {
          doc["sigma"] = std_vector(b.sigma);
          doc["x_star"] = std_vector(b.x_star);
          doc["c"] = b.c;
        } else if constexpr (std::is_same_v<T, MaxAffine>) {
          nlohmann::json rows = nlohmann::json::array();
          for (Eigen::Index k = 0; k < b.slopes.rows(); ++k) {
            rows.push_back(std_vector(b.slopes.row(k).transpose()));
          }
          doc["slopes"] = rows;
          doc["offsets"] = std_vector(b.offsets);
          doc["x_star"] = std_vector(b.x_star);
          doc["c"] = b.c;
          doc["bound"] = b.bound;
        } else if constexpr (std::is_same_v<T, QuadraticArm>) {
          doc["mu_arm"] = b.mu_arm;
          doc["bound"] = problem.feasible().diameter() / 2.0;
        } else {
          throw Error(ErrorCode::kInvalidArgument, "black-box problems cannot be serialized");
        }
      },
      problem.body());
  if (problem.shift() != 0.0) doc["shift"] = problem.shift();
  return doc;
}

Problem problem_from_json(const nlohmann::json& doc) {
  try {
    const std::string kind = doc.at("kind").get<std::string>();
    Problem p = [&]() -> Problem {
      if (kind == "sqrt_quadratic") {
        return make_smooth_convex_with_sigma(json_vector(doc.at("sigma")), json_vector(doc.at("x_star")),
                                             doc.at("c").get<double>(), doc.at("diameter").get<double>());
      }
      if (kind == "max_affine") {
        const auto& rows = doc.at("slopes");
        const RealVector x_star = json_vector(doc.at("x_star"));
        Eigen::MatrixXd slopes(static_cast<Eigen::Index>(rows.size()), x_star.size());
        for (std::size_t k = 0; k < rows.size(); ++k) {
          slopes.row(static_cast<Eigen::Index>(k)) = json_vector(rows[k]).transpose();
        }
        return make_max_affine_with_slopes(slopes, x_star, doc.at("c").get<double>(),
                                           doc.at("bound").get<double>());
      }
      if (kind == "quadratic_arm") {
        return make_quadratic_arm(doc.at("mu_arm").get<double>(), doc.value("bound", 1.0));
      }
      throw Error(ErrorCode::kInvalidInstance, "unknown problem kind '" + kind + "'");
    }();
    if (doc.contains("dim") && doc.at("dim").get<int>() != p.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "declared dim disagrees with data");
    }
    p = p.with_id(doc.value("id", p.id()));
    if (doc.contains("shift")) p = p.shifted(doc.at("shift").get<double>());
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidInstance, std::string("malformed problem document: ") + e.what());
  }
}

}  // namespace fmab
