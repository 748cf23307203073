#include "fmab/oracles.hpp"

#include <cmath>

namespace fmab {

const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone: return "none";
    case NoiseKind::kGaussianGradient: return "gaussian_gradient";
    case NoiseKind::kGaussianValue: return "gaussian_value";
    case NoiseKind::kCauchy: return "cauchy";
  }
  return "unknown";
}

NoiseModel NoiseModel::gaussian_gradient(double sigma) {
  NoiseModel n{NoiseKind::kGaussianGradient, sigma, 1.0};
  n.validate();
  return n;
}

NoiseModel NoiseModel::gaussian_value(double sigma) {
  NoiseModel n{NoiseKind::kGaussianValue, sigma, 1.0};
  n.validate();
  return n;
}

NoiseModel NoiseModel::cauchy(double scale) {
  NoiseModel n{NoiseKind::kCauchy, 0.0, scale};
  n.validate();
  return n;
}

void NoiseModel::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::kInvalidArgument, "noise sigma must be >= 0");
  if (kind == NoiseKind::kCauchy && !(scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Cauchy scale must be > 0");
  }
}

namespace {

void perturb_gradient(RealVector& g, const NoiseModel& noise, Rng& rng) {
  const double per_coord = 1.0 / std::sqrt(static_cast<double>(g.size()));
  if (noise.kind == NoiseKind::kGaussianGradient && noise.sigma > 0.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] += noise.sigma * per_coord * normal(rng);
  } else if (noise.kind == NoiseKind::kCauchy) {
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] += noise.scale * per_coord * standard_cauchy(rng);
  }
}

double perturb_value(double v, double sigma, Rng& rng) {
  if (sigma <= 0.0) return v;
  std::normal_distribution<double> normal(0.0, sigma);
  return v + normal(rng);
}

}  // namespace

OracleReply query_first_order(const Problem& problem, const RealVector& x, const NoiseModel& noise,
                              Rng& rng) {
  noise.validate();
  OracleReply reply;
  const double value = evaluate(problem, x);
  reply.value = noise.kind == NoiseKind::kGaussianValue ? perturb_value(value, noise.sigma, rng) : value;
  RealVector g = subgradient(problem, x);
  perturb_gradient(g, noise, rng);
  reply.gradient = std::move(g);
  reply.query_count = 1;
  return reply;
}

double query_zero_order_reward(double mu_arm, const NoiseModel& noise, Rng& rng) {
  noise.validate();
  switch (noise.kind) {
    case NoiseKind::kNone: return mu_arm;
    case NoiseKind::kCauchy: return mu_arm + noise.scale * standard_cauchy(rng);
    case NoiseKind::kGaussianGradient:
    case NoiseKind::kGaussianValue: {
      std::normal_distribution<double> normal(0.0, noise.sigma);
      return noise.sigma > 0.0 ? mu_arm + normal(rng) : mu_arm;
    }
  }
  return mu_arm;
}

// ---------------------------------------------------------------------------

FirstOrderOracle::FirstOrderOracle(ProblemPtr problem, NoiseModel noise, std::uint64_t seed,
                                   int samples_per_step, double value_sigma)
    : problem_(std::move(problem)),
      noise_(noise),
      rng_(seed),
      samples_per_step_(samples_per_step),
      value_sigma_(noise.kind == NoiseKind::kGaussianValue ? noise.sigma : value_sigma) {
  if (!problem_) throw Error(ErrorCode::kInvalidArgument, "oracle needs a problem");
  noise_.validate();
  if (samples_per_step_ < 1) throw Error(ErrorCode::kInvalidArgument, "samples_per_step must be >= 1");
  if (!(value_sigma_ >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "value sigma must be >= 0");
}

OracleReply FirstOrderOracle::query(const RealVector& x) {
  OracleReply reply;
  reply.value = perturb_value(evaluate(*problem_, x), value_sigma_, rng_);
  const RealVector exact = subgradient(*problem_, x);
  RealVector g = RealVector::Zero(exact.size());
  for (int s = 0; s < samples_per_step_; ++s) {
    RealVector draw = exact;
    perturb_gradient(draw, noise_, rng_);
    g += draw;
  }
  if (samples_per_step_ > 1) g /= static_cast<double>(samples_per_step_);
  reply.gradient = std::move(g);
  reply.query_count = ++queries_;
  return reply;
}

double FirstOrderOracle::observe_value(const RealVector& x) {
  ++observations_;
  return perturb_value(evaluate(*problem_, x), value_sigma_, rng_);
}

}  // namespace fmab
