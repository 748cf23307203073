#pragma once

// Zero- and first-order oracles with call accounting.

#include <cstdint>
#include <optional>

#include "fmab/problems.hpp"
#include "fmab/random.hpp"

namespace fmab {

enum class NoiseKind { kNone, kGaussianGradient, kGaussianValue, kCauchy };

const char* to_string(NoiseKind kind);

struct NoiseModel {
  NoiseKind kind = NoiseKind::kNone;
  double sigma = 0.0;  // Gaussian standard deviation
  double scale = 1.0;  // Cauchy scale

  static NoiseModel none() { return {}; }
  static NoiseModel gaussian_gradient(double sigma);
  static NoiseModel gaussian_value(double sigma);
  static NoiseModel cauchy(double scale);

  /// Gradient noise standard deviation (0 unless kGaussianGradient).
  double gradient_sigma() const { return kind == NoiseKind::kGaussianGradient ? sigma : 0.0; }
  void validate() const;
};

struct OracleReply {
  double value = 0.0;
  std::optional<RealVector> gradient;
  std::int64_t query_count = 0;
};

/// One-shot first-order query.  GaussianGradient perturbs every gradient
/// coordinate by (sigma / sqrt(dim)) * N(0, 1); GaussianValue perturbs the
/// value; Cauchy perturbs gradient coordinates by (scale / sqrt(dim)) * C(0, 1).
OracleReply query_first_order(const Problem& problem, const RealVector& x, const NoiseModel& noise,
                              Rng& rng);

/// Bandit reward mu_arm + xi.  Cauchy draws use tan(pi (u - 1/2)) on a
/// 53-bit uniform u in (0, 1).
double query_zero_order_reward(double mu_arm, const NoiseModel& noise, Rng& rng);

/// Per-arm oracle: owns its RNG stream and counts first-order calls.  Value
/// observations (the bandit loss feedback) are exact unless a value noise
/// level is configured, and are counted separately.
class FirstOrderOracle {
 public:
  FirstOrderOracle(ProblemPtr problem, NoiseModel noise, std::uint64_t seed,
                   int samples_per_step = 1, double value_sigma = 0.0);

  /// One optimizer step's worth of information at x.  With samples_per_step
  /// > 1 the returned gradient is the mean of that many independent draws;
  /// it still counts as one call.
  OracleReply query(const RealVector& x);

  double observe_value(const RealVector& x);

  const Problem& problem() const { return *problem_; }
  const ProblemPtr& problem_ptr() const { return problem_; }
  const NoiseModel& noise() const { return noise_; }
  std::int64_t query_count() const { return queries_; }
  std::int64_t value_count() const { return observations_; }

 private:
  ProblemPtr problem_;
  NoiseModel noise_;
  Rng rng_;
  int samples_per_step_;
  double value_sigma_;
  std::int64_t queries_ = 0;
  std::int64_t observations_ = 0;
};

}  // namespace fmab
