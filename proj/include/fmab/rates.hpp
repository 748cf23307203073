#pragma once

// Convergence-rate certificates g(k, delta), their inverses, and the upper-
// and lower-bound calculators built on them.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "fmab/error.hpp"

namespace fmab {

enum class RateKind {
  kPolynomial,         // beta / k^r
  kExponential,        // amp * exp(-k / tau)
  kAcceleratedSmooth,  // amp / (k^2 + 5k + 6)
  kMaxOf,              // pointwise max of two rates
  kHeuristic,          // scale / sqrt(k)
};

enum class ConfidenceKind { kNone, kLogInvDelta };

const char* to_string(RateKind kind);

/// A certificate g(k, delta): strictly positive and nonincreasing in k.  The
/// confidence multiplier c(delta) = log(1 / delta) is applied on top of the
/// base shape when requested; delta is fixed at construction.
class RateFunction {
 public:
  static RateFunction polynomial(double beta, double r, ConfidenceKind conf = ConfidenceKind::kNone,
                                 double delta = 0.0);
  static RateFunction exponential(double amp, double tau);
  static RateFunction accelerated_smooth(double amp);
  static RateFunction max_of(RateFunction a, RateFunction b, ConfidenceKind conf = ConfidenceKind::kNone,
                             double delta = 0.0);
  static RateFunction heuristic(double scale);

  RateKind kind() const { return kind_; }
  double beta() const { return p0_; }   // polynomial coefficient / amplitude / scale
  double r() const { return p1_; }      // polynomial exponent
  double tau() const { return p1_; }    // exponential time constant
  double amp() const { return p0_; }
  double scale() const { return p0_; }
  double delta() const { return delta_; }
  ConfidenceKind confidence() const { return conf_; }
  const std::vector<RateFunction>& children() const { return children_; }

  /// c(delta): 1 without a confidence factor, log(1 / delta) otherwise.
  double confidence_factor() const;

  /// g(k); requires k >= 1.
  double operator()(std::int64_t k) const;

  /// Same shape with a different confidence level.
  RateFunction with_delta(double delta) const;

  nlohmann::json to_json() const;

 private:
  RateFunction(RateKind kind, double p0, double p1) : kind_(kind), p0_(p0), p1_(p1) {}
  double base(double k) const;

  RateKind kind_;
  double p0_ = 0.0;
  double p1_ = 0.0;
  ConfidenceKind conf_ = ConfidenceKind::kNone;
  double delta_ = 0.0;
  std::vector<RateFunction> children_;
};

double rate_eval(const RateFunction& g, std::int64_t k);

/// Smallest integer tau >= 1 with g(tau) <= eps.
std::int64_t rate_inverse(const RateFunction& g, double eps);

/// Stopping budget 1 + sum_i g_i^{-1}(max(gap_i - eps/2, eps/2)).  Exactly
/// one gap must be zero.
std::int64_t bfi_budget_bound(std::span<const double> gaps, std::span<const RateFunction> rates, double eps);

/// Order bound with unit constant for a common exponent r:
///   r < 1: (sum beta_i^{1/r})^r tau^{1-r};  r = 1: sum beta_i ln tau;
///   r > 1: sum beta_i r / (r - 1).
double fmab_upper_bound(std::span<const RateFunction> rates, std::int64_t tau);

/// The same bound with the integral-comparison constants made explicit, so
/// that it dominates the summed certificates of any allocation of tau pulls:
///   r < 1: (sum beta_i^{1/r})^r tau^{1-r} / (1 - r);  r = 1: sum beta_i (1 + ln tau).
double fmab_upper_bound_explicit(std::span<const RateFunction> rates, std::int64_t tau);

/// sum_i sum_{k=1}^{counts_i} g_i(k).
double summed_certificates(std::span<const RateFunction> rates, std::span<const std::int64_t> counts);

/// Confidence level 1 / (K T^2 A) used by the stochastic regret bounds.
double stochastic_delta(std::int64_t K, std::int64_t T, double A);

/// Stochastic FMAB bound: fmab_upper_bound of the base shapes times
/// log(K T^2 A), plus the failure term delta K T^2 A (= 1).
double stochastic_fmab_upper_bound(std::span<const RateFunction> base_rates, std::int64_t tau,
                                   std::int64_t K, std::int64_t T, double A);

// ---------------------------------------------------------------------------
// Lower-bound algebra

enum class HardnessClass { kConvexLipschitz, kSmoothConvex, kStronglyConvexLipschitz, kStronglyConvexSmooth };

const char* to_string(HardnessClass cls);
HardnessClass hardness_class_from_string(const std::string& name);

struct HardnessFunction {
  HardnessClass cls = HardnessClass::kConvexLipschitz;
  double M = 1.0;
  double L = 1.0;
  double mu = 1.0;
  double R = 1.0;
  double kappa = 0.0;  // 0 means L / mu
  double constant_scale = 1.0;

  void validate() const;
  double sqrt_kappa() const;
};

/// Class-wide hardness at s >= 1 (s may be fractional):
/// MR/sqrt(s), LR^2/s^2, M^2/(mu s), R^2 exp(-s/sqrt(kappa)), times the scale.
double hardness_eval(const HardnessFunction& h, double s);

/// G(m) = sum_{s=1}^m hardness(s); G(0) = 0.
double hardness_G(const HardnessFunction& h, std::int64_t m);

/// min over k_1 + ... + k_K = T, k_i >= 0, of sum_i G(k_i), by dynamic
/// programming over a table G[0..T].
double allocation_infimum(std::span<const double> G_table, std::int64_t T, std::int64_t K);

/// FMAB minimax lower bound.  When G is concave (nonincreasing hardness) the
/// infimum concentrates all pulls on one arm and equals G(T); otherwise the
/// dynamic program is used.
double fmab_lower_bound(const HardnessFunction& h, std::int64_t T, std::int64_t K);

/// BFI minimax lower bound: the hardness evaluated at T / K pulls per arm.
double bfi_lower_bound(const HardnessFunction& h, std::int64_t T, std::int64_t K);

/// t(eps) = min{t >= 1 : hardness(t) <= eps}.
std::int64_t vicinity_hitting_time(const HardnessFunction& h, double eps);

// ---------------------------------------------------------------------------
// Closed-form regret orders for homogeneous arm classes (unit constants).

struct ArmConstants {
  double M = 1.0;
  double L = 1.0;
  double mu = 1.0;
  double R = 1.0;
  double gap = 0.0;  // f_i^* - f^*
};

/// Certificate of the matching base optimizer: RM/sqrt(k), LR^2/k^2,
/// M^2/(mu k), R^2 exp(-k/sqrt(kappa)).
RateFunction deterministic_class_rate(HardnessClass cls, const ArmConstants& arm);

/// Deterministic cumulative-regret order for the class over T rounds.
double deterministic_regret_order(HardnessClass cls, std::span<const ArmConstants> arms, std::int64_t T);

/// Iterations to reach R_B <= eps: sum_i g_i^{-1}(max(gap_i - eps/2, eps/2)).
std::int64_t deterministic_bfi_iterations(HardnessClass cls, std::span<const ArmConstants> arms, double eps);

enum class StochasticMethod { kClippedSstm, kRClippedSstm, kStochasticAgd };

const char* to_string(StochasticMethod method);

struct StochasticConstants {
  double L = 1.0;
  double mu = 1.0;
  double M = 1.0;
  double R = 1.0;
  double sigma = 1.0;
  double alpha = 2.0;  // noise moment order in (1, 2]
};

/// High-probability certificates, each a MaxOf of a deterministic and a noise
/// term carrying log(1/delta):
///   clipped-SSTM    max(LR^2/k^2, sigma R / k^{1-1/alpha})
///   R-clipped-SSTM  max(exp(-k/sqrt(kappa)), sigma^2/mu k^{-2(1-1/alpha)})
///   stochastic AGD  max(4(M^2+sigma^2)/(mu k), 2 sigma R / sqrt(3k))
RateFunction stochastic_method_rate(StochasticMethod method, const StochasticConstants& c, double delta);

/// Stochastic cumulative-regret orders for K homogeneous arms over T rounds
/// with value bound A.
double stochastic_regret_order(StochasticMethod method, const StochasticConstants& c, std::int64_t K,
                               std::int64_t T, double A);

}  // namespace fmab
