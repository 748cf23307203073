#include "fmab/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fmab {

const char* to_string(RateKind kind) {
  switch (kind) {
    case RateKind::kPolynomial: return "polynomial";
    case RateKind::kExponential: return "exponential";
    case RateKind::kAcceleratedSmooth: return "accelerated_smooth";
    case RateKind::kMaxOf: return "max_of";
    case RateKind::kHeuristic: return "heuristic";
  }
  return "unknown";
}

namespace {

constexpr std::int64_t kMaxIterations = std::int64_t{1} << 60;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be > 0");
}

void check_confidence(ConfidenceKind conf, double delta) {
  if (conf == ConfidenceKind::kNone) return;
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kConfiguration, "log(1/delta) confidence factor needs delta in (0, 1)");
  }
}

std::int64_t ceil_to_iterations(double v) {
  if (!(v < static_cast<double>(kMaxIterations))) {
    throw Error(ErrorCode::kInvalidArgument, "iteration count overflows");
  }
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(v)));
}

/// Moves a closed-form candidate to the exact minimal t with f(t) <= eps for a
/// nonincreasing f, so the result agrees with a linear scan.
template <class F>
std::int64_t settle_inverse(const F& f, double eps, std::int64_t t) {
  t = std::max<std::int64_t>(1, t);
  while (t > 1 && f(t - 1) <= eps) --t;
  while (f(t) > eps) {
    if (t >= kMaxIterations) throw Error(ErrorCode::kInvalidArgument, "rate never reaches eps");
    ++t;
  }
  return t;
}

}  // namespace

RateFunction RateFunction::polynomial(double beta, double r, ConfidenceKind conf, double delta) {
  require_positive(beta, "polynomial beta");
  require_positive(r, "polynomial exponent r");
  check_confidence(conf, delta);
  RateFunction g(RateKind::kPolynomial, beta, r);
  g.conf_ = conf;
  g.delta_ = delta;
  return g;
}

RateFunction RateFunction::exponential(double amp, double tau) {
  require_positive(amp, "exponential amplitude");
  require_positive(tau, "exponential tau");
  return RateFunction(RateKind::kExponential, amp, tau);
}

RateFunction RateFunction::accelerated_smooth(double amp) {
  require_positive(amp, "accelerated amplitude");
  return RateFunction(RateKind::kAcceleratedSmooth, amp, 0.0);
}

RateFunction RateFunction::max_of(RateFunction a, RateFunction b, ConfidenceKind conf, double delta) {
  check_confidence(conf, delta);
  RateFunction g(RateKind::kMaxOf, 0.0, 0.0);
  g.conf_ = conf;
  g.delta_ = delta;
  g.children_ = {std::move(a), std::move(b)};
  return g;
}

RateFunction RateFunction::heuristic(double scale) {
  require_positive(scale, "heuristic scale");
  return RateFunction(RateKind::kHeuristic, scale, 0.5);
}

double RateFunction::confidence_factor() const {
  return conf_ == ConfidenceKind::kLogInvDelta ? std::log(1.0 / delta_) : 1.0;
}

RateFunction RateFunction::with_delta(double delta) const {
  check_confidence(conf_, delta);
  RateFunction g = *this;
  g.delta_ = delta;
  return g;
}

double RateFunction::base(double k) const {
  switch (kind_) {
    case RateKind::kPolynomial: return p0_ / std::pow(k, p1_);
    case RateKind::kExponential: return p0_ * std::exp(-k / p1_);
    case RateKind::kAcceleratedSmooth: return p0_ / (k * k + 5.0 * k + 6.0);
    case RateKind::kMaxOf: {
      const auto ki = static_cast<std::int64_t>(k);
      return std::max(children_[0](ki), children_[1](ki));
    }
    case RateKind::kHeuristic: return p0_ / std::sqrt(k);
  }
  return 0.0;
}

double RateFunction::operator()(std::int64_t k) const {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "rate evaluated at k < 1");
  return confidence_factor() * base(static_cast<double>(k));
}

nlohmann::json RateFunction::to_json() const {
  nlohmann::json doc;
  doc["kind"] = fmab::to_string(kind_);
  switch (kind_) {
    case RateKind::kPolynomial:
      doc["beta"] = p0_;
      doc["r"] = p1_;
      break;
    case RateKind::kExponential:
      doc["amp"] = p0_;
      doc["tau"] = p1_;
      break;
    case RateKind::kAcceleratedSmooth: doc["amp"] = p0_; break;
    case RateKind::kMaxOf:
      doc["children"] = {children_[0].to_json(), children_[1].to_json()};
      break;
    case RateKind::kHeuristic: doc["scale"] = p0_; break;
  }
  doc["confidence"] = conf_ == ConfidenceKind::kNone ? "none" : "log_inv_delta";
  doc["delta"] = delta_;
  return doc;
}

double rate_eval(const RateFunction& g, std::int64_t k) { return g(k); }

std::int64_t rate_inverse(const RateFunction& g, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "rate_inverse needs eps > 0");
  const double target = eps / g.confidence_factor();
  std::int64_t guess = 1;
  switch (g.kind()) {
    case RateKind::kPolynomial: guess = ceil_to_iterations(std::pow(g.beta() / target, 1.0 / g.r())); break;
    case RateKind::kExponential:
      guess = g.amp() <= target ? 1 : ceil_to_iterations(g.tau() * std::log(g.amp() / target));
      break;
    case RateKind::kAcceleratedSmooth: {
      // k^2 + 5k + 6 >= amp / target
      const double disc = 25.0 - 4.0 * (6.0 - g.amp() / target);
      guess = disc <= 0.0 ? 1 : ceil_to_iterations((-5.0 + std::sqrt(disc)) / 2.0);
      break;
    }
    case RateKind::kMaxOf:
      guess = std::max(rate_inverse(g.children()[0], target), rate_inverse(g.children()[1], target));
      break;
    case RateKind::kHeuristic: guess = ceil_to_iterations(std::pow(g.scale() / target, 2.0)); break;
  }
  return settle_inverse([&](std::int64_t k) { return g(k); }, eps, guess);
}

std::int64_t bfi_budget_bound(std::span<const double> gaps, std::span<const RateFunction> rates, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bfi_budget_bound needs eps > 0");
  if (gaps.size() != rates.size() || gaps.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "need one rate per gap");
  }
  if (std::any_of(gaps.begin(), gaps.end(), [](double g) { return g < 0.0; })) {
    throw Error(ErrorCode::kInvalidArgument, "gaps must be >= 0");
  }
  if (std::none_of(gaps.begin(), gaps.end(), [](double g) { return g == 0.0; })) {
    throw Error(ErrorCode::kInvalidArgument, "one arm must be optimal (zero gap)");
  }
  std::int64_t total = 1;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    total += rate_inverse(rates[i], std::max(gaps[i] - eps / 2.0, eps / 2.0));
  }
  return total;
}

namespace {

struct CommonExponent {
  double r;
  std::vector<double> betas;  // beta_i * c_i(delta)
};

CommonExponent common_exponent(std::span<const RateFunction> rates) {
  if (rates.empty()) throw Error(ErrorCode::kInvalidArgument, "no rates given");
  CommonExponent out{rates.front().r(), {}};
  for (const auto& g : rates) {
    if (g.kind() != RateKind::kPolynomial) throw Error(ErrorCode::kInvalidArgument, "polynomial rates required");
    if (g.r() != out.r) throw Error(ErrorCode::kInvalidArgument, "mixed exponents");
    out.betas.push_back(g.beta() * g.confidence_factor());
  }
  return out;
}

}  // namespace

double fmab_upper_bound(std::span<const RateFunction> rates, std::int64_t tau) {
  if (tau < 1) throw Error(ErrorCode::kInvalidArgument, "tau must be >= 1");
  const auto [r, betas] = common_exponent(rates);
  const double t = static_cast<double>(tau);
  if (r < 1.0) {
    double s = 0.0;
    for (double b : betas) s += std::pow(b, 1.0 / r);
    return std::pow(s, r) * std::pow(t, 1.0 - r);
  }
  const double sum = std::accumulate(betas.begin(), betas.end(), 0.0);
  if (r == 1.0) return sum * std::log(t);
  return sum * r / (r - 1.0);
}

double fmab_upper_bound_explicit(std::span<const RateFunction> rates, std::int64_t tau) {
  if (tau < 1) throw Error(ErrorCode::kInvalidArgument, "tau must be >= 1");
  const auto [r, betas] = common_exponent(rates);
  const double t = static_cast<double>(tau);
  if (r < 1.0) return fmab_upper_bound(rates, tau) / (1.0 - r);
  const double sum = std::accumulate(betas.begin(), betas.end(), 0.0);
  if (r == 1.0) return sum * (1.0 + std::log(t));
  return sum * r / (r - 1.0);
}

double summed_certificates(std::span<const RateFunction> rates, std::span<const std::int64_t> counts) {
  if (rates.size() != counts.size()) throw Error(ErrorCode::kInvalidArgument, "one count per rate");
  double total = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    for (std::int64_t k = 1; k <= counts[i]; ++k) total += rates[i](k);
  }
  return total;
}

double stochastic_delta(std::int64_t K, std::int64_t T, double A) {
  if (K < 1 || T < 1 || !(A > 0.0)) throw Error(ErrorCode::kInvalidArgument, "need K, T >= 1 and A > 0");
  const double kt = static_cast<double>(K) * static_cast<double>(T) * static_cast<double>(T);
  return 1.0 / (kt * A);
}

double stochastic_fmab_upper_bound(std::span<const RateFunction> base_rates, std::int64_t tau, std::int64_t K,
                                   std::int64_t T, double A) {
  const double delta = stochastic_delta(K, T, A);
  const double failure = delta * static_cast<double>(K) * static_cast<double>(T) * static_cast<double>(T) * A;
  return fmab_upper_bound(base_rates, tau) * std::log(1.0 / delta) + failure;
}

// ---------------------------------------------------------------------------

const char* to_string(HardnessClass cls) {
  switch (cls) {
    case HardnessClass::kConvexLipschitz: return "convex_lipschitz";
    case HardnessClass::kSmoothConvex: return "smooth_convex";
    case HardnessClass::kStronglyConvexLipschitz: return "strongly_convex_lipschitz";
    case HardnessClass::kStronglyConvexSmooth: return "strongly_convex_smooth";
  }
  return "unknown";
}

HardnessClass hardness_class_from_string(const std::string& name) {
  for (auto cls : {HardnessClass::kConvexLipschitz, HardnessClass::kSmoothConvex,
                   HardnessClass::kStronglyConvexLipschitz, HardnessClass::kStronglyConvexSmooth}) {
    if (name == to_string(cls)) return cls;
  }
  throw Error(ErrorCode::kConfiguration, "unknown function class '" + name + "'");
}

void HardnessFunction::validate() const {
  require_positive(constant_scale, "constant_scale");
  switch (cls) {
    case HardnessClass::kConvexLipschitz:
      require_positive(M, "M");
      require_positive(R, "R");
      break;
    case HardnessClass::kSmoothConvex:
      require_positive(L, "L");
      require_positive(R, "R");
      break;
    case HardnessClass::kStronglyConvexLipschitz:
      require_positive(M, "M");
      require_positive(mu, "mu");
      break;
    case HardnessClass::kStronglyConvexSmooth:
      require_positive(R, "R");
      if (kappa > 0.0) {
        if (kappa < 1.0) throw Error(ErrorCode::kInvalidArgument, "kappa must be >= 1");
      } else {
        require_positive(L, "L");
        require_positive(mu, "mu");
      }
      break;
  }
}

double HardnessFunction::sqrt_kappa() const { return std::sqrt(kappa > 0.0 ? kappa : L / mu); }

double hardness_eval(const HardnessFunction& h, double s) {
  h.validate();
  if (!(s >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "hardness evaluated at s < 1");
  double v = 0.0;
  switch (h.cls) {
    case HardnessClass::kConvexLipschitz: v = h.M * h.R / std::sqrt(s); break;
    case HardnessClass::kSmoothConvex: v = h.L * h.R * h.R / (s * s); break;
    case HardnessClass::kStronglyConvexLipschitz: v = h.M * h.M / (h.mu * s); break;
    case HardnessClass::kStronglyConvexSmooth: v = h.R * h.R * std::exp(-s / h.sqrt_kappa()); break;
  }
  return h.constant_scale * v;
}

double hardness_G(const HardnessFunction& h, std::int64_t m) {
  if (m < 0) throw Error(ErrorCode::kInvalidArgument, "G(m) needs m >= 0");
  double total = 0.0;
  for (std::int64_t s = 1; s <= m; ++s) total += hardness_eval(h, static_cast<double>(s));
  return total;
}

double allocation_infimum(std::span<const double> G_table, std::int64_t T, std::int64_t K) {
  if (T < 0 || K < 1) throw Error(ErrorCode::kInvalidArgument, "need T >= 0 and K >= 1");
  if (static_cast<std::int64_t>(G_table.size()) < T + 1) throw Error(ErrorCode::kInvalidArgument, "G table too short");
  // best[t]: minimum over allocations of t pulls among the arms seen so far.
  std::vector<double> best(G_table.begin(), G_table.begin() + T + 1);
  for (std::int64_t arm = 1; arm < K; ++arm) {
    std::vector<double> next(best.size(), std::numeric_limits<double>::infinity());
    for (std::int64_t t = 0; t <= T; ++t) {
      for (std::int64_t here = 0; here <= t; ++here) {
        next[t] = std::min(next[t], best[t - here] + G_table[here]);
      }
    }
    best = std::move(next);
  }
  return best[T];
}

double fmab_lower_bound(const HardnessFunction& h, std::int64_t T, std::int64_t K) {
  if (T < 1 || K < 1) throw Error(ErrorCode::kInvalidArgument, "need T >= 1 and K >= 1");
  std::vector<double> G(static_cast<std::size_t>(T) + 1, 0.0);
  bool concave = true;
  double prev = std::numeric_limits<double>::infinity();
  for (std::int64_t s = 1; s <= T; ++s) {
    const double g = hardness_eval(h, static_cast<double>(s));
    concave = concave && g <= prev;
    prev = g;
    G[static_cast<std::size_t>(s)] = G[static_cast<std::size_t>(s - 1)] + g;
  }
  if (concave || K == 1) return G.back();
  return allocation_infimum(G, T, K);
}

double bfi_lower_bound(const HardnessFunction& h, std::int64_t T, std::int64_t K) {
  if (K < 1) throw Error(ErrorCode::kInvalidArgument, "K must be >= 1");
  if (T < K) throw Error(ErrorCode::kInvalidArgument, "bfi_lower_bound needs T >= K");
  return hardness_eval(h, static_cast<double>(T) / static_cast<double>(K));
}

std::int64_t vicinity_hitting_time(const HardnessFunction& h, double eps) {
  h.validate();
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "vicinity_hitting_time needs eps > 0");
  const double e = eps / h.constant_scale;
  std::int64_t guess = 1;
  switch (h.cls) {
    case HardnessClass::kConvexLipschitz: guess = ceil_to_iterations(std::pow(h.M * h.R / e, 2.0)); break;
    case HardnessClass::kSmoothConvex: guess = ceil_to_iterations(std::sqrt(h.L * h.R * h.R / e)); break;
    case HardnessClass::kStronglyConvexLipschitz: guess = ceil_to_iterations(h.M * h.M / (h.mu * e)); break;
    case HardnessClass::kStronglyConvexSmooth: {
      const double ratio = h.R * h.R / e;
      guess = ratio <= 1.0 ? 1 : ceil_to_iterations(h.sqrt_kappa() * std::log(ratio));
      break;
    }
  }
  return settle_inverse([&](std::int64_t t) { return hardness_eval(h, static_cast<double>(t)); }, eps, guess);
}

// ---------------------------------------------------------------------------

RateFunction deterministic_class_rate(HardnessClass cls, const ArmConstants& a) {
  switch (cls) {
    case HardnessClass::kConvexLipschitz: return RateFunction::polynomial(a.R * a.M, 0.5);
    case HardnessClass::kSmoothConvex: return RateFunction::polynomial(a.L * a.R * a.R, 2.0);
    case HardnessClass::kStronglyConvexLipschitz: return RateFunction::polynomial(a.M * a.M / a.mu, 1.0);
    case HardnessClass::kStronglyConvexSmooth:
      return RateFunction::exponential(a.R * a.R, std::sqrt(a.L / a.mu));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown class");
}

double deterministic_regret_order(HardnessClass cls, std::span<const ArmConstants> arms, std::int64_t T) {
  if (arms.empty() || T < 1) throw Error(ErrorCode::kInvalidArgument, "need arms and T >= 1");
  double acc = 0.0;
  for (const auto& a : arms) {
    switch (cls) {
      case HardnessClass::kConvexLipschitz: acc += a.M * a.M * a.R * a.R; break;
      case HardnessClass::kSmoothConvex: acc += a.L * a.R * a.R; break;
      case HardnessClass::kStronglyConvexLipschitz: acc += a.M * a.M / a.mu; break;
      case HardnessClass::kStronglyConvexSmooth:
        acc += a.R * a.R / (std::exp(1.0 / std::sqrt(a.L / a.mu)) - 1.0);
        break;
    }
  }
  const double t = static_cast<double>(T);
  switch (cls) {
    case HardnessClass::kConvexLipschitz: return std::sqrt(t * acc);
    case HardnessClass::kStronglyConvexLipschitz: return acc * std::log(t);
    default: return acc;
  }
}

std::int64_t deterministic_bfi_iterations(HardnessClass cls, std::span<const ArmConstants> arms, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be > 0");
  std::int64_t total = 0;
  for (const auto& a : arms) {
    total += rate_inverse(deterministic_class_rate(cls, a), std::max(a.gap - eps / 2.0, eps / 2.0));
  }
  return total;
}

const char* to_string(StochasticMethod method) {
  switch (method) {
    case StochasticMethod::kClippedSstm: return "clipped_sstm";
    case StochasticMethod::kRClippedSstm: return "r_clipped_sstm";
    case StochasticMethod::kStochasticAgd: return "stochastic_agd";
  }
  return "unknown";
}

RateFunction stochastic_method_rate(StochasticMethod method, const StochasticConstants& c, double delta) {
  if (!(c.alpha > 1.0 && c.alpha <= 2.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (1, 2]");
  const auto log_conf = ConfidenceKind::kLogInvDelta;
  switch (method) {
    case StochasticMethod::kClippedSstm:
      return RateFunction::max_of(RateFunction::polynomial(c.L * c.R * c.R, 2.0),
                                  RateFunction::polynomial(c.sigma * c.R, 1.0 - 1.0 / c.alpha), log_conf, delta);
    case StochasticMethod::kRClippedSstm:
      return RateFunction::max_of(RateFunction::exponential(1.0, std::sqrt(c.L / c.mu)),
                                  RateFunction::polynomial(c.sigma * c.sigma / c.mu, 2.0 * (1.0 - 1.0 / c.alpha)),
                                  log_conf, delta);
    case StochasticMethod::kStochasticAgd:
      return RateFunction::max_of(RateFunction::polynomial(4.0 * (c.M * c.M + c.sigma * c.sigma) / c.mu, 1.0),
                                  RateFunction::polynomial(2.0 * c.sigma * c.R / std::sqrt(3.0), 0.5), log_conf,
                                  delta);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown method");
}

double stochastic_regret_order(StochasticMethod method, const StochasticConstants& c, std::int64_t K, std::int64_t T,
                               double A) {
  if (K < 1 || T < 1 || !(A > 0.0)) throw Error(ErrorCode::kInvalidArgument, "need K, T >= 1 and A > 0");
  const double k = static_cast<double>(K);
  const double t = static_cast<double>(T);
  const double log_akt = std::log(A * k * t);
  switch (method) {
    case StochasticMethod::kClippedSstm:
      return std::max(k * c.L * c.R * c.R,
                      c.alpha * c.sigma * c.R * std::pow(k, 1.0 - 1.0 / c.alpha) * std::pow(t, 1.0 / c.alpha) * log_akt);
    case StochasticMethod::kRClippedSstm:
      return std::max(k * std::sqrt(c.L / c.mu), c.sigma * c.sigma / c.mu *
                                                     std::pow(k, 2.0 * (c.alpha - 1.0) / c.alpha) *
                                                     std::pow(t, 2.0 / c.alpha - 1.0) * log_akt);
    case StochasticMethod::kStochasticAgd: return std::sqrt(k * t) * c.sigma * c.R * log_akt;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown method");
}

}  // namespace fmab
