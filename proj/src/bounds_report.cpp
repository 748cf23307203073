#include <cmath>

#include "fmab/harness.hpp"

namespace fmab {

namespace {

bool all_polynomial(const std::vector<RateFunction>& rates) {
  for (const auto& g : rates) {
    if (g.kind() != RateKind::kPolynomial || g.r() != rates.front().r()) return false;
  }
  return true;
}

nlohmann::json or_null(bool ok, double v) { return ok ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json emit_bounds_report(const ExperimentConfig& c) {
  HardnessFunction h;
  h.cls = hardness_class_from_string(c.get_string("class", "convex_lipschitz"));
  h.M = c.get_double("M", 1.0);
  h.L = c.get_double("L", 1.0);
  h.mu = c.get_double("mu", 1.0);
  h.R = c.get_double("R", 1.0);
  h.kappa = c.get_double("kappa", 0.0);
  h.constant_scale = c.get_double("constant_scale", 1.0);
  h.validate();

  const std::int64_t T = c.get_int("T", 100);
  const double eps = c.get_double("eps", 0.5);
  const double A = c.get_double("A", 1.0);
  if (T < 1) throw Error(ErrorCode::kConfiguration, "T must be >= 1");
  if (!(eps > 0.0)) throw Error(ErrorCode::kConfiguration, "eps must be > 0");
  if (!(A > 0.0)) throw Error(ErrorCode::kConfiguration, "A must be > 0");

  std::vector<double> gaps = c.get_list("gaps", {});
  if (gaps.empty()) {
    const auto K = c.get_int("K", 2);
    if (K < 1) throw Error(ErrorCode::kConfiguration, "K must be >= 1");
    gaps.assign(static_cast<std::size_t>(K), 1.0);
    gaps[0] = 0.0;
  } else if (c.has("K") && c.get_int("K", 0) != static_cast<std::int64_t>(gaps.size())) {
    throw Error(ErrorCode::kConfiguration, "gaps needs K entries");
  }
  const auto K = static_cast<std::int64_t>(gaps.size());

  std::vector<ArmConstants> arms;
  std::vector<RateFunction> rates;
  for (double gap : gaps) {
    ArmConstants a{h.M, h.L, h.mu, h.R, gap};
    arms.push_back(a);
    const RateFunction g = deterministic_class_rate(h.cls, a);
    rates.push_back(g.kind() == RateKind::kPolynomial
                        ? RateFunction::polynomial(g.beta() * h.constant_scale, g.r())
                        : g);
  }
  const bool poly = all_polynomial(rates);

  nlohmann::json doc;
  doc["class"] = to_string(h.cls);
  doc["constants"] = {{"M", h.M}, {"L", h.L}, {"mu", h.mu}, {"R", h.R}, {"kappa", h.kappa},
                      {"constant_scale", h.constant_scale}, {"A", A}};
  doc["K"] = K;
  doc["T"] = T;
  doc["eps"] = eps;
  doc["gaps"] = gaps;
  nlohmann::json rj = nlohmann::json::array();
  for (const auto& g : rates) rj.push_back(g.to_json());
  doc["rates"] = rj;

  doc["upper"] = {
      {"fmab", or_null(poly, poly ? fmab_upper_bound(rates, T) : 0.0)},
      {"fmab_explicit", or_null(poly, poly ? fmab_upper_bound_explicit(rates, T) : 0.0)},
      {"regret_order", deterministic_regret_order(h.cls, arms, T) * h.constant_scale},
  };
  doc["lower"] = {
      {"fmab", fmab_lower_bound(h, T, K)},
      {"bfi", bfi_lower_bound(h, T, K)},
      {"hardness_at_T", hardness_eval(h, static_cast<double>(T))},
  };
  doc["bfi"] = {
      {"budget", bfi_budget_bound(gaps, rates, eps)},
      {"iterations", deterministic_bfi_iterations(h.cls, arms, eps)},
      {"vicinity_hitting_time", vicinity_hitting_time(h, eps)},
  };

  StochasticConstants sc;
  sc.L = h.L;
  sc.mu = h.mu;
  sc.M = h.M;
  sc.R = h.R;
  sc.sigma = c.get_double("stochastic_sigma", 1.0);
  sc.alpha = c.get_double("alpha", 2.0);
  nlohmann::json st;
  st["delta"] = stochastic_delta(K, T, A);
  for (auto m : {StochasticMethod::kClippedSstm, StochasticMethod::kRClippedSstm, StochasticMethod::kStochasticAgd}) {
    st[to_string(m)] = stochastic_regret_order(m, sc, K, T, A) * h.constant_scale;
  }
  doc["stochastic"] = st;

  nlohmann::json grid = nlohmann::json::array();
  for (double td : c.get_list("T_grid", {10, 100, 1000, 10000})) {
    const auto t = static_cast<std::int64_t>(td);
    if (t < 1) throw Error(ErrorCode::kConfiguration, "T_grid entries must be >= 1");
    const double upper = deterministic_regret_order(h.cls, arms, t) * h.constant_scale;
    const double lower = fmab_lower_bound(h, t, K);
    grid.push_back({{"T", t}, {"lower", lower}, {"upper", upper},
                    {"upper_explicit", or_null(poly, poly ? fmab_upper_bound_explicit(rates, t) : 0.0)},
                    {"log_factor", std::max(1.0, std::log(static_cast<double>(t)))}});
  }
  doc["sandwich"] = grid;
  return doc;
}

}  // namespace fmab
