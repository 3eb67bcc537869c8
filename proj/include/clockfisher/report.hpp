#pragma once

// Runs the requested methods for one parameter point and serializes the
// result.

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clockfisher/bouncer.hpp"
#include "clockfisher/config.hpp"
#include "clockfisher/estimation.hpp"
#include "clockfisher/oracle.hpp"

namespace clockfisher {

struct EstimationReport {
  std::string scenario;
  std::string parameter_name;
  double parameter_value = 0.0;
  std::optional<double> qfi_closed, qfi_asymptotic, qfi_parametric, qfi_oracle;
  std::optional<double> qfi_reduced, qfi_reduced_closed;
  std::optional<double> fi_closed, fi_numeric;
  std::optional<double> crb_single_shot;
  std::map<std::string, double> metadata;  // steps, truncations
  RegimeReport regime;
  std::vector<std::string> warnings;
};

namespace detail {

inline RegimeReport bouncer_regime(const PhysicalParams& p) {
  RegimeReport r;
  r.threshold = p.ratio_threshold;
  RegimeEntry e{"floor_clearance", p.sigma, std::min(p.x_plus, p.x_minus), 0.0, false};
  e.ratio = e.lhs / e.rhs;
  e.satisfied = std::isfinite(e.ratio) && e.ratio <= p.ratio_threshold;
  r.entries.push_back(e);
  r.satisfied = e.satisfied;
  return r;
}

inline double parametric_floor(const Scenario& sc) {
  // the Mach-Zehnder phases are linear in g_pm, so a coarse absolute step is exact
  return sc.kind == ScenarioKind::mach_zehnder ? 1e-4 * std::max(1.0, std::abs(sc.params.bar_g())) : 1e-9;
}

inline void run_gaussian(const ScenarioConfig& cfg, EstimationReport& r) {
  const Scenario& sc = cfg.scenario;
  const PhysicalParams& p = sc.params;
  const bool ff = sc.kind == ScenarioKind::free_fall;
  const double v = sc.nominal();
  auto state_at = [&](double x) { return sc.state_at(x); };

  for (const auto& w : sc.state_at(v).warnings) r.warnings.push_back(w);
  if (cfg.methods.count(Method::closed)) {
    r.qfi_closed = ff ? qfi_ff_closed(p) : qfi_mz_closed(p, sc.target);
    if (ff) r.qfi_asymptotic = qfi_ff_asymptotic(p);
  }
  if (cfg.methods.count(Method::parametric)) {
    const auto q = qfi_pure_parametric(state_at, v, 1e-5, parametric_floor(sc));
    r.qfi_parametric = q.value;
    r.metadata["parametric_step"] = q.step;
  }
  if (cfg.methods.count(Method::oracle)) {
    const auto q = qfi_numeric(state_at, v, 0.0, cfg.oracle_grid_points);
    r.qfi_oracle = q.value;
    r.metadata["oracle_delta"] = q.delta;
    r.metadata["oracle_infidelity"] = q.infidelity;
    r.metadata["oracle_grid_min_points"] = static_cast<double>(cfg.oracle_grid_points);
    if (q.delta_capped) r.warnings.push_back("oracle: state nearly independent of the parameter (delta capped)");
  }
  if (cfg.methods.count(Method::reduced)) {
    const auto q = qfi_reduced_gram(sc);
    r.qfi_reduced = q.value;
    r.qfi_reduced_closed = ff ? qfi_ff_reduced_closed(p) : qfi_mz_reduced_closed(p, sc.target);
    r.metadata["reduced_step"] = q.step;
  }
  if (cfg.methods.count(Method::fi)) {
    r.fi_closed = ff ? fi_ff_closed(p) : fi_mz_closed(p, sc.target);
    auto probs = [&](double x) {
      const auto pr = detection_probabilities(sc.params_at(x), sc.kind);
      return std::array<double, 2>{pr.first, pr.second};
    };
    const auto f = classical_fi(probs, v, 1e-4, parametric_floor(sc));
    r.fi_numeric = f.value;
    r.metadata["fi_step"] = f.step;
    r.metadata["fi_excluded_outcomes"] = f.excluded_outcomes;
  }
}

inline void run_bouncer(const ScenarioConfig& cfg, EstimationReport& r) {
  const PhysicalParams& p = cfg.scenario.params;
  const int n_max = cfg.bouncer_n_max > 0 ? cfg.bouncer_n_max : auto_n_max(p);
  r.metadata["bouncer_n_max"] = n_max;
  if (cfg.methods.count(Method::closed)) {
    const auto s = bouncer_spectrum(p, n_max);
    const auto c = bouncer_coefficients(p, s, cfg.bouncer_mode);
    const auto q = bouncer_qfi_longtime(p, s, c);
    r.qfi_closed = q.value;
    r.metadata["bouncer_tail_mass"] = c.tail_mass();
    r.metadata["bouncer_weight"] = q.weight;
    for (const auto& w : c.warnings) r.warnings.push_back(w);
  }
  if (cfg.methods.count(Method::oracle)) {
    BouncerOracleOptions opt;
    opt.n_max = n_max;
    opt.grid_points = cfg.bouncer_grid_points;
    const auto q = bouncer_qfi_oracle(p, opt);
    r.qfi_oracle = q.value;
    r.metadata["oracle_delta"] = q.delta;
    r.metadata["oracle_infidelity"] = q.infidelity;
  }
  for (Method m : {Method::parametric, Method::reduced, Method::fi})
    if (cfg.methods.count(m))
      r.warnings.push_back("method '" + std::string(to_string(m)) + "' not available for the bouncer");
}

}  // namespace detail

inline EstimationReport compute_report(const ScenarioConfig& cfg) {
  cfg.validate();
  const Scenario& sc = cfg.scenario;
  EstimationReport r;
  r.scenario = std::string(to_string(sc.kind));
  r.parameter_name = std::string(to_string(sc.target));
  r.parameter_value = sc.nominal();
  if (sc.kind == ScenarioKind::bouncer) {
    r.regime = detail::bouncer_regime(sc.params);
    detail::run_bouncer(cfg, r);
  } else {
    r.regime = check_regime(sc.params);
    detail::run_gaussian(cfg, r);
  }
  if (!r.regime.satisfied) r.warnings.push_back("regime: at least one inequality violated");
  if (r.qfi_closed && *r.qfi_closed > 0) r.crb_single_shot = 1.0 / *r.qfi_closed;
  for (auto* v : {&r.qfi_closed, &r.qfi_parametric, &r.qfi_oracle, &r.qfi_reduced, &r.fi_numeric})
    if (*v && *v < 0.0) r.warnings.push_back("negative Fisher value reported (numerical noise)");
  return r;
}

inline nlohmann::ordered_json to_json(const EstimationReport& r) {
  using nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) -> ordered_json {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };
  ordered_json j;
  j["scenario"] = r.scenario;
  j["parameter_name"] = r.parameter_name;
  j["parameter_value"] = r.parameter_value;
  j["qfi_closed"] = opt(r.qfi_closed);
  j["qfi_asymptotic"] = opt(r.qfi_asymptotic);
  j["qfi_parametric"] = opt(r.qfi_parametric);
  j["qfi_oracle"] = opt(r.qfi_oracle);
  j["qfi_reduced"] = opt(r.qfi_reduced);
  j["qfi_reduced_closed"] = opt(r.qfi_reduced_closed);
  j["fi_closed"] = opt(r.fi_closed);
  j["fi_numeric"] = opt(r.fi_numeric);
  j["crb_single_shot"] = opt(r.crb_single_shot);
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : r.metadata) meta[k] = v;
  j["metadata"] = meta;
  ordered_json reg;
  reg["threshold"] = r.regime.threshold;
  reg["satisfied"] = r.regime.satisfied;
  ordered_json entries = ordered_json::array();
  for (const auto& e : r.regime.entries)
    entries.push_back({{"name", e.name}, {"lhs", e.lhs}, {"rhs", e.rhs}, {"ratio", e.ratio}, {"satisfied", e.satisfied}});
  reg["entries"] = entries;
  j["regime"] = reg;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace clockfisher
