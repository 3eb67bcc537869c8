#pragma once

// Scenario configuration files: `key = value` lines, optional `[section]`
// headers that prefix the following keys, `#` comments.

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "clockfisher/bouncer.hpp"
#include "clockfisher/core.hpp"
#include "clockfisher/scenario.hpp"

namespace clockfisher {

enum class Method { closed, parametric, oracle, reduced, fi };

inline const std::vector<Method>& all_methods() {
  static const std::vector<Method> m{Method::closed, Method::parametric, Method::oracle, Method::reduced,
                                     Method::fi};
  return m;
}

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::closed: return "closed";
    case Method::parametric: return "parametric";
    case Method::oracle: return "oracle";
    case Method::reduced: return "reduced";
    case Method::fi: return "fi";
  }
  return "?";
}

inline std::set<Method> parse_methods(const std::string& list) {
  std::set<Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    item = item.substr(b, item.find_last_not_of(" \t") - b + 1);
    bool found = false;
    for (Method m : all_methods())
      if (item == to_string(m)) {
        out.insert(m);
        found = true;
      }
    if (!found)
      throw config_error("unknown method '" + item + "'; expected closed, parametric, oracle, reduced or fi");
  }
  if (out.empty()) throw config_error("empty method list");
  return out;
}

struct SweepSpec {
  std::string variable = "dt";
  double start = 1.0;
  double stop = 100.0;
  int points = 20;
  bool log = true;

  void validate() const {
    if (points < 2) throw config_error("sweep: points must be >= 2");
    if (!(start < stop)) throw config_error("sweep: start must be < stop");
    if (log && !(start > 0)) throw config_error("sweep: log sweep needs start > 0");
  }

  std::vector<double> values() const {
    validate();
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
      const double t = static_cast<double>(k) / (points - 1);
      v[k] = log ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start)))
                 : start + t * (stop - start);
    }
    v.front() = start;
    v.back() = stop;
    return v;
  }
};

struct ScenarioConfig {
  Scenario scenario;
  std::set<Method> methods{all_methods().begin(), all_methods().end()};
  SweepSpec sweep;
  std::size_t oracle_grid_points = kMinGridPoints;
  std::size_t bouncer_grid_points = std::size_t{1} << 12;
  int bouncer_n_max = 0;  // 0: auto
  CoefficientMode bouncer_mode = CoefficientMode::exact;
  std::string source;  // file name for diagnostics

  void validate() const {
    scenario.params.validate();
    scenario.check();
    sweep.validate();
  }
};

/// Sets a sweepable variable: dt, sigma, phi, g, m, h (moves x_plus).
inline void set_variable(PhysicalParams& p, const std::string& name, double v) {
  if (name == "dt") p.dt = v;
  else if (name == "sigma") p.sigma = v;
  else if (name == "phi") p.phi = v;
  else if (name == "g") p.g = v;
  else if (name == "m") p.m = v;
  else if (name == "h") p.x_plus = p.x_minus + v;
  else throw config_error("unknown sweep variable '" + name + "'; expected dt, sigma, phi, g, m or h");
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

struct Entry {
  std::string value;
  int line;
};

inline double to_number(const std::string& key, const Entry& e) {
  char* end = nullptr;
  const double v = std::strtod(e.value.c_str(), &end);
  if (e.value.empty() || end != e.value.c_str() + e.value.size() || !std::isfinite(v))
    throw config_error("line " + std::to_string(e.line) + ": key '" + key + "' expects a number, got '" +
                       e.value + "'");
  return v;
}

inline bool to_bool(const std::string& key, const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw config_error("line " + std::to_string(e.line) + ": key '" + key + "' expects true/false, got '" +
                     e.value + "'");
}

}  // namespace detail

inline ScenarioConfig parse_config(std::istream& in, const std::string& source = "<config>") {
  std::map<std::string, detail::Entry> entries;
  std::string raw, section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw config_error("line " + std::to_string(line_no) + ": malformed section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = detail::trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    std::string value = detail::trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (entries.count(key))
      throw config_error("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    entries[key] = {value, line_no};
  }

  ScenarioConfig cfg;
  cfg.source = source;
  PhysicalParams& p = cfg.scenario.params;
  if (auto it = entries.find("scenario.preset"); it != entries.end()) p = preset(it->second.value);
  else p.anchor_mz_continuous();

  bool anchors_given = false;
  for (const auto& [key, e] : entries) {
    auto num = [&] { return detail::to_number(key, e); };
    if (key == "scenario.preset") continue;
    else if (key == "physics.m_kg") p.m = num();
    else if (key == "physics.E0_eV") p.E0 = num() * constants::eV;
    else if (key == "physics.E1_eV") p.E1 = num() * constants::eV;
    else if (key == "physics.g") p.g = num();
    else if (key == "physics.g_plus") p.g_plus = num();
    else if (key == "physics.g_minus") p.g_minus = num();
    else if (key == "physics.V0") p.V0 = num();
    else if (key == "geometry.x_plus_m") p.x_plus = num();
    else if (key == "geometry.x_minus_m") p.x_minus = num();
    else if (key == "geometry.x0_m") p.x0 = num();
    else if (key == "geometry.sigma_m") p.sigma = num();
    else if (key == "geometry.x_plus0_m") p.x_plus0 = num();
    else if (key == "geometry.x_minus0_m") p.x_minus0 = num();
    else if (key == "geometry.V_plus0") { p.V_plus0 = num(); anchors_given = true; }
    else if (key == "geometry.V_minus0") { p.V_minus0 = num(); anchors_given = true; }
    else if (key == "time.dt_s") p.dt = num();
    else if (key == "phase.phi_rad") p.phi = num();
    else if (key == "regime.ratio_threshold") p.ratio_threshold = num();
    else if (key == "scenario.type") cfg.scenario.kind = parse_scenario(e.value);
    else if (key == "scenario.target") cfg.scenario.target = parse_target(e.value);
    else if (key == "scenario.methods") cfg.methods = parse_methods(e.value);
    else if (key == "scenario.approx_map") cfg.scenario.approx_map = detail::to_bool(key, e);
    else if (key == "scenario.ablate_time_dilation") p.ablate_time_dilation = detail::to_bool(key, e);
    else if (key == "sweep.var") cfg.sweep.variable = e.value;
    else if (key == "sweep.from") cfg.sweep.start = num();
    else if (key == "sweep.to") cfg.sweep.stop = num();
    else if (key == "sweep.points") cfg.sweep.points = static_cast<int>(num());
    else if (key == "sweep.log") cfg.sweep.log = detail::to_bool(key, e);
    else if (key == "oracle.grid_points") cfg.oracle_grid_points = static_cast<std::size_t>(num());
    else if (key == "bouncer.grid_points") cfg.bouncer_grid_points = static_cast<std::size_t>(num());
    else if (key == "bouncer.n_max") cfg.bouncer_n_max = static_cast<int>(num());
    else if (key == "bouncer.dV0_dg_m") p.bouncer_dV0_dg = num();
    else if (key == "bouncer.coefficients") {
      if (e.value == "exact") cfg.bouncer_mode = CoefficientMode::exact;
      else if (e.value == "gaussian_approx") cfg.bouncer_mode = CoefficientMode::gaussian_approx;
      else throw config_error("line " + std::to_string(e.line) + ": bouncer.coefficients must be exact or gaussian_approx");
    } else {
      throw config_error("line " + std::to_string(e.line) + ": unknown key '" + key + "'");
    }
  }
  if (!anchors_given) p.anchor_mz_continuous();
  // A Mach-Zehnder config without explicit targets estimates delta_g.
  if (cfg.scenario.kind == ScenarioKind::mach_zehnder && !entries.count("scenario.target"))
    cfg.scenario.target = Target::delta_g;
  cfg.validate();
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config '" + path + "'");
  return parse_config(in, path);
}

}  // namespace clockfisher
