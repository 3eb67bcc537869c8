#pragma once

// Scenario plumbing: which interferometer, which parameter is estimated, and
// how a parameter value maps onto a ClockState.

#include <string>
#include <string_view>

#include "clockfisher/core.hpp"
#include "clockfisher/gaussian.hpp"

namespace clockfisher {

enum class ScenarioKind { free_fall, mach_zehnder, bouncer };
enum class Target { g, delta_g, bar_g };

inline std::string_view to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::free_fall: return "free_fall";
    case ScenarioKind::mach_zehnder: return "mach_zehnder";
    case ScenarioKind::bouncer: return "bouncer";
  }
  return "?";
}

inline std::string_view to_string(Target t) {
  switch (t) {
    case Target::g: return "g";
    case Target::delta_g: return "delta_g";
    case Target::bar_g: return "bar_g";
  }
  return "?";
}

inline ScenarioKind parse_scenario(std::string_view s) {
  if (s == "free_fall") return ScenarioKind::free_fall;
  if (s == "mach_zehnder") return ScenarioKind::mach_zehnder;
  if (s == "bouncer") return ScenarioKind::bouncer;
  throw config_error("unknown scenario '" + std::string(s) +
                     "'; expected free_fall, mach_zehnder or bouncer");
}

inline Target parse_target(std::string_view s) {
  if (s == "g") return Target::g;
  if (s == "delta_g") return Target::delta_g;
  if (s == "bar_g") return Target::bar_g;
  throw config_error("unknown target '" + std::string(s) + "'; expected g, delta_g or bar_g");
}

inline double param_value(const PhysicalParams& p, Target t) {
  switch (t) {
    case Target::g: return p.g;
    case Target::delta_g: return p.delta_g();
    case Target::bar_g: return p.bar_g();
  }
  return 0.0;
}

/// Copy of p with the target parameter set to v. Changing delta_g keeps
/// bar_g fixed and vice versa; the Mach-Zehnder anchors stay put.
inline PhysicalParams with_param(PhysicalParams p, Target t, double v) {
  switch (t) {
    case Target::g: p.g = v; break;
    case Target::delta_g: {
      const double mean = p.bar_g();
      p.g_plus = mean - 0.5 * v;
      p.g_minus = mean + 0.5 * v;
      break;
    }
    case Target::bar_g: {
      const double diff = p.delta_g();
      p.g_plus = v - 0.5 * diff;
      p.g_minus = v + 0.5 * diff;
      break;
    }
  }
  return p;
}

struct Scenario {
  ScenarioKind kind = ScenarioKind::free_fall;
  Target target = Target::g;
  PhysicalParams params;
  // Free fall only: use the single-trajectory map instead of the exact one.
  bool approx_map = false;

  double nominal() const { return param_value(params, target); }
  PhysicalParams params_at(double v) const { return with_param(params, target, v); }

  ClockState state_at(double v) const {
    const PhysicalParams p = params_at(v);
    const ClockState init = make_initial_state(p);
    switch (kind) {
      case ScenarioKind::free_fall:
        return approx_map ? evolve(init, p, evolve_freefall_approx)
                          : evolve(init, p, evolve_freefall_full);
      case ScenarioKind::mach_zehnder:
        return evolve(init, p, evolve_mz);
      case ScenarioKind::bouncer:
        break;
    }
    throw config_error("bouncer scenario has no Gaussian-branch state");
  }

  void check() const {
    if (kind == ScenarioKind::mach_zehnder && target == Target::g)
      throw config_error("mach_zehnder estimates delta_g or bar_g, not g");
    if (kind != ScenarioKind::mach_zehnder && target != Target::g)
      throw config_error("target delta_g/bar_g is only valid for mach_zehnder");
  }
};

}  // namespace clockfisher
