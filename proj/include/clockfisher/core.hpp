#pragma once

// Scenario constants, proper-time formulas and the regime checker shared by
// the free-fall, Mach-Zehnder and bouncer scenarios. SI units throughout.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clockfisher {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace constants {
inline constexpr double c = 299792458.0;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double eV = 1.602176634e-19;
inline constexpr double GM_earth = 3.986004418e14;
inline constexpr double R_earth = 6.371e6;
inline constexpr double pi = 3.14159265358979323846;
}  // namespace constants

struct PhysicalParams {
  double m = 1e-25;
  double E0 = 0.0;
  double E1 = 2.8 * constants::eV;
  double g = 9.81;
  double g_plus = 9.81;
  double g_minus = 9.81;
  double c = constants::c;
  double hbar = constants::hbar;

  double x_plus = 0.51;
  double x_minus = 0.50;
  double x0 = 0.505;
  double x_plus0 = 0.5098;
  double x_minus0 = 0.5001;
  // V_N(x0) and the Mach-Zehnder anchors V_N(x_plus0), V_N(x_minus0), m^2/s^2.
  double V0 = -constants::GM_earth / constants::R_earth;
  double V_plus0 = 0.0;
  double V_minus0 = 0.0;

  double sigma = 1e-4;
  double dt = 10.0;
  double phi = 0.0;

  double ratio_threshold = 0.1;
  // Zeroes the V/c^2 and p^2/(2 m^2 c^2) multipliers of the clock Hamiltonian.
  bool ablate_time_dilation = false;
  // dV(x0)/dg for the bouncer energy derivative; 0 holds the anchor fixed.
  double bouncer_dV0_dg = 0.0;

  double energy(int level) const { return level == 0 ? E0 : E1; }
  double rest_energy() const { return m * c * c; }
  double z(int level) const { return energy(level) / rest_energy(); }
  double z0() const { return z(0); }
  double z1() const { return z(1); }
  double dz() const { return z1() - z0(); }
  double zbar() const { return 0.5 * (z0() + z1()); }
  // z as seen by the dynamics: zero when time dilation is ablated.
  double coupling_z(int level) const { return ablate_time_dilation ? 0.0 : z(level); }
  double dE() const { return E1 - E0; }
  double Ebar() const { return 0.5 * (E0 + E1); }

  double h() const { return x_plus - x_minus; }
  double h_mean() const { return 0.5 * (x_plus + x_minus) - x0; }
  double h_plus() const { return x_plus - x_plus0; }
  double h_minus() const { return x_minus - x_minus0; }
  double dh() const { return h_plus() - h_minus(); }
  double h_mean_mz() const { return 0.5 * (h_plus() + h_minus()); }
  double d() const { return x_plus0 - x_minus0; }

  double delta_g() const { return g_minus - g_plus; }
  double bar_g() const { return 0.5 * (g_plus + g_minus); }

  // Free-fall linearized potential V_F(x) = g (x - x0) + V_N(x0).
  double potential_ff(double x) const { return g * (x - x0) + V0; }

  /// Squared evolved width sigma^2 + (hbar dt / (2 m sigma))^2.
  double spread2() const {
    const double s = hbar * dt / (2.0 * m * sigma);
    return sigma * sigma + s * s;
  }

  /// Chooses the Mach-Zehnder anchors so the piecewise potential is
  /// continuous at x0.
  void anchor_mz_continuous() {
    V_plus0 = V0 + g_plus * (x_plus0 - x0);
    V_minus0 = V0 + g_minus * (x_minus0 - x0);
  }

  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw config_error(std::string("invalid parameters: ") + what);
    };
    require(m > 0, "m > 0");
    require(sigma > 0, "sigma > 0");
    require(dt >= 0, "dt >= 0");
    require(c > 0 && hbar > 0, "c > 0 and hbar > 0");
    require(E0 >= 0 && E1 >= E0, "E1 >= E0 >= 0");
    require(z0() < 1e-6 && z1() < 1e-6, "E_i/(m c^2) < 1e-6");
    require(x_plus > x_minus, "x_plus > x_minus");
    require(std::isfinite(g) && std::isfinite(g_plus) && std::isfinite(g_minus),
            "finite accelerations");
    require(ratio_threshold > 0, "regime.ratio_threshold > 0");
  }
};

/// d(tau)/dt = 1 + V/c^2 - p^2/(2 m^2 c^2).
inline double proper_time_rate(double V, double p, const PhysicalParams& params) {
  const double c2 = params.c * params.c;
  return 1.0 + V / c2 - p * p / (2.0 * params.m * params.m * c2);
}

inline double shifted_frequency(double omega, double V, double p, const PhysicalParams& params) {
  return omega * proper_time_rate(V, p, params);
}

struct RegimeEntry {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool satisfied = false;
};

struct RegimeReport {
  std::vector<RegimeEntry> entries;
  double threshold = 0.1;
  bool satisfied = false;

  const RegimeEntry& at(std::string_view name) const {
    for (const auto& e : entries)
      if (e.name == name) return e;
    throw std::out_of_range("no regime entry " + std::string(name));
  }
};

/// Evaluates every "lhs << rhs" inequality as lhs/rhs <= threshold.
inline RegimeReport check_regime(const PhysicalParams& p) {
  RegimeReport report;
  report.threshold = p.ratio_threshold;
  const double Sigma = std::sqrt(p.spread2());
  const double zmax = std::max(p.z0(), p.z1());

  auto add = [&](std::string name, double lhs, double rhs) {
    RegimeEntry e{std::move(name), lhs, rhs, lhs / rhs, false};
    e.satisfied = std::isfinite(e.ratio) && e.ratio <= p.ratio_threshold;
    report.entries.push_back(std::move(e));
  };

  add("sigma_ll_h", p.sigma, p.h());
  add("spread_ll_sigma", p.hbar / p.m * p.dt / p.h(), p.sigma);
  add("momentum_shift", p.m * p.g * p.dt * zmax, p.hbar / Sigma);
  add("position_shift", 0.5 * p.g * p.dt * p.dt * zmax, Sigma);
  add("variance_shift", p.hbar * p.dt / (p.m * p.sigma) * std::sqrt(zmax), Sigma);
  add("mz_linearization", std::max(std::abs(p.h_plus()), std::abs(p.h_minus())), std::abs(p.d()));
  add("floor_clearance", p.sigma, std::min(p.x_plus, p.x_minus));

  report.satisfied = std::all_of(report.entries.begin(), report.entries.end(),
                                 [](const RegimeEntry& e) { return e.satisfied; });
  return report;
}

inline const std::array<std::string_view, 3>& preset_names() {
  static const std::array<std::string_view, 3> names{"sr88_10s", "sr88_100s", "sr88_bouncer"};
  return names;
}

/// Strontium-88 scenario constants.
///
/// The free-fall presets put the arms 1 cm apart half a meter above the floor
/// with x0 midway between them; the Mach-Zehnder expansion points sit 0.2 mm
/// above and 0.1 mm below the arms. sr88_bouncer shrinks the geometry to a
/// few gravitational lengths so the Airy spectrum stays tractable.
inline PhysicalParams preset(std::string_view name) {
  PhysicalParams p;
  p.m = 1e-25;
  p.E0 = 0.0;
  p.E1 = 2.8 * constants::eV;
  p.g = 9.81;
  p.x_minus = 0.50;
  p.x_plus = 0.51;
  p.x0 = 0.505;
  p.x_plus0 = p.x_plus - 2e-4;
  p.x_minus0 = p.x_minus + 1e-4;
  p.g_minus = 9.81;
  p.g_plus = 9.81 * (1.0 - 2.0 * (p.x_plus0 - p.x_minus0) / constants::R_earth);
  p.V0 = -constants::GM_earth / constants::R_earth;
  p.phi = 0.0;

  if (name == "sr88_10s") {
    p.dt = 10.0;
    p.sigma = 1e-4;
  } else if (name == "sr88_100s") {
    p.dt = 100.0;
    p.sigma = 1e-3;
  } else if (name == "sr88_bouncer") {
    p.dt = 10.0;
    p.sigma = 2e-6;
    p.x_minus = 25e-6;
    p.x_plus = 35e-6;
    p.x0 = 0.0;
    p.x_plus0 = p.x_plus;
    p.x_minus0 = p.x_minus;
  } else {
    std::string msg = "unknown preset '" + std::string(name) + "'; available:";
    for (auto n : preset_names()) msg += " " + std::string(n);
    throw config_error(msg);
  }
  p.anchor_mz_continuous();
  return p;
}

}  // namespace clockfisher
