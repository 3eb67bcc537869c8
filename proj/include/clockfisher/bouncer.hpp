#pragma once

// Clock in a linear potential above a hard floor at x = 0: Airy spectrum,
// projection of the two initial Gaussian packets onto it, and the
// long-time QFI for g.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "clockfisher/airy.hpp"
#include "clockfisher/core.hpp"
#include "clockfisher/oracle.hpp"
#include "clockfisher/xreal.hpp"

namespace clockfisher {

/// l_i = (hbar^2 / (2 m^2 g (1 + z_i)))^(1/3).
inline double gravitational_length(const PhysicalParams& p, int level) {
  if (!(p.g > 0)) throw config_error("bouncer requires g > 0");
  return std::cbrt(p.hbar * p.hbar / (2.0 * p.m * p.m * p.g * (1.0 + p.coupling_z(level))));
}

struct BouncerSpectrum {
  int n_max = 0;
  std::vector<double> zeros;             // z_n, n = 1..n_max
  std::vector<double> ai_prime;          // Ai'(z_n)
  std::array<double, 2> length{};        // l_i
  std::array<std::vector<double>, 2> energy;  // E_{i,n}, J
  std::array<std::vector<double>, 2> norm;    // N_{i,n} = 1/(sqrt(l_i) Ai'(z_n)), m^-1/2

  /// psi_{i,n}(x) = N_{i,n} Ai(x / l_i + z_n)
  double eigenfunction(int level, int n, double x) const {
    const double y = x / length[level] + zeros[n - 1];
    if (y > 0 && y >= kAiryRange) return 0.0;
    return norm[level][n - 1] * airy_ai(y);
  }
};

inline BouncerSpectrum bouncer_spectrum(const PhysicalParams& p, int n_max) {
  if (n_max < 1) throw config_error("bouncer_spectrum: n_max must be >= 1");
  BouncerSpectrum s;
  s.n_max = n_max;
  s.zeros = airy_zeros(n_max);
  s.ai_prime.resize(n_max);
  for (int n = 0; n < n_max; ++n) s.ai_prime[n] = airy_ai_prime(s.zeros[n]);
  for (int i = 0; i < 2; ++i) {
    const double l = gravitational_length(p, i);
    const double z = p.coupling_z(i);
    s.length[i] = l;
    s.energy[i].resize(n_max);
    s.norm[i].resize(n_max);
    for (int n = 0; n < n_max; ++n) {
      s.energy[i][n] = p.m * (-p.g * (s.zeros[n] * l + p.x0) + p.V0) * (1.0 + z) + p.energy(i);
      s.norm[i][n] = 1.0 / (std::sqrt(l) * s.ai_prime[n]);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Projection coefficients

enum class CoefficientMode { exact, gaussian_approx };

struct BouncerCoefficients {
  CoefficientMode mode = CoefficientMode::exact;
  std::array<std::vector<double>, 2> c_plus, c_minus;  // <psi_{i,n}|packet at x_pm>
  std::array<std::vector<cplx>, 2> c;                  // (c+ + e^{i phi} c-)/2
  std::array<double, 2> tail_plus{}, tail_minus{};     // 1 - sum |c_pm|^2
  double total_weight = 0.0;                           // sum_{i,n} |c_{i,n}|^2
  std::vector<std::string> warnings;

  double tail_mass() const {
    return std::max({tail_plus[0], tail_plus[1], tail_minus[0], tail_minus[1]});
  }
};

namespace detail {

inline double packet_projection(double N, double l, double sigma, double z_n, double x_center,
                                CoefficientMode mode) {
  const double s = sigma / l;
  const double b = z_n + x_center / l;
  const double pre = N * l * std::pow(2.0 * constants::pi * sigma * sigma, -0.25);
  if (mode == CoefficientMode::gaussian_approx) return pre * std::exp(-b * b / (4.0 * s * s));
  const double s4 = s * s * s * s;
  const double y = b + s4;
  if (y >= 0.0) {
    // exp(s^2 b + 2 s^6/3) Ai(b + s^4) = exp(-(2/3) s^6 (r-1)^2 (r+1/2)) Ai_scaled(y)
    const double beta = b / s4;
    const double r = std::sqrt(1.0 + beta);
    const double rm1 = beta / (r + 1.0);
    const double expo = -(2.0 / 3.0) * s4 * s * s * rm1 * rm1 * (r + 0.5);
    if (expo < -745.0) return 0.0;
    return pre * std::sqrt(4.0 * constants::pi) * s * std::exp(expo) * airy_scaled(y).ai;
  }
  const double expo = s * s * b + 2.0 / 3.0 * s4 * s * s;
  if (expo < -745.0 || y <= -kAiryRange) return 0.0;
  return pre * std::sqrt(4.0 * constants::pi) * s * std::exp(expo) * airy_ai(y);
}

}  // namespace detail

inline BouncerCoefficients bouncer_coefficients(const PhysicalParams& p, const BouncerSpectrum& s,
                                                CoefficientMode mode = CoefficientMode::exact) {
  BouncerCoefficients out;
  out.mode = mode;
  const cplx shift = std::polar(1.0, p.phi);
  for (int i = 0; i < 2; ++i) {
    const double l = s.length[i];
    if (mode == CoefficientMode::gaussian_approx && p.sigma < l) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "gaussian_approx used with sigma/l = %.3g < 1", p.sigma / l);
      out.warnings.push_back(msg);
    }
    out.c_plus[i].resize(s.n_max);
    out.c_minus[i].resize(s.n_max);
    out.c[i].resize(s.n_max);
    double sp = 0.0, sm = 0.0;
    for (int n = 0; n < s.n_max; ++n) {
      const double N = s.norm[i][n];
      const double cp = detail::packet_projection(N, l, p.sigma, s.zeros[n], p.x_plus, mode);
      const double cm = detail::packet_projection(N, l, p.sigma, s.zeros[n], p.x_minus, mode);
      out.c_plus[i][n] = cp;
      out.c_minus[i][n] = cm;
      out.c[i][n] = 0.5 * (cp + shift * cm);
      sp += cp * cp;
      sm += cm * cm;
      out.total_weight += std::norm(out.c[i][n]);
    }
    out.tail_plus[i] = 1.0 - sp;
    out.tail_minus[i] = 1.0 - sm;
  }
  if (out.tail_mass() > 1e-3) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "bouncer: truncation mass %.3g > 1e-3, raise n_max (now %d)",
                  out.tail_mass(), s.n_max);
    out.warnings.push_back(msg);
  }
  return out;
}

/// Smallest n_max past which every Gaussian-approx coefficient stays below
/// 1e-8 of its path maximum, capped at 1e4.
inline int auto_n_max(const PhysicalParams& p) {
  constexpr int kCap = 10000;
  std::array<double, 2> peak{0.0, 0.0};
  const double l = std::min(gravitational_length(p, 0), gravitational_length(p, 1));
  const std::array<double, 2> x{p.x_plus, p.x_minus};
  for (int n = 1; n <= kCap; ++n) {
    const double z = airy_zero(n);
    const double norm = 1.0 / (std::sqrt(l) * std::abs(airy_ai_prime(z)));
    bool done = true;
    for (int k = 0; k < 2; ++k) {
      const double c = std::abs(detail::packet_projection(norm, l, p.sigma, z, x[k],
                                                          CoefficientMode::gaussian_approx));
      peak[k] = std::max(peak[k], c);
      const bool past_peak = z + x[k] / l < 0.0;
      if (!past_peak || c >= 1e-8 * peak[k]) done = false;
    }
    if (done) return n;
  }
  return kCap;
}

// ---------------------------------------------------------------------------
// Long-time QFI

struct BouncerQfi {
  double value = 0.0;
  double variance = 0.0;  // Var(d_g E), J^2/(m/s^2)^2
  double mean = 0.0;
  double weight = 0.0;    // sum |c|^2 before renormalization
};

/// d_g E_{i,n} = m (1 + z_i) (-(2/3) z_n l_i - x0 + dV(x0)/dg)
inline double energy_g_derivative(const PhysicalParams& p, const BouncerSpectrum& s, int level, int n) {
  return p.m * (1.0 + p.coupling_z(level)) *
         (-(2.0 / 3.0) * s.zeros[n - 1] * s.length[level] - p.x0 + p.bouncer_dV0_dg);
}

/// G = 4 dt^2 Var(d_g E) / hbar^2 over the distribution |c_{i,n}|^2.
inline BouncerQfi bouncer_qfi_longtime(const PhysicalParams& p, const BouncerSpectrum& s,
                                       const BouncerCoefficients& c) {
  BouncerQfi r;
  double w = 0.0, m1 = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int n = 1; n <= s.n_max; ++n) {
      const double q = std::norm(c.c[i][n - 1]);
      w += q;
      m1 += q * energy_g_derivative(p, s, i, n);
    }
  if (!(w > 0.0)) throw numerical_error("bouncer: all coefficients vanish");
  r.weight = w;
  r.mean = m1 / w;
  double var = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int n = 1; n <= s.n_max; ++n) {
      const double d = energy_g_derivative(p, s, i, n) - r.mean;
      var += std::norm(c.c[i][n - 1]) * d * d;
    }
  r.variance = var / w;
  r.value = 4.0 * p.dt * p.dt * r.variance / (p.hbar * p.hbar);
  return r;
}

// ---------------------------------------------------------------------------
// Spectral state on a grid (for the fidelity oracle)

/// Grid [0, x_top] with x_top beyond the classical turning point of the
/// highest populated level.
inline Grid bouncer_grid(const PhysicalParams& p, const BouncerSpectrum& s, std::size_t n_points) {
  const double l = std::max(s.length[0], s.length[1]);
  const double x_top = (std::abs(s.zeros.back()) + 12.0) * l;
  Grid g;
  g.x_origin = 0;
  g.k_ref = 0;
  g.u_min = 0.0;
  g.n_points = std::max(n_points, kMinGridPoints);
  g.spacing = x_top / static_cast<double>(g.n_points - 1);
  (void)p;
  return g;
}

/// sum_n c_{i,n} e^{-i E'_{i,n} t/hbar} psi_{i,n}(x) per level, where E' drops
/// the parts of E_{i,n} that do not depend on n or on g.
inline GridWavefunction render_bouncer_state(const PhysicalParams& p, const BouncerSpectrum& s,
                                             const BouncerCoefficients& c, const Grid& grid,
                                             double g_ref, double weight_floor = 1e-10) {
  GridWavefunction psi;
  psi.grid = grid;
  double cmax = 0.0;
  for (int i = 0; i < 2; ++i)
    for (const auto& v : c.c[i]) cmax = std::max(cmax, std::abs(v));
  const xreal tq = p.dt, hb = p.hbar;
  for (int i = 0; i < 2; ++i) {
    auto& ch = psi.channel[i];
    ch.assign(grid.n_points, cplx{0.0, 0.0});
    const xreal mz = xreal(p.m) * (1 + xreal(p.coupling_z(i)));
    for (int n = 1; n <= s.n_max; ++n) {
      const cplx cn = c.c[i][n - 1];
      if (std::abs(cn) < weight_floor * cmax) continue;
      const xreal dg = xreal(p.g) - xreal(g_ref);
      const xreal e_rel = mz * (-xreal(p.g) * xreal(s.zeros[n - 1]) * xreal(s.length[i]) -
                                dg * xreal(p.x0) + dg * xreal(p.bouncer_dV0_dg));
      const cplx amp = cn * std::polar(1.0, wrap_phase(-e_rel * tq / hb));
      for (std::size_t j = 0; j < grid.n_points; ++j) ch[j] += amp * s.eigenfunction(i, n, grid.u(j));
    }
  }
  return psi;
}

struct BouncerOracleOptions {
  int n_max = 0;  // 0: auto
  std::size_t grid_points = std::size_t{1} << 13;
  FidelityOptions fidelity;
};

/// Fidelity QFI of the rendered spectral state with respect to g.
inline FidelityQfi bouncer_qfi_oracle(const PhysicalParams& p, const BouncerOracleOptions& opt = {}) {
  const int n_max = opt.n_max > 0 ? opt.n_max : auto_n_max(p);
  const Grid grid = bouncer_grid(p, bouncer_spectrum(p, n_max), opt.grid_points);
  auto state_at = [&](double g) {
    PhysicalParams q = p;
    q.g = g;
    const auto s = bouncer_spectrum(q, n_max);
    return render_bouncer_state(q, s, bouncer_coefficients(q, s), grid, p.g);
  };
  auto pair = [&](double a, double b) { return fidelity(state_at(a), state_at(b)); };
  return qfi_fidelity(pair, p.g, 0.0, opt.fidelity);
}

/// CSV with columns i, n, z_n, E_J, c_re, c_im.
inline void write_spectrum_csv(const BouncerSpectrum& s, const BouncerCoefficients& c,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write " + path);
  out << "i,n,z_n,E_J,c_re,c_im\n";
  char line[200];
  for (int i = 0; i < 2; ++i)
    for (int n = 1; n <= s.n_max; ++n) {
      std::snprintf(line, sizeof line, "%d,%d,%.17g,%.17g,%.17g,%.17g\n", i, n, s.zeros[n - 1],
                    s.energy[i][n - 1], c.c[i][n - 1].real(), c.c[i][n - 1].imag());
      out << line;
    }
}

}  // namespace clockfisher
