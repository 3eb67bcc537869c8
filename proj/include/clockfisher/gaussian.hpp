#pragma once

// Complex Gaussian branches and their closed-form evolution in linear and
// piecewise-linear potentials.
//
// A branch is
//
//   psi(x) = A (2 Re(alpha)/pi)^(1/4) exp(-alpha (x-xc)^2 + i k (x-xc) + i theta)
//
// where the constant phase theta lives in a PhaseLedger as separately labeled
// binary128 terms. The rest-mass phase m c^2 dt / hbar is common to every
// component and never enters a ledger.

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "clockfisher/core.hpp"
#include "clockfisher/xreal.hpp"

namespace clockfisher {

using cplx = std::complex<double>;

enum class PhaseTerm : int { rest_internal = 0, potential, cubic, kinetic, gouy, count };

inline const char* phase_term_name(PhaseTerm t) {
  switch (t) {
    case PhaseTerm::rest_internal: return "rest_internal";
    case PhaseTerm::potential: return "potential";
    case PhaseTerm::cubic: return "cubic";
    case PhaseTerm::kinetic: return "kinetic";
    case PhaseTerm::gouy: return "gouy";
    default: return "?";
  }
}

/// phi(x) = sum(terms) + slope * (x - x_ref), each piece in binary128.
struct PhaseLedger {
  static constexpr int kTerms = static_cast<int>(PhaseTerm::count);

  xreal x_ref = 0;
  xreal slope = 0;  // rad/m
  std::array<xreal, kTerms> terms{};

  xreal& operator[](PhaseTerm t) { return terms[static_cast<int>(t)]; }
  xreal operator[](PhaseTerm t) const { return terms[static_cast<int>(t)]; }

  xreal total() const {
    xreal s = 0;
    for (auto v : terms) s += v;
    return s;
  }

  xreal at(xreal x) const { return total() + slope * (x - x_ref); }

  /// Term-by-term difference of the constant parts, this - other.
  xreal constant_difference(const PhaseLedger& other) const {
    xreal s = 0;
    for (int i = 0; i < kTerms; ++i) s += terms[i] - other.terms[i];
    return s;
  }

  bool operator==(const PhaseLedger& o) const {
    return x_ref == o.x_ref && slope == o.slope && terms == o.terms;
  }
};

enum class Path : int { plus = 0, minus = 1 };

struct GaussianBranch {
  cplx amplitude{1.0, 0.0};
  PhaseLedger phase;
  xreal mean_x = 0;
  double mean_p = 0.0;
  // Width parameter; Re(alpha) = 1/(4 var_x).
  cplx alpha{1.0, 0.0};
  int level = 0;
  Path path = Path::plus;

  double var_x() const { return 0.25 / alpha.real(); }
  double wavenumber() const { return to_double(phase.slope); }
  double norm_factor() const { return std::pow(2.0 * alpha.real() / constants::pi, 0.25); }

  /// Same wavefunction shape (amplitude ignored).
  bool same_shape(const GaussianBranch& o) const {
    return level == o.level && mean_x == o.mean_x && alpha == o.alpha && phase == o.phase;
  }
};

struct ClockState {
  std::vector<GaussianBranch> components;
  std::vector<std::string> warnings;
};

/// (|psi+> + e^{i phi}|psi->)/sqrt(2) (x) (|0>+|1>)/sqrt(2), ordered
/// (+,0), (+,1), (-,0), (-,1).
inline ClockState make_initial_state(const PhysicalParams& p) {
  ClockState state;
  const cplx shift = std::polar(1.0, p.phi);
  const cplx alpha{0.25 / (p.sigma * p.sigma), 0.0};
  for (Path path : {Path::plus, Path::minus}) {
    for (int level : {0, 1}) {
      GaussianBranch b;
      b.amplitude = (path == Path::plus ? cplx{0.5, 0.0} : 0.5 * shift);
      b.mean_x = path == Path::plus ? p.x_plus : p.x_minus;
      b.phase.x_ref = b.mean_x;
      b.mean_p = 0.0;
      b.alpha = alpha;
      b.level = level;
      b.path = path;
      state.components.push_back(b);
    }
  }
  if (p.sigma >= p.h())
    state.warnings.push_back("regime: sigma >= h, branches overlap");
  return state;
}

namespace detail {

struct LinearEvolution {
  xreal mass;   // kinetic mass
  xreal accel;  // lambda / M for H = p^2/2M + lambda x
  double dt;
  double hbar;
};

/// Free spreading plus uniform force for the envelope: returns the evolved
/// alpha, center and the Gouy phase increment. The initial branch may carry
/// any complex width and wavenumber.
inline void evolve_envelope(GaussianBranch& b, const LinearEvolution& ev) {
  const double t = ev.dt;
  if (t == 0.0) return;
  const cplx inv0 = 1.0 / (4.0 * b.alpha);
  const cplx inv_t = inv0 + cplx{0.0, ev.hbar * t / (2.0 * to_double(ev.mass))};
  const cplx alpha_t = 1.0 / (4.0 * inv_t);
  const xreal k0 = b.phase.slope;
  const xreal hb = ev.hbar;
  const xreal tq = t;
  b.mean_x += hb * k0 * tq / ev.mass - ev.accel * tq * tq / 2;
  b.phase[PhaseTerm::kinetic] += hb * k0 * k0 * tq / (2 * ev.mass);
  b.phase[PhaseTerm::gouy] += 0.5 * std::arg(alpha_t / b.alpha);
  b.alpha = alpha_t;
}

}  // namespace detail

/// Exact evolution in V_F for the clock Hamiltonian: effective mass
/// m/(1-z_i), potential m(1+z_i) V_F(x) + E_i.
inline GaussianBranch evolve_freefall_full(const GaussianBranch& in, const PhysicalParams& p) {
  GaussianBranch b = in;
  const double t = p.dt;
  if (t == 0.0) return b;
  const double z = p.coupling_z(b.level);
  const xreal zq = z;
  const xreal m = p.m, g = p.g, tq = t, hb = p.hbar;
  const xreal M = m / (1 - zq);
  const xreal lambda = m * (1 + zq) * g;

  detail::evolve_envelope(b, {M, g * (1 + zq) * (1 - zq), t, p.hbar});
  b.phase.slope -= lambda * tq / hb;
  b.phase[PhaseTerm::rest_internal] -= xreal(p.energy(b.level)) * tq / hb;
  b.phase[PhaseTerm::potential] -=
      tq * m * (1 + zq) * (g * (b.mean_x - xreal(p.x0)) + xreal(p.V0)) / hb;
  b.phase[PhaseTerm::cubic] -= lambda * lambda * tq * tq * tq / (6 * M * hb);
  b.phase.x_ref = b.mean_x;
  b.mean_p = in.mean_p - to_double(lambda) * t;
  return b;
}

/// Single-trajectory approximation: envelope as for E_i = 0, phase kept to
/// first order in z_i.
inline GaussianBranch evolve_freefall_approx(const GaussianBranch& in, const PhysicalParams& p) {
  GaussianBranch b = in;
  const double t = p.dt;
  if (t == 0.0) return b;
  const xreal zq = p.coupling_z(b.level);
  const xreal m = p.m, g = p.g, tq = t, hb = p.hbar;

  detail::evolve_envelope(b, {m, g, t, p.hbar});
  b.phase.slope -= m * (1 + zq) * g * tq / hb;
  b.phase[PhaseTerm::rest_internal] -= xreal(p.energy(b.level)) * tq / hb;
  b.phase[PhaseTerm::potential] -=
      tq * m * (1 + zq) * (g * (b.mean_x - xreal(p.x0)) + xreal(p.V0)) / hb;
  b.phase[PhaseTerm::cubic] -= m * g * g * tq * tq * tq * (1 + zq) / (6 * hb);
  b.phase.x_ref = b.mean_x;
  b.mean_p = in.mean_p - p.m * p.g * t;
  return b;
}

/// Piecewise-linear Mach-Zehnder potential; x == x0 takes the upper piece.
inline double piecewise_potential(double x, const PhysicalParams& p) {
  if (x >= p.x0) return p.g_plus * (x - p.x_plus0) + p.V_plus0;
  return p.g_minus * (x - p.x_minus0) + p.V_minus0;
}

inline double piecewise_slope(double x, const PhysicalParams& p) {
  return x >= p.x0 ? p.g_plus : p.g_minus;
}

/// Trap-balanced evolution: gravity acts on the clock only.
inline GaussianBranch evolve_mz(const GaussianBranch& in, const PhysicalParams& p) {
  GaussianBranch b = in;
  const double t = p.dt;
  if (t == 0.0) return b;
  detail::evolve_envelope(b, {xreal(p.m), xreal(0), t, p.hbar});
  const double Sigma = std::sqrt(b.var_x());
  const double x = to_double(b.mean_x);
  if (std::abs(x - p.x0) <= 5.0 * Sigma)
    throw numerical_error("branch straddles potential kink");

  const xreal zq = p.coupling_z(b.level);
  const xreal m = p.m, tq = t, hb = p.hbar;
  const xreal slope_g = piecewise_slope(x, p);
  const xreal anchor = x >= p.x0 ? p.x_plus0 : p.x_minus0;
  const xreal anchor_V = x >= p.x0 ? p.V_plus0 : p.V_minus0;
  b.phase.slope -= tq * m * zq * slope_g / hb;
  b.phase[PhaseTerm::rest_internal] -= xreal(p.energy(b.level)) * tq / hb;
  b.phase[PhaseTerm::potential] -= tq * m * zq * (slope_g * (b.mean_x - anchor) + anchor_V) / hb;
  b.phase.x_ref = b.mean_x;
  b.mean_p = 0.0;
  return b;
}

template <class Map>
ClockState evolve(const ClockState& s, const PhysicalParams& p, Map map) {
  ClockState out;
  out.warnings = s.warnings;
  out.components.reserve(s.components.size());
  for (const auto& b : s.components) out.components.push_back(map(b, p));
  return out;
}

// ---------------------------------------------------------------------------
// Overlaps

/// Quadratic polynomial c0 + c1 u + c2 u^2 in u = x - mean_x.
using Poly2 = std::array<cplx, 3>;

inline constexpr Poly2 kUnitPoly{cplx{1.0, 0.0}, cplx{0.0, 0.0}, cplx{0.0, 0.0}};

/// Integral of conj(pa(x - xa) psi_a(x)) pb(x - xb) psi_b(x) over the real
/// line, shapes only (amplitudes excluded). Levels are not checked here.
inline cplx poly_overlap(const GaussianBranch& a, const Poly2& pa, const GaussianBranch& b,
                         const Poly2& pb) {
  const double D = to_double(a.mean_x - b.mean_x);
  const cplx A = std::conj(a.alpha) + b.alpha;
  const cplx B = -2.0 * b.alpha * D + cplx{0.0, to_double(b.phase.slope - a.phase.slope)};
  const xreal const_phase =
      b.phase.slope * (a.mean_x - b.mean_x) + b.phase.constant_difference(a.phase);
  const cplx C = -b.alpha * D * D + cplx{0.0, wrap_phase(const_phase)};
  const cplx E = C + B * B / (4.0 * A);
  if (E.real() < -740.0) return {0.0, 0.0};

  // conj(pa(u)) * pb(u + D) as a quartic in u.
  const std::array<cplx, 3> q{pb[0] + pb[1] * D + pb[2] * D * D, pb[1] + 2.0 * pb[2] * D, pb[2]};
  std::array<cplx, 5> r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i + j] += std::conj(pa[i]) * q[j];

  const cplx mu = B / (2.0 * A);
  const cplx m0 = std::sqrt(constants::pi / A);
  const std::array<cplx, 5> central{m0, 0.0, m0 / (2.0 * A), 0.0, 3.0 * m0 / (4.0 * A * A)};
  static constexpr double binom[5][5] = {
      {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
  cplx sum{0.0, 0.0};
  for (int j = 0; j < 5; ++j) {
    if (r[j] == cplx{0.0, 0.0}) continue;
    cplx moment{0.0, 0.0};
    for (int k = 0; k <= j; k += 2) moment += binom[j][k] * std::pow(mu, j - k) * central[k];
    sum += r[j] * moment;
  }
  return a.norm_factor() * b.norm_factor() * std::exp(E) * sum;
}

namespace detail {
inline bool shape_less(const GaussianBranch& a, const GaussianBranch& b) {
  if (a.level != b.level) return a.level < b.level;
  if (a.mean_x != b.mean_x) return a.mean_x < b.mean_x;
  if (a.alpha.real() != b.alpha.real()) return a.alpha.real() < b.alpha.real();
  if (a.alpha.imag() != b.alpha.imag()) return a.alpha.imag() < b.alpha.imag();
  if (a.phase.slope != b.phase.slope) return a.phase.slope < b.phase.slope;
  return a.phase.total() < b.phase.total();
}
}  // namespace detail

/// <a|b> of the normalized branch shapes. Different internal levels are
/// orthogonal.
inline cplx overlap(const GaussianBranch& a, const GaussianBranch& b) {
  if (a.level != b.level) return {0.0, 0.0};
  if (a.same_shape(b)) return {1.0, 0.0};
  if (detail::shape_less(b, a)) return std::conj(poly_overlap(b, kUnitPoly, a, kUnitPoly));
  return poly_overlap(a, kUnitPoly, b, kUnitPoly);
}

inline cplx inner(const ClockState& a, const ClockState& b) {
  cplx s{0.0, 0.0};
  for (const auto& ca : a.components)
    for (const auto& cb : b.components) {
      if (ca.level != cb.level) continue;
      s += std::conj(ca.amplitude) * cb.amplitude * overlap(ca, cb);
    }
  return s;
}

inline double norm2(const ClockState& s) { return inner(s, s).real(); }

}  // namespace clockfisher
