#pragma once

// Quantum and classical Fisher information: closed forms for the free-fall
// and Mach-Zehnder interferometers, a pure-state engine working on Gaussian
// branch parameters, a Gram-matrix engine for mixed states, detection
// probabilities and Cramer-Rao bounds.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "clockfisher/core.hpp"
#include "clockfisher/gaussian.hpp"
#include "clockfisher/scenario.hpp"

namespace clockfisher {

// ---------------------------------------------------------------------------
// Closed forms. All honor PhysicalParams::ablate_time_dilation through
// coupling_z, i.e. the clock energies only enter through their coupling.

inline double qfi_ff_closed(const PhysicalParams& p) {
  const double z0 = p.coupling_z(0), z1 = p.coupling_z(1);
  const double dz = z1 - z0, zbar = 0.5 * (z0 + z1);
  const double a = p.m * p.dt / p.hbar;
  const double h = p.h();
  const double t4 = std::pow(p.dt, 4);
  const double mid = p.g * p.dt * p.dt / 6.0 + p.h_mean();
  return 0.5 * ((1 + z0) * (1 + z0) + (1 + z1) * (1 + z1)) * a * a * (4.0 * p.spread2() + h * h) +
         a * a * dz * dz * mid * mid - (zbar + 0.75) * t4 / (p.sigma * p.sigma);
}

/// Long-time, small-energy limit g^2 dE^2 dt^6 / (36 hbar^2 c^4).
inline double qfi_ff_asymptotic(const PhysicalParams& p) {
  const double dE = p.rest_energy() * (p.coupling_z(1) - p.coupling_z(0));
  const double c2 = p.c * p.c;
  return p.g * p.g * dE * dE * std::pow(p.dt, 6) / (36.0 * p.hbar * p.hbar * c2 * c2);
}

/// Path-only (clock traced out) state in the semiclassical qubit reduction.
/// The dephasing argument uses dV_F = g h.
inline double qfi_ff_reduced_closed(const PhysicalParams& p) {
  const double z0 = p.coupling_z(0), z1 = p.coupling_z(1);
  const double dz = z1 - z0, zbar = 0.5 * (z0 + z1);
  const double h = p.h();
  const double first = p.m * dz * p.dt * h / (2.0 * p.hbar);
  const double second = p.m * p.dt * h * (1.0 + zbar) / p.hbar;
  const double cosine = std::cos(p.m * dz * p.g * h * p.dt / (2.0 * p.hbar));
  return first * first + second * second * cosine * cosine;
}

inline double fi_ff_closed(const PhysicalParams& p) {
  const double dE = p.rest_energy() * (p.coupling_z(1) - p.coupling_z(0));
  const double v = dE * p.h() * p.dt / (2.0 * p.hbar * p.c * p.c);
  return v * v;
}

inline double delta_v_mz(const PhysicalParams& p) {
  return piecewise_potential(p.x_plus, p) - piecewise_potential(p.x_minus, p);
}

namespace detail {
struct ClockEnergies {
  double E0, E1;
  double dE() const { return E1 - E0; }
  double Ebar() const { return 0.5 * (E0 + E1); }
  double sum_sq() const { return E0 * E0 + E1 * E1; }
};
inline ClockEnergies coupled_energies(const PhysicalParams& p) {
  return {p.rest_energy() * p.coupling_z(0), p.rest_energy() * p.coupling_z(1)};
}
}  // namespace detail

inline double qfi_mz_closed(const PhysicalParams& p, Target target) {
  const auto E = detail::coupled_energies(p);
  const double S2 = p.spread2();
  const double hm = p.h_mean_mz(), dh = p.dh();
  const double hc2 = p.hbar * p.c * p.c;
  if (target == Target::delta_g) {
    const double k = p.dt / (4.0 * hc2);
    return k * k * (E.sum_sq() * 8.0 * (S2 + hm * hm) + E.dE() * E.dE() * dh * dh);
  }
  if (target == Target::bar_g) {
    const double k = p.dt / (std::sqrt(2.0) * hc2);
    return k * k * (E.sum_sq() * (4.0 * S2 + dh * dh) + 2.0 * E.dE() * E.dE() * hm * hm);
  }
  throw config_error("qfi_mz_closed: target must be delta_g or bar_g");
}

namespace detail {
// Lever arm of the interference phase: h_mean for delta_g, dh for bar_g.
inline double mz_lever(const PhysicalParams& p, Target target) {
  if (target == Target::delta_g) return p.h_mean_mz();
  if (target == Target::bar_g) return p.dh();
  throw config_error("Mach-Zehnder target must be delta_g or bar_g");
}
}  // namespace detail

inline double qfi_mz_reduced_closed(const PhysicalParams& p, Target target) {
  const auto E = detail::coupled_energies(p);
  const double lever = detail::mz_lever(p, target);
  const double hc2 = p.hbar * p.c * p.c;
  const double first = E.dE() * lever * p.dt / (2.0 * hc2);
  const double second = E.Ebar() * lever * p.dt / hc2;
  const double cosine = std::cos(E.dE() * delta_v_mz(p) * p.dt / (2.0 * hc2));
  return first * first + second * second * cosine * cosine;
}

inline double fi_mz_closed(const PhysicalParams& p, Target target) {
  const auto E = detail::coupled_energies(p);
  const double v = E.dE() * detail::mz_lever(p, target) * p.dt / (2.0 * p.hbar * p.c * p.c);
  return v * v;
}

/// Single-shot-per-measurement Cramer-Rao bound 1/(n F).
inline double cramer_rao(double fisher, long n_measurements = 1) {
  if (n_measurements < 1) throw config_error("cramer_rao: n_measurements must be >= 1");
  if (!(fisher > 0.0)) throw numerical_error("parameter not identifiable (Fisher information is 0)");
  return 1.0 / (static_cast<double>(n_measurements) * fisher);
}

// ---------------------------------------------------------------------------
// Detection probabilities

/// Potential difference seen by the two arms: g h in free fall, the
/// piecewise-potential difference in the Mach-Zehnder.
inline double arm_potential_difference(const PhysicalParams& p, ScenarioKind kind) {
  return kind == ScenarioKind::mach_zehnder ? delta_v_mz(p) : p.g * p.h();
}

/// Output ports (|+> +- |->)/sqrt(2) with the clock traced out.
inline std::pair<double, double> detection_probabilities(const PhysicalParams& p,
                                                         ScenarioKind kind) {
  const auto E = detail::coupled_energies(p);
  const double X = arm_potential_difference(p, kind) * p.dt / (p.hbar * p.c * p.c);
  const double C = std::cos(E.dE() * X / 2.0) * std::cos(E.Ebar() * X + p.phi);
  const double plus = 0.5 * (1.0 + C);
  return {plus, 1.0 - plus};
}

/// Controllable phase that puts the mean-energy cosine at an extremum, where
/// the classical information equals the clock-dephasing term alone.
inline double extremal_phase(const PhysicalParams& p, ScenarioKind kind) {
  const auto E = detail::coupled_energies(p);
  const double X = arm_potential_difference(p, kind) * p.dt / (p.hbar * p.c * p.c);
  return -std::remainder(E.Ebar() * X, 2.0 * constants::pi);
}

struct FiResult {
  double value = 0.0;
  double step = 0.0;
  int excluded_outcomes = 0;
};

/// F = sum_x (dP(x)/dlambda)^2 / P(x) with Richardson-extrapolated central
/// differences; outcomes with P < 1e-15 are skipped and counted.
template <class ProbFn>
FiResult classical_fi(ProbFn&& prob_fn, double value, double rel_step = 1e-4,
                      double abs_floor = 1e-9) {
  const double s = std::max(rel_step * std::abs(value), abs_floor);
  auto eval = [&](double v) {
    auto probs = prob_fn(v);
    std::vector<double> out(probs.begin(), probs.end());
    for (double q : out)
      if (q < 0.0 || !std::isfinite(q)) throw numerical_error("classical_fi: negative or non-finite probability");
    return out;
  };
  const auto p0 = eval(value);
  auto central = [&](double step) {
    const double up = value + step, down = value - step;
    const auto pu = eval(up), pd = eval(down);
    std::vector<double> d(p0.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (pu[i] - pd[i]) / (up - down);
    return d;
  };
  const auto d1 = central(s), d2 = central(0.5 * s);
  FiResult r;
  r.step = s;
  for (std::size_t i = 0; i < p0.size(); ++i) {
    if (p0[i] < 1e-15) {
      ++r.excluded_outcomes;
      continue;
    }
    const double d = (4.0 * d2[i] - d1[i]) / 3.0;
    r.value += d * d / p0[i];
  }
  return r;
}

// ---------------------------------------------------------------------------
// Pure-state QFI from Gaussian parameter derivatives

struct ParametricQfi {
  double value = 0.0;
  double step = 0.0;
  double coarse = 0.0;  // G at step s
  double fine = 0.0;    // G at step s/2
};

namespace detail {

// |d psi> = sum_k Q_k(x - xc_k) psi_k(x) for central differences over
// [lo, hi]; returns 4(<d|d> - |<d|psi>|^2).
inline double parametric_g(const ClockState& mid, const ClockState& lo, const ClockState& hi,
                           double width) {
  const std::size_t n = mid.components.size();
  if (lo.components.size() != n || hi.components.size() != n)
    throw numerical_error("qfi_pure_parametric: component count changed with the parameter");

  std::vector<Poly2> Q(n);
  std::vector<double> gen(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& c = mid.components[k];
    const auto& l = lo.components[k];
    const auto& h = hi.components[k];
    const xreal dxc_q = h.mean_x - l.mean_x;
    // phase rate at fixed offset from the moving center
    gen[k] = to_double((h.phase.constant_difference(l.phase) - c.phase.slope * dxc_q) / xreal(width));
    const double dxc = to_double(dxc_q) / width;
    const double dk = to_double(h.phase.slope - l.phase.slope) / width;
    const cplx dalpha = (h.alpha - l.alpha) / width;
    const cplx dA = (h.amplitude - l.amplitude) / width;
    const double dlnN = dalpha.real() / (4.0 * c.alpha.real());
    const cplx A = c.amplitude;
    Q[k] = {dA + A * dlnN, A * (2.0 * c.alpha * dxc + cplx{0.0, dk}), -A * dalpha};
  }
  // Remove the weighted mean phase rate (a global phase does not change G).
  double wsum = 0.0, gmean = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w = std::norm(mid.components[k].amplitude);
    wsum += w;
    gmean += w * gen[k];
  }
  gmean /= wsum;
  for (std::size_t k = 0; k < n; ++k)
    Q[k][0] += mid.components[k].amplitude * cplx{0.0, gen[k] - gmean};

  cplx dd{0.0, 0.0}, dpsi{0.0, 0.0};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const auto& ca = mid.components[a];
      const auto& cb = mid.components[b];
      if (ca.level != cb.level) continue;
      dd += poly_overlap(ca, Q[a], cb, Q[b]);
      const Poly2 amp{cb.amplitude, 0.0, 0.0};
      dpsi += poly_overlap(ca, Q[a], cb, amp);
    }
  return 4.0 * (dd.real() - std::norm(dpsi));
}

}  // namespace detail

/// G = 4(<d psi|d psi> - |<d psi|psi>|^2) with |d psi> assembled from the
/// derivatives of each branch's amplitude, center, wavenumber, width and
/// ledger phase (term by term), combined analytically.
template <class StateFn>
ParametricQfi qfi_pure_parametric(StateFn&& state_at, double value, double rel_step = 1e-5,
                                  double abs_floor = 1e-9) {
  const double s = std::max(rel_step * std::abs(value), abs_floor);
  if (value + 0.5 * s == value || value - 0.5 * s == value)
    throw numerical_error("qfi_pure_parametric: step underflows the parameter precision; pass a larger absolute step");
  const ClockState mid = state_at(value);
  auto at_step = [&](double step) {
    const double up = value + step, down = value - step;
    return detail::parametric_g(mid, state_at(down), state_at(up), up - down);
  };
  ParametricQfi r;
  r.step = s;
  r.coarse = at_step(s);
  r.fine = at_step(0.5 * s);
  r.value = (4.0 * r.fine - r.coarse) / 3.0;
  return r;
}

// ---------------------------------------------------------------------------
// Semiclassical qubit reduction

/// Per internal level, a path qubit over {|+>, |->}: each branch replaced by
/// its normalized amplitude times e^{i phi} with phi the ledger phase at the
/// trajectory center. ref_phase holds the E_i = 0 phases defining |+>, |->.
struct QubitModel {
  std::array<std::array<xreal, 2>, 2> phase{};  // [level][path]
  std::array<std::array<cplx, 2>, 2> weight{};  // [level][path], normalized per level
  std::array<xreal, 2> ref_phase{};             // [path]

  /// Level qubit with the per-level phase of |+> removed and the reference
  /// phases of the detector basis factored out.
  std::array<cplx, 2> vector(int level) const {
    const xreal rel = (phase[level][1] - ref_phase[1]) - (phase[level][0] - ref_phase[0]);
    return {weight[level][0], weight[level][1] * std::polar(1.0, wrap_phase(rel))};
  }
};

namespace detail {
inline xreal trajectory_center(const PhysicalParams& p, Path path, ScenarioKind kind) {
  const xreal x = path == Path::plus ? p.x_plus : p.x_minus;
  if (kind == ScenarioKind::mach_zehnder) return x;
  const xreal t = p.dt;
  return x - xreal(p.g) * t * t / 2;
}

inline GaussianBranch zero_energy_branch(const GaussianBranch& b0, const PhysicalParams& p,
                                         ScenarioKind kind) {
  PhysicalParams q = p;
  q.E0 = q.E1 = 0.0;
  GaussianBranch init = b0;
  if (kind == ScenarioKind::mach_zehnder) return evolve_mz(init, q);
  return evolve_freefall_approx(init, q);
}
}  // namespace detail

inline QubitModel reduce_to_qubit(const ClockState& state, const PhysicalParams& p,
                                  ScenarioKind kind = ScenarioKind::free_fall) {
  if (state.components.size() != 4)
    throw numerical_error("reduce_to_qubit: expected a 4-component interferometer state");
  QubitModel q;
  std::array<double, 2> level_norm{};
  for (const auto& b : state.components) level_norm[b.level] += std::norm(b.amplitude);
  for (const auto& b : state.components) {
    const int path = static_cast<int>(b.path);
    const xreal center = detail::trajectory_center(p, b.path, kind);
    q.phase[b.level][path] = b.phase.at(center);
    q.weight[b.level][path] = b.amplitude / std::sqrt(level_norm[b.level]);
  }
  const ClockState init = make_initial_state(p);
  for (const auto& b : init.components) {
    if (b.level != 0) continue;
    const auto ref = detail::zero_energy_branch(b, p, kind);
    q.ref_phase[static_cast<int>(b.path)] = ref.phase.at(detail::trajectory_center(p, b.path, kind));
  }
  return q;
}

/// Output-port probabilities of the qubit model, clock traced out.
inline std::pair<double, double> qubit_detection_probabilities(const QubitModel& q) {
  double plus = 0.0, minus = 0.0;
  for (int level = 0; level < 2; ++level) {
    const auto v = q.vector(level);
    plus += 0.5 * std::norm((v[0] + v[1]) / std::sqrt(2.0));
    minus += 0.5 * std::norm((v[0] - v[1]) / std::sqrt(2.0));
  }
  return {plus, minus};
}

// ---------------------------------------------------------------------------
// Mixed-state QFI by Gram-matrix orthogonalization

using StateVector = std::vector<cplx>;

struct Ensemble {
  std::vector<double> weights;
  std::vector<StateVector> states;
};

struct MixedQfi {
  double value = 0.0;
  double step = 0.0;
  std::array<double, 2> eigenvalues{};
  int dropped_eigenvalues = 0;
};

namespace detail {

inline cplx dot(const StateVector& a, const StateVector& b) {
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

struct Spectral {
  std::vector<double> rho;
  std::vector<StateVector> vecs;
};

// rho = sum_i p_i |psi_i><psi_i| for at most two members: diagonalize the
// weighted Gram matrix S_ij = sqrt(p_i p_j) <psi_i|psi_j> in closed form and
// map its eigenvectors back onto the members.
inline Spectral spectral_form(const Ensemble& e) {
  const std::size_t k = e.states.size();
  if (k == 0 || k > 2 || e.weights.size() != k)
    throw numerical_error("qfi_mixed_gram: ensemble must have one or two members");
  Spectral out;
  if (k == 1) {
    StateVector v = e.states[0];
    const double n = std::sqrt(dot(v, v).real());
    for (auto& c : v) c /= n;
    out.rho = {e.weights[0]};
    out.vecs = {v};
    return out;
  }
  const double s0 = std::sqrt(e.weights[0]), s1 = std::sqrt(e.weights[1]);
  const double a = e.weights[0] * dot(e.states[0], e.states[0]).real();
  const double d = e.weights[1] * dot(e.states[1], e.states[1]).real();
  const cplx b = s0 * s1 * dot(e.states[0], e.states[1]);
  const double mean = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
  const std::array<double, 2> lam{mean + rad, mean - rad};
  for (double l : lam) {
    // eigenvector w of [[a, b], [conj b, d]]
    cplx w0, w1;
    if (std::abs(b) > 1e-300) {
      if (std::abs(l - a) >= std::abs(l - d)) {
        w0 = b;
        w1 = l - a;
      } else {
        w0 = l - d;
        w1 = std::conj(b);
      }
    } else {
      const bool first = (l == lam[0]) == (a >= d);
      w0 = first ? 1.0 : 0.0;
      w1 = first ? 0.0 : 1.0;
    }
    const double wn = std::sqrt(std::norm(w0) + std::norm(w1));
    w0 /= wn;
    w1 /= wn;
    StateVector v(e.states[0].size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = s0 * w0 * e.states[0][i] + s1 * w1 * e.states[1][i];
    const double n = std::sqrt(std::max(dot(v, v).real(), 0.0));
    if (n > 0)
      for (auto& c : v) c /= n;
    out.rho.push_back(std::max(l, 0.0));
    out.vecs.push_back(std::move(v));
  }
  return out;
}

// Aligns the order and phases of `moved` to `ref` (parallel transport).
inline void align(const Spectral& ref, Spectral& moved) {
  if (moved.vecs.size() == 2) {
    const double keep = std::abs(dot(ref.vecs[0], moved.vecs[0])) + std::abs(dot(ref.vecs[1], moved.vecs[1]));
    const double swap = std::abs(dot(ref.vecs[0], moved.vecs[1])) + std::abs(dot(ref.vecs[1], moved.vecs[0]));
    if (swap > keep) {
      std::swap(moved.vecs[0], moved.vecs[1]);
      std::swap(moved.rho[0], moved.rho[1]);
    }
  }
  for (std::size_t i = 0; i < moved.vecs.size(); ++i) {
    const cplx o = dot(ref.vecs[i], moved.vecs[i]);
    if (std::abs(o) == 0.0) continue;
    const cplx ph = std::conj(o) / std::abs(o);
    for (auto& c : moved.vecs[i]) c *= ph;
  }
}

inline double mixed_g(const Spectral& mid, Spectral lo, Spectral hi, double width, double eps,
                      int* dropped) {
  align(mid, lo);
  align(mid, hi);
  const std::size_t k = mid.rho.size();
  std::vector<StateVector> d(k);
  std::vector<double> drho(k);
  for (std::size_t i = 0; i < k; ++i) {
    drho[i] = (hi.rho[i] - lo.rho[i]) / width;
    d[i].resize(mid.vecs[i].size());
    for (std::size_t j = 0; j < d[i].size(); ++j) d[i][j] = (hi.vecs[i][j] - lo.vecs[i][j]) / width;
  }
  double g = 0.0;
  int drop = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (mid.rho[i] < eps) {
      ++drop;
      continue;
    }
    g += drho[i] * drho[i] / mid.rho[i];
    g += 4.0 * mid.rho[i] * dot(d[i], d[i]).real();
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double s = mid.rho[i] + mid.rho[j];
      if (s < eps) continue;
      g -= 8.0 * mid.rho[i] * mid.rho[j] / s * std::norm(dot(d[i], mid.vecs[j]));
    }
  if (dropped) *dropped = drop;
  return g;
}

}  // namespace detail

/// Mixed-state QFI of an ensemble family lambda -> {p_i, |psi_i>} (at most
/// two members): spectral form from the Gram matrix, eigen-derivatives by
/// gauge-aligned central differences, Richardson over s and s/2.
template <class EnsembleFn>
MixedQfi qfi_mixed_gram(EnsembleFn&& family, double value, double step, double eps = 1e-12) {
  if (!(step > 0.0) || value + 0.5 * step == value)
    throw numerical_error("qfi_mixed_gram: step underflows the parameter precision");
  const auto mid = detail::spectral_form(family(value));
  auto at_step = [&](double s, int* dropped) {
    const double up = value + s, down = value - s;
    return detail::mixed_g(mid, detail::spectral_form(family(down)), detail::spectral_form(family(up)),
                           up - down, eps, dropped);
  };
  MixedQfi r;
  r.step = step;
  const double coarse = at_step(step, nullptr);
  const double fine = at_step(0.5 * step, &r.dropped_eigenvalues);
  r.value = (4.0 * fine - coarse) / 3.0;
  for (std::size_t i = 0; i < mid.rho.size() && i < 2; ++i) r.eigenvalues[i] = mid.rho[i];
  return r;
}

/// Reduced path state of a Gaussian-branch scenario as a qubit ensemble
/// {1/2 |phi_0>, 1/2 |phi_1>}.
struct ReducedQubitFamily {
  Scenario scenario;

  // Detector basis: E_i = 0 states at the nominal parameter, held fixed.
  QubitModel at(double v) const {
    auto q = reduce_to_qubit(scenario.state_at(v), scenario.params_at(v), scenario.kind);
    q.ref_phase = reduce_to_qubit(scenario.state_at(scenario.nominal()), scenario.params, scenario.kind).ref_phase;
    return q;
  }

  Ensemble operator()(double v) const {
    const auto q = at(v);
    Ensemble e;
    for (int level = 0; level < 2; ++level) {
      const auto vec = q.vector(level);
      e.weights.push_back(0.5);
      e.states.push_back({vec[0], vec[1]});
    }
    return e;
  }

  /// Largest |d(relative phase)/d lambda| over the two levels, rad per unit.
  double phase_rate(double v, double probe) const {
    auto rel = [&](double x, int level) {
      const auto q = at(x);
      return (q.phase[level][1] - q.ref_phase[1]) - (q.phase[level][0] - q.ref_phase[0]);
    };
    const double up = v + probe, down = v - probe;
    double rate = 0.0;
    for (int level = 0; level < 2; ++level)
      rate = std::max(rate, std::abs(to_double((rel(up, level) - rel(down, level)) / xreal(up - down))));
    return rate;
  }
};

/// Gram-method QFI of the reduced state; the step moves the fastest
/// relative phase by 1e-3 rad.
inline MixedQfi qfi_reduced_gram(const Scenario& sc, double rel_step = 1e-5, double abs_floor = 1e-9) {
  const ReducedQubitFamily fam{sc};
  const double v = sc.nominal();
  double s = std::max(rel_step * std::abs(v), abs_floor);
  const double rate = fam.phase_rate(v, s);
  if (rate > 0.0) s = 1e-3 / rate;
  return qfi_mixed_gram(fam, v, s);
}

}  // namespace clockfisher
