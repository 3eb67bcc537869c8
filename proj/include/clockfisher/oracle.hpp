#pragma once

// Brute-force checks: wavefunctions sampled on a uniform grid, trapezoid
// inner products, fidelity-based QFI and projective probabilities.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "clockfisher/core.hpp"
#include "clockfisher/gaussian.hpp"
#include "clockfisher/xreal.hpp"

namespace clockfisher {

/// Uniform grid x_j = x_origin + u_min + j * spacing. Wavefunctions rendered
/// on it carry an implicit common factor exp(i k_ref (x - x_origin)) that
/// cancels in every inner product.
struct Grid {
  xreal x_origin = 0;
  xreal k_ref = 0;
  double u_min = 0.0;
  double spacing = 0.0;
  std::size_t n_points = 0;

  double u(std::size_t j) const { return u_min + static_cast<double>(j) * spacing; }
  double x_min() const { return to_double(x_origin + xreal(u_min)); }
  double x_max() const { return to_double(x_origin + xreal(u(n_points - 1))); }
  double x(std::size_t j) const { return to_double(x_origin + xreal(u(j))); }

  bool operator==(const Grid& o) const {
    return x_origin == o.x_origin && k_ref == o.k_ref && u_min == o.u_min && spacing == o.spacing &&
           n_points == o.n_points;
  }
};

inline constexpr std::size_t kMinGridPoints = std::size_t{1} << 10;

/// Grid covering +-8 Sigma around every branch of every state, with
/// spacing below Sigma_min/16 and at least min_points points.
inline Grid auto_grid(const std::vector<ClockState>& states, std::size_t min_points = kMinGridPoints) {
  const GaussianBranch* first = nullptr;
  double sig_min = std::numeric_limits<double>::infinity();
  for (const auto& s : states)
    for (const auto& b : s.components) {
      if (!first) first = &b;
      sig_min = std::min(sig_min, std::sqrt(b.var_x()));
    }
  if (!first) throw numerical_error("auto_grid: no branches");
  Grid g;
  g.x_origin = first->mean_x;
  g.k_ref = first->phase.slope;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : states)
    for (const auto& b : s.components) {
      const double d = to_double(b.mean_x - g.x_origin);
      const double w = 8.5 * std::sqrt(b.var_x());
      lo = std::min(lo, d - w);
      hi = std::max(hi, d + w);
    }
  const double max_spacing = sig_min / 16.0;
  std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / max_spacing * 1.0001)) + 1;
  n = std::max(n, min_points);
  if (n > (std::size_t{1} << 26)) throw numerical_error("auto_grid: branches too far apart for a 2^26-point grid");
  g.u_min = lo;
  g.spacing = (hi - lo) / static_cast<double>(n - 1);
  g.n_points = n;
  return g;
}

/// Two internal-level channels sampled on a grid.
struct GridWavefunction {
  Grid grid;
  std::array<std::vector<cplx>, 2> channel;
};

namespace detail {

inline void check_grid_covers(const GaussianBranch& b, const Grid& g) {
  const double sigma = std::sqrt(b.var_x());
  const double d = to_double(b.mean_x - g.x_origin);
  const double need_lo = d - 8.0 * sigma, need_hi = d + 8.0 * sigma;
  const double have_hi = g.u(g.n_points - 1);
  if (g.n_points < kMinGridPoints || g.spacing >= sigma / 16.0 || need_lo < g.u_min || need_hi > have_hi) {
    char msg[320];
    std::snprintf(msg, sizeof msg,
                  "grid too coarse or narrow: need n >= %zu, spacing < %.6g m and coverage "
                  "[%.9g, %.9g] m; have n = %zu, spacing %.6g m, [%.9g, %.9g] m",
                  kMinGridPoints, sigma / 16.0, to_double(b.mean_x) - 8.0 * sigma,
                  to_double(b.mean_x) + 8.0 * sigma, g.n_points, g.spacing, g.x_min(), g.x_max());
    throw numerical_error(msg);
  }
}

inline void check_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw numerical_error("grid mismatch between wavefunctions");
}

}  // namespace detail

/// Adds amplitude * branch(x) to `out`, sampled in the grid frame.
inline void add_branch(std::vector<cplx>& out, const GaussianBranch& b, const cplx& amplitude,
                       const Grid& g) {
  detail::check_grid_covers(b, g);
  const double d = to_double(b.mean_x - g.x_origin);
  // constant part in binary128, wrapped before anything else touches it
  const double c0 = wrap_phase(b.phase.at(g.x_origin));
  const double dk = to_double(b.phase.slope - g.k_ref);
  const double re_a = b.alpha.real(), im_a = b.alpha.imag();
  const cplx pref = amplitude * b.norm_factor();
  for (std::size_t j = 0; j < g.n_points; ++j) {
    const double u = g.u(j);
    const double w = u - d;
    const double env = re_a * w * w;
    if (env > 745.0) continue;
    out[j] += pref * std::exp(-env) * std::polar(1.0, c0 + dk * u - im_a * w * w);
  }
}

inline GridWavefunction render(const ClockState& state, const Grid& grid) {
  GridWavefunction psi;
  psi.grid = grid;
  for (auto& ch : psi.channel) ch.assign(grid.n_points, cplx{0.0, 0.0});
  for (const auto& b : state.components) {
    if (b.level < 0 || b.level > 1) throw numerical_error("render: level must be 0 or 1");
    add_branch(psi.channel[b.level], b, b.amplitude, grid);
  }
  return psi;
}

/// Trapezoid rule for sum_j conj(a_j) b_j dx.
inline cplx trapezoid_inner(const std::vector<cplx>& a, const std::vector<cplx>& b, double dx) {
  cplx s{0.0, 0.0};
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    s += w * std::conj(a[j]) * b[j];
  }
  return s * dx;
}

inline cplx inner(const GridWavefunction& a, const GridWavefunction& b) {
  detail::check_same_grid(a.grid, b.grid);
  return trapezoid_inner(a.channel[0], b.channel[0], a.grid.spacing) +
         trapezoid_inner(a.channel[1], b.channel[1], a.grid.spacing);
}

inline double norm2(const GridWavefunction& a) { return inner(a, a).real(); }

inline void normalize(GridWavefunction& a) {
  const double n = std::sqrt(norm2(a));
  if (!(n > 0.0)) throw numerical_error("normalize: zero wavefunction");
  for (auto& ch : a.channel)
    for (auto& v : ch) v /= n;
}

/// |<a|b>|^2 / (<a|a><b|b>), channels summed coherently.
inline double fidelity(const GridWavefunction& a, const GridWavefunction& b) {
  const double na = norm2(a), nb = norm2(b);
  if (!(na > 0.0) || !(nb > 0.0)) throw numerical_error("fidelity: zero wavefunction");
  return std::min(1.0, std::norm(inner(a, b)) / (na * nb));
}

// ---------------------------------------------------------------------------
// Fidelity QFI

struct FidelityQfi {
  double value = 0.0;
  double delta = 0.0;
  double infidelity = 0.0;  // 1 - F at delta
  int iterations = 0;
  bool delta_capped = false;  // state barely depends on the parameter
};

struct FidelityOptions {
  double target = 1e-4;
  double lo = 1e-6;
  double hi = 1e-2;
  int max_iterations = 40;
  double max_delta = 0.0;  // 0: 1e3 max(|value|, 1)
};

namespace detail {
inline double bures_g(double F, double delta) {
  return 8.0 * (1.0 - std::sqrt(F)) / (delta * delta);
}
}  // namespace detail

/// G ~ 8 (1 - sqrt F(v - d/2, v + d/2)) / d^2 for a family v -> normalized
/// grid wavefunction, with d tuned geometrically so that 1 - F lands in
/// [lo, hi] and a two-d Richardson refinement.
/// `pair_fidelity(a, b)` returns F between the states at parameter values a
/// and b.
template <class PairFn>
FidelityQfi qfi_fidelity(PairFn&& pair_fidelity, double value, double delta0,
                         const FidelityOptions& opt = {}) {
  const double cap = opt.max_delta > 0 ? opt.max_delta : 1e3 * std::max(std::abs(value), 1.0);
  auto infid = [&](double d) { return 1.0 - pair_fidelity(value - 0.5 * d, value + 0.5 * d); };
  FidelityQfi r;
  double d = std::min(delta0 > 0 ? delta0 : 1e-6 * std::max(std::abs(value), 1.0), cap);
  double d_lo = 0.0, d_hi = 0.0;  // bracket: infidelity(d_lo) < lo, infidelity(d_hi) > hi
  double f = infid(d);
  for (r.iterations = 1;; ++r.iterations) {
    if (f >= opt.lo && f <= opt.hi) break;
    if (r.iterations >= opt.max_iterations) {
      char msg[200];
      std::snprintf(msg, sizeof msg,
                    "fidelity QFI: delta auto-tune failed after %d iterations (delta = %.6g, 1-F = %.6g)",
                    r.iterations, d, f);
      throw numerical_error(msg);
    }
    if (f < opt.lo) {
      if (d >= cap) {
        r.delta_capped = true;
        break;
      }
      d_lo = d;
      d = d_hi > 0 ? std::sqrt(d_lo * d_hi) : std::min(cap, f > 0 ? d * std::min(1e3, std::sqrt(opt.target / f)) : d * 1e3);
    } else {
      d_hi = d;
      d = d_lo > 0 ? std::sqrt(d_lo * d_hi) : d * std::max(1e-3, std::sqrt(opt.target / f));
    }
    f = infid(d);
  }
  r.delta = d;
  r.infidelity = f;
  const double F1 = 1.0 - f;
  const double g1 = detail::bures_g(F1, d);
  if (r.delta_capped) {
    r.value = g1;
    return r;
  }
  const double g2 = detail::bures_g(1.0 - infid(0.5 * d), 0.5 * d);
  r.value = (4.0 * g2 - g1) / 3.0;
  return r;
}

/// Fidelity QFI for a Gaussian-branch family value -> ClockState. Each pair
/// of states is rendered on a grid sized for both.
template <class StateFn>
FidelityQfi qfi_numeric(StateFn&& state_at, double value, double delta0 = 0.0,
                        std::size_t min_points = kMinGridPoints, const FidelityOptions& opt = {}) {
  auto pair = [&](double a, double b) {
    const ClockState sa = state_at(a), sb = state_at(b);
    const Grid grid = auto_grid({sa, sb}, min_points);
    return fidelity(render(sa, grid), render(sb, grid));
  };
  return qfi_fidelity(pair, value, delta0, opt);
}

// ---------------------------------------------------------------------------
// Projective detection

/// P_pm = sum over channels |<D_pm|psi_channel>|^2, with D_pm a single
/// spatial wavefunction applied to each internal level.
inline std::pair<double, double> probabilities_numeric(const GridWavefunction& psi,
                                                       const std::vector<cplx>& d_plus,
                                                       const std::vector<cplx>& d_minus) {
  if (d_plus.size() != psi.grid.n_points || d_minus.size() != psi.grid.n_points)
    throw numerical_error("probabilities_numeric: grid mismatch with detector states");
  double pp = 0.0, pm = 0.0;
  for (const auto& ch : psi.channel) {
    pp += std::norm(trapezoid_inner(d_plus, ch, psi.grid.spacing));
    pm += std::norm(trapezoid_inner(d_minus, ch, psi.grid.spacing));
  }
  return {pp, pm};
}

/// Detector states (|psi_+> +- |psi_->)/sqrt(2) from two normalized spatial
/// path branches (levels ignored).
inline std::pair<std::vector<cplx>, std::vector<cplx>> detector_states(const GaussianBranch& plus,
                                                                       const GaussianBranch& minus,
                                                                       const Grid& grid) {
  std::vector<cplx> a(grid.n_points), b(grid.n_points);
  add_branch(a, plus, 1.0, grid);
  add_branch(b, minus, 1.0, grid);
  std::vector<cplx> dp(grid.n_points), dm(grid.n_points);
  const double r = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < grid.n_points; ++j) {
    dp[j] = r * (a[j] + b[j]);
    dm[j] = r * (a[j] - b[j]);
  }
  return {dp, dm};
}

/// CSV dump with columns x_m, re0, im0, re1, im1.
inline void write_csv(const GridWavefunction& psi, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write " + path);
  out << "x_m,re0,im0,re1,im1\n";
  char line[160];
  for (std::size_t j = 0; j < psi.grid.n_points; ++j) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", psi.grid.x(j),
                  psi.channel[0][j].real(), psi.channel[0][j].imag(), psi.channel[1][j].real(),
                  psi.channel[1][j].imag());
    out << line;
  }
}

}  // namespace clockfisher
