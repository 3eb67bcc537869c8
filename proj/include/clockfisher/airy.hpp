#pragma once

// Airy function Ai and its derivative on the real line.
//
// -12 <= y <= 9: Taylor expansion about nodes 0.5 apart. Node values come
// from the Maclaurin series summed in binary128; at y = 9 the cancellation
// between the two series costs about 16 of the 34 digits.
// Elsewhere: the classical asymptotic expansions in zeta = (2/3)|y|^(3/2).

#include <quadmath.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <vector>

#include "clockfisher/core.hpp"
#include "clockfisher/xreal.hpp"

namespace clockfisher {

struct AiryValue {
  double ai;
  double aip;
};

namespace airy_detail {

inline constexpr double kCrossover = 12.0;          // negative side
inline constexpr double kPositiveCrossover = 9.0;
inline constexpr double kNodeSpacing = 0.5;
inline constexpr int kNodes = 43;  // -12, -11.5, ..., 9

/// Maclaurin series in binary128.
inline std::array<xreal, 2> maclaurin(xreal y) {
  const xreal c1 = 1 / (powq(3, xreal(2) / 3) * tgammaq(xreal(2) / 3));
  const xreal c2 = 1 / (powq(3, xreal(1) / 3) * tgammaq(xreal(1) / 3));
  const xreal y3 = y * y * y;
  xreal f = 1, g = y, fp = 0, gp = 1;
  xreal tf = 1, tg = y, tfp = y * y / 2, tgp = 1;
  fp = tfp;
  for (int k = 1; k < 400; ++k) {
    tf *= y3 / ((3 * k - 1) * (3 * k));
    tg *= y3 / ((3 * k) * (3 * k + 1));
    if (k >= 2) {
      tfp *= y3 / ((3 * k - 1) * (3 * k - 3));
      fp += tfp;
    }
    tgp *= y3 / ((3 * k) * (3 * k - 2));
    f += tf;
    g += tg;
    gp += tgp;
    const xreal scale = fabsq(f) + fabsq(g) + fabsq(fp) + fabsq(gp);
    if (k > 4 && fabsq(tf) + fabsq(tg) + fabsq(tfp) + fabsq(tgp) < xreal(1e-36) * scale) break;
  }
  return {c1 * f - c2 * g, c1 * fp - c2 * gp};
}

struct NodeTable {
  std::array<double, kNodes> ai{}, aip{};
  NodeTable() {
    for (int i = 0; i < kNodes; ++i) {
      const auto v = maclaurin(xreal(-kCrossover + kNodeSpacing * i));
      ai[i] = to_double(v[0]);
      aip[i] = to_double(v[1]);
    }
  }
};

inline const NodeTable& nodes() {
  static const NodeTable table;
  return table;
}

/// Taylor series about node y0 using Ai'' = y Ai.
inline AiryValue taylor(double y) {
  const auto& t = nodes();
  int i = static_cast<int>(std::lround((y + kCrossover) / kNodeSpacing));
  if (i < 0) i = 0;
  if (i >= kNodes) i = kNodes - 1;
  const double y0 = -kCrossover + kNodeSpacing * i;
  const double h = y - y0;
  // d[n] = Ai^(n)(y0) / n!
  constexpr int kOrder = 40;
  std::array<double, kOrder + 1> d{};
  d[0] = t.ai[i];
  d[1] = t.aip[i];
  d[2] = y0 * d[0] / 2.0;
  for (int n = 1; n + 2 <= kOrder; ++n) {
    // Ai^(n+2) = y0 Ai^(n) + n Ai^(n-1), rescaled by factorials
    d[n + 2] = (y0 * d[n] + d[n - 1]) / ((n + 2.0) * (n + 1.0));
  }
  double ai = 0.0, aip = 0.0;
  for (int n = kOrder; n >= 1; --n) {
    ai = ai * h + d[n];
    aip = aip * h + n * d[n];
  }
  ai = ai * h + d[0];
  return {ai, aip};
}

inline constexpr int kAsymTerms = 60;

struct AsymCoefs {
  std::array<double, kAsymTerms> u{}, v{};
  AsymCoefs() {
    u[0] = v[0] = 1.0;
    for (int k = 1; k < kAsymTerms; ++k) {
      u[k] = u[k - 1] * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k);
      v[k] = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * u[k];
    }
  }
};

inline const AsymCoefs& asym_coefs() {
  static const AsymCoefs c;
  return c;
}

struct Series {
  double su_even, su_odd, sv_even, sv_odd;  // alternating sums split by parity
  double su_all, sv_all;                    // sum (-1)^k u_k / zeta^k
};

inline Series asymptotic_sums(double zeta) {
  Series s{0, 0, 0, 0, 0, 0};
  double prev = INFINITY;
  double zk = 1.0;
  const auto& co = asym_coefs();
  for (int k = 0; k < kAsymTerms; ++k) {
    const double u = co.u[k] / zk, v = co.v[k] / zk;
    const double mag = std::abs(u) + std::abs(v);
    if (mag > prev) break;  // asymptotic series started to diverge
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    s.su_all += sign * u;
    s.sv_all += sign * v;
    // pairs (-1)^j u_{2j} and (-1)^j u_{2j+1}
    const double pair_sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      s.su_even += pair_sign * u;
      s.sv_even += pair_sign * v;
    } else {
      s.su_odd += pair_sign * u;
      s.sv_odd += pair_sign * v;
    }
    if (mag < 1e-18 * (std::abs(s.su_all) + std::abs(s.su_even))) break;
    prev = mag;
    zk *= zeta;
  }
  return s;
}

constexpr double kInvSqrtPi = 0.56418958354775628695;

// exp(zeta) Ai(y), exp(zeta) Ai'(y) for y > 0
inline AiryValue positive_scaled(double y) {
  const double zeta = 2.0 / 3.0 * y * std::sqrt(y);
  const auto s = asymptotic_sums(zeta);
  const double q = std::pow(y, 0.25);
  return {0.5 * kInvSqrtPi / q * s.su_all, -0.5 * kInvSqrtPi * q * s.sv_all};
}

inline AiryValue negative(double y) {
  const double x = -y;
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  const auto s = asymptotic_sums(zeta);
  const double q = std::pow(x, 0.25);
  const double arg = zeta - 0.25 * constants::pi;
  const double c = std::cos(arg), sn = std::sin(arg);
  return {kInvSqrtPi / q * (c * s.su_even + sn * s.su_odd),
          kInvSqrtPi * q * (sn * s.sv_even - c * s.sv_odd)};
}

}  // namespace airy_detail

inline constexpr double kAiryRange = 1e3;

inline AiryValue airy(double y) {
  if (!std::isfinite(y) || std::abs(y) >= kAiryRange) {
    char msg[120];
    std::snprintf(msg, sizeof msg, "airy: argument %.6g outside (-%g, %g); use airy_scaled for large y",
                  y, kAiryRange, kAiryRange);
    throw numerical_error(msg);
  }
  if (y >= -airy_detail::kCrossover && y <= airy_detail::kPositiveCrossover) return airy_detail::taylor(y);
  if (y < 0) return airy_detail::negative(y);
  const double e = std::exp(-2.0 / 3.0 * y * std::sqrt(y));
  const auto s = airy_detail::positive_scaled(y);
  return {s.ai * e, s.aip * e};
}

inline double airy_ai(double y) { return airy(y).ai; }
inline double airy_ai_prime(double y) { return airy(y).aip; }

/// exp((2/3) y^(3/2)) Ai(y) and the same factor times Ai'(y), y >= 0, with
/// no upper bound on y.
inline AiryValue airy_scaled(double y) {
  if (!(y >= 0.0) || !std::isfinite(y)) throw numerical_error("airy_scaled: requires finite y >= 0");
  if (y <= airy_detail::kPositiveCrossover) {
    const double e = std::exp(2.0 / 3.0 * y * std::sqrt(y));
    const auto v = airy_detail::taylor(y);
    return {v.ai * e, v.aip * e};
  }
  return airy_detail::positive_scaled(y);
}

/// n-th zero of Ai (n >= 1), Newton from the asymptotic seed.
inline double airy_zero(int n) {
  if (n < 1) throw config_error("airy_zero: n must be >= 1");
  const double t = 3.0 * constants::pi * (4.0 * n - 1.0) / 8.0;
  double z = -std::pow(t, 2.0 / 3.0) * (1.0 + 5.0 / 48.0 / (t * t));
  for (int it = 0; it < 100; ++it) {
    const auto v = airy(z);
    const double step = v.ai / v.aip;
    z -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

inline std::vector<double> airy_zeros(int count) {
  std::vector<double> z(static_cast<std::size_t>(count));
  for (int n = 1; n <= count; ++n) z[static_cast<std::size_t>(n - 1)] = airy_zero(n);
  return z;
}

}  // namespace clockfisher
