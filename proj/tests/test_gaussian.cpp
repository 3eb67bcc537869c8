#include <gtest/gtest.h>

#include <random>

#include "clockfisher/gaussian.hpp"
#include "clockfisher/oracle.hpp"

using namespace clockfisher;

namespace {

PhysicalParams zero_energy(PhysicalParams p) {
  p.E0 = p.E1 = 0.0;
  return p;
}

GaussianBranch single(double x, double sigma, int level = 0) {
  GaussianBranch b;
  b.mean_x = x;
  b.phase.x_ref = x;
  b.alpha = {0.25 / (sigma * sigma), 0.0};
  b.level = level;
  return b;
}

}  // namespace

TEST(InitialState, AmplitudesAndOrder) {
  auto p = preset("sr88_10s");
  auto s = make_initial_state(p);
  ASSERT_EQ(s.components.size(), 4u);
  for (const auto& b : s.components) {
    EXPECT_EQ(b.amplitude, cplx(0.5, 0.0));
    EXPECT_EQ(b.var_x(), p.sigma * p.sigma);
    EXPECT_EQ(b.mean_p, 0.0);
  }
  EXPECT_EQ(s.components[0].path, Path::plus);
  EXPECT_EQ(s.components[3].path, Path::minus);
  p.phi = constants::pi;
  s = make_initial_state(p);
  EXPECT_NEAR(s.components[2].amplitude.real(), -0.5, 1e-16);
  EXPECT_NEAR(s.components[3].amplitude.real(), -0.5, 1e-16);
  EXPECT_TRUE(s.warnings.empty());
}

TEST(InitialState, OverlappingBranchesWarn) {
  auto p = preset("sr88_10s");
  p.sigma = 2 * p.h();
  EXPECT_FALSE(make_initial_state(p).warnings.empty());
}

TEST(InitialState, NormIncludesCrossOverlap) {
  // branches close enough that e^{-h^2/(8 sigma^2)} matters
  auto p = preset("sr88_10s");
  p.sigma = 0.3 * p.h();
  for (double phi : {0.0, 0.7, 2.0}) {
    p.phi = phi;
    const auto s = make_initial_state(p);
    const double cross = std::exp(-p.h() * p.h() / (8 * p.sigma * p.sigma));
    EXPECT_NEAR(norm2(s), 1.0 + cross * std::cos(phi), 1e-12);
    const auto psi = render(s, auto_grid({s}));
    EXPECT_NEAR(clockfisher::norm2(psi), norm2(s), 1e-10);
  }
  p = preset("sr88_10s");
  EXPECT_NEAR(norm2(make_initial_state(p)), 1.0, 1e-12);
}

TEST(FreeFall, ZeroTimeIsIdentity) {
  auto p = preset("sr88_10s");
  p.dt = 0.0;
  for (const auto& b : make_initial_state(p).components) {
    const auto f = evolve_freefall_full(b, p);
    EXPECT_TRUE(f.same_shape(b));
    EXPECT_EQ(f.amplitude, b.amplitude);
    EXPECT_TRUE(evolve_freefall_approx(b, p).same_shape(b));
    EXPECT_TRUE(evolve_mz(b, p).same_shape(b));
  }
}

TEST(FreeFall, TextbookLimit) {
  auto p = zero_energy(preset("sr88_10s"));
  p.dt = 1.0;
  const auto b = evolve_freefall_full(make_initial_state(p).components[0], p);
  EXPECT_NEAR(std::abs(b.mean_p), 9.81e-25, 1e-38);
  EXPECT_NEAR(to_double(b.mean_x), p.x_plus - 4.905, 1e-13);
  const double s = p.hbar / (2e-25 * 1e-4);
  EXPECT_NEAR(b.var_x(), 1e-8 + s * s, 1e-22);
}

TEST(FreeFall, MomentumRatioIsOnePlusZ) {
  const auto p = preset("sr88_10s");
  const auto s = make_initial_state(p);
  const auto b1 = evolve_freefall_full(s.components[1], p);
  const auto b0 = evolve_freefall_full(s.components[0], zero_energy(p));
  ASSERT_EQ(b1.level, 1);
  const xreal ratio = xreal(p.m) * (1 + xreal(p.z1())) * p.g * p.dt / (xreal(p.m) * p.g * p.dt);
  EXPECT_NEAR(b1.mean_p / b0.mean_p, to_double(ratio), 1e-13);
  EXPECT_NEAR(b1.mean_p / b0.mean_p - 1.0, p.z1(), 1e-13);
}

TEST(FreeFall, FullAndApproxAgreeAtZeroEnergy) {
  const auto p = zero_energy(preset("sr88_10s"));
  for (const auto& b : make_initial_state(p).components) {
    const auto f = evolve_freefall_full(b, p), a = evolve_freefall_approx(b, p);
    EXPECT_TRUE(f.mean_x == a.mean_x);
    EXPECT_EQ(f.alpha, a.alpha);
    EXPECT_EQ(f.mean_p, a.mean_p);
    // same phase up to quad rounding of differently ordered products
    EXPECT_LT(to_double(xabs(f.phase.at(f.mean_x + 1e-3) - a.phase.at(f.mean_x + 1e-3))), 1e-15);
  }
}

TEST(FreeFall, FullMinusApproxDifferences) {
  const auto p = preset("sr88_10s");
  const auto b = make_initial_state(p).components[1];
  const auto f = evolve_freefall_full(b, p), a = evolve_freefall_approx(b, p);
  const xreal z = p.z1(), t = p.dt, g = p.g;
  // mean position: (g dt^2/2) z^2
  const xreal dx = f.mean_x - a.mean_x;
  EXPECT_LT(to_double(xabs(dx)), 1e-17);
  EXPECT_NEAR(to_double(dx / (g * t * t / 2 * z * z)), 1.0, 1e-9);
  // cubic term: m g^2 dt^3 (1+z) z^2 / (6 hbar)
  const xreal dc = f.phase[PhaseTerm::cubic] - a.phase[PhaseTerm::cubic];
  const xreal expect = xreal(p.m) * g * g * t * t * t * (1 + z) * z * z / (6 * xreal(p.hbar));
  EXPECT_NEAR(to_double(dc / expect), 1.0, 1e-9);
}

TEST(FreeFall, DifferenceOrderInZ) {
  // scale z by lambda: mean_x difference ~ lambda^2, momentum z-term ~ lambda
  const auto base = preset("sr88_10s");
  std::vector<double> dxs, dps;
  for (double lam : {1.0, 0.1, 0.01}) {
    auto p = base;
    p.E1 = base.E1 * lam;
    const auto b = make_initial_state(p).components[1];
    const auto f = evolve_freefall_full(b, p), a = evolve_freefall_approx(b, p);
    dxs.push_back(to_double(xabs(f.mean_x - a.mean_x)));
    dps.push_back(std::abs(f.mean_p - a.mean_p));
  }
  EXPECT_NEAR(std::log10(dxs[0] / dxs[2]) / 2.0, 2.0, 0.01);
  EXPECT_NEAR(std::log10(dps[0] / dps[2]) / 2.0, 1.0, 0.01);
}

TEST(FreeFall, UnitarityOfBothMaps) {
  for (auto name : {"sr88_10s", "sr88_100s"}) {
    const auto p = preset(name);
    const auto s = make_initial_state(p);
    const double n0 = norm2(s);  // not 1 when the branches overlap initially
    EXPECT_NEAR(norm2(evolve(s, p, evolve_freefall_full)), n0, 1e-12);
    EXPECT_NEAR(norm2(evolve(s, p, evolve_freefall_approx)), n0, 1e-12);
    // the 100 s preset puts the branches within 5 Sigma of the kink
    if (std::string(name) == "sr88_10s") {
      EXPECT_NEAR(norm2(evolve(s, p, evolve_mz)), n0, 1e-12);
    }
  }
}

TEST(FreeFall, RestMassNeverEntersTheLedger) {
  const auto p = preset("sr88_10s");
  const double rest = p.m * p.c * p.c * p.dt / p.hbar;  // ~1e28 rad
  for (const auto& b : evolve(make_initial_state(p), p, evolve_freefall_full).components)
    for (auto v : b.phase.terms) EXPECT_LT(to_double(xabs(v)), 1e-6 * rest);
}

TEST(Piecewise, AnchorsAndContinuity) {
  const auto p = preset("sr88_10s");
  EXPECT_DOUBLE_EQ(piecewise_potential(p.x_plus0, p), p.V_plus0);
  EXPECT_DOUBLE_EQ(piecewise_potential(p.x_minus0, p), p.V_minus0);
  const double upper = p.g_plus * (p.x0 - p.x_plus0) + p.V_plus0;
  const double lower = p.g_minus * (p.x0 - p.x_minus0) + p.V_minus0;
  EXPECT_NEAR(upper - lower, 0.0, 1e-8);
  EXPECT_EQ(piecewise_slope(p.x0, p), p.g_plus);
  auto q = p;
  q.V_minus0 += 1.0;
  EXPECT_NEAR(p.g_plus * (q.x0 - q.x_plus0) + q.V_plus0 - (q.g_minus * (q.x0 - q.x_minus0) + q.V_minus0), -1.0, 1e-8);
}

TEST(MachZehnder, ZeroEnergyOnlySpreads) {
  const auto p = zero_energy(preset("sr88_10s"));
  for (const auto& b : make_initial_state(p).components) {
    const auto e = evolve_mz(b, p);
    EXPECT_EQ(e.mean_x, b.mean_x);
    EXPECT_EQ(e.mean_p, 0.0);
    EXPECT_EQ(e.phase.slope, 0);
    EXPECT_EQ(e.phase[PhaseTerm::potential], 0);
    EXPECT_EQ(e.phase[PhaseTerm::rest_internal], 0);
    EXPECT_NEAR(e.var_x(), p.spread2(), 1e-20);
  }
}

TEST(MachZehnder, KinkStraddleThrows) {
  auto p = preset("sr88_10s");
  p.x0 = p.x_plus - 1e-4;
  EXPECT_THROW(evolve_mz(make_initial_state(p).components[0], p), numerical_error);
}

TEST(MachZehnder, PathPhaseDifferenceMatchesLedgerOracle) {
  const auto p = preset("sr88_10s");
  const auto s = evolve(make_initial_state(p), p, evolve_mz);
  for (int level : {0, 1}) {
    const auto& plus = s.components[level];
    const auto& minus = s.components[2 + level];
    const xreal diff = plus.phase.at(p.x_plus) - minus.phase.at(p.x_minus);
    const xreal mz = xreal(p.m) * p.coupling_z(level);
    const xreal Vp = xreal(p.g_plus) * (xreal(p.x_plus) - p.x_plus0) + p.V_plus0;
    const xreal Vm = xreal(p.g_minus) * (xreal(p.x_minus) - p.x_minus0) + p.V_minus0;
    const xreal expect = -xreal(p.dt) * mz * (Vp - Vm) / p.hbar;
    EXPECT_NEAR(to_double(diff - expect), 0.0, 1e-10);
  }
}

TEST(Overlap, Identities) {
  const auto p = preset("sr88_10s");
  const auto s = evolve(make_initial_state(p), p, evolve_freefall_full);
  for (const auto& a : s.components) {
    EXPECT_EQ(overlap(a, a), cplx(1.0, 0.0));
    for (const auto& b : s.components) {
      const cplx ab = overlap(a, b), ba = overlap(b, a);
      EXPECT_EQ(ab, std::conj(ba));
      EXPECT_LE(std::abs(ab), 1.0 + 1e-12);
      if (a.level != b.level) {
        EXPECT_EQ(ab, cplx(0.0, 0.0));
      }
    }
  }
}

TEST(Overlap, SeparatedRealGaussians) {
  for (double h : {1e-5, 1e-4, 3e-4}) {
    const double sigma = 1e-4;
    const double xb = 0.5 + h, d = xb - 0.5;
    const auto a = single(0.5, sigma), b = single(xb, sigma);
    EXPECT_NEAR(overlap(a, b).real(), std::exp(-d * d / (8 * sigma * sigma)), 1e-14);
    EXPECT_NEAR(overlap(a, b).imag(), 0.0, 1e-14);
  }
}

TEST(Overlap, MatchesQuadratureOnRandomPairs) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double s1 = 1e-4 * (0.5 + U(rng)), s2 = 1e-4 * (0.5 + U(rng));
    auto a = single(0.3, s1), b = single(0.3 + 3e-4 * (U(rng) - 0.5), s2);
    a.alpha += cplx(0.0, 5e7 * (U(rng) - 0.5));
    b.alpha += cplx(0.0, 5e7 * (U(rng) - 0.5));
    a.phase.slope = 1e11 + 2e4 * U(rng);
    b.phase.slope = 1e11 + 2e4 * U(rng);
    a.phase[PhaseTerm::potential] = xreal(3e17) + xreal(U(rng));
    b.phase[PhaseTerm::potential] = xreal(3e17) + xreal(U(rng));
    ClockState sa, sb;
    sa.components = {a};
    sb.components = {b};
    const Grid grid = auto_grid({sa, sb}, 1 << 14);
    const cplx quad = inner(render(sa, grid), render(sb, grid));
    const cplx closed = overlap(a, b);
    EXPECT_LT(std::abs(quad - closed), 1e-8 * std::max(std::abs(closed), 1e-3)) << trial;
  }
}
