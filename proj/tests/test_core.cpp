#include <gtest/gtest.h>
#include <quadmath.h>

#include "clockfisher/core.hpp"
#include "clockfisher/xreal.hpp"

using namespace clockfisher;

TEST(ProperTime, AtRestInFlatSpaceIsOne) {
  EXPECT_EQ(proper_time_rate(0.0, 0.0, preset("sr88_10s")), 1.0);
}

TEST(ProperTime, PotentialOnly) {
  const auto p = preset("sr88_10s");
  EXPECT_DOUBLE_EQ(proper_time_rate(-9.81, 0.0, p), 1.0 - 9.81 / (p.c * p.c));
}

TEST(ProperTime, MatchesExtendedPrecision) {
  const auto p = preset("sr88_10s");
  const double V = 9.81 * 1.0, mom = p.m * 1.0;
  const xreal c2 = xreal(p.c) * p.c;
  const xreal ref = 1 + xreal(V) / c2 - xreal(mom) * mom / (2 * xreal(p.m) * p.m * c2);
  EXPECT_NEAR(proper_time_rate(V, mom, p), to_double(ref), 1e-16);
}

TEST(ProperTime, MonotoneInPotentialAndMomentum) {
  const auto p = preset("sr88_10s");
  for (double V = -1e8; V < 1e8; V += 1e6)
    EXPECT_LT(proper_time_rate(V, 0.0, p), proper_time_rate(V + 1e6, 0.0, p));
  for (double v = 0.0; v < 1e4; v += 100.0)
    EXPECT_GT(proper_time_rate(0.0, p.m * v, p), proper_time_rate(0.0, p.m * (v + 100.0), p));
}

TEST(ShiftedFrequency, Examples) {
  const auto p = preset("sr88_10s");
  EXPECT_EQ(shifted_frequency(1.0, 0.0, 0.0, p), 1.0);
  const double w = p.dE() / p.hbar;
  EXPECT_EQ(shifted_frequency(w, 0.0, 0.0, p), w);
  const double V = -6.25e7;
  const xreal ref = xreal(1e15) * (1 + xreal(V) / (xreal(p.c) * p.c));
  EXPECT_NEAR(shifted_frequency(1e15, V, 0.0, p) / to_double(ref), 1.0, 1e-12);
  EXPECT_NEAR(shifted_frequency(1e15, V, 0.0, p) / 1e15, 1.0 - 6.95e-10, 1e-12);
}

TEST(Regime, BothPresetsSatisfied) {
  for (auto name : {"sr88_10s", "sr88_100s"}) {
    const auto r = check_regime(preset(name));
    EXPECT_TRUE(r.satisfied) << name;
    for (const auto& e : r.entries) {
      EXPECT_TRUE(std::isfinite(e.ratio)) << e.name;
      EXPECT_GE(e.ratio, 0.0) << e.name;
    }
  }
}

TEST(Regime, SigmaEqualToHFailsOnlyThatEntry) {
  auto p = preset("sr88_10s");
  p.sigma = p.h();
  const auto r = check_regime(p);
  EXPECT_FALSE(r.satisfied);
  EXPECT_FALSE(r.at("sigma_ll_h").satisfied);
  EXPECT_DOUBLE_EQ(r.at("sigma_ll_h").ratio, 1.0);
}

TEST(Regime, ThresholdIsConfigurable) {
  auto p = preset("sr88_10s");
  p.ratio_threshold = 1e-9;
  EXPECT_FALSE(check_regime(p).satisfied);
}

TEST(Preset, Sr88Values) {
  const auto a = preset("sr88_10s");
  EXPECT_EQ(a.m, 1e-25);
  EXPECT_NEAR(a.dE(), 4.486e-19, 1e-22);
  EXPECT_EQ(a.dt, 10.0);
  EXPECT_NEAR(a.h(), 1e-2, 1e-15);
  EXPECT_EQ(a.sigma, 1e-4);
  const auto b = preset("sr88_100s");
  EXPECT_EQ(b.dt, 100.0);
  EXPECT_EQ(b.sigma, 1e-3);
  EXPECT_EQ(b.m, a.m);
  EXPECT_EQ(b.h(), a.h());
}

TEST(Preset, UnknownNameListsAvailable) {
  try {
    preset("nope");
    FAIL() << "expected config_error";
  } catch (const config_error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("sr88_10s"), std::string::npos);
    EXPECT_NE(msg.find("sr88_100s"), std::string::npos);
  }
}

TEST(Params, DerivedRatiosAgree) {
  const auto p = preset("sr88_10s");
  EXPECT_NEAR(p.z1(), p.E1 / (p.m * p.c * p.c), 1e-14 * p.z1());
  EXPECT_NEAR(p.z1(), 4.99e-11, 0.01e-11);
  EXPECT_EQ(p.coupling_z(1), p.z1());
  auto q = p;
  q.ablate_time_dilation = true;
  EXPECT_EQ(q.coupling_z(1), 0.0);
}

TEST(Params, ValidationRejectsBadInput) {
  auto p = preset("sr88_10s");
  p.m = -1;
  EXPECT_THROW(p.validate(), config_error);
  p = preset("sr88_10s");
  p.x_plus = p.x_minus;
  EXPECT_THROW(p.validate(), config_error);
  p = preset("sr88_10s");
  p.E1 = p.m * p.c * p.c * 1e-5;
  EXPECT_THROW(p.validate(), config_error);
}

TEST(XReal, WrapPhase) {
  EXPECT_NEAR(wrap_phase(xreal(3) * 2 * acosq(-1) + xreal(0.5)), 0.5, 1e-15);
  // 1e18 rad keeps its fractional part in binary128
  const xreal big = xreal(1e18) * 2 * acosq(-1) + xreal(1) / 4;
  EXPECT_NEAR(wrap_phase(big), 0.25, 1e-12);
  EXPECT_LE(wrap_phase(acosq(-1)), M_PI);
  EXPECT_GT(wrap_phase(-acosq(-1)), -M_PI - 1e-15);
}
