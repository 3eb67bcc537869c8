// Acceptance harness: one PASS/FAIL line per criterion. Exits 0 once every
// criterion has been evaluated, whatever the verdicts; nonzero only if the
// harness itself breaks.

#include <quadmath.h>

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "clockfisher/bouncer.hpp"
#include "clockfisher/estimation.hpp"
#include "clockfisher/oracle.hpp"
#include "clockfisher/sweep.hpp"

using namespace clockfisher;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void check(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
    char buf[400];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + std::string(buf);
    pass = pass && ok;
  }
};

int failures = 0;

void criterion(int id, const char* title, double time_limit_s, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.check(false, "exception: %s", e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit_s > 0) v.check(secs < time_limit_s, "runtime %.2f s (limit %.0f s)", secs, time_limit_s);
  if (!v.pass) ++failures;
  std::printf("%s criterion %d: %s [%s]\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str());
  std::fflush(stdout);
}

std::vector<double> dt_grid(int points) {
  SweepSpec s;
  s.start = 10;
  s.stop = 100;
  s.points = points;
  s.log = true;
  return s.values();
}

Scenario ff(const PhysicalParams& p) {
  Scenario sc;
  sc.params = p;
  return sc;
}

Scenario mz(const PhysicalParams& p, Target t) {
  Scenario sc;
  sc.kind = ScenarioKind::mach_zehnder;
  sc.target = t;
  sc.params = p;
  return sc;
}

double closed_qfi(const Scenario& sc) {
  return sc.kind == ScenarioKind::free_fall ? qfi_ff_closed(sc.params) : qfi_mz_closed(sc.params, sc.target);
}

double parametric(const Scenario& sc) {
  const double floor = sc.kind == ScenarioKind::mach_zehnder ? 1e-4 * std::max(1.0, std::abs(sc.params.bar_g())) : 1e-9;
  return qfi_pure_parametric([&](double v) { return sc.state_at(v); }, sc.nominal(), 1e-5, floor).value;
}

/// Regime-valid free-fall and Mach-Zehnder points, varied in dt and sigma.
std::vector<Scenario> test_points(ScenarioKind kind) {
  std::vector<Scenario> out;
  for (double dt : {2.0, 5.0, 10.0, 20.0, 50.0})
    for (double sigma : {5e-5, 1e-4, 3e-4}) {
      PhysicalParams p = preset("sr88_10s");
      p.dt = dt;
      p.sigma = sigma;
      if (!check_regime(p).satisfied) continue;
      if (kind == ScenarioKind::free_fall) {
        out.push_back(ff(p));
      } else {
        out.push_back(mz(p, Target::delta_g));
        out.push_back(mz(p, Target::bar_g));
      }
    }
  return out;
}

std::string describe(const Scenario& sc) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s/%s dt=%g sigma=%g", std::string(to_string(sc.kind)).c_str(),
                std::string(to_string(sc.target)).c_str(), sc.params.dt, sc.params.sigma);
  return buf;
}

// Maclaurin series in binary128 (|y| <= 5)
double ai_series(double yd) {
  const __float128 y = yd;
  const __float128 c1 = 1 / (powq(3, 2 / (__float128)3) * tgammaq(2 / (__float128)3));
  const __float128 c2 = 1 / (powq(3, 1 / (__float128)3) * tgammaq(1 / (__float128)3));
  __float128 f = 1, g = y, tf = 1, tg = y;
  for (int k = 1; k < 200; ++k) {
    tf *= y * y * y / ((3 * k - 1) * (3 * k));
    tg *= y * y * y / ((3 * k) * (3 * k + 1));
    f += tf;
    g += tg;
  }
  return static_cast<double>(c1 * f - c2 * g);
}

double bisect_zero(double lo, double hi) {
  double flo = ai_series(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = ai_series(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void scaling_sweep(Verdict& v, bool ablate) {
  const auto dts = dt_grid(20);
  std::vector<double> asym, closed;
  for (double dt : dts) {
    PhysicalParams p = preset("sr88_10s");
    p.dt = dt;
    p.ablate_time_dilation = ablate;
    asym.push_back(qfi_ff_asymptotic(p));
    closed.push_back(qfi_ff_closed(p));
  }
  if (!ablate) {
    const auto fa = fit_scaling(dts, asym);
    v.check(std::abs(fa.slope - 6.0) <= 1e-3, "asymptotic slope %.6f", fa.slope);
  }
  const auto fc = fit_scaling(dts, closed);
  const double want = ablate ? 4.0 : 6.0;
  v.check(std::abs(fc.slope - want) <= 0.1, "closed-form slope %.4f over dt %.3g..%.3g s%s (want %.1f)", fc.slope,
          dts[fc.first], dts[fc.last], fc.window_converged ? "" : ", window not converged", want);
}

}  // namespace

int main() {
  criterion(1, "dt^6 law of the free-fall QFI", 1.0, [](Verdict& v) { scaling_sweep(v, false); });

  criterion(2, "dt^4 law with the time-dilation coupling ablated", 1.0, [](Verdict& v) { scaling_sweep(v, true); });

  criterion(3, "closed forms vs grid fidelity oracle (2^16 points)", 300.0, [](Verdict& v) {
    for (auto kind : {ScenarioKind::free_fall, ScenarioKind::mach_zehnder}) {
      const auto pts = test_points(kind);
      double worst = 0.0;
      std::string where;
      for (const auto& sc : pts) {
        const auto r = qfi_numeric([&](double x) { return sc.state_at(x); }, sc.nominal(), 0.0, std::size_t{1} << 16);
        const double rel = std::abs(r.value - closed_qfi(sc)) / closed_qfi(sc);
        if (rel >= worst) {
          worst = rel;
          where = describe(sc);
        }
      }
      v.check(pts.size() >= 10 && worst < 1e-2, "%s: %zu sets, worst rel. error %.2e (%s)",
              std::string(to_string(kind)).c_str(), pts.size(), worst, where.c_str());
    }
  });

  criterion(4, "reduced-state QFI collapse", 0.0, [](Verdict& v) {
    const auto dts = dt_grid(20);
    std::vector<double> red, full;
    double worst = 0.0;
    for (double dt : dts) {
      PhysicalParams p = preset("sr88_10s");
      p.dt = dt;
      const auto sc = ff(p);
      red.push_back(qfi_reduced_gram(sc).value);
      full.push_back(parametric(sc));
      worst = std::max(worst, std::abs(red.back() / qfi_ff_reduced_closed(p) - 1.0));
    }
    v.check(worst < 1e-2, "Gram vs closed reduced form: worst rel. error %.2e", worst);
    const auto fr = fit_scaling(dts, red);
    const auto ff_fit = fit_loglog(dts, full, fr.first, fr.last);
    v.check(std::abs(fr.slope - 2.0) <= 0.1, "reduced slope %.4f over dt %.3g..%.3g s", fr.slope, dts[fr.first],
            dts[fr.last]);
    v.check(ff_fit.slope >= 4.0, "full-state slope %.4f on the same window (want >= 4)", ff_fit.slope);
  });

  criterion(5, "probability normalization and classical FI", 0.0, [](Verdict& v) {
    // closed-form normalization on the sweep points; grid projection on the
    // presets (away from them the clock's momentum kick m z g dt / hbar takes
    // (dk Sigma)^2 of probability outside the detector modes)
    int exact = 0, total = 0;
    double worst_sum = 0.0;
    auto grid_error = [&](const PhysicalParams& p) {
      const auto cf = detection_probabilities(p, ScenarioKind::free_fall);
      const auto s = evolve(make_initial_state(p), p, evolve_freefall_approx);
      PhysicalParams q = p;
      q.E0 = q.E1 = 0.0;
      q.phi = 0.0;
      const auto ref = evolve(make_initial_state(q), q, evolve_freefall_approx);
      auto plus = ref.components[0], minus = ref.components[2];
      plus.amplitude = minus.amplitude = 1.0;
      const Grid g = auto_grid({s}, std::size_t{1} << 16);
      const auto [dp, dm] = detector_states(plus, minus, g);
      const auto num = probabilities_numeric(render(s, g), dp, dm);
      worst_sum = std::max(worst_sum, num.first + num.second - 1.0);
      return std::max(std::abs(num.first - cf.first), std::abs(num.second - cf.second));
    };
    double worst_wide = 0.0;
    for (const auto& sc : test_points(ScenarioKind::free_fall))
      for (double phi : {0.0, 0.7, 2.0}) {
        PhysicalParams p = sc.params;
        p.phi = phi;
        const auto cf = detection_probabilities(p, ScenarioKind::free_fall);
        exact += (cf.first + cf.second == 1.0);
        ++total;
        worst_wide = std::max(worst_wide, grid_error(p));
      }
    double worst_grid = 0.0;
    for (auto name : {"sr88_10s", "sr88_100s"})
      for (double phi : {0.0, 0.7, 2.0}) {
        PhysicalParams p = preset(name);
        p.phi = phi;
        worst_grid = std::max(worst_grid, grid_error(p));
      }
    v.check(exact == total, "P+ + P- == 1 exactly at %d/%d points", exact, total);
    v.check(worst_grid <= 1e-6, "grid-projected vs closed probabilities on the presets: worst abs. error %.2e",
            worst_grid);
    v.check(worst_sum <= 1e-8, "grid probabilities sum - 1 <= %.1e", worst_sum);
    v.check(true, "info: worst over all %d sweep points %.2e", total, worst_wide);

    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> A(0.5, 5.0), L(0.1, 3.0);
    double worst_fi = 0.0;
    int used = 0;
    while (used < 100) {
      const double alpha = A(rng), lam = L(rng);
      if (std::abs(std::sin(alpha * lam)) < 1e-2) continue;  // FI only defined as a limit at P = 0
      ++used;
      auto pr = [&](double l) {
        return std::array<double, 2>{0.5 * (1 + std::cos(alpha * l)), 0.5 * (1 - std::cos(alpha * l))};
      };
      worst_fi = std::max(worst_fi, std::abs(classical_fi(pr, lam).value / (alpha * alpha) - 1.0));
    }
    v.check(worst_fi <= 1e-6, "classical FI vs alpha^2 on %d draws: worst rel. error %.2e", used, worst_fi);
  });

  criterion(6, "Mach-Zehnder null test without clock energies", 0.0, [](Verdict& v) {
    PhysicalParams p = preset("sr88_10s");
    const double sr88 = qfi_mz_closed(p, Target::delta_g);
    p.E0 = p.E1 = 0.0;
    const auto sc = mz(p, Target::delta_g);
    const double closed = qfi_mz_closed(p, Target::delta_g);
    const auto r = qfi_numeric([&](double x) { return sc.state_at(x); }, sc.nominal());
    v.check(closed == 0.0, "closed %.3g", closed);
    v.check(std::abs(r.value) < 1e-6 * sr88, "oracle %.3g vs Sr-88 value %.3g", r.value, sr88);
  });

  criterion(7, "information monotonicity fi <= reduced <= full", 0.0, [](Verdict& v) {
    int bad = 0, total = 0;
    std::string first_bad;
    std::vector<Scenario> pts = test_points(ScenarioKind::free_fall);
    for (const auto& s : test_points(ScenarioKind::mach_zehnder)) pts.push_back(s);
    for (const auto& sc : pts) {
      const bool isff = sc.kind == ScenarioKind::free_fall;
      const double fi_c = isff ? fi_ff_closed(sc.params) : fi_mz_closed(sc.params, sc.target);
      auto probs = [&](double x) {
        const auto pr = detection_probabilities(sc.params_at(x), sc.kind);
        return std::array<double, 2>{pr.first, pr.second};
      };
      const double floor = isff ? 1e-9 : 1e-4 * std::max(1.0, std::abs(sc.params.bar_g()));
      const double fi_n = classical_fi(probs, sc.nominal(), 1e-4, floor).value;
      const double red = qfi_reduced_gram(sc).value;
      const double full = parametric(sc);
      const bool ok = std::max(fi_c, fi_n) <= red * (1 + 1e-6) && red <= full * (1 + 1e-2);
      ++total;
      if (!ok) {
        ++bad;
        if (first_bad.empty()) first_bad = describe(sc);
      }
    }
    v.check(bad == 0, "%d/%d points ordered%s%s", total - bad, total, bad ? ", first violation " : "",
            first_bad.c_str());
  });

  criterion(8, "bouncer spectral suite", 120.0, [](Verdict& v) {
    double worst = 0.0;
    const double h = 1e-2;
    for (double y : {-10.0, -1.0, 0.0, 1.0, 10.0}) {
      auto d = [&](int k) { return airy_ai_prime(y + k * h); };
      const double app = (-d(-3) + 9 * d(-2) - 45 * d(-1) + 45 * d(1) - 9 * d(2) + d(3)) / (60 * h);
      worst = std::max(worst, std::abs(app - y * airy_ai(y)));
    }
    v.check(worst < 1e-9, "Airy ODE residual %.2e", worst);
    const double e1 = std::abs(airy_zero(1) - bisect_zero(-3.0, -2.0));
    const double e2 = std::abs(airy_zero(2) - bisect_zero(-5.0, -4.0));
    v.check(std::max(e1, e2) < 1e-10, "z1, z2 vs bisection %.1e, %.1e", e1, e2);

    const PhysicalParams p = preset("sr88_bouncer");
    {
      const auto s = bouncer_spectrum(p, 20);
      const double b = (std::abs(s.zeros.back()) + 15.0) * s.length[0];
      const int N = 40000;
      std::vector<std::vector<double>> psi(20, std::vector<double>(N + 1));
      for (int n = 1; n <= 20; ++n)
        for (int k = 0; k <= N; ++k) psi[n - 1][k] = s.eigenfunction(0, n, b * k / N);
      double err = 0.0;
      for (int n = 0; n < 20; ++n)
        for (int m = n; m < 20; ++m) {
          double sum = psi[n][0] * psi[m][0] + psi[n][N] * psi[m][N];
          for (int k = 1; k < N; ++k) sum += (k % 2 ? 4.0 : 2.0) * psi[n][k] * psi[m][k];
          err = std::max(err, std::abs(sum * b / N / 3.0 - (n == m ? 1.0 : 0.0)));
        }
      v.check(err < 1e-6, "orthonormality n,m <= 20: %.1e", err);
    }
    const int n_max = auto_n_max(p);
    const auto s = bouncer_spectrum(p, n_max);
    const auto c = bouncer_coefficients(p, s);
    v.check(c.tail_mass() < 1e-3, "tail mass %.1e at auto n_max = %d", c.tail_mass(), n_max);

    const auto dts = dt_grid(10);
    std::vector<double> g;
    for (double dt : dts) {
      PhysicalParams q = p;
      q.dt = dt;
      g.push_back(bouncer_qfi_longtime(q, s, c).value);
    }
    const auto fit = fit_scaling(dts, g);
    v.check(std::abs(fit.slope - 2.0) <= 0.02, "dt slope %.4f", fit.slope);

    BouncerOracleOptions opt;
    opt.n_max = n_max;
    opt.grid_points = 4096;
    for (double dt : {10.0, 100.0}) {
      PhysicalParams q = p;
      q.dt = dt;
      const double closed = bouncer_qfi_longtime(q, s, c).value;
      const double oracle = bouncer_qfi_oracle(q, opt).value;
      v.check(std::abs(oracle / closed - 1.0) < 2e-2, "oracle/closed at dt=%g s: %.5f", dt, oracle / closed);
    }
  });

  criterion(9, "regime checker", 0.0, [](Verdict& v) {
    for (auto name : {"sr88_10s", "sr88_100s"}) {
      const auto r = check_regime(preset(name));
      v.check(r.satisfied, "%s satisfied", name);
    }
    PhysicalParams p = preset("sr88_10s");
    p.sigma = p.h();
    const auto r = check_regime(p);
    std::string failing;
    for (const auto& e : r.entries)
      if (!e.satisfied) failing += (failing.empty() ? "" : ",") + e.name;
    v.check(failing == "sigma_ll_h", "sigma = h fails {%s}", failing.c_str());
  });

  std::printf("%d criteria failed\n", failures);
  return 0;
}
