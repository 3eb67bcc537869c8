#pragma once

// Parameter sweeps, their CSV form, and power-law fits on the result.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "clockfisher/config.hpp"
#include "clockfisher/report.hpp"

namespace clockfisher {

inline const std::array<const char*, 8>& sweep_columns() {
  static const std::array<const char*, 8> cols{"swept_value", "qfi_closed", "qfi_parametric", "qfi_oracle",
                                               "qfi_reduced", "fi_closed",  "fi_numeric",     "regime_ok"};
  return cols;
}

struct SweepRow {
  double swept_value = 0.0;
  std::array<double, 6> values{};  // qfi_closed .. fi_numeric, NaN when not computed
  bool regime_ok = false;
};

struct SweepTable {
  std::string variable;
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;

  /// Column by name; regime_ok maps to 0/1.
  std::vector<double> column(const std::string& name) const {
    const auto& cols = sweep_columns();
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (name != cols[c]) continue;
      for (const auto& r : rows) {
        if (c == 0) out.push_back(r.swept_value);
        else if (c == 7) out.push_back(r.regime_ok ? 1.0 : 0.0);
        else out.push_back(r.values[c - 1]);
      }
      return out;
    }
    throw config_error("unknown column '" + name + "'");
  }
};

inline SweepRow to_row(double swept, const EstimationReport& r) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  auto v = [](const std::optional<double>& x) { return x ? *x : nan; };
  return {swept,
          {v(r.qfi_closed), v(r.qfi_parametric), v(r.qfi_oracle), v(r.qfi_reduced), v(r.fi_closed),
           v(r.fi_numeric)},
          r.regime.satisfied};
}

/// Evaluates every sweep point, in parallel batches; rows keep sweep order.
inline SweepTable run_sweep(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto xs = cfg.sweep.values();
  SweepTable table;
  table.variable = cfg.sweep.variable;
  table.rows.resize(xs.size());
  std::vector<std::vector<std::string>> warnings(xs.size());

  auto point = [&](std::size_t k) {
    ScenarioConfig c = cfg;
    set_variable(c.scenario.params, cfg.sweep.variable, xs[k]);
    const auto rep = compute_report(c);
    table.rows[k] = to_row(xs[k], rep);
    warnings[k] = rep.warnings;
  };
  const std::size_t batch = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t first = 0; first < xs.size(); first += batch) {
    std::vector<std::future<void>> jobs;
    for (std::size_t k = first; k < std::min(xs.size(), first + batch); ++k)
      jobs.push_back(std::async(std::launch::async, point, k));
    for (auto& j : jobs) j.get();  // rethrows the first failure
  }
  for (std::size_t k = 0; k < xs.size(); ++k)
    for (const auto& w : warnings[k]) {
      char prefix[64];
      std::snprintf(prefix, sizeof prefix, "%s=%.6g: ", cfg.sweep.variable.c_str(), xs[k]);
      table.warnings.push_back(prefix + w);
    }
  return table;
}

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_sweep_csv(const SweepTable& t, std::ostream& out) {
  const auto& cols = sweep_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << "\n";
  for (const auto& r : t.rows) {
    out << format_number(r.swept_value);
    for (double v : r.values) out << "," << format_number(v);
    out << "," << (r.regime_ok ? "true" : "false") << "\n";
  }
}

inline SweepTable read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw config_error("empty table");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(detail::trim(cell));
  }
  const auto& cols = sweep_columns();
  if (header.size() != cols.size() || !std::equal(header.begin(), header.end(), cols.begin()))
    throw config_error("table header does not match the sweep schema");
  SweepTable t;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(detail::trim(cell));
    if (cells.size() != cols.size())
      throw config_error("table line " + std::to_string(line_no) + ": expected " + std::to_string(cols.size()) + " cells");
    SweepRow r;
    auto num = [&](const std::string& s) {
      if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (s.empty() || end != s.c_str() + s.size())
        throw config_error("table line " + std::to_string(line_no) + ": bad number '" + s + "'");
      return v;
    };
    r.swept_value = num(cells[0]);
    for (int c = 0; c < 6; ++c) r.values[c] = num(cells[c + 1]);
    r.regime_ok = cells[7] == "true" || cells[7] == "1";
    t.rows.push_back(r);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Power-law fits

struct ScalingFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  std::size_t first = 0;  // window [first, last] in row indices
  std::size_t last = 0;
  bool window_converged = true;  // false: no window met the local-slope criterion
};

/// Least-squares slope of log y against log x over rows [first, last].
inline ScalingFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, std::size_t first,
                             std::size_t last) {
  const std::size_t n = last - first + 1;
  if (n < 2) throw config_error("fit: need at least two points");
  double mx = 0, my = 0;
  for (std::size_t k = first; k <= last; ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = first; k <= last; ++k) {
    const double dx = std::log(x[k]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[k]) - my);
  }
  ScalingFit f;
  f.first = first;
  f.last = last;
  f.slope = sxy / sxx;
  if (n > 2) {
    double ss = 0;
    for (std::size_t k = first; k <= last; ++k) {
      const double r = std::log(y[k]) - my - f.slope * (std::log(x[k]) - mx);
      ss += r * r;
    }
    f.stderr_ = std::sqrt(ss / (n - 2) / sxx);
  }
  return f;
}

/// Fit over the largest trailing window (>= 5 points) whose consecutive
/// local slopes vary by less than `tolerance`; falls back to the last five
/// points when no such window exists.
inline ScalingFit fit_scaling(const std::vector<double>& x, const std::vector<double>& y,
                              double tolerance = 0.05, bool auto_window = true) {
  if (x.size() != y.size()) throw config_error("fit: column length mismatch");
  if (x.size() < 5) throw config_error("fit: need at least 5 rows");
  std::string bad;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (!(x[k] > 0) || !(y[k] > 0)) bad += (bad.empty() ? "" : ", ") + std::to_string(k + 1);
  if (!bad.empty()) throw config_error("fit: nonpositive or missing values in rows " + bad);

  const std::size_t n = x.size();
  if (!auto_window) return fit_loglog(x, y, 0, n - 1);
  std::vector<double> local(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k)
    local[k] = (std::log(y[k + 1]) - std::log(y[k])) / (std::log(x[k + 1]) - std::log(x[k]));
  double lo = local.back(), hi = local.back();
  std::size_t start = n - 1;  // window covers points start..n-1
  for (std::size_t k = n - 1; k-- > 0;) {
    lo = std::min(lo, local[k]);
    hi = std::max(hi, local[k]);
    if (hi - lo >= tolerance) break;
    start = k;
  }
  if (n - start >= 5) return fit_loglog(x, y, start, n - 1);
  auto f = fit_loglog(x, y, n - 5, n - 1);
  f.window_converged = false;
  return f;
}

}  // namespace clockfisher
