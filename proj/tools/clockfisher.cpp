// clockfisher: run | sweep | fit
//
// Exit codes: 0 success, 2 configuration error, 3 numerical error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "clockfisher/config.hpp"
#include "clockfisher/report.hpp"
#include "clockfisher/sweep.hpp"

namespace cf = clockfisher;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw cf::config_error("cannot write '" + path + "'");
  return out;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fisher information of clock interferometers in weak gravity"};
  app.require_subcommand(1);

  std::string config_path, out_path, methods, table_path, column = "qfi_closed";
  bool ablate = false;

  auto* run = app.add_subcommand("run", "evaluate one parameter point, emit an EstimationReport (JSON)");
  run->add_option("--config", config_path, "scenario config file")->required();
  run->add_option("--out", out_path, "output directory (report.json); stdout when omitted");
  run->add_option("--methods", methods, "comma list of closed, parametric, oracle, reduced, fi");
  run->add_flag("--ablate-time-dilation", ablate, "switch off the V/c^2 clock coupling");

  std::string var;
  double from = 0, to = 0;
  int points = 0;
  bool log_sweep = false;
  auto* sweep = app.add_subcommand("sweep", "sweep one variable, emit a CSV table");
  sweep->add_option("--config", config_path, "scenario config file")->required();
  sweep->add_option("--var", var, "dt, sigma, phi, g, m or h");
  sweep->add_option("--from", from, "first value");
  sweep->add_option("--to", to, "last value");
  sweep->add_option("--points", points, "number of points (>= 2)");
  sweep->add_flag("--log", log_sweep, "logarithmic spacing");
  sweep->add_option("--out", out_path, "output CSV path; stdout when omitted");
  sweep->add_option("--methods", methods, "comma list of closed, parametric, oracle, reduced, fi");
  sweep->add_flag("--ablate-time-dilation", ablate, "switch off the V/c^2 clock coupling");

  bool whole = false;
  double tolerance = 0.05;
  auto* fit = app.add_subcommand("fit", "log-log slope of a table column against swept_value");
  fit->add_option("--table", table_path, "sweep CSV")->required();
  fit->add_option("--column", column, "column name");
  fit->add_flag("--all", whole, "fit every row instead of the detected asymptotic window");
  fit->add_option("--tolerance", tolerance, "local-slope spread allowed in the window");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*fit) {
      std::ifstream in(table_path);
      if (!in) throw cf::config_error("cannot open table '" + table_path + "'");
      const auto table = cf::read_sweep_csv(in);
      const auto f = cf::fit_scaling(table.column("swept_value"), table.column(column), tolerance, !whole);
      std::printf("column %s: slope %.6f +- %.2g (rows %zu..%zu%s)\n", column.c_str(), f.slope, f.stderr_,
                  f.first + 1, f.last + 1, f.window_converged ? "" : ", window not converged");
      return 0;
    }

    auto cfg = cf::load_config(config_path);
    if (!methods.empty()) cfg.methods = cf::parse_methods(methods);
    if (ablate) cfg.scenario.params.ablate_time_dilation = true;

    if (*run) {
      const auto report = cf::compute_report(cfg);
      print_warnings(report.warnings);
      const std::string text = cf::to_json(report).dump(2) + "\n";
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::filesystem::create_directories(out_path);
        open_out((std::filesystem::path(out_path) / "report.json").string()) << text;
      }
      return 0;
    }

    if (!var.empty()) cfg.sweep.variable = var;
    if (sweep->count("--from")) cfg.sweep.start = from;
    if (sweep->count("--to")) cfg.sweep.stop = to;
    if (sweep->count("--points")) cfg.sweep.points = points;
    if (log_sweep) cfg.sweep.log = true;
    const auto table = cf::run_sweep(cfg);
    print_warnings(table.warnings);
    if (out_path.empty()) {
      cf::write_sweep_csv(table, std::cout);
    } else {
      auto out = open_out(out_path);
      cf::write_sweep_csv(table, out);
    }
    return 0;
  } catch (const cf::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const cf::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  }
}
