// Batch simulation CLI: run a scenario, run the self-test suites, or sweep a
// scalar parameter.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "vtol/checks.hpp"
#include "vtol/errors.hpp"
#include "vtol/scenario.hpp"
#include "vtol/simulation.hpp"

namespace fs = std::filesystem;

namespace {

vtol::ScenarioConfig read_config(const std::string& path) {
  return path == "-" ? vtol::ScenarioConfig{} : vtol::load_config(path);
}

fs::path csv_destination(const vtol::ScenarioConfig& cfg) {
  const fs::path requested(cfg.output_path);
  const fs::path dir = vtol::output_directory(requested.parent_path());
  return dir / requested.filename();
}

fs::path sibling(const fs::path& csv, const std::string& suffix) {
  fs::path p = csv;
  p.replace_filename(csv.stem().string() + suffix);
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text << '\n';
}

int cmd_run(const std::string& config_path, std::size_t plot_stride) {
  const vtol::ScenarioConfig cfg = read_config(config_path);
  const vtol::ScenarioResult res = vtol::run_scenario(cfg);
  const fs::path csv = csv_destination(cfg);
  vtol::write_csv(res.log, csv);
  const fs::path summary = sibling(csv, ".summary.json");
  write_text(summary, vtol::summary_json(res.summary));
  std::cout << "wrote " << csv.string() << " (" << res.log.size() << " rows)\n";
  std::cout << "wrote " << summary.string() << '\n';
  if (plot_stride > 0) {
    const fs::path plot = sibling(csv, ".plot.csv");
    vtol::write_plot_data(res.log, plot, plot_stride);
    std::cout << "wrote " << plot.string() << '\n';
  }
  std::cout << vtol::summary_json(res.summary) << '\n';
  return 0;
}

int cmd_selftest() {
  bool ok = true;
  for (const auto& r : vtol::checks::selftest()) {
    std::cout << vtol::checks::format(r) << '\n';
    ok = ok && r.passed;
  }
  std::cout << (ok ? "selftest passed\n" : "selftest FAILED\n");
  return ok ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& param) {
  const auto eq = param.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw vtol::PreconditionError("--param expects name=v1,v2,...: " + param);
  }
  const std::string name = param.substr(0, eq);
  std::vector<double> values;
  std::stringstream list(param.substr(eq + 1));
  for (std::string item; std::getline(list, item, ',');) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw vtol::PreconditionError("bad sweep value: " + item);
    values.push_back(v);
  }
  if (values.empty()) throw vtol::PreconditionError("--param has no values");

  const vtol::ScenarioConfig cfg = read_config(config_path);
  const fs::path dir = vtol::output_directory(fs::path(cfg.output_path).parent_path());
  const auto entries = vtol::run_sweep(cfg, name, values, dir);
  int status = 0;
  std::cout << name << ",csv,final_err_P_c,final_err_R_o,observer_slope,controller_slope,error\n";
  for (const auto& e : entries) {
    const auto& f = e.summary.final_errors;
    std::cout << e.value << ',' << e.csv_path.string() << ',' << f.err_position_c << ','
              << f.err_attitude_o << ',' << e.summary.observer_decay.slope << ','
              << e.summary.controller_decay.slope << ',' << e.error << '\n';
    if (!e.error.empty()) status = 2;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VTOL observer/controller batch simulator"};
  app.require_subcommand(1);

  std::string run_config;
  std::size_t plot_stride = 0;
  auto* run = app.add_subcommand("run", "Run one scenario and write CSV + summary");
  run->add_option("config", run_config, "Config file (JSON; '-' for defaults)")->required();
  run->add_option("--plot-data", plot_stride,
                  "Also write downsampled plot series, keeping every N-th row")
      ->expected(0, 1)
      ->default_str("100");

  auto* self = app.add_subcommand("selftest", "Run the identity and oracle suites");

  std::string sweep_config;
  std::string sweep_param;
  auto* sweep = app.add_subcommand("sweep", "Run one scenario per parameter value");
  sweep->add_option("config", sweep_config, "Config file (JSON; '-' for defaults)")->required();
  sweep->add_option("--param", sweep_param, "name=v1,v2,... (e.g. k_o1=5,11,20)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (run->count("--plot-data") > 0 && plot_stride == 0) plot_stride = 100;
      return cmd_run(run_config, plot_stride);
    }
    if (*self) return cmd_selftest();
    if (*sweep) return cmd_sweep(sweep_config, sweep_param);
  } catch (const vtol::NumericalBlowup& e) {
    std::cerr << "numerical blow-up at step " << e.step() << ": " << e.what() << '\n';
    return 3;
  } catch (const vtol::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
