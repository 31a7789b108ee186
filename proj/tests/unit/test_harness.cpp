#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vtol/errors.hpp"
#include "vtol/scenario.hpp"
#include "vtol/simulation.hpp"

namespace vtol {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vtol_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ScenarioConfig short_config(double duration = 0.5) {
  ScenarioConfig cfg;
  cfg.duration = duration;
  return cfg;
}

TEST(Config, EmptyDocumentGivesReferenceDefaults) {
  for (const std::string text : {"", "{}"}) {
    const ScenarioConfig c = parse_config(text);
    EXPECT_EQ(c.duration, 50.0);
    EXPECT_EQ(c.dt, 1e-3);
    EXPECT_EQ(c.step_count(), 50000u);
    EXPECT_TRUE(c.initial_attitude.isApprox(reference_initial_attitude(), 0.0));
    EXPECT_EQ(c.initial_position, Vec3(-1, -1, 0));
    EXPECT_EQ(c.initial_velocity, Vec3(1, 1, 0));
    EXPECT_EQ(c.plant.mass, 3.0);
    EXPECT_TRUE(c.plant.inertia.isApprox(Vec3(0.15, 0.23, 0.16).asDiagonal().toDenseMatrix(), 0.0));
    EXPECT_EQ(c.observer.gamma_o, 0.7);
    EXPECT_EQ(c.observer.k_o1, 11.0);
    EXPECT_EQ(c.observer.k_o2, 10.0);
    EXPECT_EQ(c.observer.k_o3, 4.0);
    EXPECT_EQ(c.guidance.k_theta1, 1.2);
    EXPECT_EQ(c.guidance.k_theta2, 1.2);
    EXPECT_EQ(c.k_c1, 1.0);
    EXPECT_EQ(c.k_c2, 4.0);
    EXPECT_EQ(c.guidance.k_c3, 4.0);
    EXPECT_EQ(c.guidance.k_c4, 2.0);
    EXPECT_EQ(c.measurement_noise_std, 0.07);
    EXPECT_EQ(c.landmarks.size(), 5u);
  }
}

TEST(Config, ReferenceAttitudeIsNearlyOrthonormal) {
  const Mat3 r = reference_initial_attitude();
  EXPECT_LT((r * r.transpose() - Mat3::Identity()).norm(), kConfigAttitudeTolerance);
  EXPECT_GT(r.determinant(), 0.0);
}

TEST(Config, NegativeGainNamedInError) {
  try {
    parse_config(R"({"gains": {"k_o1": -1.0, "k_c2": 0}})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const auto& f = e.fields();
    const auto has = [&](const std::string& key) {
      return std::any_of(f.begin(), f.end(),
                         [&](const std::string& s) { return s.find(key) != std::string::npos; });
    };
    EXPECT_TRUE(has("gains.k_o1"));
    EXPECT_TRUE(has("gains.k_c2"));
  }
}

TEST(Config, MalformedAndUnknownFieldsRejected) {
  EXPECT_THROW(parse_config(R"({"dt": "fast"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"dtt": 0.001})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"dt": -1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"duration": 0.0001})"), ConfigError);
  EXPECT_THROW(parse_config("[1, 2"), ConfigError);
  EXPECT_THROW(parse_config(R"({"landmarks": [{"position": [0,0,0]}, {"position": [1,1,1]}]})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"initial_state": {"attitude": [[1,0,0],[0,1,0],[0,0,2]]}})"),
               ConfigError);
}

TEST(Config, RoundTripIsExact) {
  ScenarioConfig c;
  c.duration = 12.5;
  c.dt = 2.5e-4;
  c.seed = 77;
  c.backend = Backend::kQuaternion;
  c.trajectory = TrajectoryKind::kHover;
  c.hover_position = Vec3(0.1, 0.2, 0.30000000000000004);
  c.observer.k_o1 = 1.0 / 3.0;
  c.measurement_noise_std = 0.0123456789;
  c.landmarks[2].weight = 2.5;
  c.measurement_bias[1] = Vec3(1e-17, -0.3, 0.7);
  const std::string text = dump_config(c);
  const ScenarioConfig back = parse_config(text);
  EXPECT_EQ(dump_config(back), text);
  EXPECT_EQ(back.observer.k_o1, c.observer.k_o1);
  EXPECT_EQ(back.hover_position, c.hover_position);
  EXPECT_EQ(back.measurement_bias[1], c.measurement_bias[1]);
  EXPECT_EQ(back.backend, Backend::kQuaternion);

  const fs::path dir = scratch_dir("roundtrip");
  save_config(c, dir / "cfg.json");
  EXPECT_EQ(dump_config(load_config(dir / "cfg.json")), text);
  EXPECT_THROW(load_config(dir / "missing.json"), std::exception);
}

TEST(FitDecayRate, SyntheticExponential) {
  std::vector<double> t, e;
  for (int i = 0; i <= 1000; ++i) {
    t.push_back(i * 0.01);
    e.push_back(std::exp(-2.0 * t.back()));
  }
  const DecayFit fit = fit_decay_rate(t, e, 1.0, 10.0);
  EXPECT_NEAR(fit.slope, -2.0, 1e-6);
  EXPECT_EQ(fit.skipped, 0u);
}

TEST(FitDecayRate, ConstantAndNonPositive) {
  std::vector<double> t = {0, 1, 2, 3, 4};
  std::vector<double> c = {3, 3, 3, 3, 3};
  EXPECT_NEAR(fit_decay_rate(t, c, 0, 4).slope, 0.0, 1e-15);
  std::vector<double> z = {1, 0, -1, std::exp(-3.0), std::exp(-4.0)};
  const DecayFit fit = fit_decay_rate(t, z, 0, 4);
  EXPECT_EQ(fit.skipped, 2u);
  EXPECT_EQ(fit.used, 3u);
  EXPECT_NEAR(fit.slope, -1.0, 1e-12);
  std::vector<double> bad = {0, 0, 0, 0, 0};
  EXPECT_THROW(fit_decay_rate(t, bad, 0, 4), PreconditionError);
}

TEST(RunScenario, SingleStep) {
  ScenarioConfig cfg;
  cfg.duration = cfg.dt;
  const ScenarioResult res = run_scenario(cfg);
  ASSERT_EQ(res.log.size(), 1u);
  EXPECT_EQ(res.log[0].t, 0.0);
  EXPECT_EQ(res.summary.steps, 1u);
}

TEST(RunScenario, MonotoneTimeOneRowPerStep) {
  const ScenarioResult res = run_scenario(short_config(0.25));
  ASSERT_EQ(res.log.size(), 250u);
  for (std::size_t i = 1; i < res.log.size(); ++i) EXPECT_GT(res.log[i].t, res.log[i - 1].t);
}

TEST(RunScenario, StepOrderTrace) {
  std::vector<std::string> trace;
  RunOptions opt;
  opt.trace = [&](std::string_view s) { trace.emplace_back(s); };
  ScenarioConfig cfg = short_config();
  cfg.duration = 2 * cfg.dt;
  run_scenario(cfg, opt);
  const std::vector<std::string> one = {"measure",        "theta",
                                        "thrust_attitude", "innovations",
                                        "predict",        "correct",
                                        "observer_rates", "intermediary_rates",
                                        "desired_rates",  "torque",
                                        "bias_update",    "plant"};
  std::vector<std::string> expected = one;
  expected.insert(expected.end(), one.begin(), one.end());
  EXPECT_EQ(trace, expected);

  trace.clear();
  cfg.backend = Backend::kQuaternion;
  run_scenario(cfg, opt);
  EXPECT_EQ(trace, expected);
}

TEST(RunScenario, DeterministicCsv) {
  const ScenarioConfig cfg = short_config(1.0);
  std::ostringstream a, b;
  write_csv(run_scenario(cfg).log, a);
  write_csv(run_scenario(cfg).log, b);
  EXPECT_EQ(a.str(), b.str());
  ScenarioConfig other = cfg;
  other.seed = 2;
  std::ostringstream c;
  write_csv(run_scenario(other).log, c);
  EXPECT_NE(a.str(), c.str());
}

TEST(RunScenario, InvalidConfigRejected) {
  ScenarioConfig cfg = short_config();
  cfg.observer.k_o3 = -4.0;
  EXPECT_THROW(run_scenario(cfg), ConfigError);
}

TEST(RunScenario, BlowUpReportsStep) {
  ScenarioConfig cfg = short_config(2.0);
  cfg.k_c2 = 1e9;
  try {
    run_scenario(cfg);
    FAIL() << "expected NumericalBlowup";
  } catch (const NumericalBlowup& e) {
    EXPECT_LT(e.step(), cfg.step_count());
  }
}

TEST(RunScenario, LogStrideThinsRows) {
  ScenarioConfig cfg = short_config(0.1);
  cfg.log_stride = 10;
  EXPECT_EQ(run_scenario(cfg).log.size(), 10u);
}

TEST(RunScenario, HoverScenarioSettles) {
  ScenarioConfig cfg = short_config(20.0);
  cfg.trajectory = TrajectoryKind::kHover;
  cfg.initial_attitude = Mat3::Identity();
  cfg.initial_position = Vec3(0, 0, 3.5);
  cfg.initial_velocity = Vec3::Zero();
  cfg = cfg.noise_free();
  const ScenarioResult res = run_scenario(cfg);
  double peak = 0.0;
  for (const StepLog& r : res.log) peak = std::max(peak, r.err_position_c);
  EXPECT_LT(res.log.back().err_position_c, 0.25 * peak);
  EXPECT_LT(res.log.back().err_attitude_o, 1e-6);
}

TEST(RunScenario, NoiseFreeAttitudeErrorDecays) {
  const ScenarioConfig cfg = short_config(10.0).noise_free();
  const ScenarioResult res = run_scenario(cfg);
  std::vector<double> t, e;
  for (const StepLog& r : res.log) {
    t.push_back(r.t);
    e.push_back(r.err_attitude_o);
  }
  EXPECT_LT(fit_decay_rate(t, e, 1.0, 10.0).slope, 0.0);
}

TEST(Csv, HeaderLayout) {
  const std::string h = csv_header();
  EXPECT_EQ(std::count(h.begin(), h.end(), ',') + 1, 68);
  EXPECT_EQ(h.rfind("t,R_00,", 0), 0u);
  EXPECT_NE(h.find(",err_R_o,err_b,err_P_o,err_V_o,err_R_c,err_Omega_c,err_P_c,err_V_c,"),
            std::string::npos);
  EXPECT_EQ(h.substr(h.size() - 7), ",thrust");
}

TEST(Csv, FullPrecisionRows) {
  const ScenarioResult res = run_scenario(short_config(0.01));
  std::ostringstream out;
  write_csv(res.log, out);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(header, csv_header());
  std::getline(in, row);
  std::vector<double> values;
  std::stringstream cells(row);
  for (std::string cell; std::getline(cells, cell, ',');) values.push_back(std::stod(cell));
  ASSERT_EQ(values.size(), 68u);
  EXPECT_EQ(values[1], res.log[0].attitude.matrix()(0, 0));
  EXPECT_EQ(values[67], res.log[0].thrust);
}

TEST(Output, EnvironmentOverride) {
  ::unsetenv("VTOL_OUTPUT_DIR");
  EXPECT_EQ(output_directory("fallback"), fs::path("fallback"));
  ::setenv("VTOL_OUTPUT_DIR", "/tmp/elsewhere", 1);
  EXPECT_EQ(output_directory("fallback"), fs::path("/tmp/elsewhere"));
  ::unsetenv("VTOL_OUTPUT_DIR");
}

TEST(Output, PlotDataAndSummary) {
  const fs::path dir = scratch_dir("plot");
  const ScenarioResult res = run_scenario(short_config(0.1));
  write_plot_data(res.log, dir / "plot.csv", 10);
  std::ifstream in(dir / "plot.csv");
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 11u);
  EXPECT_NE(summary_json(res.summary).find("\"steps\""), std::string::npos);
}

TEST(Sweep, ParameterOverridesAndParallelRuns) {
  const ScenarioConfig base = short_config(0.2);
  EXPECT_EQ(with_parameter(base, "k_o1", 5.0).observer.k_o1, 5.0);
  EXPECT_EQ(with_parameter(base, "k_c4", 3.0).guidance.k_c4, 3.0);
  EXPECT_EQ(with_parameter(base, "seed", 9.0).seed, 9u);
  EXPECT_THROW(with_parameter(base, "mass", 2.0), ConfigError);

  const fs::path dir = scratch_dir("sweep");
  const auto entries = run_sweep(base, "k_o1", {5.0, 11.0, 20.0}, dir);
  ASSERT_EQ(entries.size(), 3u);
  for (const auto& e : entries) {
    EXPECT_TRUE(e.error.empty()) << e.error;
    EXPECT_TRUE(fs::exists(e.csv_path));
  }
  // Each sweep entry matches an isolated run of the same configuration.
  std::ostringstream isolated;
  write_csv(run_scenario(with_parameter(base, "k_o1", 11.0)).log, isolated);
  std::ifstream in(entries[1].csv_path, std::ios::binary);
  std::stringstream written;
  written << in.rdbuf();
  EXPECT_EQ(written.str(), isolated.str());
}

}  // namespace
}  // namespace vtol
