#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vtol/controller.hpp"
#include "vtol/guidance.hpp"
#include "vtol/scenario.hpp"

namespace vtol {

/// One logged step. Truth, estimate and desired values all refer to t.
struct StepLog {
  double t = 0.0;

  Rotation attitude;
  Vec3 omega = Vec3::Zero();
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();

  Rotation attitude_hat;
  Vec3 gyro_bias_hat = Vec3::Zero();
  Vec3 position_hat = Vec3::Zero();
  Vec3 velocity_hat = Vec3::Zero();

  Rotation attitude_d;
  Vec3 omega_d = Vec3::Zero();
  Vec3 position_d = Vec3::Zero();
  Vec3 velocity_d = Vec3::Zero();

  double err_attitude_o = 0.0;  ///< ||R_hat^T R||_I
  double err_bias = 0.0;        ///< ||b - b_hat||
  double err_position_o = 0.0;  ///< ||P_hat - R~_o P||
  double err_velocity_o = 0.0;  ///< ||V_hat - R~_o V||
  double err_attitude_c = 0.0;  ///< ||R_d^T R||_I
  double err_omega_c = 0.0;     ///< ||R_d^T (Omega_d - Omega)||
  double err_position_c = 0.0;  ///< ||P - P_d||
  double err_velocity_c = 0.0;  ///< ||V - V_d||
  double lyapunov_o = 0.0;      ///< (1/2) Tr{(I - R~_o) M} + |b~|^2 / (2 gamma_o)

  Vec3 torque = Vec3::Zero();
  double thrust = 0.0;

  /// Euclidean norm of (||R~_o||_I, b~, P~_o, V~_o)
  double observer_composite() const;
  /// Euclidean norm of (||R~_c||_I, Omega~_c, P~_c, V~_c)
  double controller_composite() const;
};

/// Least-squares slope of log(e) against t.
struct DecayFit {
  double slope = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;  ///< samples in the window with e <= 0 or non-finite
};

/// Fits over samples with t in [t_begin, t_end]. Throws PreconditionError when
/// fewer than two usable samples remain.
DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> e, double t_begin,
                        double t_end);

struct Summary {
  std::size_t steps = 0;
  double final_time = 0.0;
  StepLog final_errors;  ///< last logged row
  DecayFit observer_decay;    ///< composite observer error over [1, 10] s
  DecayFit controller_decay;  ///< composite tracking error over [1, 10] s
  double max_torque = 0.0;
  double max_thrust = 0.0;
  double min_thrust = 0.0;
  double wall_seconds = 0.0;
};

struct RunOptions {
  /// Receives the name of each loop stage as it runs.
  std::function<void(std::string_view)> trace;
  /// Replaces the configured desired trajectory when set.
  Trajectory trajectory;
};

struct ScenarioResult {
  std::vector<StepLog> log;
  Summary summary;
};

/// Runs the closed loop for cfg.step_count() steps. Per step: measure,
/// auxiliary variable, thrust and desired attitude, innovations, predict,
/// correct, estimator rates, F derivatives, desired rates, torque, bias
/// update, plant. Throws ConfigError for an invalid config and
/// NumericalBlowup (with the step index) on any non-finite state.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options = {});

/// Fixed CSV header (68 columns).
std::string csv_header();
void write_csv(const std::vector<StepLog>& log, std::ostream& out);
void write_csv(const std::vector<StepLog>& log, const std::filesystem::path& path);

/// Downsampled position tracks, error norms and commands for external plotting.
void write_plot_data(const std::vector<StepLog>& log, const std::filesystem::path& path,
                     std::size_t stride);

std::string summary_json(const Summary& s);

/// Directory for run outputs: $VTOL_OUTPUT_DIR when set, otherwise `fallback`.
std::filesystem::path output_directory(const std::filesystem::path& fallback);

/// Copy of `cfg` with one named scalar parameter replaced (gain names such as
/// k_o1, or dt, duration, seed, measurement_std, gyro_std).
ScenarioConfig with_parameter(const ScenarioConfig& cfg, const std::string& name, double value);

struct SweepEntry {
  double value = 0.0;
  std::filesystem::path csv_path;
  Summary summary;
  std::string error;  ///< empty on success
};

/// Runs one scenario per value concurrently, each writing its own CSV into
/// `directory`.
std::vector<SweepEntry> run_sweep(const ScenarioConfig& cfg, const std::string& name,
                                  const std::vector<double>& values,
                                  const std::filesystem::path& directory);

}  // namespace vtol
