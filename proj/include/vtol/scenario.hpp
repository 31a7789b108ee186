#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vtol/guidance.hpp"
#include "vtol/measurement.hpp"
#include "vtol/observer.hpp"
#include "vtol/plant.hpp"

namespace vtol {

enum class Backend { kRotation, kQuaternion };
enum class TrajectoryKind { kReference, kHover };

std::string to_string(Backend b);
std::string to_string(TrajectoryKind k);

/// Initial attitude of the reference scenario as printed (four decimals).
Mat3 reference_initial_attitude();
/// Five non-collinear landmarks spread through the flight volume, unit confidence.
std::vector<Feature> reference_landmarks();
/// Per-landmark constant biases of 0.1 m per axis with mixed signs.
std::vector<Vec3> reference_measurement_bias();

/// Complete description of one simulation run. Defaults reproduce the
/// reference scenario (5 landmarks, 0.07 measurement noise, 1 kHz, 50 s).
struct ScenarioConfig {
  double duration = 50.0;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  Backend backend = Backend::kRotation;
  TrajectoryKind trajectory = TrajectoryKind::kReference;
  Vec3 hover_position = Vec3(0.0, 0.0, 3.5);
  std::string output_path = "vtol_run.csv";
  /// Log every `log_stride`-th step (1 = every step).
  std::size_t log_stride = 1;

  PlantParams plant;

  /// Raw initial attitude; projected onto SO(3) when the scenario starts.
  Mat3 initial_attitude = reference_initial_attitude();
  Vec3 initial_omega = Vec3::Zero();
  Vec3 initial_position = Vec3(-1.0, -1.0, 0.0);
  Vec3 initial_velocity = Vec3(1.0, 1.0, 0.0);

  Mat3 estimate_attitude = Mat3::Identity();
  Vec3 estimate_position = Vec3::Zero();
  Vec3 estimate_velocity = Vec3::Zero();
  Vec3 estimate_gyro_bias = Vec3::Zero();
  Vec3 theta = Vec3::Zero();
  Vec3 theta_dot = Vec3::Zero();

  std::vector<Feature> landmarks = reference_landmarks();
  /// Constant bias b_i per landmark (same length as `landmarks`).
  std::vector<Vec3> measurement_bias = reference_measurement_bias();
  double measurement_noise_std = 0.07;
  double gyro_noise_std = 0.0;

  ObserverGains observer;
  GuidanceGains guidance;
  double k_c1 = 1.0;
  double k_c2 = 4.0;

  /// Same scenario without measurement noise, measurement bias or gyro noise.
  ScenarioConfig noise_free() const;

  /// Throws ConfigError listing every invalid field.
  void validate() const;

  std::size_t step_count() const;
  ControllerGains controller_gains() const;
};

/// Allowed ||R R^T - I||_F of a configured attitude before projection.
inline constexpr double kConfigAttitudeTolerance = 1e-3;

/// Parses JSON text. Missing fields keep their defaults; unknown or malformed
/// fields are reported together in a ConfigError. Blank text gives defaults.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

std::string dump_config(const ScenarioConfig& cfg);
void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path);

}  // namespace vtol
