#pragma once

#include "vtol/controller.hpp"
#include "vtol/liegroup.hpp"
#include "vtol/rng.hpp"

namespace vtol {

/// Ground truth. R maps inertial to body; Omega is body-frame; P, V inertial.
struct PlantState {
  Rotation attitude;
  Vec3 omega = Vec3::Zero();
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();

  NavState nav() const { return {attitude, position, velocity}; }
};

struct PlantParams {
  Mat3 inertia = Eigen::Vector3d(0.15, 0.23, 0.16).asDiagonal();
  double mass = 3.0;
  double g = 9.81;
  Vec3 gyro_bias = Vec3(0.1, -0.1, 0.05);

  /// Throws PreconditionError on m <= 0 or a J that is not symmetric positive definite.
  void validate() const;
};

struct PlantDerivatives {
  Mat3 attitude_rate = Mat3::Zero();  ///< -[Omega]x R
  Vec3 omega_rate = Vec3::Zero();     ///< J^{-1}([J Omega]x Omega + T)
  Vec3 position_rate = Vec3::Zero();  ///< V
  Vec3 velocity_rate = Vec3::Zero();  ///< g e3 - (thrust/m) R^T e3
};

PlantDerivatives plant_derivatives(const PlantState& s, const ControlCommand& cmd,
                                   const PlantParams& p);

/// Fixed-step update. Omega advances by RK4 on the Euler equation; (R, P, V)
/// advance by X <- exp(-G dt) X exp(U dt) with G = u(0, 0, -g e3, 1) and
/// U = u([Omega_mid]x, 0, -(thrust/m) e3, 1), Omega_mid the mean of the
/// start and end rates.
PlantState plant_step(const PlantState& s, const ControlCommand& cmd, const PlantParams& p,
                      double dt);

/// Omega_m = Omega + b_Omega + N(0, noise_std^2 I).
Vec3 gyro_output(const PlantState& s, const PlantParams& p, double noise_std, Rng& rng);
Vec3 gyro_output(const PlantState& s, const PlantParams& p, double noise_std,
                 std::uint64_t rng_seed);

}  // namespace vtol
