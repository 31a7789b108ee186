#pragma once

#include "vtol/guidance.hpp"
#include "vtol/liegroup.hpp"
#include "vtol/measurement.hpp"
#include "vtol/observer.hpp"

namespace vtol {

struct ControllerGains {
  double k_c1 = 1.0;
  double k_c2 = 4.0;
  Mat3 inertia = Eigen::Vector3d(0.15, 0.23, 0.16).asDiagonal();
  double mass = 3.0;
  double g = 9.81;

  /// Throws PreconditionError on non-positive gains or mass, or a J that is not
  /// symmetric positive definite.
  void validate() const;
};

struct ControlCommand {
  Vec3 torque = Vec3::Zero();
  double thrust = 0.0;
};

/// w_c = k_c1 R_d ups_c + k_c2 (Omega_d - Omega_m + b_hat)
/// T   = w_c + J Omega_d' - [J (Omega_m - b_hat)]x Omega_d
Vec3 torque_law(const Vec3& ups_c, const Rotation& r_d, const Vec3& omega_d,
                const Vec3& omega_d_dot, const Vec3& omega_m, const Vec3& b_hat,
                const ControllerGains& gains);

/// Torque from the direct controller innovation; thrust passed through from
/// guidance. Only measurements, estimates and desired quantities are accepted.
ControlCommand control_step(const BodyMeasurements& meas, const FeatureSet& fs,
                            const EstimatorState& est, const GuidanceOutput& guid,
                            const ControllerGains& gains);

}  // namespace vtol
