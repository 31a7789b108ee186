#pragma once

#include "vtol/controller.hpp"
#include "vtol/guidance.hpp"
#include "vtol/measurement.hpp"
#include "vtol/observer.hpp"

namespace vtol {

/// Estimator state with the attitude carried as a unit quaternion Q_hat,
/// R_hat = quat_to_rot(Q_hat).
struct QuatEstimatorState {
  UnitQuaternion q_hat;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 gyro_bias = Vec3::Zero();

  static QuatEstimatorState from_estimator(const EstimatorState& est);
  EstimatorState to_estimator() const;
  Rotation attitude() const { return quat_to_rot(q_hat); }
};

/// Innovations through the matrix route:
///   Upsilon_o = vex(Pa(sum s_i R_hat^T y_i (p_i - p_c)^T)),
///   sum s_i y~_i = sum s_i (P_hat + R_hat^T y_i - p_i).
Innovations quat_observer_innovations(const QuatEstimatorState& st,
                                      const BodyMeasurements& meas, const FeatureSet& fs);

/// (1/2)(Y - Z) with
///   Y = [0, -Omega_hat^T; Omega_hat, -[Omega_hat]x],  Z = [0, -w^T; w, [w]x].
Eigen::Matrix4d quat_rate_matrix(const Vec3& omega_hat, const Vec3& w_omega);

struct QuatObserverStep {
  QuatEstimatorState state;
  Innovations innovations;
  CorrectionFactors corrections;
};

/// One step: Q_hat <- exp(-w dt) * Q_hat * exp(Omega_hat dt) (the exact flow of
/// the quaternion rate over the step, Omega_hat = Omega_m - b_hat), then
/// renormalised; P_hat, V_hat by the closed-form flow of the same held inputs;
/// b_hat += dt gamma_o R_hat Upsilon_o with the updated R_hat.
QuatObserverStep quat_observer_step(const QuatEstimatorState& st, const BodyMeasurements& meas,
                                    const FeatureSet& fs, double thrust, double m, double g,
                                    const ObserverGains& gains, double dt);

/// Upsilon_c = vex(Pa(R_d^T sum s_i y_i (p_i - p_c)^T)) with R_d = quat_to_rot(Q_d).
Vec3 quat_controller_innovation(const UnitQuaternion& q_d, const BodyMeasurements& meas,
                                const FeatureSet& fs);

/// Torque and thrust with R_d rebuilt from guid.q_d.
ControlCommand quat_control_laws(const BodyMeasurements& meas, const FeatureSet& fs,
                                 const QuatEstimatorState& st, const GuidanceOutput& guid,
                                 const ControllerGains& gains);

}  // namespace vtol
