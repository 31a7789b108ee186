#pragma once

#include <functional>

#include "vtol/liegroup.hpp"

namespace vtol {

/// Desired position and its derivatives through fourth order.
struct TrajectorySample {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  Vec3 jerk = Vec3::Zero();
  Vec3 snap = Vec3::Zero();
};

using Trajectory = std::function<TrajectorySample(double)>;

/// P_d(t) = [6 cos(0.19 t), 3 sin(0.4 t), 3.5 + 0.15 t] with analytic derivatives.
TrajectorySample reference_trajectory(double t);

/// Constant set-point: every derivative is zero.
Trajectory hover_trajectory(const Vec3& position);

/// Central-difference check of every derivative order at a few sample times.
/// Throws PreconditionError naming the first inconsistent order.
void validate_trajectory(const Trajectory& traj, double duration);

struct ThetaState {
  Vec3 theta = Vec3::Zero();
  Vec3 theta_dot = Vec3::Zero();
};

struct GuidanceGains {
  double k_theta1 = 1.2;
  double k_theta2 = 1.2;
  double k_c3 = 4.0;
  double k_c4 = 2.0;

  /// Throws PreconditionError unless every gain is strictly positive.
  void validate() const;
};

/// theta_ddot = -k_theta1 tanh(theta) - k_theta2 tanh(theta_dot)
///              + k_c3 (P_hat - P_d - theta) + k_c4 (V_hat - V_d - theta_dot)
Vec3 theta_acceleration(const ThetaState& st, const Vec3& p_hat, const Vec3& v_hat,
                        const TrajectorySample& traj, const GuidanceGains& gains);

struct ThetaStep {
  ThetaState state;
  Vec3 theta_ddot = Vec3::Zero();
};

/// Semi-implicit Euler: theta_dot += dt theta_ddot, then theta += dt theta_dot.
ThetaStep theta_step(const ThetaState& st, const Vec3& p_hat, const Vec3& v_hat,
                     const TrajectorySample& traj, const GuidanceGains& gains, double dt);

/// Time derivative of theta_acceleration given the estimator rates.
Vec3 theta_third(const ThetaState& st, const Vec3& theta_ddot, const Vec3& p_hat_dot,
                 const Vec3& v_hat_dot, const TrajectorySample& traj, const GuidanceGains& gains);

struct IntermediaryInput {
  Vec3 f = Vec3::Zero();
  Vec3 f_dot = Vec3::Zero();
  Vec3 f_ddot = Vec3::Zero();
};

/// F = P_d'' - k_theta1 tanh(theta) - k_theta2 tanh(theta_dot)
Vec3 intermediary_force(const TrajectorySample& traj, const ThetaState& st,
                        const GuidanceGains& gains);

/// F and its first two derivatives.
IntermediaryInput intermediary_F(const TrajectorySample& traj, const ThetaState& st,
                                 const Vec3& theta_ddot, const Vec3& theta_3,
                                 const GuidanceGains& gains);

struct AttitudeExtraction {
  double thrust = 0.0;
  UnitQuaternion q_d;
  Rotation r_d;
};

/// Smallest admitted alpha_2 = ||g e3 - F|| + g - f_3.
inline constexpr double kSingularityGuard = 1e-9;

/// Thrust magnitude and desired attitude satisfying F = g e3 - (thrust/m) R_d^T e3.
/// Throws SingularityError near F = [0, 0, c] with c >= g.
AttitudeExtraction extract_attitude(const Vec3& f, double m, double g);

Mat3 xi_matrix(const Vec3& f, double g);
Mat3 xi_matrix_rate(const Vec3& f, const Vec3& f_dot, double g);

/// Omega_d = Xi(F) F'
Vec3 omega_d(const Vec3& f, const Vec3& f_dot, double g);
/// Omega_d' = Xi'(F) F' + Xi(F) F''
Vec3 omega_d_dot(const Vec3& f, const Vec3& f_dot, const Vec3& f_ddot, double g);

struct GuidanceOutput {
  Vec3 f = Vec3::Zero();
  Vec3 f_dot = Vec3::Zero();
  Vec3 f_ddot = Vec3::Zero();
  double thrust = 0.0;
  UnitQuaternion q_d;
  Rotation r_d;
  Vec3 omega_d = Vec3::Zero();
  Vec3 omega_d_dot = Vec3::Zero();
};

/// Everything downstream of (F, F', F''): thrust, Q_d, R_d, Omega_d, Omega_d'.
GuidanceOutput guidance_output(const IntermediaryInput& f, double m, double g);

}  // namespace vtol
