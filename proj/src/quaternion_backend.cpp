#include "vtol/quaternion_backend.hpp"

#include "vtol/errors.hpp"

namespace vtol {

namespace {

// vex(Pa(A^T sum s_i y_i (p_i - p_c)^T))
Vec3 matrix_route_innovation(const Mat3& a, const BodyMeasurements& meas, const FeatureSet& fs) {
  if (meas.landmarks.size() != fs.size()) {
    throw PreconditionError("measurement count does not match feature count");
  }
  Mat3 acc = Mat3::Zero();
  const auto features = fs.features();
  for (std::size_t i = 0; i < features.size(); ++i) {
    acc += features[i].weight * meas.landmarks[i] *
           (features[i].position - fs.centroid()).transpose();
  }
  return upsilon(a.transpose() * acc);
}

}  // namespace

QuatEstimatorState QuatEstimatorState::from_estimator(const EstimatorState& est) {
  return {rot_to_quat(est.nav.attitude()), est.nav.position(), est.nav.velocity(),
          est.gyro_bias};
}

EstimatorState QuatEstimatorState::to_estimator() const {
  return {NavState(attitude(), position, velocity), gyro_bias};
}

Innovations quat_observer_innovations(const QuatEstimatorState& st,
                                      const BodyMeasurements& meas, const FeatureSet& fs) {
  const Mat3 r = st.attitude().matrix();
  Innovations inn;
  inn.attitude = matrix_route_innovation(r, meas, fs);
  const auto features = fs.features();
  for (std::size_t i = 0; i < features.size(); ++i) {
    inn.position_sum +=
        features[i].weight * (st.position + r.transpose() * meas.landmarks[i] -
                              features[i].position);
  }
  return inn;
}

Eigen::Matrix4d quat_rate_matrix(const Vec3& omega_hat, const Vec3& w_omega) {
  Eigen::Matrix4d y = Eigen::Matrix4d::Zero();
  y.block<1, 3>(0, 1) = -omega_hat.transpose();
  y.block<3, 1>(1, 0) = omega_hat;
  y.block<3, 3>(1, 1) = -hat(omega_hat);
  Eigen::Matrix4d z = Eigen::Matrix4d::Zero();
  z.block<1, 3>(0, 1) = -w_omega.transpose();
  z.block<3, 1>(1, 0) = w_omega;
  z.block<3, 3>(1, 1) = hat(w_omega);
  return 0.5 * (y - z);
}

QuatObserverStep quat_observer_step(const QuatEstimatorState& st, const BodyMeasurements& meas,
                                    const FeatureSet& fs, double thrust, double m, double g,
                                    const ObserverGains& gains, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("quaternion observer step requires dt > 0");
  QuatObserverStep out;
  out.innovations = quat_observer_innovations(st, meas, fs);
  out.corrections = correction_factors(out.innovations, fs, gains, g);
  const CorrectionFactors& w = out.corrections;
  const Vec3 omega_hat = meas.gyro - st.gyro_bias;

  // Y acts as right multiplication by [0, Omega_hat], Z as left multiplication
  // by [0, w]; the two commute, so the held-rate flow factorises.
  const UnitQuaternion q = UnitQuaternion::from_rotation_vector(-w.w_omega * dt) * st.q_hat *
                           UnitQuaternion::from_rotation_vector(omega_hat * dt);
  out.state.q_hat = UnitQuaternion::normalized(q.scalar, q.vector);

  const Mat3 r_t = st.attitude().matrix().transpose();
  const Vec3 accel = -(thrust / m) * e3();
  const So3StepIntegrals body = so3_step_integrals(omega_hat, dt);
  const So3StepIntegrals corr = so3_step_integrals(-w.w_omega, dt);
  const Vec3 d_pos = -corr.first * w.w_v + corr.second * w.w_a;
  const Vec3 d_vel = -corr.first * w.w_a;
  out.state.position =
      corr.rotation * (r_t * (body.second * accel) + st.position + st.velocity * dt) + d_pos +
      d_vel * dt;
  out.state.velocity = corr.rotation * (r_t * (body.first * accel) + st.velocity) + d_vel;
  out.state.gyro_bias =
      st.gyro_bias + dt * gains.gamma_o * (out.state.attitude() * out.innovations.attitude);
  return out;
}

Vec3 quat_controller_innovation(const UnitQuaternion& q_d, const BodyMeasurements& meas,
                                const FeatureSet& fs) {
  return matrix_route_innovation(quat_to_rot(q_d).matrix(), meas, fs);
}

ControlCommand quat_control_laws(const BodyMeasurements& meas, const FeatureSet& fs,
                                 const QuatEstimatorState& st, const GuidanceOutput& guid,
                                 const ControllerGains& gains) {
  const Rotation r_d = quat_to_rot(guid.q_d);
  const Vec3 ups_c = quat_controller_innovation(guid.q_d, meas, fs);
  const Vec3 rate = meas.gyro - st.gyro_bias;
  const Vec3 w_c = gains.k_c1 * (r_d * ups_c) + gains.k_c2 * (guid.omega_d - rate);
  return {w_c + gains.inertia * guid.omega_d_dot - hat(gains.inertia * rate) * guid.omega_d,
          guid.thrust};
}

}  // namespace vtol
