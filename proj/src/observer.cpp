#include "vtol/observer.hpp"

#include <cmath>

#include "vtol/errors.hpp"

namespace vtol {

void ObserverGains::validate() const {
  const double all[] = {gamma_o, k_o1, k_o2, k_o3};
  for (double v : all) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw PreconditionError("observer gains must be strictly positive");
    }
  }
}

CorrectionFactors correction_factors(const Innovations& inn, const FeatureSet& fs,
                                     const ObserverGains& gains, double g) {
  CorrectionFactors w;
  const double s_t = fs.total_weight();
  w.w_omega = gains.k_o1 * inn.attitude;
  w.w_v = gains.k_o2 * inn.position_sum -
          (1.0 / s_t) * hat(w.w_omega) * (inn.position_sum + s_t * fs.centroid());
  w.w_a = -g * e3() + gains.k_o3 * inn.position_sum;
  return w;
}

TangentInput observer_input(const Vec3& omega_m, const Vec3& gyro_bias, double thrust, double m) {
  return {omega_m - gyro_bias, Vec3::Zero(), -(thrust / m) * e3(), 1.0};
}

ObserverDerivatives observer_derivatives(const EstimatorState& est, const Vec3& omega_m,
                                         double thrust, double m, const CorrectionFactors& w,
                                         const Innovations& inn, const ObserverGains& gains) {
  const Mat3 r = est.nav.attitude().matrix();
  const Vec3 p = est.nav.position();
  const Vec3 v = est.nav.velocity();
  const Mat3 w_hat = hat(w.w_omega);
  ObserverDerivatives d;
  d.attitude_rate = -hat(omega_m - est.gyro_bias) * r + r * w_hat;
  d.bias_rate = gains.gamma_o * r * inn.attitude;
  d.position_rate = v - w_hat * p - w.w_v;
  d.velocity_rate = -(thrust / m) * r.transpose() * e3() - w_hat * v - w.w_a;
  return d;
}

Mat5 observer_predict(const EstimatorState& est, const Vec3& omega_m, double thrust, double m,
                      double dt) {
  if (!(dt > 0.0)) throw PreconditionError("observer step requires dt > 0");
  return est.nav.matrix() * exp_se23(observer_input(omega_m, est.gyro_bias, thrust, m), dt);
}

NavState observer_correct(const Mat5& predicted, const CorrectionFactors& w, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("observer step requires dt > 0");
  const Mat5 corrected = exp_se23(-w.tangent(), dt) * predicted;
  // The two half-maps carry +dt and -dt in entry (5,4); any residue is rounding.
  return NavState::from_matrix(corrected, 1e-6);
}

Vec3 bias_update(const Vec3& gyro_bias, const Rotation& r_hat, const Vec3& ups_o,
                 const ObserverGains& gains, double dt) {
  return gyro_bias + dt * gains.gamma_o * (r_hat * ups_o);
}

ObserverStep observer_step_discrete(const EstimatorState& est, const BodyMeasurements& meas,
                                    const FeatureSet& fs, double thrust, double m, double g,
                                    const ObserverGains& gains, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("observer step requires dt > 0");
  ObserverStep out;
  out.innovations = observer_innovations(est.nav.attitude(), est.nav.position(), meas, fs);
  out.corrections = correction_factors(out.innovations, fs, gains, g);
  const Mat5 predicted = observer_predict(est, meas.gyro, thrust, m, dt);
  out.state.nav = observer_correct(predicted, out.corrections, dt);
  out.state.gyro_bias =
      bias_update(est.gyro_bias, out.state.nav.attitude(), out.innovations.attitude, gains, dt);
  return out;
}

EstimationErrors estimation_errors(const EstimatorState& est, const NavState& truth,
                                   const Vec3& b_true) {
  EstimationErrors e;
  const Rotation r_tilde = est.nav.attitude().transpose() * truth.attitude();
  e.attitude_error = r_tilde;
  e.attitude = attitude_distance(r_tilde);
  e.bias = b_true - est.gyro_bias;
  e.position = est.nav.position() - r_tilde * truth.position();
  e.velocity = est.nav.velocity() - r_tilde * truth.velocity();
  return e;
}

double observer_lyapunov(const Rotation& attitude_error, const Vec3& bias_error,
                         const FeatureSet& fs, const ObserverGains& gains) {
  const Mat3 gap = Mat3::Identity() - attitude_error.matrix();
  return 0.5 * (gap * fs.moment()).trace() + bias_error.squaredNorm() / (2.0 * gains.gamma_o);
}

}  // namespace vtol
