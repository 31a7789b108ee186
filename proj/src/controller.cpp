#include "vtol/controller.hpp"

#include <cmath>

#include "vtol/errors.hpp"

namespace vtol {

void ControllerGains::validate() const {
  for (double v : {k_c1, k_c2, mass}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw PreconditionError("controller gains and mass must be strictly positive");
    }
  }
  if (!inertia.allFinite() || (inertia - inertia.transpose()).norm() > 1e-12) {
    throw PreconditionError("inertia matrix must be symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw PreconditionError("inertia matrix must be positive definite");
  }
}

Vec3 torque_law(const Vec3& ups_c, const Rotation& r_d, const Vec3& omega_d,
                const Vec3& omega_d_dot, const Vec3& omega_m, const Vec3& b_hat,
                const ControllerGains& gains) {
  const Vec3 rate = omega_m - b_hat;
  const Vec3 w_c = gains.k_c1 * (r_d * ups_c) + gains.k_c2 * (omega_d - rate);
  return w_c + gains.inertia * omega_d_dot - hat(gains.inertia * rate) * omega_d;
}

ControlCommand control_step(const BodyMeasurements& meas, const FeatureSet& fs,
                            const EstimatorState& est, const GuidanceOutput& guid,
                            const ControllerGains& gains) {
  const Vec3 ups_c = controller_innovation(guid.r_d, meas, fs);
  return {torque_law(ups_c, guid.r_d, guid.omega_d, guid.omega_d_dot, meas.gyro, est.gyro_bias,
                     gains),
          guid.thrust};
}

}  // namespace vtol
