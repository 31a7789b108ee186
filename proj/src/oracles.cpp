#include "vtol/oracles.hpp"

namespace vtol::oracle {

Rotation random_rotation(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double w = n(rng);
  const double x = n(rng);
  const double y = n(rng);
  const double z = n(rng);
  return quat_to_rot(UnitQuaternion::normalized(w, Vec3(x, y, z)));
}

Vec3 random_vec3(Rng& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  const double x = u(rng);
  const double y = u(rng);
  const double z = u(rng);
  return {x, y, z};
}

Mat3 random_mat3(Rng& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = u(rng);
  return m;
}

Mat3 random_moment(Rng& rng, int rank) {
  Mat3 m = Mat3::Zero();
  for (int k = 0; k < rank; ++k) {
    const Vec3 a = random_vec3(rng, 1.0);
    m += a * a.transpose();
  }
  return m;
}

Vec3 upsilon_entrywise(const Mat3& m) {
  return {0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 0) - m(0, 1))};
}

EstimatorState euler_observer_step(const EstimatorState& est, const ObserverDerivatives& d,
                                   double dt) {
  const Mat3 r = est.nav.attitude().matrix() + dt * d.attitude_rate;
  EstimatorState out;
  out.nav = NavState(Rotation::project(r), est.nav.position() + dt * d.position_rate,
                     est.nav.velocity() + dt * d.velocity_rate);
  out.gyro_bias = est.gyro_bias + dt * d.bias_rate;
  return out;
}

}  // namespace vtol::oracle
