#include "vtol/plant.hpp"

#include <cmath>

#include "vtol/errors.hpp"

namespace vtol {

namespace {

Vec3 euler_rate(const Vec3& omega, const Vec3& torque, const Mat3& inertia,
                const Mat3& inertia_inv) {
  return inertia_inv * (hat(inertia * omega) * omega + torque);
}

}  // namespace

void PlantParams::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw PreconditionError("vehicle mass must be strictly positive");
  }
  if (!std::isfinite(g)) throw PreconditionError("gravity must be finite");
  if (!gyro_bias.allFinite()) throw PreconditionError("gyro bias must be finite");
  if (!inertia.allFinite() || (inertia - inertia.transpose()).norm() > 1e-12) {
    throw PreconditionError("inertia matrix must be symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw PreconditionError("inertia matrix must be positive definite");
  }
}

PlantDerivatives plant_derivatives(const PlantState& s, const ControlCommand& cmd,
                                   const PlantParams& p) {
  PlantDerivatives d;
  const Mat3& r = s.attitude.matrix();
  d.attitude_rate = -hat(s.omega) * r;
  d.omega_rate = euler_rate(s.omega, cmd.torque, p.inertia, p.inertia.inverse());
  d.position_rate = s.velocity;
  d.velocity_rate = p.g * e3() - (cmd.thrust / p.mass) * r.transpose() * e3();
  return d;
}

PlantState plant_step(const PlantState& s, const ControlCommand& cmd, const PlantParams& p,
                      double dt) {
  if (!(dt > 0.0)) throw PreconditionError("plant_step requires dt > 0");
  const Mat3 j_inv = p.inertia.inverse();
  const auto f = [&](const Vec3& w) { return euler_rate(w, cmd.torque, p.inertia, j_inv); };
  const Vec3 k1 = f(s.omega);
  const Vec3 k2 = f(s.omega + 0.5 * dt * k1);
  const Vec3 k3 = f(s.omega + 0.5 * dt * k2);
  const Vec3 k4 = f(s.omega + dt * k3);
  const Vec3 omega_next = s.omega + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  const TangentInput u{0.5 * (s.omega + omega_next), Vec3::Zero(),
                       -(cmd.thrust / p.mass) * e3(), 1.0};
  const TangentInput gravity{Vec3::Zero(), Vec3::Zero(), -p.g * e3(), 1.0};
  const Mat5 x = exp_se23(-gravity, dt) * s.nav().matrix() * exp_se23(u, dt);
  const NavState nav = NavState::from_matrix(x, 1e-6);

  PlantState out;
  out.attitude = nav.attitude();
  out.omega = omega_next;
  out.position = nav.position();
  out.velocity = nav.velocity();
  return out;
}

Vec3 gyro_output(const PlantState& s, const PlantParams& p, double noise_std, Rng& rng) {
  return s.omega + p.gyro_bias + gaussian_vec3(rng, noise_std);
}

Vec3 gyro_output(const PlantState& s, const PlantParams& p, double noise_std,
                 std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return gyro_output(s, p, noise_std, rng);
}

}  // namespace vtol
