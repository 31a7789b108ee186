#include <gtest/gtest.h>

#include "vtol/errors.hpp"
#include "vtol/oracles.hpp"
#include "vtol/plant.hpp"

namespace vtol {
namespace {

TEST(PlantParams, Validation) {
  EXPECT_NO_THROW(PlantParams{}.validate());
  PlantParams p;
  p.mass = 0.0;
  EXPECT_THROW(p.validate(), PreconditionError);
}

TEST(PlantDerivatives, Hover) {
  const PlantParams p;
  const PlantState s{Rotation::identity(), Vec3::Zero(), Vec3(0, 0, 3), Vec3::Zero()};
  const PlantDerivatives d = plant_derivatives(s, {Vec3::Zero(), p.mass * p.g}, p);
  EXPECT_TRUE(d.attitude_rate.isZero(0.0));
  EXPECT_TRUE(d.omega_rate.isZero(0.0));
  EXPECT_LT(d.velocity_rate.norm(), 1e-15);
}

TEST(PlantDerivatives, FreeFallAlongPositiveZ) {
  const PlantParams p;
  const PlantState s{exp_so3(Vec3(0.3, 0.2, 0.1)), Vec3(1, 0, 0), Vec3::Zero(), Vec3(1, 2, 3)};
  const PlantDerivatives d = plant_derivatives(s, {}, p);
  EXPECT_EQ(d.velocity_rate, Vec3(0, 0, p.g));
  EXPECT_EQ(d.position_rate, s.velocity);
}

TEST(PlantDerivatives, TorqueFreeSpinConservesEnergyRate) {
  Rng rng(60);
  const PlantParams p;
  for (int i = 0; i < 100; ++i) {
    const PlantState s{oracle::random_rotation(rng), oracle::random_vec3(rng, 3.0), {}, {}};
    const PlantDerivatives d = plant_derivatives(s, {}, p);
    EXPECT_NEAR(s.omega.dot(p.inertia * d.omega_rate), 0.0, 1e-12);
  }
}

TEST(PlantStep, TorqueFreeSpinConservesEnergy) {
  const PlantParams p;
  PlantState s{Rotation::identity(), Vec3(1.0, 2.0, 0.5), {}, {}};
  const double e0 = 0.5 * s.omega.dot(p.inertia * s.omega);
  for (int k = 0; k < 10000; ++k) s = plant_step(s, {}, p, 1e-3);
  const double e1 = 0.5 * s.omega.dot(p.inertia * s.omega);
  EXPECT_NEAR(e1, e0, 1e-10 * e0);
  EXPECT_LT(s.attitude.orthonormality_error(), 1e-12);
}

TEST(PlantStep, HoverStaysFixed) {
  const PlantParams p;
  const PlantState start{Rotation::identity(), Vec3::Zero(), Vec3(1, 2, 3), Vec3::Zero()};
  PlantState s = start;
  for (int k = 0; k < 1000; ++k) s = plant_step(s, {Vec3::Zero(), p.mass * p.g}, p, 1e-3);
  EXPECT_LT((s.position - start.position).norm(), 1e-12);
  EXPECT_LT(s.velocity.norm(), 1e-12);
  EXPECT_LT((s.attitude.matrix() - Mat3::Identity()).norm(), 1e-12);
}

Vec3 spin_after_one_second(double dt) {
  const PlantParams p;
  PlantState s{Rotation::identity(), Vec3(1.0, 2.0, 0.5), {}, {}};
  const ControlCommand cmd{Vec3(0.1, -0.2, 0.05), 30.0};
  const auto steps = static_cast<int>(std::lround(1.0 / dt));
  for (int k = 0; k < steps; ++k) s = plant_step(s, cmd, p, dt);
  return s.omega;
}

TEST(PlantStep, RateIntegratorConvergesAtFourthOrder) {
  const Vec3 reference = spin_after_one_second(0.02 / 64);
  const double e1 = (spin_after_one_second(0.02) - reference).norm();
  const double e2 = (spin_after_one_second(0.01) - reference).norm();
  const double e3 = (spin_after_one_second(0.005) - reference).norm();
  EXPECT_GE(e1 / e2, 3.8);
  EXPECT_GE(e2 / e3, 3.8);
}

TEST(PlantStep, GroupStepAgreesWithEulerToSecondOrder) {
  const PlantParams p;
  const PlantState s{exp_so3(Vec3(0.3, -0.4, 0.2)), Vec3(0.5, -1.0, 0.8), Vec3(1, 2, 3),
                     Vec3(-1, 0.5, 0.2)};
  const ControlCommand cmd{Vec3(0.1, 0.2, -0.1), 25.0};
  const PlantDerivatives d = plant_derivatives(s, cmd, p);
  std::vector<double> gaps;
  for (double dt : {1e-3, 5e-4, 2.5e-4}) {
    const PlantState a = plant_step(s, cmd, p, dt);
    const Mat3 r = s.attitude.matrix() + dt * d.attitude_rate;
    const double gap = (a.attitude.matrix() - r).norm() +
                       (a.omega - (s.omega + dt * d.omega_rate)).norm() +
                       (a.position - (s.position + dt * d.position_rate)).norm() +
                       (a.velocity - (s.velocity + dt * d.velocity_rate)).norm();
    gaps.push_back(gap);
  }
  EXPECT_GE(gaps[0] / gaps[1], 3.5);
  EXPECT_GE(gaps[1] / gaps[2], 3.5);
}

TEST(GyroOutput, BiasAndNoise) {
  PlantParams p;
  const PlantState s{Rotation::identity(), Vec3(0.3, 0.2, 0.1), {}, {}};
  p.gyro_bias = Vec3::Zero();
  EXPECT_EQ(gyro_output(s, p, 0.0, std::uint64_t{1}), s.omega);
  p = {};
  const PlantState rest{};
  EXPECT_EQ(gyro_output(rest, p, 0.0, std::uint64_t{1}), Vec3(0.1, -0.1, 0.05));

  Rng rng(61);
  const int n = 100000;
  const double sigma = 0.05;
  Vec3 mean = Vec3::Zero();
  for (int i = 0; i < n; ++i) mean += gyro_output(s, p, sigma, rng);
  mean /= n;
  const Vec3 expected = s.omega + p.gyro_bias;
  for (int c = 0; c < 3; ++c) EXPECT_LT(std::abs(mean(c) - expected(c)), 3.0 * sigma / std::sqrt(n));
}

}  // namespace
}  // namespace vtol
