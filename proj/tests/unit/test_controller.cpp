#include <gtest/gtest.h>

#include <type_traits>

#include "vtol/controller.hpp"
#include "vtol/errors.hpp"
#include "vtol/oracles.hpp"
#include "vtol/plant.hpp"
#include "vtol/scenario.hpp"
#include "vtol/simulation.hpp"

namespace vtol {
namespace {

// The control path cannot be handed plant ground truth.
static_assert(std::is_invocable_v<decltype(&control_step), const BodyMeasurements&,
                                  const FeatureSet&, const EstimatorState&, const GuidanceOutput&,
                                  const ControllerGains&>);
static_assert(!std::is_invocable_v<decltype(&control_step), const BodyMeasurements&,
                                   const FeatureSet&, const PlantState&, const GuidanceOutput&,
                                   const ControllerGains&>);

TEST(ControllerGains, Validation) {
  EXPECT_NO_THROW(ControllerGains{}.validate());
  ControllerGains g;
  g.k_c1 = 0.0;
  EXPECT_THROW(g.validate(), PreconditionError);
  g = {};
  g.inertia(0, 1) = 0.05;
  EXPECT_THROW(g.validate(), PreconditionError);
  g = {};
  g.inertia(2, 2) = -1.0;
  EXPECT_THROW(g.validate(), PreconditionError);
}

TEST(TorqueLaw, AllZeroInputs) {
  const Vec3 t = torque_law(Vec3::Zero(), Rotation::identity(), Vec3::Zero(), Vec3::Zero(),
                            Vec3::Zero(), Vec3::Zero(), ControllerGains{});
  EXPECT_TRUE(t.isZero(0.0));
}

TEST(TorqueLaw, PerfectTrackingLeavesGyroscopicFeedforward) {
  const ControllerGains gains;
  const Vec3 omega_d(0.4, -0.7, 1.1);
  const Vec3 b_hat(0.1, -0.1, 0.05);
  const Vec3 t = torque_law(Vec3::Zero(), exp_so3(Vec3(0.2, 0.3, 0.1)), omega_d, Vec3::Zero(),
                            omega_d + b_hat, b_hat, gains);
  EXPECT_LT((t + (gains.inertia * omega_d).cross(omega_d)).norm(), 1e-14);
}

TEST(TorqueLaw, MatchesIndependentEvaluation) {
  Rng rng(50);
  const ControllerGains gains;
  for (int i = 0; i < 500; ++i) {
    const Vec3 ups = oracle::random_vec3(rng, 5.0);
    const Rotation r_d = oracle::random_rotation(rng);
    const Vec3 w_d = oracle::random_vec3(rng, 2.0);
    const Vec3 w_d_dot = oracle::random_vec3(rng, 2.0);
    const Vec3 w_m = oracle::random_vec3(rng, 2.0);
    const Vec3 b = oracle::random_vec3(rng, 0.2);
    const Vec3 w_c = gains.k_c1 * (r_d.matrix() * ups) + gains.k_c2 * (w_d - w_m + b);
    const Vec3 expected = w_c + gains.inertia * w_d_dot - (gains.inertia * (w_m - b)).cross(w_d);
    EXPECT_LT((torque_law(ups, r_d, w_d, w_d_dot, w_m, b, gains) - expected).norm(), 1e-12);
  }
}

TEST(ControlStep, HoverEquilibrium) {
  const FeatureSet fs = FeatureSet::aggregate(reference_landmarks());
  const PlantParams pp;
  const Vec3 p(0, 0, 3.5);
  BodyMeasurements m = synthesize_measurements(Rotation::identity(), p, fs, {}, 0.0, std::uint64_t{0});
  m.gyro = pp.gyro_bias;
  const EstimatorState est{NavState(Rotation::identity(), p, Vec3::Zero()), pp.gyro_bias};
  const GuidanceOutput guid = guidance_output({}, pp.mass, pp.g);
  const ControlCommand cmd = control_step(m, fs, est, guid, ControllerGains{});
  EXPECT_NEAR(cmd.thrust, pp.mass * pp.g, 1e-12);
  EXPECT_LT(cmd.torque.norm(), 1e-12);
}

TEST(ControlStep, UsesDirectInnovation) {
  Rng rng(51);
  const FeatureSet fs = FeatureSet::aggregate(reference_landmarks());
  const ControllerGains gains;
  for (int i = 0; i < 50; ++i) {
    const Rotation r = oracle::random_rotation(rng);
    BodyMeasurements m =
        synthesize_measurements(r, oracle::random_vec3(rng, 3.0), fs, {}, 0.0, std::uint64_t{0});
    m.gyro = oracle::random_vec3(rng, 1.0);
    GuidanceOutput guid = guidance_output({Vec3(0.5, -0.3, 0.2), Vec3(0.1, 0, 0), Vec3::Zero()},
                                          gains.mass, gains.g);
    const EstimatorState est{NavState(), oracle::random_vec3(rng, 0.1)};
    const Vec3 ups = upsilon(guid.r_d.matrix().transpose() * r.matrix() * fs.moment());
    const Vec3 expected = torque_law(ups, guid.r_d, guid.omega_d, guid.omega_d_dot, m.gyro,
                                     est.gyro_bias, gains);
    const ControlCommand cmd = control_step(m, fs, est, guid, gains);
    EXPECT_LT((cmd.torque - expected).norm(), 1e-10);
    EXPECT_EQ(cmd.thrust, guid.thrust);
  }
}

// Recorded from the first verified run of the reference scenario.
constexpr double kInitialThrust = 29.383873714006995;
const Vec3 kInitialTorque(137.23764708456648, 183.75837134479127, 51.956515962084005);

TEST(ControlStep, InitialCommandRegression) {
  ScenarioConfig cfg;
  cfg.duration = cfg.dt;
  const ScenarioResult res = run_scenario(cfg);
  ASSERT_EQ(res.log.size(), 1u);
  const StepLog& row = res.log.front();
  EXPECT_TRUE(row.torque.allFinite());
  EXPECT_NEAR(row.thrust, kInitialThrust, 1e-9);
  EXPECT_LT((row.torque - kInitialTorque).norm(), 1e-9);
}

}  // namespace
}  // namespace vtol
