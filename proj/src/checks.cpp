#include "vtol/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "vtol/errors.hpp"
#include "vtol/oracles.hpp"
#include "vtol/simulation.hpp"

namespace vtol::checks {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

struct LieStats {
  double trace_residual = 0.0;
  double cross_residual = 0.0;
  double distance_residual = 0.0;
  std::size_t upper_violations = 0;
  double upper_margin = std::numeric_limits<double>::infinity();
  std::size_t lower_violations = 0;
  double lower_margin = std::numeric_limits<double>::infinity();
  std::size_t factored_violations = 0;
  double factored_margin = std::numeric_limits<double>::infinity();
  std::size_t samples = 0;
  double seconds = 0.0;
};

constexpr double kIdentityTol = 1e-12;

LieStats lie_stats(std::size_t samples, std::uint64_t seed) {
  const auto start = Clock::now();
  Rng rng(seed);
  LieStats s;
  s.samples = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    const Mat3 n = oracle::random_mat3(rng, 1.0);
    const Vec3 omega = oracle::random_vec3(rng, 1.0);
    const Vec3 y = oracle::random_vec3(rng, 1.0);
    const Vec3 z = oracle::random_vec3(rng, 1.0);
    const IdentityDiagnostics d = identity_checks(n, omega, y, z);
    s.trace_residual = std::max(s.trace_residual, d.trace_residual());
    s.cross_residual = std::max(s.cross_residual, d.cross_residual());

    const Rotation r = oracle::random_rotation(rng);
    const double dist = attitude_distance(r);
    s.distance_residual = std::max(
        s.distance_residual, std::abs(upsilon(r.matrix()).squaredNorm() - 4.0 * (1.0 - dist) * dist));

    const Mat3 m = oracle::random_moment(rng, 2 + static_cast<int>(i % 2));
    const Mat3 m_bar = m.trace() * Mat3::Identity() - m;
    const Vec3 ev = Eigen::SelfAdjointEigenSolver<Mat3>(m_bar).eigenvalues();
    const double lo = ev.minCoeff();
    const double hi = ev.maxCoeff();
    const double u = upsilon(r.matrix() * m).squaredNorm();
    const double upper = hi * hi * dist - u;
    const double lower = u - lo * lo * dist;
    const double factored = u - lo * lo * (1.0 - dist) * dist;
    s.upper_margin = std::min(s.upper_margin, upper);
    s.lower_margin = std::min(s.lower_margin, lower);
    s.factored_margin = std::min(s.factored_margin, factored);
    if (upper < -kIdentityTol) ++s.upper_violations;
    if (lower < -kIdentityTol) ++s.lower_violations;
    if (factored < -kIdentityTol) ++s.factored_violations;
  }
  s.seconds = seconds_since(start);
  return s;
}

std::string lie_detail(const LieStats& s) {
  return fmt(
      "trace identity %.1e, cross identity %.1e, distance identity %.1e; "
      "upper bound violated %zu/%zu (min margin %.3g); lower bound violated %zu/%zu "
      "(min margin %.3g); %.2f s",
      s.trace_residual, s.cross_residual, s.distance_residual, s.upper_violations, s.samples,
      s.upper_margin, s.lower_violations, s.samples, s.lower_margin, s.seconds);
}

bool core_identities_hold(const LieStats& s) {
  return s.trace_residual <= kIdentityTol && s.cross_residual <= kIdentityTol &&
         s.distance_residual <= kIdentityTol && s.upper_violations == 0;
}

// theta_i(t) = A_i exp(-lambda t) sin(w_i t + phi_i) and its first three derivatives.
struct ThetaSignal {
  Vec3 amp{1.5, -1.0, 0.8};
  double decay = 0.3;
  Vec3 freq{0.7, 1.1, 0.5};
  Vec3 phase{0.3, 1.0, -0.4};

  Vec3 derivative(double t, int order) const {
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      const std::complex<double> z(-decay, freq(i));
      const std::complex<double> e = std::exp(z * t + std::complex<double>(0.0, phase(i)));
      out(i) = amp(i) * std::imag(std::pow(z, order) * e);
    }
    return out;
  }
};

struct DesiredSample {
  Rotation r_d;
  Vec3 omega_d;
  Vec3 omega_d_dot;
};

DesiredSample desired_at(const ThetaSignal& sig, double t, const GuidanceGains& gains, double m,
                         double g) {
  const ThetaState st{sig.derivative(t, 0), sig.derivative(t, 1)};
  const IntermediaryInput f = intermediary_F(reference_trajectory(t), st, sig.derivative(t, 2),
                                             sig.derivative(t, 3), gains);
  const GuidanceOutput out = guidance_output(f, m, g);
  return {out.r_d, out.omega_d, out.omega_d_dot};
}

// Noise-free truth with constant body rate and thrust, in closed form.
struct AnalyticTruth {
  Rotation r0;
  Vec3 p0;
  Vec3 v0;
  Vec3 omega;
  double thrust;
  double m;
  double g;

  NavState at(double t) const {
    const Rotation r = exp_so3(-omega * t) * r0;
    if (t <= 0.0) return {r, p0, v0};
    const So3StepIntegrals in = so3_step_integrals(omega, t);
    const Vec3 p = p0 + v0 * t + 0.5 * g * t * t * e3() -
                   (thrust / m) * r0.matrix().transpose() * (in.second * e3());
    const Vec3 v = v0 + g * t * e3() - (thrust / m) * r0.matrix().transpose() * (in.first * e3());
    return {r, p, v};
  }
};

double estimator_gap(const EstimatorState& a, const EstimatorState& b) {
  return (a.nav.attitude().matrix() - b.nav.attitude().matrix()).norm() +
         (a.nav.position() - b.nav.position()).norm() +
         (a.nav.velocity() - b.nav.velocity()).norm() + (a.gyro_bias - b.gyro_bias).norm();
}

double step_gap(double dt) {
  const ScenarioConfig cfg;
  const FeatureSet fs = FeatureSet::aggregate(cfg.landmarks);
  const AnalyticTruth truth{Rotation::project(cfg.initial_attitude),
                            cfg.initial_position,
                            cfg.initial_velocity,
                            Vec3(0.3, -0.2, 0.4),
                            1.05 * cfg.plant.mass * cfg.plant.g,
                            cfg.plant.mass,
                            cfg.plant.g};
  const Vec3 bias = cfg.plant.gyro_bias;
  EstimatorState split;
  EstimatorState euler;
  const double horizon = 1.0;
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  for (std::size_t k = 0; k < steps; ++k) {
    const NavState x = truth.at(static_cast<double>(k) * dt);
    BodyMeasurements meas =
        synthesize_measurements(x.attitude(), x.position(), fs, {}, 0.0, std::uint64_t{0});
    meas.gyro = truth.omega + bias;

    split = observer_step_discrete(split, meas, fs, truth.thrust, truth.m, truth.g, cfg.observer,
                                   dt)
                .state;

    const Innovations inn =
        observer_innovations(euler.nav.attitude(), euler.nav.position(), meas, fs);
    const CorrectionFactors w = correction_factors(inn, fs, cfg.observer, truth.g);
    const ObserverDerivatives d =
        observer_derivatives(euler, meas.gyro, truth.thrust, truth.m, w, inn, cfg.observer);
    euler = oracle::euler_observer_step(euler, d, dt);
  }
  return estimator_gap(split, euler);
}

double sup_reference_acceleration(const ScenarioConfig& cfg) {
  double sup = 0.0;
  for (std::size_t k = 0; k <= cfg.step_count(); ++k) {
    sup = std::max(sup, reference_trajectory(static_cast<double>(k) * cfg.dt).acceleration.norm());
  }
  return sup;
}

}  // namespace

CheckResult lie_identities(std::size_t samples, std::uint64_t seed) {
  const LieStats s = lie_stats(samples, seed);
  CheckResult r{1, "Lie-group identity suite", false, lie_detail(s)};
  r.passed = core_identities_hold(s) && s.lower_violations == 0 && s.samples >= 10000 &&
             s.seconds < 5.0;
  return r;
}

CheckResult lie_bound_with_distance_factor(std::size_t samples, std::uint64_t seed) {
  const LieStats s = lie_stats(samples, seed);
  CheckResult r{0, "Upsilon(R M) lower bound with (1 - ||R||_I) factor", false, ""};
  r.passed = s.factored_violations == 0;
  r.detail = fmt("violated %zu/%zu (min margin %.3g)", s.factored_violations, s.samples,
                 s.factored_margin);
  return r;
}

CheckResult direct_measurement(std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> weight(0.5, 2.0);
  double obs_att = 0.0, obs_pos = 0.0, ctrl = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    std::vector<Feature> features;
    for (int k = 0; k < 5; ++k) features.push_back({oracle::random_vec3(rng, 5.0), weight(rng)});
    const FeatureSet fs = FeatureSet::aggregate(features);
    const Rotation r = oracle::random_rotation(rng);
    const Rotation r_hat = oracle::random_rotation(rng);
    const Rotation r_d = oracle::random_rotation(rng);
    const Vec3 p = oracle::random_vec3(rng, 5.0);
    const Vec3 p_hat = oracle::random_vec3(rng, 5.0);
    const BodyMeasurements meas = synthesize_measurements(r, p, fs, {}, 0.0, std::uint64_t{0});

    const Innovations inn = observer_innovations(r_hat, p_hat, meas, fs);
    const Mat3 r_tilde = r_hat.matrix().transpose() * r.matrix();
    const double s_t = fs.total_weight();
    const Vec3 ups_truth = upsilon(r_tilde * fs.moment());
    const Vec3 sum_truth = s_t * (p_hat - r_tilde * p) + s_t * (r_tilde - Mat3::Identity()) * fs.centroid();
    const Vec3 ctrl_truth = upsilon(r_d.matrix().transpose() * r.matrix() * fs.moment());
    const Vec3 ctrl_direct = controller_innovation(r_d, meas, fs);

    obs_att = std::max(obs_att, (inn.attitude - ups_truth).norm() / std::max(1.0, ups_truth.norm()));
    obs_pos = std::max(obs_pos, (inn.position_sum - sum_truth).norm() / std::max(1.0, sum_truth.norm()));
    ctrl = std::max(ctrl, (ctrl_direct - ctrl_truth).norm() / std::max(1.0, ctrl_truth.norm()));
  }
  CheckResult r{2, "Direct-measurement oracle", false, ""};
  r.passed = samples >= 1000 && obs_att <= 1e-12 && obs_pos <= 1e-12 && ctrl <= 1e-12;
  r.detail = fmt(
      "max scaled residual over %zu draws: observer attitude %.1e, observer position %.1e, "
      "controller %.1e",
      samples, obs_att, obs_pos, ctrl);
  return r;
}

CheckResult exponential_maps(std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double so3 = 0.0, se23 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    // One sample in ten probes the small-angle branch.
    const double radius = (i % 10 == 0) ? std::pow(10.0, -8.0 + 6.0 * unit(rng))
                                        : std::numbers::pi * unit(rng);
    Vec3 dir = oracle::random_vec3(rng, 1.0);
    while (dir.norm() < 1e-3) dir = oracle::random_vec3(rng, 1.0);
    const Vec3 omega = radius * dir.normalized();
    so3 = std::max(so3, (exp_so3(omega).matrix() - oracle::series_exp<3>(hat(omega))).norm());

    TangentInput u{oracle::random_vec3(rng, 1.0), oracle::random_vec3(rng, 1.0),
                   oracle::random_vec3(rng, 1.0), 2.0 * unit(rng) - 1.0};
    const double scale = radius / u.matrix().norm();
    u = {u.omega * scale, u.v_col * scale, u.a_col * scale, u.kappa * scale};
    se23 = std::max(se23, (exp_se23(u, 1.0) - oracle::series_exp<5>(u.matrix())).norm());
  }
  CheckResult r{3, "Exponential-map oracle", false, ""};
  r.passed = samples >= 1000 && so3 <= 1e-12 && se23 <= 1e-12;
  r.detail = fmt("max Frobenius gap over %zu samples: SO(3) %.1e, SE_2(3) %.1e", samples, so3, se23);
  return r;
}

CheckResult guidance_kinematics() {
  const ScenarioConfig cfg;
  const ThetaSignal sig;
  const double m = cfg.plant.mass;
  const double g = cfg.plant.g;
  const double times[] = {0.0, 0.5, 2.0, 5.0, 12.0, 20.0, 33.0, 49.0};
  const double steps[] = {1e-3, 5e-4, 2.5e-4};
  double kin[3] = {0, 0, 0};
  double acc[3] = {0, 0, 0};
  for (int j = 0; j < 3; ++j) {
    const double h = steps[j];
    for (double t : times) {
      const DesiredSample a = desired_at(sig, t, cfg.guidance, m, g);
      const DesiredSample b = desired_at(sig, t + h, cfg.guidance, m, g);
      const Mat3 rd_dot = (b.r_d.matrix() - a.r_d.matrix()) / h;
      kin[j] += (rd_dot + hat(a.omega_d) * a.r_d.matrix()).norm();
      acc[j] += (a.omega_d_dot - (b.omega_d - a.omega_d) / h).norm();
    }
  }
  const double k1 = kin[0] / kin[1], k2 = kin[1] / kin[2];
  const double a1 = acc[0] / acc[1], a2 = acc[1] / acc[2];
  CheckResult r{4, "Guidance kinematic consistency", false, ""};
  r.passed = std::min({k1, k2, a1, a2}) >= 1.8;
  r.detail = fmt(
      "attitude residual %.2e/%.2e/%.2e (ratios %.3f, %.3f); rate residual %.2e/%.2e/%.2e "
      "(ratios %.3f, %.3f)",
      kin[0], kin[1], kin[2], k1, k2, acc[0], acc[1], acc[2], a1, a2);
  return r;
}

CheckResult observer_convergence(const ScenarioConfig& base) {
  const ScenarioConfig cfg = base.noise_free();
  const ScenarioResult res = run_scenario(cfg);
  double att = 0.0, bias = 0.0, pos = 0.0, vel = 0.0;
  for (const StepLog& row : res.log) {
    if (row.t < 20.0) continue;
    att = std::max(att, row.err_attitude_o);
    bias = std::max(bias, row.err_bias);
    pos = std::max(pos, row.err_position_o);
    vel = std::max(vel, row.err_velocity_o);
  }
  const double slope = res.summary.observer_decay.slope;
  const double secs = res.summary.wall_seconds;
  CheckResult r{5, "Observer convergence (noise-free)", false, ""};
  r.passed = att < 1e-6 && bias < 1e-4 && pos < 1e-3 && vel < 1e-3 && slope < 0.0 && secs < 10.0;
  r.detail = fmt(
      "max for t >= 20 s: ||R~o||_I %.2e (< 1e-6), ||b~|| %.2e (< 1e-4), ||P~o|| %.2e (< 1e-3), "
      "||V~o|| %.2e (< 1e-3); composite slope on [1,10] s %.4f /s (< 0); %zu steps in %.2f s",
      att, bias, pos, vel, slope, res.summary.steps, secs);
  return r;
}

CheckResult closed_loop_tracking(const ScenarioConfig& base) {
  CheckResult r{6, "Closed-loop tracking", false, ""};
  ScenarioResult res;
  try {
    res = run_scenario(base);
  } catch (const NumericalBlowup& ex) {
    r.detail = ex.what();
    return r;
  }
  double pos = 0.0, att = 0.0;
  bool finite = true;
  for (const StepLog& row : res.log) {
    finite = finite && row.torque.allFinite() && std::isfinite(row.thrust);
    if (row.t <= 25.0) continue;
    pos = std::max(pos, row.err_position_c);
    att = std::max(att, row.err_attitude_c);
  }
  const GuidanceGains& gg = base.guidance;
  const double bound = base.plant.mass * (base.plant.g + std::sqrt(3.0) * (gg.k_theta1 + gg.k_theta2) +
                                          sup_reference_acceleration(base));
  const Summary& s = res.summary;
  r.passed = finite && pos < 0.15 && att < 0.01 && s.min_thrust > 0.0 && s.max_thrust <= bound &&
             std::isfinite(s.max_torque) && res.summary.steps == base.step_count();
  r.detail = fmt(
      "max for t > 25 s: ||P~c|| %.4f m (< 0.15), ||R~c||_I %.2e (< 0.01); thrust in [%.2f, %.2f] N "
      "(bound (0, %.2f]); max |torque| %.2f N m; %zu steps",
      pos, att, s.min_thrust, s.max_thrust, bound, s.max_torque, s.steps);
  return r;
}

CheckResult lyapunov_monotone(const ScenarioConfig& base) {
  const ScenarioConfig cfg = base.noise_free();
  const ScenarioResult res = run_scenario(cfg);
  double worst = -std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
  for (std::size_t i = 1; i < res.log.size(); ++i) {
    const double inc = res.log[i].lyapunov_o - res.log[i - 1].lyapunov_o;
    if (inc > worst) {
      worst = inc;
      worst_t = res.log[i].t;
    }
  }
  CheckResult r{7, "Monotone Lyapunov surrogate (noise-free)", false, ""};
  r.passed = cfg.log_stride == 1 && worst <= 1e-9;
  r.detail = fmt("largest per-step increase %.3e at t = %.3f s (tolerance 1e-9); C_o %.4g -> %.4g",
                 worst, worst_t, res.log.front().lyapunov_o, res.log.back().lyapunov_o);
  return r;
}

CheckResult backend_equivalence(const ScenarioConfig& base) {
  ScenarioConfig rot = base;
  rot.backend = Backend::kRotation;
  ScenarioConfig quat = base;
  quat.backend = Backend::kQuaternion;
  const ScenarioResult a = run_scenario(rot);
  const ScenarioResult b = run_scenario(quat);
  double att = 0.0, torque = 0.0, thrust = 0.0;
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    att = std::max(att, (a.log[i].attitude_hat.matrix() - b.log[i].attitude_hat.matrix()).norm());
    torque = std::max(torque, (a.log[i].torque - b.log[i].torque).norm());
    thrust = std::max(thrust, std::abs(a.log[i].thrust - b.log[i].thrust));
  }
  const double end =
      (a.log.back().attitude_hat.matrix() - b.log.back().attitude_hat.matrix()).norm();
  CheckResult r{8, "Backend equivalence", false, ""};
  r.passed = a.log.size() == b.log.size() && att < 1e-8 && end < 1e-6 && torque < 1e-8 &&
             thrust < 1e-8;
  r.detail = fmt(
      "max per-step attitude gap %.2e (< 1e-8), end-of-run %.2e (< 1e-6); command gaps: torque "
      "%.2e, thrust %.2e (< 1e-8)",
      att, end, torque, thrust);
  return r;
}

CheckResult determinism(const ScenarioConfig& base) {
  std::ostringstream first, second;
  write_csv(run_scenario(base).log, first);
  write_csv(run_scenario(base).log, second);
  const std::string a = first.str();
  const std::string b = second.str();
  CheckResult r{9, "Determinism", a == b && !a.empty(), ""};
  r.detail = fmt("%zu vs %zu bytes, %s", a.size(), b.size(), a == b ? "identical" : "different");
  return r;
}

CheckResult step_order() {
  const double gaps[] = {step_gap(1e-3), step_gap(5e-4), step_gap(2.5e-4)};
  const double r1 = gaps[0] / gaps[1];
  const double r2 = gaps[1] / gaps[2];
  CheckResult r{10, "Discrete-step order check", std::min(r1, r2) >= 1.8, ""};
  r.detail = fmt("gap at t = 1 s: %.3e / %.3e / %.3e for dt = 1e-3 / 5e-4 / 2.5e-4 (ratios %.3f, %.3f)",
                 gaps[0], gaps[1], gaps[2], r1, r2);
  return r;
}

std::vector<CheckResult> selftest() {
  std::vector<CheckResult> out;
  const LieStats s = lie_stats(10000, 11);
  out.push_back({1, "Lie-group identities and upper bound", core_identities_hold(s), lie_detail(s)});
  out.push_back(lie_bound_with_distance_factor());
  out.push_back(direct_measurement());
  out.push_back(exponential_maps());
  out.push_back(guidance_kinematics());
  out.push_back(step_order());
  return out;
}

std::string format(const CheckResult& r) {
  std::string s = r.passed ? "[PASS] " : "[FAIL] ";
  if (r.id > 0) s += std::to_string(r.id) + ". ";
  return s + r.name + ": " + r.detail;
}

}  // namespace vtol::checks
