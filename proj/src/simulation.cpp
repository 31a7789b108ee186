#include "vtol/simulation.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "vtol/errors.hpp"
#include "vtol/quaternion_backend.hpp"

namespace vtol {

namespace {

void emit(const RunOptions& o, std::string_view stage) {
  if (o.trace) o.trace(stage);
}

Trajectory make_trajectory(const ScenarioConfig& cfg, const RunOptions& o) {
  if (o.trajectory) return o.trajectory;
  if (cfg.trajectory == TrajectoryKind::kHover) return hover_trajectory(cfg.hover_position);
  return reference_trajectory;
}

void require_finite(std::size_t step, bool ok, const char* what) {
  if (!ok) throw NumericalBlowup(step, what);
}

// State updates re-validate their group structure; inside the loop a failed
// check can only come from a diverging state.
template <typename F>
auto advance(std::size_t step, const char* what, F&& update) {
  try {
    return update();
  } catch (const PreconditionError& e) {
    throw NumericalBlowup(step, std::string(what) + ": " + e.what());
  }
}

// Backend-neutral view of the estimator between steps.
struct Estimate {
  EstimatorState rot;
  QuatEstimatorState quat;

  EstimatorState current(Backend b) const { return b == Backend::kRotation ? rot : quat.to_estimator(); }
};

class CsvRow {
 public:
  explicit CsvRow(std::string& buf) : buf_(buf) {}

  void add(double v) {
    if (!first_) buf_.push_back(',');
    first_ = false;
    char tmp[32];
    const auto res = std::to_chars(tmp, tmp + sizeof(tmp), v, std::chars_format::general, 17);
    buf_.append(tmp, res.ptr);
  }
  void add(const Vec3& v) {
    for (int i = 0; i < 3; ++i) add(v(i));
  }
  void add(const Mat3& m) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) add(m(r, c));
  }

 private:
  std::string& buf_;
  bool first_ = true;
};

void add_header(std::vector<std::string>& cols, const std::string& name, int kind) {
  static const char* axes[] = {"x", "y", "z"};
  if (kind == 3) {
    for (const char* a : axes) cols.push_back(name + "_" + a);
  } else if (kind == 9) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) cols.push_back(name + "_" + std::to_string(r) + std::to_string(c));
  } else {
    cols.push_back(name);
  }
}

}  // namespace

double StepLog::observer_composite() const {
  return std::sqrt(err_attitude_o * err_attitude_o + err_bias * err_bias +
                   err_position_o * err_position_o + err_velocity_o * err_velocity_o);
}

double StepLog::controller_composite() const {
  return std::sqrt(err_attitude_c * err_attitude_c + err_omega_c * err_omega_c +
                   err_position_c * err_position_c + err_velocity_c * err_velocity_c);
}

DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> e, double t_begin,
                        double t_end) {
  if (t.size() != e.size()) throw PreconditionError("time and error series differ in length");
  DecayFit fit;
  double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_begin || t[i] > t_end) continue;
    if (!(e[i] > 0.0) || !std::isfinite(e[i])) {
      ++fit.skipped;
      continue;
    }
    const double y = std::log(e[i]);
    n += 1.0;
    sx += t[i];
    sy += y;
    sxx += t[i] * t[i];
    sxy += t[i] * y;
    ++fit.used;
  }
  const double den = n * sxx - sx * sx;
  if (fit.used < 2 || !(std::abs(den) > 0.0)) {
    throw PreconditionError("decay fit needs at least two positive samples at distinct times");
  }
  fit.slope = (n * sxy - sx * sy) / den;
  return fit;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const auto wall_start = std::chrono::steady_clock::now();

  const FeatureSet fs = FeatureSet::aggregate(cfg.landmarks);
  const Trajectory trajectory = make_trajectory(cfg, options);
  const ControllerGains cgains = cfg.controller_gains();
  const PlantParams& pp = cfg.plant;
  const double m = pp.mass;
  const double g = pp.g;
  const double dt = cfg.dt;
  const Backend backend = cfg.backend;

  Rng rng(cfg.seed);
  PlantState truth{Rotation::project(cfg.initial_attitude), cfg.initial_omega,
                   cfg.initial_position, cfg.initial_velocity};
  Estimate est;
  est.rot = {NavState(Rotation::project(cfg.estimate_attitude), cfg.estimate_position,
                      cfg.estimate_velocity),
             cfg.estimate_gyro_bias};
  est.quat = QuatEstimatorState::from_estimator(est.rot);
  ThetaState theta{cfg.theta, cfg.theta_dot};

  const std::size_t steps = cfg.step_count();
  ScenarioResult result;
  result.log.reserve(steps / cfg.log_stride + 1);
  Summary& sum = result.summary;
  sum.min_thrust = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const EstimatorState pre = est.current(backend);

    // Step 1: sample the sensors at t_k.
    emit(options, "measure");
    BodyMeasurements meas =
        synthesize_measurements(truth.attitude, truth.position, fs, cfg.measurement_bias,
                                cfg.measurement_noise_std, rng);
    meas.timestamp = t;
    meas.gyro = gyro_output(truth, pp, cfg.gyro_noise_std, rng);

    // Step 2: auxiliary variable.
    emit(options, "theta");
    const TrajectorySample ref = trajectory(t);
    const ThetaStep ts =
        theta_step(theta, pre.nav.position(), pre.nav.velocity(), ref, cfg.guidance, dt);

    // Step 3: thrust and desired attitude.
    emit(options, "thrust_attitude");
    const AttitudeExtraction att =
        extract_attitude(intermediary_force(ref, ts.state, cfg.guidance), m, g);

    // Step 4: innovations and correction factors from the incoming estimate.
    emit(options, "innovations");
    const Innovations inn =
        backend == Backend::kRotation
            ? observer_innovations(pre.nav.attitude(), pre.nav.position(), meas, fs)
            : quat_observer_innovations(est.quat, meas, fs);
    const CorrectionFactors w = correction_factors(inn, fs, cfg.observer, g);

    // Steps 5-6: prediction and correction.
    EstimatorState next_rot;
    QuatObserverStep next_quat;
    if (backend == Backend::kRotation) {
      emit(options, "predict");
      const Mat5 predicted = observer_predict(est.rot, meas.gyro, att.thrust, m, dt);
      emit(options, "correct");
      next_rot.nav =
          advance(k, "observer correction", [&] { return observer_correct(predicted, w, dt); });
    } else {
      emit(options, "predict");
      emit(options, "correct");
      next_quat = advance(k, "quaternion observer", [&] {
        return quat_observer_step(est.quat, meas, fs, att.thrust, m, g, cfg.observer, dt);
      });
    }

    // Step 7: F' and F'' through theta^(3), fed by the estimator rates.
    emit(options, "observer_rates");
    const ObserverDerivatives rates =
        observer_derivatives(pre, meas.gyro, att.thrust, m, w, inn, cfg.observer);
    emit(options, "intermediary_rates");
    const Vec3 th3 = theta_third(ts.state, ts.theta_ddot, rates.position_rate,
                                 rates.velocity_rate, ref, cfg.guidance);
    const IntermediaryInput f = intermediary_F(ref, ts.state, ts.theta_ddot, th3, cfg.guidance);

    // Step 8: desired angular velocity and its rate.
    emit(options, "desired_rates");
    GuidanceOutput guid;
    guid.f = f.f;
    guid.f_dot = f.f_dot;
    guid.f_ddot = f.f_ddot;
    guid.thrust = att.thrust;
    guid.q_d = att.q_d;
    guid.r_d = att.r_d;
    guid.omega_d = omega_d(f.f, f.f_dot, g);
    guid.omega_d_dot = omega_d_dot(f.f, f.f_dot, f.f_ddot, g);

    // Step 9: torque with the pre-update bias estimate.
    emit(options, "torque");
    const ControlCommand cmd = backend == Backend::kRotation
                                   ? control_step(meas, fs, pre, guid, cgains)
                                   : quat_control_laws(meas, fs, est.quat, guid, cgains);
    require_finite(k, cmd.torque.allFinite() && std::isfinite(cmd.thrust), "control command");

    // Step 10: gyro-bias update with the corrected attitude.
    emit(options, "bias_update");
    if (backend == Backend::kRotation) {
      next_rot.gyro_bias =
          bias_update(est.rot.gyro_bias, next_rot.nav.attitude(), inn.attitude, cfg.observer, dt);
      est.rot = next_rot;
    } else {
      est.quat = next_quat.state;
    }
    const EstimatorState post = est.current(backend);
    require_finite(k,
                   post.nav.matrix().allFinite() && post.gyro_bias.allFinite(),
                   "estimator state");

    if (k % cfg.log_stride == 0) {
      StepLog row;
      row.t = t;
      row.attitude = truth.attitude;
      row.omega = truth.omega;
      row.position = truth.position;
      row.velocity = truth.velocity;
      row.attitude_hat = pre.nav.attitude();
      row.gyro_bias_hat = pre.gyro_bias;
      row.position_hat = pre.nav.position();
      row.velocity_hat = pre.nav.velocity();
      row.attitude_d = guid.r_d;
      row.omega_d = guid.omega_d;
      row.position_d = ref.position;
      row.velocity_d = ref.velocity;
      const EstimationErrors eo = estimation_errors(pre, truth.nav(), pp.gyro_bias);
      row.err_attitude_o = eo.attitude;
      row.err_bias = eo.bias.norm();
      row.err_position_o = eo.position.norm();
      row.err_velocity_o = eo.velocity.norm();
      row.err_attitude_c = attitude_distance(guid.r_d.transpose() * truth.attitude);
      row.err_omega_c = (guid.r_d.matrix().transpose() * (guid.omega_d - truth.omega)).norm();
      row.err_position_c = (truth.position - ref.position).norm();
      row.err_velocity_c = (truth.velocity - ref.velocity).norm();
      row.lyapunov_o = observer_lyapunov(eo.attitude_error, eo.bias, fs, cfg.observer);
      row.torque = cmd.torque;
      row.thrust = cmd.thrust;
      result.log.push_back(row);
    }
    sum.max_torque = std::max(sum.max_torque, cmd.torque.norm());
    sum.max_thrust = std::max(sum.max_thrust, cmd.thrust);
    sum.min_thrust = std::min(sum.min_thrust, cmd.thrust);

    // Step 11: advance the vehicle.
    emit(options, "plant");
    theta = ts.state;
    truth = advance(k, "plant", [&] { return plant_step(truth, cmd, pp, dt); });
    require_finite(k,
                   truth.omega.allFinite() && truth.position.allFinite() &&
                       truth.velocity.allFinite(),
                   "plant state");
  }

  sum.steps = steps;
  sum.final_time = static_cast<double>(steps) * dt;
  if (!result.log.empty()) sum.final_errors = result.log.back();
  std::vector<double> ts, eo, ec;
  ts.reserve(result.log.size());
  eo.reserve(result.log.size());
  ec.reserve(result.log.size());
  for (const StepLog& r : result.log) {
    ts.push_back(r.t);
    eo.push_back(r.observer_composite());
    ec.push_back(r.controller_composite());
  }
  try {
    sum.observer_decay = fit_decay_rate(ts, eo, 1.0, 10.0);
    sum.controller_decay = fit_decay_rate(ts, ec, 1.0, 10.0);
  } catch (const PreconditionError&) {
    // Runs shorter than the fit window leave the fits at zero.
  }
  sum.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return result;
}

std::string csv_header() {
  std::vector<std::string> cols;
  add_header(cols, "t", 1);
  add_header(cols, "R", 9);
  add_header(cols, "Omega", 3);
  add_header(cols, "P", 3);
  add_header(cols, "V", 3);
  add_header(cols, "Rhat", 9);
  add_header(cols, "bhat", 3);
  add_header(cols, "Phat", 3);
  add_header(cols, "Vhat", 3);
  add_header(cols, "Rd", 9);
  add_header(cols, "Omegad", 3);
  add_header(cols, "Pd", 3);
  add_header(cols, "Vd", 3);
  for (const char* e : {"err_R_o", "err_b", "err_P_o", "err_V_o", "err_R_c", "err_Omega_c",
                        "err_P_c", "err_V_c", "lyapunov_o"}) {
    add_header(cols, e, 1);
  }
  add_header(cols, "torque", 3);
  add_header(cols, "thrust", 1);
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out.push_back(',');
    out += cols[i];
  }
  return out;
}

void write_csv(const std::vector<StepLog>& log, std::ostream& out) {
  out << csv_header() << '\n';
  std::string buf;
  for (const StepLog& r : log) {
    buf.clear();
    CsvRow row(buf);
    row.add(r.t);
    row.add(r.attitude.matrix());
    row.add(r.omega);
    row.add(r.position);
    row.add(r.velocity);
    row.add(r.attitude_hat.matrix());
    row.add(r.gyro_bias_hat);
    row.add(r.position_hat);
    row.add(r.velocity_hat);
    row.add(r.attitude_d.matrix());
    row.add(r.omega_d);
    row.add(r.position_d);
    row.add(r.velocity_d);
    for (double v : {r.err_attitude_o, r.err_bias, r.err_position_o, r.err_velocity_o,
                     r.err_attitude_c, r.err_omega_c, r.err_position_c, r.err_velocity_c,
                     r.lyapunov_o}) {
      row.add(v);
    }
    row.add(r.torque);
    row.add(r.thrust);
    buf.push_back('\n');
    out << buf;
  }
}

void write_csv(const std::vector<StepLog>& log, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open CSV for writing: " + path.string());
  write_csv(log, out);
  if (!out) throw std::runtime_error("failed writing CSV: " + path.string());
}

void write_plot_data(const std::vector<StepLog>& log, const std::filesystem::path& path,
                     std::size_t stride) {
  if (stride == 0) throw PreconditionError("plot stride must be >= 1");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open plot data for writing: " + path.string());
  out << "t,P_x,P_y,P_z,Pd_x,Pd_y,Pd_z,Phat_x,Phat_y,Phat_z,err_R_o,err_b,err_P_o,err_V_o,"
         "err_R_c,err_Omega_c,err_P_c,err_V_c,torque_x,torque_y,torque_z,thrust\n";
  std::string buf;
  for (std::size_t i = 0; i < log.size(); i += stride) {
    const StepLog& r = log[i];
    buf.clear();
    CsvRow row(buf);
    row.add(r.t);
    row.add(r.position);
    row.add(r.position_d);
    row.add(r.position_hat);
    for (double v : {r.err_attitude_o, r.err_bias, r.err_position_o, r.err_velocity_o,
                     r.err_attitude_c, r.err_omega_c, r.err_position_c, r.err_velocity_c}) {
      row.add(v);
    }
    row.add(r.torque);
    row.add(r.thrust);
    buf.push_back('\n');
    out << buf;
  }
}

std::string summary_json(const Summary& s) {
  const StepLog& f = s.final_errors;
  const nlohmann::json j = {
      {"steps", s.steps},
      {"final_time", s.final_time},
      {"final_errors",
       {{"attitude_o", f.err_attitude_o},
        {"bias", f.err_bias},
        {"position_o", f.err_position_o},
        {"velocity_o", f.err_velocity_o},
        {"attitude_c", f.err_attitude_c},
        {"omega_c", f.err_omega_c},
        {"position_c", f.err_position_c},
        {"velocity_c", f.err_velocity_c}}},
      {"observer_decay_rate",
       {{"slope", s.observer_decay.slope},
        {"used", s.observer_decay.used},
        {"skipped", s.observer_decay.skipped}}},
      {"controller_decay_rate",
       {{"slope", s.controller_decay.slope},
        {"used", s.controller_decay.used},
        {"skipped", s.controller_decay.skipped}}},
      {"max_torque", s.max_torque},
      {"max_thrust", s.max_thrust},
      {"min_thrust", s.min_thrust},
      {"wall_seconds", s.wall_seconds},
  };
  return j.dump(2) + "\n";
}

std::filesystem::path output_directory(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("VTOL_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return fallback;
}

ScenarioConfig with_parameter(const ScenarioConfig& cfg, const std::string& name, double value) {
  ScenarioConfig c = cfg;
  if (name == "gamma_o") c.observer.gamma_o = value;
  else if (name == "k_o1") c.observer.k_o1 = value;
  else if (name == "k_o2") c.observer.k_o2 = value;
  else if (name == "k_o3") c.observer.k_o3 = value;
  else if (name == "k_theta1") c.guidance.k_theta1 = value;
  else if (name == "k_theta2") c.guidance.k_theta2 = value;
  else if (name == "k_c1") c.k_c1 = value;
  else if (name == "k_c2") c.k_c2 = value;
  else if (name == "k_c3") c.guidance.k_c3 = value;
  else if (name == "k_c4") c.guidance.k_c4 = value;
  else if (name == "dt") c.dt = value;
  else if (name == "duration") c.duration = value;
  else if (name == "seed") c.seed = static_cast<std::uint64_t>(value);
  else if (name == "measurement_std") c.measurement_noise_std = value;
  else if (name == "gyro_std") c.gyro_noise_std = value;
  else throw ConfigError({name + " (not a sweepable parameter)"});
  return c;
}

std::vector<SweepEntry> run_sweep(const ScenarioConfig& cfg, const std::string& name,
                                  const std::vector<double>& values,
                                  const std::filesystem::path& directory) {
  std::vector<ScenarioConfig> configs;
  configs.reserve(values.size());
  for (double v : values) configs.push_back(with_parameter(cfg, name, v));
  std::filesystem::create_directories(directory);

  std::vector<std::future<SweepEntry>> jobs;
  jobs.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&, i] {
      SweepEntry entry;
      entry.value = values[i];
      std::ostringstream file;
      file << "sweep_" << name << "_" << i << ".csv";
      entry.csv_path = directory / file.str();
      try {
        const ScenarioResult r = run_scenario(configs[i]);
        write_csv(r.log, entry.csv_path);
        entry.summary = r.summary;
      } catch (const std::exception& ex) {
        entry.error = ex.what();
      }
      return entry;
    }));
  }
  std::vector<SweepEntry> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace vtol
