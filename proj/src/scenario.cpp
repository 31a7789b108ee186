#include "vtol/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "vtol/errors.hpp"

namespace vtol {

using nlohmann::json;

namespace {

// Collects every problem found while reading a JSON document so they can be
// reported together.
class Reader {
 public:
  std::vector<std::string>& errors() { return errors_; }

  void unknown_keys(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
      bool known = false;
      for (const char* k : allowed) known = known || item.key() == k;
      if (!known) errors_.push_back(join(path, item.key()) + " (unknown field)");
    }
  }

  const json* object(const json& parent, const char* key, const std::string& path) {
    if (!parent.contains(key)) return nullptr;
    const json& j = parent.at(key);
    if (!j.is_object()) {
      errors_.push_back(join(path, key) + " (expected an object)");
      return nullptr;
    }
    return &j;
  }

  void number(const json& parent, const char* key, const std::string& path, double& out) {
    if (!parent.contains(key)) return;
    const json& j = parent.at(key);
    if (!j.is_number()) {
      errors_.push_back(join(path, key) + " (expected a number)");
      return;
    }
    out = j.get<double>();
  }

  template <typename Int>
  void integer(const json& parent, const char* key, const std::string& path, Int& out) {
    if (!parent.contains(key)) return;
    const json& j = parent.at(key);
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
      errors_.push_back(join(path, key) + " (expected a non-negative integer)");
      return;
    }
    out = j.get<Int>();
  }

  void string(const json& parent, const char* key, const std::string& path, std::string& out) {
    if (!parent.contains(key)) return;
    const json& j = parent.at(key);
    if (!j.is_string()) {
      errors_.push_back(join(path, key) + " (expected a string)");
      return;
    }
    out = j.get<std::string>();
  }

  bool vec3(const json& j, const std::string& path, Vec3& out) {
    if (!j.is_array() || j.size() != 3) {
      errors_.push_back(path + " (expected an array of 3 numbers)");
      return false;
    }
    for (std::size_t i = 0; i < 3; ++i) {
      if (!j[i].is_number()) {
        errors_.push_back(path + " (expected an array of 3 numbers)");
        return false;
      }
      out(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return true;
  }

  void vec3(const json& parent, const char* key, const std::string& path, Vec3& out) {
    if (parent.contains(key)) vec3(parent.at(key), join(path, key), out);
  }

  void mat3(const json& parent, const char* key, const std::string& path, Mat3& out) {
    if (!parent.contains(key)) return;
    const json& j = parent.at(key);
    const std::string p = join(path, key);
    if (!j.is_array() || j.size() != 3) {
      errors_.push_back(p + " (expected 3 rows of 3 numbers)");
      return;
    }
    Mat3 m;
    for (std::size_t r = 0; r < 3; ++r) {
      Vec3 row;
      if (!vec3(j[r], p + "[" + std::to_string(r) + "]", row)) return;
      m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    out = m;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::vector<std::string> errors_;
};

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(to_json(Vec3(m.row(r).transpose())));
  return rows;
}

void check_positive(std::vector<std::string>& errors, const std::string& name, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) errors.push_back(name + " (must be > 0)");
}

void check_attitude(std::vector<std::string>& errors, const std::string& name, const Mat3& m) {
  if (!m.allFinite() || (m * m.transpose() - Mat3::Identity()).norm() > kConfigAttitudeTolerance ||
      m.determinant() <= 0.0) {
    errors.push_back(name + " (not a rotation matrix)");
  }
}

}  // namespace

std::string to_string(Backend b) { return b == Backend::kRotation ? "rotation" : "quaternion"; }

std::string to_string(TrajectoryKind k) {
  return k == TrajectoryKind::kReference ? "reference" : "hover";
}

Mat3 reference_initial_attitude() {
  Mat3 r;
  // clang-format off
  r << 0.5763, -0.7638,  0.2907,
       0.8147,  0.5085, -0.2789,
       0.0652,  0.3976,  0.9153;
  // clang-format on
  return r;
}

std::vector<Feature> reference_landmarks() {
  return {{Vec3(5.0, 2.0, 1.0), 1.0},
          {Vec3(-5.0, 3.0, 4.0), 1.0},
          {Vec3(2.0, -4.0, 7.0), 1.0},
          {Vec3(-3.0, -3.0, 10.0), 1.0},
          {Vec3(0.0, 4.0, 12.0), 1.0}};
}

std::vector<Vec3> reference_measurement_bias() {
  return {Vec3(0.1, -0.1, 0.1), Vec3(-0.1, 0.1, -0.1), Vec3(0.1, 0.1, -0.1),
          Vec3(-0.1, -0.1, 0.1), Vec3(0.1, -0.1, -0.1)};
}

ScenarioConfig ScenarioConfig::noise_free() const {
  ScenarioConfig c = *this;
  c.measurement_noise_std = 0.0;
  c.gyro_noise_std = 0.0;
  c.measurement_bias.assign(c.landmarks.size(), Vec3::Zero());
  return c;
}

std::size_t ScenarioConfig::step_count() const {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

ControllerGains ScenarioConfig::controller_gains() const {
  return {k_c1, k_c2, plant.inertia, plant.mass, plant.g};
}

void ScenarioConfig::validate() const {
  std::vector<std::string> e;
  check_positive(e, "dt", dt);
  if (!(duration >= dt) || !std::isfinite(duration)) e.push_back("duration (must be >= dt)");
  if (log_stride == 0) e.push_back("log_stride (must be >= 1)");
  if (output_path.empty()) e.push_back("output_path (must not be empty)");
  if (!hover_position.allFinite()) e.push_back("trajectory.hover_position (must be finite)");

  check_positive(e, "plant.mass", plant.mass);
  if (!std::isfinite(plant.g)) e.push_back("plant.g (must be finite)");
  if (!plant.gyro_bias.allFinite()) e.push_back("plant.gyro_bias (must be finite)");
  {
    const Mat3& j = plant.inertia;
    bool ok = j.allFinite() && (j - j.transpose()).norm() <= 1e-12;
    if (ok) ok = Eigen::SelfAdjointEigenSolver<Mat3>(j).eigenvalues().minCoeff() > 0.0;
    if (!ok) e.push_back("plant.inertia (must be symmetric positive definite)");
  }

  check_attitude(e, "initial_state.attitude", initial_attitude);
  check_attitude(e, "initial_estimate.attitude", estimate_attitude);
  const std::pair<const char*, const Vec3*> vectors[] = {
      {"initial_state.omega", &initial_omega},
      {"initial_state.position", &initial_position},
      {"initial_state.velocity", &initial_velocity},
      {"initial_estimate.position", &estimate_position},
      {"initial_estimate.velocity", &estimate_velocity},
      {"initial_estimate.gyro_bias", &estimate_gyro_bias},
      {"initial_estimate.theta", &theta},
      {"initial_estimate.theta_dot", &theta_dot}};
  for (const auto& [name, v] : vectors) {
    if (!v->allFinite()) e.push_back(std::string(name) + " (must be finite)");
  }

  if (landmarks.size() < 3) e.push_back("landmarks (at least 3 required)");
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    const std::string p = "landmarks[" + std::to_string(i) + "]";
    check_positive(e, p + ".weight", landmarks[i].weight);
    if (!landmarks[i].position.allFinite()) e.push_back(p + ".position (must be finite)");
  }
  if (!measurement_bias.empty() && measurement_bias.size() != landmarks.size()) {
    e.push_back("landmarks[].bias (one per landmark)");
  }
  if (landmarks.size() >= 3 && e.empty()) {
    try {
      (void)FeatureSet::aggregate(landmarks);
    } catch (const std::exception&) {
      e.push_back("landmarks (collinear or degenerate)");
    }
  }
  if (!(measurement_noise_std >= 0.0)) e.push_back("noise.measurement_std (must be >= 0)");
  if (!(gyro_noise_std >= 0.0)) e.push_back("noise.gyro_std (must be >= 0)");

  check_positive(e, "gains.gamma_o", observer.gamma_o);
  check_positive(e, "gains.k_o1", observer.k_o1);
  check_positive(e, "gains.k_o2", observer.k_o2);
  check_positive(e, "gains.k_o3", observer.k_o3);
  check_positive(e, "gains.k_theta1", guidance.k_theta1);
  check_positive(e, "gains.k_theta2", guidance.k_theta2);
  check_positive(e, "gains.k_c1", k_c1);
  check_positive(e, "gains.k_c2", k_c2);
  check_positive(e, "gains.k_c3", guidance.k_c3);
  check_positive(e, "gains.k_c4", guidance.k_c4);

  if (!e.empty()) throw ConfigError(std::move(e));
}

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig c;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return c;

  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ConfigError({std::string("<document> (") + ex.what() + ")"});
  }
  if (!root.is_object()) throw ConfigError({"<document> (expected a JSON object)"});

  Reader rd;
  rd.unknown_keys(root, "",
                  {"duration", "dt", "seed", "backend", "trajectory", "output_path", "log_stride",
                   "plant", "initial_state", "initial_estimate", "landmarks", "noise", "gains"});
  rd.number(root, "duration", "", c.duration);
  rd.number(root, "dt", "", c.dt);
  rd.integer(root, "seed", "", c.seed);
  rd.integer(root, "log_stride", "", c.log_stride);
  rd.string(root, "output_path", "", c.output_path);
  if (root.contains("backend")) {
    std::string b;
    rd.string(root, "backend", "", b);
    if (b == "rotation") {
      c.backend = Backend::kRotation;
    } else if (b == "quaternion") {
      c.backend = Backend::kQuaternion;
    } else if (!b.empty()) {
      rd.errors().push_back("backend (expected \"rotation\" or \"quaternion\")");
    }
  }
  if (const json* t = rd.object(root, "trajectory", "")) {
    rd.unknown_keys(*t, "trajectory", {"kind", "hover_position"});
    std::string kind;
    rd.string(*t, "kind", "trajectory", kind);
    if (kind == "reference") {
      c.trajectory = TrajectoryKind::kReference;
    } else if (kind == "hover") {
      c.trajectory = TrajectoryKind::kHover;
    } else if (!kind.empty()) {
      rd.errors().push_back("trajectory.kind (expected \"reference\" or \"hover\")");
    }
    rd.vec3(*t, "hover_position", "trajectory", c.hover_position);
  }
  if (const json* p = rd.object(root, "plant", "")) {
    rd.unknown_keys(*p, "plant", {"mass", "inertia", "g", "gyro_bias"});
    rd.number(*p, "mass", "plant", c.plant.mass);
    rd.mat3(*p, "inertia", "plant", c.plant.inertia);
    rd.number(*p, "g", "plant", c.plant.g);
    rd.vec3(*p, "gyro_bias", "plant", c.plant.gyro_bias);
  }
  if (const json* s = rd.object(root, "initial_state", "")) {
    rd.unknown_keys(*s, "initial_state", {"attitude", "omega", "position", "velocity"});
    rd.mat3(*s, "attitude", "initial_state", c.initial_attitude);
    rd.vec3(*s, "omega", "initial_state", c.initial_omega);
    rd.vec3(*s, "position", "initial_state", c.initial_position);
    rd.vec3(*s, "velocity", "initial_state", c.initial_velocity);
  }
  if (const json* s = rd.object(root, "initial_estimate", "")) {
    rd.unknown_keys(*s, "initial_estimate",
                    {"attitude", "position", "velocity", "gyro_bias", "theta", "theta_dot"});
    rd.mat3(*s, "attitude", "initial_estimate", c.estimate_attitude);
    rd.vec3(*s, "position", "initial_estimate", c.estimate_position);
    rd.vec3(*s, "velocity", "initial_estimate", c.estimate_velocity);
    rd.vec3(*s, "gyro_bias", "initial_estimate", c.estimate_gyro_bias);
    rd.vec3(*s, "theta", "initial_estimate", c.theta);
    rd.vec3(*s, "theta_dot", "initial_estimate", c.theta_dot);
  }
  if (root.contains("landmarks")) {
    const json& l = root.at("landmarks");
    if (!l.is_array()) {
      rd.errors().push_back("landmarks (expected an array)");
    } else {
      c.landmarks.clear();
      c.measurement_bias.clear();
      bool any_bias = false;
      for (std::size_t i = 0; i < l.size(); ++i) {
        const std::string p = "landmarks[" + std::to_string(i) + "]";
        if (!l[i].is_object()) {
          rd.errors().push_back(p + " (expected an object)");
          continue;
        }
        rd.unknown_keys(l[i], p, {"position", "weight", "bias"});
        Feature f;
        Vec3 bias = Vec3::Zero();
        if (!l[i].contains("position")) rd.errors().push_back(p + ".position (missing)");
        rd.vec3(l[i], "position", p, f.position);
        rd.number(l[i], "weight", p, f.weight);
        if (l[i].contains("bias")) any_bias = true;
        rd.vec3(l[i], "bias", p, bias);
        c.landmarks.push_back(f);
        c.measurement_bias.push_back(bias);
      }
      if (!any_bias) c.measurement_bias.assign(c.landmarks.size(), Vec3::Zero());
    }
  }
  if (const json* n = rd.object(root, "noise", "")) {
    rd.unknown_keys(*n, "noise", {"measurement_std", "gyro_std"});
    rd.number(*n, "measurement_std", "noise", c.measurement_noise_std);
    rd.number(*n, "gyro_std", "noise", c.gyro_noise_std);
  }
  if (const json* g = rd.object(root, "gains", "")) {
    rd.unknown_keys(*g, "gains",
                    {"gamma_o", "k_o1", "k_o2", "k_o3", "k_theta1", "k_theta2", "k_c1", "k_c2",
                     "k_c3", "k_c4"});
    rd.number(*g, "gamma_o", "gains", c.observer.gamma_o);
    rd.number(*g, "k_o1", "gains", c.observer.k_o1);
    rd.number(*g, "k_o2", "gains", c.observer.k_o2);
    rd.number(*g, "k_o3", "gains", c.observer.k_o3);
    rd.number(*g, "k_theta1", "gains", c.guidance.k_theta1);
    rd.number(*g, "k_theta2", "gains", c.guidance.k_theta2);
    rd.number(*g, "k_c1", "gains", c.k_c1);
    rd.number(*g, "k_c2", "gains", c.k_c2);
    rd.number(*g, "k_c3", "gains", c.guidance.k_c3);
    rd.number(*g, "k_c4", "gains", c.guidance.k_c4);
  }
  if (!rd.errors().empty()) throw ConfigError(std::move(rd.errors()));

  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ScenarioConfig& c) {
  json landmarks = json::array();
  for (std::size_t i = 0; i < c.landmarks.size(); ++i) {
    json l = {{"position", to_json(c.landmarks[i].position)}, {"weight", c.landmarks[i].weight}};
    if (i < c.measurement_bias.size()) l["bias"] = to_json(c.measurement_bias[i]);
    landmarks.push_back(l);
  }
  const json root = {
      {"duration", c.duration},
      {"dt", c.dt},
      {"seed", c.seed},
      {"backend", to_string(c.backend)},
      {"trajectory", {{"kind", to_string(c.trajectory)}, {"hover_position", to_json(c.hover_position)}}},
      {"output_path", c.output_path},
      {"log_stride", c.log_stride},
      {"plant",
       {{"mass", c.plant.mass},
        {"inertia", to_json(c.plant.inertia)},
        {"g", c.plant.g},
        {"gyro_bias", to_json(c.plant.gyro_bias)}}},
      {"initial_state",
       {{"attitude", to_json(c.initial_attitude)},
        {"omega", to_json(c.initial_omega)},
        {"position", to_json(c.initial_position)},
        {"velocity", to_json(c.initial_velocity)}}},
      {"initial_estimate",
       {{"attitude", to_json(c.estimate_attitude)},
        {"position", to_json(c.estimate_position)},
        {"velocity", to_json(c.estimate_velocity)},
        {"gyro_bias", to_json(c.estimate_gyro_bias)},
        {"theta", to_json(c.theta)},
        {"theta_dot", to_json(c.theta_dot)}}},
      {"landmarks", landmarks},
      {"noise", {{"measurement_std", c.measurement_noise_std}, {"gyro_std", c.gyro_noise_std}}},
      {"gains",
       {{"gamma_o", c.observer.gamma_o},
        {"k_o1", c.observer.k_o1},
        {"k_o2", c.observer.k_o2},
        {"k_o3", c.observer.k_o3},
        {"k_theta1", c.guidance.k_theta1},
        {"k_theta2", c.guidance.k_theta2},
        {"k_c1", c.k_c1},
        {"k_c2", c.k_c2},
        {"k_c3", c.guidance.k_c3},
        {"k_c4", c.guidance.k_c4}}},
  };
  return root.dump(2) + "\n";
}

void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path.string());
  out << dump_config(cfg);
  if (!out) throw std::runtime_error("failed writing config file: " + path.string());
}

}  // namespace vtol
