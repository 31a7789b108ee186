#include "vtol/guidance.hpp"

#include <array>
#include <cmath>
#include <string>

#include "vtol/errors.hpp"

namespace vtol {

namespace {

Vec3 tanh_vec(const Vec3& x) { return x.array().tanh().matrix(); }

// hbar(x) = 1 - tanh^2(x), componentwise.
Vec3 hbar_vec(const Vec3& x) { return (1.0 - x.array().tanh().square()).matrix(); }

struct Alphas {
  double a1;
  double a2;
};

Alphas alphas(const Vec3& f, double g) {
  const double a1 = (g * e3() - f).norm();
  const double a2 = a1 + g - f.z();
  if (!(a2 >= kSingularityGuard) || !std::isfinite(a2)) {
    throw SingularityError("degenerate thrust direction: F is (near) [0, 0, c] with c >= g");
  }
  return {a1, a2};
}

Mat3 xi_numerator(const Vec3& f, double a1, double a2) {
  const double f1 = f.x();
  const double f2 = f.y();
  Mat3 n;
  // clang-format off
  n << -f1 * f2,          -f2 * f2 + a1 * a2,  f2 * a2,
        f1 * f1 - a1 * a2,  f1 * f2,           -f1 * a2,
        f2 * a1,           -f1 * a1,            0.0;
  // clang-format on
  return n;
}

}  // namespace

TrajectorySample reference_trajectory(double t) {
  constexpr double w1 = 0.19;
  constexpr double w2 = 0.4;
  constexpr double a1 = 6.0;
  constexpr double a2 = 3.0;
  const double c1 = std::cos(w1 * t);
  const double s1 = std::sin(w1 * t);
  const double c2 = std::cos(w2 * t);
  const double s2 = std::sin(w2 * t);
  TrajectorySample s;
  s.position = {a1 * c1, a2 * s2, 3.5 + 0.15 * t};
  s.velocity = {-a1 * w1 * s1, a2 * w2 * c2, 0.15};
  s.acceleration = {-a1 * w1 * w1 * c1, -a2 * w2 * w2 * s2, 0.0};
  s.jerk = {a1 * std::pow(w1, 3) * s1, -a2 * std::pow(w2, 3) * c2, 0.0};
  s.snap = {a1 * std::pow(w1, 4) * c1, a2 * std::pow(w2, 4) * s2, 0.0};
  return s;
}

Trajectory hover_trajectory(const Vec3& position) {
  return [position](double) {
    TrajectorySample s;
    s.position = position;
    return s;
  };
}

void validate_trajectory(const Trajectory& traj, double duration) {
  if (!traj) throw PreconditionError("trajectory is empty");
  constexpr double h = 1e-4;
  constexpr double tol = 1e-5;
  const std::array<const char*, 4> names = {"velocity", "acceleration", "jerk", "snap"};
  for (double frac : {0.0, 0.1, 0.5, 1.0}) {
    const double t = h + frac * duration;
    const TrajectorySample lo = traj(t - h);
    const TrajectorySample mid = traj(t);
    const TrajectorySample hi = traj(t + h);
    const std::array<std::array<Vec3, 3>, 4> orders = {{
        {lo.position, hi.position, mid.velocity},
        {lo.velocity, hi.velocity, mid.acceleration},
        {lo.acceleration, hi.acceleration, mid.jerk},
        {lo.jerk, hi.jerk, mid.snap},
    }};
    for (std::size_t k = 0; k < orders.size(); ++k) {
      const Vec3 fd = (orders[k][1] - orders[k][0]) / (2.0 * h);
      const Vec3& analytic = orders[k][2];
      if (!analytic.allFinite() || (fd - analytic).norm() > tol * (1.0 + analytic.norm())) {
        throw PreconditionError(std::string("trajectory ") + names[k] +
                                " disagrees with the finite difference at t = " +
                                std::to_string(t));
      }
    }
  }
}

void GuidanceGains::validate() const {
  const double all[] = {k_theta1, k_theta2, k_c3, k_c4};
  for (double v : all) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw PreconditionError("guidance gains must be strictly positive");
    }
  }
}

Vec3 theta_acceleration(const ThetaState& st, const Vec3& p_hat, const Vec3& v_hat,
                        const TrajectorySample& traj, const GuidanceGains& gains) {
  return -gains.k_theta1 * tanh_vec(st.theta) - gains.k_theta2 * tanh_vec(st.theta_dot) +
         gains.k_c3 * (p_hat - traj.position - st.theta) +
         gains.k_c4 * (v_hat - traj.velocity - st.theta_dot);
}

ThetaStep theta_step(const ThetaState& st, const Vec3& p_hat, const Vec3& v_hat,
                     const TrajectorySample& traj, const GuidanceGains& gains, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("theta_step requires dt > 0");
  ThetaStep out;
  out.theta_ddot = theta_acceleration(st, p_hat, v_hat, traj, gains);
  out.state.theta_dot = st.theta_dot + dt * out.theta_ddot;
  out.state.theta = st.theta + dt * out.state.theta_dot;
  return out;
}

Vec3 theta_third(const ThetaState& st, const Vec3& theta_ddot, const Vec3& p_hat_dot,
                 const Vec3& v_hat_dot, const TrajectorySample& traj,
                 const GuidanceGains& gains) {
  const Vec3 h = hbar_vec(st.theta);
  const Vec3 h_dot = hbar_vec(st.theta_dot);
  return -gains.k_theta1 * h.cwiseProduct(st.theta_dot) -
         gains.k_theta2 * h_dot.cwiseProduct(theta_ddot) +
         gains.k_c3 * (p_hat_dot - traj.velocity - st.theta_dot) +
         gains.k_c4 * (v_hat_dot - traj.acceleration - theta_ddot);
}

Vec3 intermediary_force(const TrajectorySample& traj, const ThetaState& st,
                        const GuidanceGains& gains) {
  return traj.acceleration - gains.k_theta1 * tanh_vec(st.theta) -
         gains.k_theta2 * tanh_vec(st.theta_dot);
}

IntermediaryInput intermediary_F(const TrajectorySample& traj, const ThetaState& st,
                                 const Vec3& theta_ddot, const Vec3& theta_3,
                                 const GuidanceGains& gains) {
  const Vec3 th = st.theta;
  const Vec3 thd = st.theta_dot;
  const Vec3 h = hbar_vec(th);
  const Vec3 h_dot = hbar_vec(thd);
  const Vec3 z = h.cwiseProduct(theta_ddot - 2.0 * tanh_vec(th).cwiseProduct(thd.cwiseAbs2()));
  const Vec3 z_dot =
      h_dot.cwiseProduct(theta_3 - 2.0 * tanh_vec(thd).cwiseProduct(theta_ddot.cwiseAbs2()));
  IntermediaryInput out;
  out.f = intermediary_force(traj, st, gains);
  out.f_dot = traj.jerk - gains.k_theta1 * h.cwiseProduct(thd) -
              gains.k_theta2 * h_dot.cwiseProduct(theta_ddot);
  out.f_ddot = traj.snap - gains.k_theta1 * z - gains.k_theta2 * z_dot;
  return out;
}

AttitudeExtraction extract_attitude(const Vec3& f, double m, double g) {
  if (!f.allFinite()) throw PreconditionError("intermediary input F is not finite");
  const Alphas a = alphas(f, g);
  AttitudeExtraction out;
  out.thrust = m * a.a1;
  // q0 = sqrt(m (g - f3) / (2 thrust) + 1/2) = sqrt(alpha_2 / (2 alpha_1))
  const double q0 = std::sqrt(a.a2 / (2.0 * a.a1));
  const double scale = m / (2.0 * out.thrust * q0);
  out.q_d = UnitQuaternion::normalized(q0, Vec3(scale * f.y(), -scale * f.x(), 0.0));
  out.r_d = quat_to_rot(out.q_d);
  return out;
}

Mat3 xi_matrix(const Vec3& f, double g) {
  const Alphas a = alphas(f, g);
  return xi_numerator(f, a.a1, a.a2) / (a.a1 * a.a1 * a.a2);
}

Mat3 xi_matrix_rate(const Vec3& f, const Vec3& f_dot, double g) {
  const Alphas a = alphas(f, g);
  const double a1_dot = Vec3(f.x(), f.y(), f.z() - g).dot(f_dot) / a.a1;
  const double a2_dot = a1_dot - f_dot.z();
  const double f1 = f.x();
  const double f2 = f.y();
  const double d1 = f_dot.x();
  const double d2 = f_dot.y();
  const double prod_dot = a1_dot * a.a2 + a.a1 * a2_dot;
  Mat3 n_dot;
  // clang-format off
  n_dot << -(d1 * f2 + f1 * d2),        -2.0 * f2 * d2 + prod_dot,  d2 * a.a2 + f2 * a2_dot,
            2.0 * f1 * d1 - prod_dot,    d1 * f2 + f1 * d2,        -d1 * a.a2 - f1 * a2_dot,
            d2 * a.a1 + f2 * a1_dot,    -d1 * a.a1 - f1 * a1_dot,   0.0;
  // clang-format on
  const double den = a.a1 * a.a1 * a.a2;
  const double den_dot = 2.0 * a.a1 * a1_dot * a.a2 + a.a1 * a.a1 * a2_dot;
  return n_dot / den - xi_numerator(f, a.a1, a.a2) * (den_dot / (den * den));
}

Vec3 omega_d(const Vec3& f, const Vec3& f_dot, double g) { return xi_matrix(f, g) * f_dot; }

Vec3 omega_d_dot(const Vec3& f, const Vec3& f_dot, const Vec3& f_ddot, double g) {
  return xi_matrix_rate(f, f_dot, g) * f_dot + xi_matrix(f, g) * f_ddot;
}

GuidanceOutput guidance_output(const IntermediaryInput& f, double m, double g) {
  const AttitudeExtraction att = extract_attitude(f.f, m, g);
  GuidanceOutput out;
  out.f = f.f;
  out.f_dot = f.f_dot;
  out.f_ddot = f.f_ddot;
  out.thrust = att.thrust;
  out.q_d = att.q_d;
  out.r_d = att.r_d;
  out.omega_d = omega_d(f.f, f.f_dot, g);
  out.omega_d_dot = omega_d_dot(f.f, f.f_dot, f.f_ddot, g);
  return out;
}

}  // namespace vtol
