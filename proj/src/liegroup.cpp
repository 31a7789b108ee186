#include "vtol/liegroup.hpp"

#include <array>
#include <cmath>
#include <string>

#include "vtol/errors.hpp"

namespace vtol {

namespace {

// Below this angle the trigonometric quotients are summed as power series;
// the closed forms lose digits to cancellation (the fourth-order quotient
// (t^2/2 + cos t - 1) / t^4 worst of all).
constexpr double kSeriesAngle = 0.5;
constexpr int kSeriesTerms = 12;

// sum_k (-1)^k t^(2k) / (2k + offset)!
double alternating_series(double t, int offset) {
  double factorial = 1.0;
  for (int i = 2; i <= offset; ++i) factorial *= i;
  const double t2 = t * t;
  double power = 1.0;
  double sum = 0.0;
  for (int k = 0; k < kSeriesTerms; ++k) {
    sum += ((k % 2 == 0) ? 1.0 : -1.0) * power / factorial;
    power *= t2;
    factorial *= static_cast<double>((2 * k + offset + 1) * (2 * k + offset + 2));
  }
  return sum;
}

struct TrigQuotients {
  double s1;  // sin t / t
  double c1;  // (1 - cos t) / t^2
  double c2;  // (t - sin t) / t^3
  double c3;  // (t^2/2 + cos t - 1) / t^4
};

TrigQuotients trig_quotients(double t) {
  if (t < kSeriesAngle) {
    return {alternating_series(t, 1), alternating_series(t, 2), alternating_series(t, 3),
            alternating_series(t, 4)};
  }
  const double s = std::sin(t);
  const double c = std::cos(t);
  const double half = std::sin(0.5 * t);
  const double t2 = t * t;
  return {s / t, 2.0 * half * half / t2, (t - s) / (t2 * t), (0.5 * t2 + c - 1.0) / (t2 * t2)};
}

bool is_finite(const Mat3& m) { return m.allFinite(); }

}  // namespace

Rotation Rotation::from_matrix(const Mat3& m, double tol) {
  if (!is_finite(m)) throw PreconditionError("rotation matrix has non-finite entries");
  const double drift = (m * m.transpose() - Mat3::Identity()).norm();
  if (drift > tol) {
    throw PreconditionError("matrix is not orthonormal (||RR^T - I||_F = " +
                            std::to_string(drift) + ")");
  }
  if (std::abs(m.determinant() - 1.0) > tol) {
    throw PreconditionError("matrix determinant is not +1");
  }
  return Rotation(m);
}

Rotation Rotation::project(const Mat3& m) {
  if (!is_finite(m)) throw PreconditionError("cannot project a non-finite matrix onto SO(3)");
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return Rotation(u * d * v.transpose());
}

double Rotation::orthonormality_error() const {
  return (m_ * m_.transpose() - Mat3::Identity()).norm();
}

Rotation Rotation::renormalized() const {
  return orthonormality_error() > 1e-12 ? project(m_) : *this;
}

UnitQuaternion UnitQuaternion::normalized(double w, const Vec3& v) {
  const double n = std::sqrt(w * w + v.squaredNorm());
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw PreconditionError("cannot normalise a zero or non-finite quaternion");
  }
  return {w / n, v / n};
}

UnitQuaternion UnitQuaternion::from_rotation_vector(const Vec3& phi) {
  const double half = 0.5 * phi.norm();
  // sin(half) / (2 half) = s1(half) / 2
  const double scale = 0.5 * trig_quotients(half).s1;
  return {std::cos(half), scale * phi};
}

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  return {a.scalar * b.scalar - a.vector.dot(b.vector),
          a.scalar * b.vector + b.scalar * a.vector + a.vector.cross(b.vector)};
}

NavState::NavState(const Rotation& attitude, const Vec3& position, const Vec3& velocity)
    : x_(Mat5::Identity()) {
  x_.block<3, 3>(0, 0) = attitude.matrix().transpose();
  x_.block<3, 1>(0, 3) = position;
  x_.block<3, 1>(0, 4) = velocity;
}

NavState NavState::from_matrix(const Mat5& x, double tol) {
  if (!x.allFinite()) throw PreconditionError("navigation matrix has non-finite entries");
  Eigen::Matrix<double, 2, 5> bottom = Eigen::Matrix<double, 2, 5>::Zero();
  bottom(0, 3) = 1.0;
  bottom(1, 4) = 1.0;
  if ((x.bottomRows<2>() - bottom).norm() > tol) {
    throw PreconditionError("navigation matrix bottom rows are not [0 0 0 1 0; 0 0 0 0 1]");
  }
  const Mat3 rt = x.block<3, 3>(0, 0);
  const Rotation checked = Rotation::from_matrix(rt.transpose(), tol);
  return NavState(checked.renormalized(), x.block<3, 1>(0, 3), x.block<3, 1>(0, 4));
}

Rotation NavState::attitude() const {
  return Rotation::from_matrix(x_.block<3, 3>(0, 0).transpose());
}

Mat5 TangentInput::matrix() const {
  Mat5 u = Mat5::Zero();
  u.block<3, 3>(0, 0) = hat(omega);
  u.block<3, 1>(0, 3) = v_col;
  u.block<3, 1>(0, 4) = a_col;
  u(4, 3) = kappa;
  return u;
}

Mat3 hat(const Vec3& omega) {
  Mat3 s;
  // clang-format off
  s <<        0.0, -omega.z(),  omega.y(),
        omega.z(),        0.0, -omega.x(),
       -omega.y(),  omega.x(),        0.0;
  // clang-format on
  return s;
}

Vec3 vex(const Mat3& s) {
  const double asym = (s + s.transpose()).norm();
  if (!(asym <= 1e-9)) {
    throw PreconditionError("vex requires an antisymmetric matrix (||S + S^T||_F = " +
                            std::to_string(asym) + ")");
  }
  return {s(2, 1), s(0, 2), s(1, 0)};
}

Mat3 pa(const Mat3& m) { return 0.5 * (m - m.transpose()); }

Vec3 upsilon(const Mat3& m) { return vex(pa(m)); }

double attitude_distance(const Rotation& r) {
  return 0.25 * (3.0 - r.matrix().trace());
}

Mat3 psi(const Rotation& r) {
  return r.matrix().trace() * Mat3::Identity() - r.matrix();
}

So3StepIntegrals so3_step_integrals(const Vec3& omega, double dt) {
  const Mat3 b = hat(omega * dt);
  const Mat3 b2 = b * b;
  const TrigQuotients q = trig_quotients(omega.norm() * dt);
  const Mat3 id = Mat3::Identity();
  return {id + q.s1 * b + q.c1 * b2, dt * (id + q.c1 * b + q.c2 * b2),
          dt * dt * (0.5 * id + q.c2 * b + q.c3 * b2)};
}

Rotation exp_so3(const Vec3& omega) {
  const Mat3 b = hat(omega);
  const TrigQuotients q = trig_quotients(omega.norm());
  return Rotation::from_matrix(Mat3::Identity() + q.s1 * b + q.c1 * b * b);
}

Mat5 exp_se23(const TangentInput& u, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("exp_se23 requires dt > 0");
  const So3StepIntegrals in = so3_step_integrals(u.omega, dt);
  Mat5 e = Mat5::Identity();
  e.block<3, 3>(0, 0) = in.rotation;
  e.block<3, 1>(0, 3) = in.first * u.v_col + u.kappa * (in.second * u.a_col);
  e.block<3, 1>(0, 4) = in.first * u.a_col;
  e(4, 3) = u.kappa * dt;
  return e;
}

NavState nav_compose(const NavState& a, const NavState& b) {
  return NavState::from_matrix(a.matrix() * b.matrix());
}

NavState nav_inverse(const NavState& x) {
  // X^{-1} = [R, -RP, -RV]: its stored block is R, so its attitude is R^T.
  const Rotation r = x.attitude();
  return NavState(r.transpose(), -(r * x.position()), -(r * x.velocity()));
}

Rotation quat_to_rot(const UnitQuaternion& q) {
  const double q0 = q.scalar;
  const Vec3& v = q.vector;
  const Mat3 r = (q0 * q0 - v.squaredNorm()) * Mat3::Identity() + 2.0 * v * v.transpose() -
                 2.0 * q0 * hat(v);
  return Rotation::from_matrix(r);
}

UnitQuaternion rot_to_quat(const Rotation& r) {
  // quat_to_rot yields the transpose of the usual active rotation matrix.
  const Eigen::Quaterniond q(Mat3(r.matrix().transpose()));
  const double sign = q.w() < 0.0 ? -1.0 : 1.0;
  return UnitQuaternion::normalized(sign * q.w(), sign * q.vec());
}

IdentityDiagnostics identity_checks(const Mat3& n, const Vec3& omega, const Vec3& y,
                                    const Vec3& z) {
  IdentityDiagnostics d;
  d.trace_lhs = (n * hat(omega)).trace();
  d.trace_rhs = -2.0 * upsilon(n).dot(omega);
  d.cross_lhs = hat(y.cross(z));
  d.cross_rhs = z * y.transpose() - y * z.transpose();
  return d;
}

}  // namespace vtol
