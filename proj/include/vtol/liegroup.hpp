#pragma once

// so(3) / SO(3) / SE_2(3) primitives.
//
// Conventions follow the navigation model used throughout the library:
//   * the attitude R maps inertial vectors into the body frame and evolves as
//     dR/dt = -[Omega]x R;
//   * the navigation matrix stores R^T in its top-left block,
//       X = [ R^T  P  V ]
//           [ 0    1  0 ]
//           [ 0    0  1 ];
//   * tangent inputs carry a scalar kappa at entry (5,4) which couples the
//     velocity column into the position column.

#include <Eigen/Dense>

namespace vtol {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat5 = Eigen::Matrix<double, 5, 5>;

inline Vec3 e3() { return Vec3::UnitZ(); }

/// Element of SO(3). Construction validates orthonormality and det = +1.
class Rotation {
 public:
  static constexpr double kTolerance = 1e-9;

  Rotation() : m_(Mat3::Identity()) {}

  static Rotation identity() { return Rotation(); }

  /// Throws PreconditionError if `m` is not a rotation within `tol` (Frobenius).
  static Rotation from_matrix(const Mat3& m, double tol = kTolerance);

  /// Nearest rotation in the Frobenius sense (polar decomposition via SVD).
  static Rotation project(const Mat3& m);

  const Mat3& matrix() const { return m_; }
  Rotation transpose() const { return Rotation(m_.transpose()); }

  /// ||R R^T - I||_F
  double orthonormality_error() const;

  /// Re-projects onto SO(3) when drift exceeds 1e-12, otherwise returns *this.
  Rotation renormalized() const;

  Rotation operator*(const Rotation& rhs) const { return Rotation(m_ * rhs.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

/// Unit quaternion [q0, q] with the scalar part first.
struct UnitQuaternion {
  double scalar = 1.0;
  Vec3 vector = Vec3::Zero();

  static UnitQuaternion identity() { return {}; }
  /// Normalises (w, v); throws PreconditionError on a zero or non-finite input.
  static UnitQuaternion normalized(double w, const Vec3& v);
  /// exp of the pure quaternion [0, phi/2]: rotation by angle ||phi|| about phi.
  static UnitQuaternion from_rotation_vector(const Vec3& phi);

  double norm() const { return std::sqrt(scalar * scalar + vector.squaredNorm()); }
  UnitQuaternion conjugate() const { return {scalar, -vector}; }
  UnitQuaternion operator-() const { return {-scalar, -vector}; }
  Eigen::Vector4d coeffs() const { return {scalar, vector.x(), vector.y(), vector.z()}; }
};

/// Hamilton product.
UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);

/// Element of SE_2(3) stored as its 5x5 homogeneous matrix.
class NavState {
 public:
  NavState() : x_(Mat5::Identity()) {}
  NavState(const Rotation& attitude, const Vec3& position, const Vec3& velocity);

  /// Validates the bottom rows and the rotation block (within `tol`), then
  /// re-projects the rotation block onto SO(3).
  static NavState from_matrix(const Mat5& x, double tol = Rotation::kTolerance);

  /// The attitude R (the stored block is R^T).
  Rotation attitude() const;
  Vec3 position() const { return x_.block<3, 1>(0, 3); }
  Vec3 velocity() const { return x_.block<3, 1>(0, 4); }
  const Mat5& matrix() const { return x_; }

 private:
  Mat5 x_;
};

/// Element of U_M: u([omega]x, v_col, a_col, kappa).
struct TangentInput {
  Vec3 omega = Vec3::Zero();
  Vec3 v_col = Vec3::Zero();
  Vec3 a_col = Vec3::Zero();
  double kappa = 0.0;

  Mat5 matrix() const;
  TangentInput operator-() const { return {-omega, -v_col, -a_col, -kappa}; }
};

Mat3 hat(const Vec3& omega);
/// Inverse of hat. Throws PreconditionError unless ||S + S^T||_F <= 1e-9.
Vec3 vex(const Mat3& s);
/// Anti-symmetric projection (M - M^T) / 2.
Mat3 pa(const Mat3& m);
/// vex(pa(M)).
Vec3 upsilon(const Mat3& m);
/// Normalised attitude distance (1/4) Tr{I - R}, in [0, 1].
double attitude_distance(const Rotation& r);
/// Tr{R} I - R.
Mat3 psi(const Rotation& r);

/// Closed-form integrals of exp(u [omega]x) over one step of length dt:
///   rotation = exp(dt [omega]x)
///   first    = int_0^dt exp(u [omega]x) du
///   second   = int_0^dt (dt - u) exp(u [omega]x) du
struct So3StepIntegrals {
  Mat3 rotation;
  Mat3 first;
  Mat3 second;
};
So3StepIntegrals so3_step_integrals(const Vec3& omega, double dt);

/// Rodrigues formula.
Rotation exp_so3(const Vec3& omega);
/// exp(dt * u.matrix()) in closed form. dt must be positive.
Mat5 exp_se23(const TangentInput& u, double dt);

NavState nav_compose(const NavState& a, const NavState& b);
NavState nav_inverse(const NavState& x);

/// R = (q0^2 - |q|^2) I + 2 q q^T - 2 q0 [q]x
Rotation quat_to_rot(const UnitQuaternion& q);
/// Inverse of quat_to_rot, returned with a non-negative scalar part.
UnitQuaternion rot_to_quat(const Rotation& r);

/// Two-sided evaluation of
///   Tr{N [omega]x} = -2 vex(Pa(N))^T omega
///   [y x z]x      = z y^T - y z^T
struct IdentityDiagnostics {
  double trace_lhs = 0.0;
  double trace_rhs = 0.0;
  Mat3 cross_lhs = Mat3::Zero();
  Mat3 cross_rhs = Mat3::Zero();

  double trace_residual() const { return std::abs(trace_lhs - trace_rhs); }
  double cross_residual() const { return (cross_lhs - cross_rhs).norm(); }
};
IdentityDiagnostics identity_checks(const Mat3& n, const Vec3& omega, const Vec3& y,
                                    const Vec3& z);

}  // namespace vtol
