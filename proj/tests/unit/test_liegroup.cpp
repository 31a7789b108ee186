#include <gtest/gtest.h>

#include <numbers>

#include "vtol/errors.hpp"
#include "vtol/liegroup.hpp"
#include "vtol/oracles.hpp"

namespace vtol {
namespace {

constexpr double kTight = 1e-12;

TEST(Hat, MatchesSkewLayout) {
  Mat3 expected;
  expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  EXPECT_TRUE(hat(Vec3(1, 2, 3)).isApprox(expected, 0.0));
  EXPECT_TRUE(hat(Vec3::Zero()).isZero(0.0));
}

TEST(Hat, ActsAsCrossProduct) {
  EXPECT_TRUE((hat(Vec3::UnitX()) * Vec3::UnitY()).isApprox(Vec3::UnitZ()));
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const Vec3 y = oracle::random_vec3(rng, 3.0);
    const Vec3 z = oracle::random_vec3(rng, 3.0);
    EXPECT_LT((hat(y) * z - y.cross(z)).norm(), kTight);
  }
}

TEST(Vex, InvertsHat) {
  Mat3 s;
  s << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  EXPECT_EQ(vex(s), Vec3(1, 2, 3));
  EXPECT_EQ(vex(hat(Vec3(1, 2, 3))), Vec3(1, 2, 3));
  EXPECT_TRUE(vex(Mat3::Zero()).isZero(0.0));
}

TEST(Pa, ExtractsAntisymmetricPart) {
  Mat3 m;
  m << 1, 2, 0, 0, 1, 0, 0, 0, 1;
  Mat3 expected;
  expected << 0, 1, 0, -1, 0, 0, 0, 0, 0;
  EXPECT_TRUE(pa(m).isApprox(expected, 0.0));
  const Mat3 sym = m + m.transpose();
  EXPECT_TRUE(pa(sym).isZero(0.0));
  const Mat3 w = hat(Vec3(0.3, -1.0, 2.0));
  EXPECT_TRUE(pa(w).isApprox(w, 0.0));
}

TEST(Upsilon, SymmetricAndSkewInputs) {
  Mat3 m;
  m << 2, 1, 4, 1, 3, 5, 4, 5, 6;
  EXPECT_TRUE(upsilon(m).isZero(0.0));
  EXPECT_EQ(upsilon(hat(Vec3(1, 2, 3))), Vec3(1, 2, 3));
}

TEST(Upsilon, MatchesEntrywiseOracle) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 m = oracle::random_mat3(rng, 5.0);
    EXPECT_LT((upsilon(m) - oracle::upsilon_entrywise(m)).norm(), kTight);
  }
}

TEST(AttitudeDistance, KnownValues) {
  EXPECT_DOUBLE_EQ(attitude_distance(Rotation::identity()), 0.0);
  const Rotation flip = Rotation::from_matrix(Vec3(-1, -1, 1).asDiagonal().toDenseMatrix());
  EXPECT_DOUBLE_EQ(attitude_distance(flip), 1.0);
}

TEST(AttitudeDistance, UpsilonIdentityOnRandomRotations) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Rotation r = oracle::random_rotation(rng);
    const double d = attitude_distance(r);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
    EXPECT_NEAR(upsilon(r.matrix()).squaredNorm(), 4.0 * (1.0 - d) * d, kTight);
  }
}

TEST(Psi, KnownValuesAndOracle) {
  EXPECT_TRUE(psi(Rotation::identity()).isApprox(2.0 * Mat3::Identity(), 0.0));
  const Rotation flip = Rotation::from_matrix(Vec3(-1, -1, 1).asDiagonal().toDenseMatrix());
  EXPECT_TRUE(psi(flip).isApprox(Vec3(0, 0, -2).asDiagonal().toDenseMatrix(), 0.0));
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const Mat3 r = oracle::random_rotation(rng).matrix();
    const double tr = r(0, 0) + r(1, 1) + r(2, 2);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double expected = (a == b ? tr : 0.0) - r(a, b);
        EXPECT_NEAR(psi(Rotation::from_matrix(r))(a, b), expected, kTight);
      }
  }
}

TEST(ExpSo3, ZeroAndQuarterTurn) {
  EXPECT_TRUE(exp_so3(Vec3::Zero()).matrix().isApprox(Mat3::Identity(), 0.0));
  Mat3 expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  const Mat3 r = exp_so3(Vec3(0, 0, std::numbers::pi / 2)).matrix();
  EXPECT_LT((r - expected).norm(), kTight);
  EXPECT_LT((r - oracle::series_exp<3>(hat(Vec3(0, 0, std::numbers::pi / 2)))).norm(), kTight);
}

TEST(ExpSo3, MatchesSeriesOracle) {
  Rng rng(5);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  for (int i = 0; i < 500; ++i) {
    const Vec3 omega = angle(rng) * oracle::random_vec3(rng, 1.0).normalized();
    EXPECT_LT((exp_so3(omega).matrix() - oracle::series_exp<3>(hat(omega))).norm(), kTight);
  }
}

TEST(ExpSe23, MatchesSeriesOracle) {
  Rng rng(6);
  std::uniform_real_distribution<double> step(1e-4, 0.5);
  for (int i = 0; i < 500; ++i) {
    const TangentInput u{oracle::random_vec3(rng, 2.0), oracle::random_vec3(rng, 2.0),
                         oracle::random_vec3(rng, 2.0), 1.0};
    const double dt = step(rng);
    const Mat5 series = oracle::series_exp<5>(dt * u.matrix());
    EXPECT_LT((exp_se23(u, dt) - series).norm(), kTight);
  }
}

TEST(ExpSe23, SmallAngleBranchIsContinuous) {
  for (double s : {1e-9, 1e-6, 1e-3, 0.49, 0.51}) {
    const TangentInput u{Vec3(s, -s, 0.5 * s), Vec3(1, 2, 3), Vec3(-1, 0.5, 2), 1.0};
    EXPECT_LT((exp_se23(u, 1.0) - oracle::series_exp<5>(u.matrix())).norm(), kTight) << s;
  }
}

TEST(ExpSe23, RejectsNonPositiveStep) {
  EXPECT_THROW(exp_se23(TangentInput{}, 0.0), PreconditionError);
}

TEST(NavState, InverseAndComposition) {
  Rng rng(7);
  EXPECT_TRUE(nav_inverse(NavState()).matrix().isApprox(Mat5::Identity(), 0.0));
  for (int i = 0; i < 200; ++i) {
    const NavState x(oracle::random_rotation(rng), oracle::random_vec3(rng, 10.0),
                     oracle::random_vec3(rng, 10.0));
    EXPECT_LT((nav_compose(x, nav_inverse(x)).matrix() - Mat5::Identity()).norm(), 1e-12);
    EXPECT_LT((nav_inverse(x).matrix() - x.matrix().inverse()).norm(), 1e-10);
  }
}

TEST(NavState, StoresTransposedAttitude) {
  const Rotation r = exp_so3(Vec3(0.1, 0.2, 0.3));
  const NavState x(r, Vec3(1, 2, 3), Vec3(4, 5, 6));
  EXPECT_TRUE((x.matrix().block<3, 3>(0, 0).isApprox(r.matrix().transpose(), 0.0)));
  EXPECT_TRUE(x.attitude().matrix().isApprox(r.matrix(), 1e-15));
  EXPECT_EQ(x.position(), Vec3(1, 2, 3));
  EXPECT_EQ(x.velocity(), Vec3(4, 5, 6));
}

TEST(NavState, FromMatrixValidatesStructure) {
  Mat5 bad = Mat5::Identity();
  bad(4, 3) = 0.5;
  EXPECT_THROW(NavState::from_matrix(bad), PreconditionError);
  Mat5 skewed = Mat5::Identity();
  skewed(0, 0) = 2.0;
  EXPECT_THROW(NavState::from_matrix(skewed), PreconditionError);
}

TEST(Rotation, FromMatrixRejectsNonRotations) {
  EXPECT_THROW(Rotation::from_matrix(2.0 * Mat3::Identity()), PreconditionError);
  EXPECT_THROW(Rotation::from_matrix(Vec3(1, 1, -1).asDiagonal().toDenseMatrix()),
               PreconditionError);
  Mat3 noisy = exp_so3(Vec3(0.4, -0.2, 0.9)).matrix();
  noisy(0, 1) += 1e-4;
  const Rotation p = Rotation::project(noisy);
  EXPECT_LT(p.orthonormality_error(), 1e-14);
  EXPECT_NEAR(p.matrix().determinant(), 1.0, 1e-14);
}

TEST(Quaternion, ToRotationKnownValues) {
  EXPECT_TRUE(quat_to_rot(UnitQuaternion::identity()).matrix().isApprox(Mat3::Identity(), 0.0));
  EXPECT_TRUE(quat_to_rot(UnitQuaternion{0.0, Vec3(1, 0, 0)})
                  .matrix()
                  .isApprox(Vec3(1, -1, -1).asDiagonal().toDenseMatrix(), 0.0));
}

TEST(Quaternion, RandomOutputsAreRotations) {
  Rng rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const UnitQuaternion q = UnitQuaternion::normalized(n(rng), Vec3(n(rng), n(rng), n(rng)));
    const Mat3 r = quat_to_rot(q).matrix();
    EXPECT_LT((r * r.transpose() - Mat3::Identity()).norm(), kTight);
    EXPECT_NEAR(r.determinant(), 1.0, kTight);
    EXPECT_LT((quat_to_rot(-q).matrix() - r).norm(), kTight);
    const UnitQuaternion back = rot_to_quat(quat_to_rot(q));
    EXPECT_LT(std::min((back.coeffs() - q.coeffs()).norm(), (back.coeffs() + q.coeffs()).norm()),
              1e-12);
  }
}

TEST(Quaternion, HamiltonProductComposesRotations) {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const UnitQuaternion a = rot_to_quat(oracle::random_rotation(rng));
    const UnitQuaternion b = rot_to_quat(oracle::random_rotation(rng));
    const Mat3 composed = quat_to_rot(a * b).matrix();
    EXPECT_LT((composed - quat_to_rot(b).matrix() * quat_to_rot(a).matrix()).norm(), kTight);
  }
}

TEST(Identities, TraceAndCrossProductForms) {
  const IdentityDiagnostics zero = identity_checks(Mat3::Identity(), Vec3(1, -2, 0.5),
                                                   Vec3::UnitX(), Vec3::UnitY());
  EXPECT_NEAR(zero.trace_lhs, 0.0, kTight);
  EXPECT_NEAR(zero.trace_rhs, 0.0, kTight);
  EXPECT_TRUE(zero.cross_lhs.isApprox(hat(Vec3::UnitZ()), 0.0));
  EXPECT_LT(zero.cross_residual(), kTight);

  Rng rng(10);
  for (int i = 0; i < 1000; ++i) {
    const IdentityDiagnostics d =
        identity_checks(oracle::random_mat3(rng, 3.0), oracle::random_vec3(rng, 3.0),
                        oracle::random_vec3(rng, 3.0), oracle::random_vec3(rng, 3.0));
    EXPECT_LT(d.trace_residual(), kTight);
    EXPECT_LT(d.cross_residual(), kTight);
  }
}

TEST(Identities, UpsilonOfWeightedRotationUpperBound) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const Mat3 m = oracle::random_moment(rng, 3);
    const Mat3 m_bar = m.trace() * Mat3::Identity() - m;
    const double hi = Eigen::SelfAdjointEigenSolver<Mat3>(m_bar).eigenvalues().maxCoeff();
    const Rotation r = oracle::random_rotation(rng);
    EXPECT_LE(upsilon(r.matrix() * m).squaredNorm(), hi * hi * attitude_distance(r) + kTight);
  }
}

}  // namespace
}  // namespace vtol
