#pragma once

// Independent reference computations used to cross-check the closed forms.

#include "vtol/liegroup.hpp"
#include "vtol/observer.hpp"
#include "vtol/rng.hpp"

namespace vtol::oracle {

/// sum_{k=0}^{terms-1} A^k / k!
template <int N>
Eigen::Matrix<double, N, N> series_exp(const Eigen::Matrix<double, N, N>& a, int terms = 30) {
  using M = Eigen::Matrix<double, N, N>;
  M sum = M::Identity();
  M term = M::Identity();
  for (int k = 1; k < terms; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

/// Uniformly distributed rotation (normalised Gaussian quaternion).
Rotation random_rotation(Rng& rng);
/// Components uniform in [-scale, scale].
Vec3 random_vec3(Rng& rng, double scale);
/// Entries uniform in [-scale, scale].
Mat3 random_mat3(Rng& rng, double scale);
/// Symmetric positive semidefinite A A^T with A of size 3 x rank (rank 2 or 3).
Mat3 random_moment(Rng& rng, int rank);

/// vex(Pa(M)) written out entry by entry.
Vec3 upsilon_entrywise(const Mat3& m);

/// Attitude, bias, position and velocity estimate advanced by one explicit
/// Euler step of the continuous estimator equations.
EstimatorState euler_observer_step(const EstimatorState& est, const ObserverDerivatives& d,
                                   double dt);

}  // namespace vtol::oracle
