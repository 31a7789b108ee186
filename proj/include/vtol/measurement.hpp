#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vtol/liegroup.hpp"
#include "vtol/rng.hpp"

namespace vtol {

/// Known inertial-frame landmark with its confidence weight s_i > 0.
struct Feature {
  Vec3 position = Vec3::Zero();
  double weight = 1.0;
};

/// Static landmark set with cached weighted aggregates:
///   s_T = sum s_i,  p_c = sum s_i p_i / s_T,
///   M   = sum s_i p_i p_i^T - s_T p_c p_c^T,  M_bar = Tr{M} I - M.
class FeatureSet {
 public:
  /// Throws PreconditionError on a non-positive weight and ObservabilityError
  /// for fewer than three features or a rank-deficient (collinear) set.
  static FeatureSet aggregate(std::vector<Feature> features);

  std::span<const Feature> features() const { return features_; }
  std::size_t size() const { return features_.size(); }
  double total_weight() const { return total_weight_; }
  const Vec3& centroid() const { return centroid_; }
  const Mat3& moment() const { return moment_; }
  const Mat3& moment_bar() const { return moment_bar_; }

 private:
  FeatureSet() = default;

  std::vector<Feature> features_;
  double total_weight_ = 0.0;
  Vec3 centroid_ = Vec3::Zero();
  Mat3 moment_ = Mat3::Zero();
  Mat3 moment_bar_ = Mat3::Zero();
};

/// One sample of the vision-aided inertial unit.
struct BodyMeasurements {
  double timestamp = 0.0;
  std::vector<Vec3> landmarks;  ///< y_i, body frame, same order as the FeatureSet
  Vec3 gyro = Vec3::Zero();     ///< Omega_m
};

/// Direct-measurement innovations shared by the observer and the controller.
struct Innovations {
  Vec3 attitude = Vec3::Zero();      ///< Upsilon(R~_o M)
  Vec3 position_sum = Vec3::Zero();  ///< sum s_i y~_i
};

/// y_i = R (p_i - P) + b_i + nu_i with nu_i ~ N(0, noise_std^2 I).
/// `bias` is either empty (no bias) or holds one vector per feature.
/// Only the landmark vectors are produced; `gyro` is left zero for the caller.
BodyMeasurements synthesize_measurements(const Rotation& r, const Vec3& p, const FeatureSet& fs,
                                         std::span<const Vec3> bias, double noise_std,
                                         Rng& rng);
BodyMeasurements synthesize_measurements(const Rotation& r, const Vec3& p, const FeatureSet& fs,
                                         std::span<const Vec3> bias, double noise_std,
                                         std::uint64_t rng_seed);

/// Upsilon(R~_o M) = sum (s_i/2) (p_i - p_c) x R_hat^T y_i
/// sum s_i y~_i    = sum s_i (P_hat + R_hat^T y_i - p_i)
Innovations observer_innovations(const Rotation& r_hat, const Vec3& p_hat,
                                 const BodyMeasurements& meas, const FeatureSet& fs);

/// Upsilon(R~_c M) = sum (s_i/2) (p_i - p_c) x R_d^T y_i
Vec3 controller_innovation(const Rotation& r_d, const BodyMeasurements& meas,
                           const FeatureSet& fs);

}  // namespace vtol
