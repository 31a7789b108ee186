#include "vtol/measurement.hpp"

#include <cmath>
#include <string>

#include "vtol/errors.hpp"

namespace vtol {

namespace {

void check_sizes(const BodyMeasurements& meas, const FeatureSet& fs) {
  if (meas.landmarks.size() != fs.size()) {
    throw PreconditionError("measurement count " + std::to_string(meas.landmarks.size()) +
                            " does not match feature count " + std::to_string(fs.size()));
  }
}

// sum (s_i/2) (p_i - p_c) x (A^T y_i)
Vec3 weighted_cross_sum(const Mat3& a, const BodyMeasurements& meas, const FeatureSet& fs) {
  Vec3 acc = Vec3::Zero();
  const auto features = fs.features();
  for (std::size_t i = 0; i < features.size(); ++i) {
    const Vec3 arm = features[i].position - fs.centroid();
    acc += 0.5 * features[i].weight * arm.cross(a.transpose() * meas.landmarks[i]);
  }
  return acc;
}

}  // namespace

FeatureSet FeatureSet::aggregate(std::vector<Feature> features) {
  if (features.size() < 3) {
    throw ObservabilityError("at least three landmarks are required, got " +
                             std::to_string(features.size()));
  }
  FeatureSet fs;
  for (const auto& f : features) {
    if (!(f.weight > 0.0) || !std::isfinite(f.weight)) {
      throw PreconditionError("landmark confidence weights must be positive");
    }
    if (!f.position.allFinite()) throw PreconditionError("landmark position is not finite");
    fs.total_weight_ += f.weight;
    fs.centroid_ += f.weight * f.position;
  }
  fs.centroid_ /= fs.total_weight_;

  Mat3 second = Mat3::Zero();
  for (const auto& f : features) second += f.weight * f.position * f.position.transpose();
  fs.moment_ = second - fs.total_weight_ * fs.centroid_ * fs.centroid_.transpose();
  fs.moment_ = 0.5 * (fs.moment_ + fs.moment_.transpose());

  // Collinearity test on the centred spread, scale-free.
  Mat3 centred = Mat3::Zero();
  for (const auto& f : features) {
    const Vec3 d = f.position - fs.centroid_;
    centred += f.weight * d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(centred);
  const Vec3 ev = eig.eigenvalues();
  if (!(ev(2) > 0.0) || ev(1) <= 1e-9 * ev(2)) {
    throw ObservabilityError("landmarks are collinear (rank(M) < 2)");
  }

  fs.moment_bar_ = fs.moment_.trace() * Mat3::Identity() - fs.moment_;
  fs.features_ = std::move(features);
  return fs;
}

BodyMeasurements synthesize_measurements(const Rotation& r, const Vec3& p, const FeatureSet& fs,
                                         std::span<const Vec3> bias, double noise_std,
                                         Rng& rng) {
  if (!bias.empty() && bias.size() != fs.size()) {
    throw PreconditionError("measurement bias list must be empty or match the feature count");
  }
  BodyMeasurements out;
  out.landmarks.reserve(fs.size());
  const auto features = fs.features();
  for (std::size_t i = 0; i < features.size(); ++i) {
    Vec3 y = r * (features[i].position - p);
    if (!bias.empty()) y += bias[i];
    y += gaussian_vec3(rng, noise_std);
    out.landmarks.push_back(y);
  }
  return out;
}

BodyMeasurements synthesize_measurements(const Rotation& r, const Vec3& p, const FeatureSet& fs,
                                         std::span<const Vec3> bias, double noise_std,
                                         std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return synthesize_measurements(r, p, fs, bias, noise_std, rng);
}

Innovations observer_innovations(const Rotation& r_hat, const Vec3& p_hat,
                                 const BodyMeasurements& meas, const FeatureSet& fs) {
  check_sizes(meas, fs);
  Innovations inn;
  inn.attitude = weighted_cross_sum(r_hat.matrix(), meas, fs);
  const auto features = fs.features();
  for (std::size_t i = 0; i < features.size(); ++i) {
    inn.position_sum +=
        features[i].weight * (p_hat + r_hat.matrix().transpose() * meas.landmarks[i] -
                              features[i].position);
  }
  return inn;
}

Vec3 controller_innovation(const Rotation& r_d, const BodyMeasurements& meas,
                           const FeatureSet& fs) {
  check_sizes(meas, fs);
  return weighted_cross_sum(r_d.matrix(), meas, fs);
}

}  // namespace vtol
