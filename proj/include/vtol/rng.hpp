#pragma once

#include <cstdint>
#include <random>

#include "vtol/liegroup.hpp"

namespace vtol {

/// Simulation random source. Owned by the caller; every stochastic function
/// takes it by reference so a scenario is reproducible from its seed.
using Rng = std::mt19937_64;

/// Zero-mean Gaussian vector with independent per-axis standard deviation.
inline Vec3 gaussian_vec3(Rng& rng, double stddev) {
  if (stddev <= 0.0) return Vec3::Zero();
  std::normal_distribution<double> n(0.0, stddev);
  const double x = n(rng);
  const double y = n(rng);
  const double z = n(rng);
  return {x, y, z};
}

}  // namespace vtol
