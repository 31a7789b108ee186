#pragma once

// Numerical verification suites shared by the CLI self-test and the
// acceptance runner. Each returns a verdict plus a one-line measurement.

#include <cstdint>
#include <string>
#include <vector>

#include "vtol/scenario.hpp"

namespace vtol::checks {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Trace/cross-product identities, the Upsilon-distance identity and the
/// two-sided Upsilon(R M) bound, with runtime.
CheckResult lie_identities(std::size_t samples = 10000, std::uint64_t seed = 11);

/// Lower bound lambda_min(M_bar)^2 (1 - ||R||_I) ||R||_I <= ||Upsilon(R M)||^2.
CheckResult lie_bound_with_distance_factor(std::size_t samples = 10000, std::uint64_t seed = 11);

/// Innovations from clean landmark vectors against ground-truth constructions.
CheckResult direct_measurement(std::size_t samples = 1000, std::uint64_t seed = 12);

/// Closed-form exponentials against a 30-term series for arguments of norm <= pi.
CheckResult exponential_maps(std::size_t samples = 1000, std::uint64_t seed = 13);

/// First-order convergence of the desired-attitude kinematics and of Omega_d'
/// under step halving.
CheckResult guidance_kinematics();

/// Noise-free observer convergence thresholds and composite decay slope.
CheckResult observer_convergence(const ScenarioConfig& base);

/// Noisy closed-loop tracking neighbourhood and command bounds.
CheckResult closed_loop_tracking(const ScenarioConfig& base);

/// Per-step non-increase of the attitude/bias Lyapunov surrogate (noise-free).
CheckResult lyapunov_monotone(const ScenarioConfig& base);

/// Rotation and quaternion backends produce matching estimates and commands.
CheckResult backend_equivalence(const ScenarioConfig& base);

/// Two identical runs give byte-identical CSV.
CheckResult determinism(const ScenarioConfig& base);

/// Gap between the two-exponential observer step and Euler integration of the
/// continuous estimator halves with dt.
CheckResult step_order();

/// Runs every algebraic / oracle suite (no full scenarios).
std::vector<CheckResult> selftest();

/// Formats "[PASS] <id>. <name>: <detail>".
std::string format(const CheckResult& r);

}  // namespace vtol::checks
