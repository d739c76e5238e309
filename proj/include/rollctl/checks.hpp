#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "rollctl/sim.hpp"

namespace rollctl {

/// Uniformly distributed rotation (normalized Gaussian quaternion).
Rotation random_rotation(std::mt19937_64& rng);

/// Random unit vector.
Vec3 random_unit(std::mt19937_64& rng);

/// State with random attitude, |omega| <= omega_max, |theta_dot| <= rotor_max
/// per component and a random planar position.
RobotState random_state(std::mt19937_64& rng, double omega_max = 5.0,
                        double rotor_max = 100.0);

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
};

/// Suites: liegroup, gradients, conservation, dissipation, dualform, all.
const std::vector<std::string>& suite_names();

/// Runs a suite. Throws Error("unknown suite '...'") for other names.
std::vector<CheckResult> run_suite(const std::string& suite,
                                   std::uint64_t seed);

/// Table of results followed by the line "N passed, M failed".
void print_results(const std::vector<CheckResult>& results, std::ostream& os);

// Individual properties, shared with the test suites.

/// Worst relative error of dV against central differences of V (step h)
/// over `pairs` random (R_s, R_d).
double gradient_fd_error(std::mt19937_64& rng, int pairs, double h = 1e-5);

/// max |pi_s(t) - pi_s(0)| / (1 + |pi_s(0)|) over the record.
double relative_momentum_drift(const TrajectoryRecord& rec);

/// Pointwise dissipation residual max |rho| / (1 + |omega|^2).
double scaled_dissipation_residual(const TrajectoryRecord& rec);

/// Sup-norm difference of (R, omega, x) between the momentum and velocity
/// forms of the same scenario.
double dual_form_difference(const ScenarioConfig& c);

}  // namespace rollctl
