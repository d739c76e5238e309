#pragma once

#include <filesystem>
#include <string>

#include "rollctl/sim.hpp"

namespace rollctl {

/// Malformed scenario file. The message names the key and the line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Parses the sectioned key-value scenario format:
///
///   # comment
///   [scenario]   name, dt, duration, seed
///   [params]     m_s, m_rotor, r, I_s (1 or 3 values), J_a, J_b, J_kgcm2
///   [gains]      Kp (3 values), Kv, kp, kd, alpha
///   [reference]  kind = rest | orientation_constant | orientation_sinusoid
///                       | circle | line
///                R_d, radius, rate, velocity (2), offset (2)
///   [controller] kind = orientation_tracking | position_tracking
///                       | reduced_attitude | open_loop
///                torque_table = t u1 u2 u3 ; t u1 u2 u3 ; ...
///   [init]       R, omega, theta, theta_dot, x
///
/// Scalars accept products and quotients of numbers and `pi`, with an
/// optional leading minus (`-pi/6`, `2*pi/3`). Rotations are `identity` or a
/// product of elementary rotations applied left to right, `x:pi/9 y:pi/18`.
/// J_kgcm2 sets J_a in kg cm^2; J_b defaults to J_a / 2 when not given.
/// Gamma is always derived from R.
ScenarioConfig parse_config(const std::string& text,
                            const std::string& origin = "<config>");

/// Reads and parses a file. Throws ConfigError("cannot open <path>").
ScenarioConfig load_config(const std::filesystem::path& path);

/// Scalar expression and rotation grammar, exposed for tests.
double parse_scalar(const std::string& expr);
Rotation parse_rotation(const std::string& expr);

}  // namespace rollctl
