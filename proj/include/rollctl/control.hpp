#pragma once

#include "rollctl/geometry.hpp"
#include "rollctl/model.hpp"

namespace rollctl {

// All laws return the rotor torque u for the dynamics
//   M(G) omega_dot = (I_s omega + J theta_dot) x omega - u.
// Under this convention the power balance of H = W + 1/2 e^T M e is
//   H_dot = dW . e - e . u + (terms that vanish when omega_d = 0),
// so each law adds its potential gradient and damping with a plus sign and
// subtracts the feedforward.

/// u = dV + Kv e_w - f_FF. With omega_d = 0 this is dV + Kv omega and
/// H_dot = -Kv |omega|^2 exactly.
Vec3 orientation_tracking_law(const RobotParams& p, const RobotState& s,
                              const DesiredFrame& d, const Gains& g);

/// u = kp p + kd e_w - f_FF with p = r R_s^T (e3 x (x - x_d)). Since
/// V1_dot = p . e_w, kp = 1 and omega_d = 0 give H_dot = -kd |omega|^2.
Vec3 position_tracking_law(const RobotParams& p, const RobotState& s,
                           const DesiredFrame& d, const Gains& g);

/// Contact position to the origin while spinning at g.alpha about the
/// vertical. Equals position_tracking_law with x_d = 0 and
/// R_d omega_d = alpha e3.
Vec3 reduced_attitude_law(const RobotParams& p, const RobotState& s,
                          const Gains& g);

/// Delta(G) = J - J (I_s + J - m_T r^2 hat(G)hat(G))^-1 J.
/// Throws Error if Delta is not positive definite or its condition number
/// exceeds 1e12.
Mat3 torque_transform_matrix(const RobotParams& p, const Vec3& gamma);

/// v = Delta u.
Vec3 torque_transform(const RobotParams& p, const Vec3& gamma, const Vec3& u);

/// u = Delta^-1 v.
Vec3 torque_transform_inverse(const RobotParams& p, const Vec3& gamma,
                              const Vec3& v);

}  // namespace rollctl
