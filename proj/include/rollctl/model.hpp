#pragma once

#include "rollctl/liegroup.hpp"

namespace rollctl {

/// Physical parameters of the sphere and its three internal rotors (SI).
///
/// The shell inertia is isotropic and every rotor has spin inertia J_a and
/// transverse inertia J_b = J_a / 2, so the combined rotor inertia seen by the
/// shell is J_a * I.
struct RobotParams {
  double m_s = 1.0;         ///< shell mass [kg]
  double m_rotor = 0.672;   ///< mass of each rotor incl. its dead weight [kg]
  double r = 0.176;         ///< sphere radius [m]
  Vec3 I_s_diag{0.0153, 0.0153, 0.0153};  ///< shell inertia [kg m^2]
  double J_a = 6.72e-5;     ///< rotor spin inertia [kg m^2]
  double J_b = 3.36e-5;     ///< rotor transverse inertia [kg m^2]

  double m_T() const { return m_s + 3.0 * m_rotor; }
  Mat3 shell_inertia() const { return I_s_diag.asDiagonal(); }
  Mat3 rotor_inertia() const { return J_a * Mat3::Identity(); }

  /// Throws Error naming the violated invariant.
  void validate() const;
};

/// Full simulation state in velocity variables.
struct RobotState {
  Rotation R;                     ///< shell attitude, body -> inertial
  Vec3 omega = Vec3::Zero();      ///< shell angular velocity, body frame
  Vec3 theta = Vec3::Zero();      ///< rotor angles, unwrapped
  Vec3 theta_dot = Vec3::Zero();  ///< rotor rates relative to the shell
  Vec3 x = Vec3::Zero();          ///< sphere centre, inertial frame
  Vec3 gamma = Vec3::UnitZ();     ///< R^T e3
};

/// Same configuration in momentum variables; Pi_rotor = J (omega + theta_dot).
struct MomentumState {
  Rotation R;
  Vec3 Pi_s = Vec3::Zero();
  Vec3 Pi_rotor = Vec3::Zero();
  Vec3 theta = Vec3::Zero();
  Vec3 x = Vec3::Zero();
  Vec3 gamma = Vec3::UnitZ();
};

/// Time derivative of a RobotState. The attitude rate is R * hat(omega).
struct VelocityRates {
  Vec3 omega;
  Vec3 omega_dot;
  Vec3 theta_dot;
  Vec3 theta_ddot;
  Vec3 x_dot;
  Vec3 gamma_dot;
};

/// Time derivative of a MomentumState. The attitude rate is R * hat(omega).
struct MomentumRates {
  Vec3 omega;
  Vec3 Pi_s_dot;
  Vec3 Pi_rotor_dot;
  Vec3 theta_dot;
  Vec3 x_dot;
  Vec3 gamma_dot;
};

/// Locked inertia M(G) = I_s - m_T r^2 hat(G) hat(G). Throws
/// Error("gamma not on sphere") unless |G| = 1 within 1e-6.
Mat3 lock_inertia(const RobotParams& p, const Vec3& gamma);

/// Pi_s = (I_s + J - m_T r^2 hat(G)hat(G)) omega + J theta_dot.
Vec3 body_momentum(const RobotParams& p, const Vec3& omega,
                   const Vec3& theta_dot, const Vec3& gamma);

/// Pi_i = J (omega + theta_dot).
Vec3 rotor_momentum(const RobotParams& p, const Vec3& omega,
                    const Vec3& theta_dot);

/// Rolling without slipping: x_dot = (R omega) x (r e3).
Vec3 rolling_velocity(const Rotation& R, const Vec3& omega, double r);

/// Contact velocity in the body frame, r hat(omega) G == R^T x_dot.
Vec3 contact_velocity_body(const Vec3& omega, const Vec3& gamma, double r);

/// G_dot = -omega x G.
Vec3 advection_rate(const Vec3& omega, const Vec3& gamma);

/// Recast (velocity) form of the reduced dynamics with rotor torque u.
VelocityRates dynamics_velocity_form(const RobotParams& p, const RobotState& s,
                                     const Vec3& u);

/// Euler-Poincare (momentum) form. Shell and rotor velocities are recovered
/// jointly from both momenta by one symmetric 6x6 solve.
MomentumRates dynamics_momentum_form(const RobotParams& p,
                                     const MomentumState& s, const Vec3& u);

/// Inertial angular momentum pi_s = R Pi_s; conserved for any rotor torque.
Vec3 inertial_momentum(const Rotation& R, const Vec3& Pi_s);

/// Solves for (omega, theta_dot) given both momenta.
void velocities_from_momenta(const RobotParams& p, const Vec3& gamma,
                             const Vec3& Pi_s, const Vec3& Pi_rotor,
                             Vec3& omega, Vec3& theta_dot);

MomentumState to_momentum_state(const RobotParams& p, const RobotState& s);
RobotState to_robot_state(const RobotParams& p, const MomentumState& s);

}  // namespace rollctl
