#include "rollctl/model.hpp"

#include <cmath>

namespace rollctl {

namespace {
constexpr double kGammaTolerance = 1e-6;

void require_unit(const Vec3& gamma) {
  if (!gamma.allFinite() || std::abs(gamma.norm() - 1.0) > kGammaTolerance) {
    throw Error("gamma not on sphere");
  }
}
}  // namespace

void RobotParams::validate() const {
  if (!(m_s > 0 && m_rotor > 0 && r > 0 && J_a > 0 && J_b > 0)) {
    throw Error("parameters must be strictly positive");
  }
  if (!(I_s_diag.minCoeff() > 0)) {
    throw Error("shell inertia must be strictly positive");
  }
  if (I_s_diag(0) != I_s_diag(1) || I_s_diag(1) != I_s_diag(2)) {
    throw Error("shell inertia must be isotropic");
  }
  if (std::abs(J_a - 2.0 * J_b) > 1e-12) {
    throw Error("rotor inertias must satisfy J_a = 2 J_b");
  }
}

Mat3 lock_inertia(const RobotParams& p, const Vec3& gamma) {
  require_unit(gamma);
  const Mat3 g = hat(gamma);
  const double mr2 = p.m_T() * p.r * p.r;
  return p.shell_inertia() - mr2 * g * g;
}

Vec3 body_momentum(const RobotParams& p, const Vec3& omega,
                   const Vec3& theta_dot, const Vec3& gamma) {
  return (lock_inertia(p, gamma) + p.rotor_inertia()) * omega +
         p.rotor_inertia() * theta_dot;
}

Vec3 rotor_momentum(const RobotParams& p, const Vec3& omega,
                    const Vec3& theta_dot) {
  return p.rotor_inertia() * (omega + theta_dot);
}

Vec3 rolling_velocity(const Rotation& R, const Vec3& omega, double r) {
  const Vec3 w = R * omega;
  // (w x r e3) written out so that the vertical component is an exact zero.
  return {r * w.y(), -r * w.x(), 0.0};
}

Vec3 contact_velocity_body(const Vec3& omega, const Vec3& gamma, double r) {
  return r * omega.cross(gamma);
}

Vec3 advection_rate(const Vec3& omega, const Vec3& gamma) {
  return -omega.cross(gamma);
}

VelocityRates dynamics_velocity_form(const RobotParams& p, const RobotState& s,
                                     const Vec3& u) {
  const Mat3 M = lock_inertia(p, s.gamma);
  const Vec3 gyro =
      (p.shell_inertia() * s.omega + p.rotor_inertia() * s.theta_dot)
          .cross(s.omega);
  VelocityRates d;
  d.omega = s.omega;
  d.omega_dot = M.llt().solve(gyro - u);
  d.theta_dot = s.theta_dot;
  d.theta_ddot = u / p.J_a - d.omega_dot;
  d.x_dot = rolling_velocity(s.R, s.omega, p.r);
  d.gamma_dot = advection_rate(s.omega, s.gamma);
  return d;
}

void velocities_from_momenta(const RobotParams& p, const Vec3& gamma,
                             const Vec3& Pi_s, const Vec3& Pi_rotor,
                             Vec3& omega, Vec3& theta_dot) {
  const Mat3 M = lock_inertia(p, gamma);
  const Mat3 J = p.rotor_inertia();
  // Kinetic-energy matrix of (omega, theta_dot):
  //   [M + J  J] [omega    ]   [Pi_s    ]
  //   [J      J] [theta_dot] = [Pi_rotor]
  Eigen::Matrix<double, 6, 6> K;
  K << M + J, J, J, J;
  Eigen::Matrix<double, 6, 1> rhs;
  rhs << Pi_s, Pi_rotor;
  const Eigen::LLT<Eigen::Matrix<double, 6, 6>> llt(K);
  if (llt.info() != Eigen::Success) {
    throw Error("singular locked inertia");
  }
  const Eigen::Matrix<double, 6, 1> v = llt.solve(rhs);
  omega = v.head<3>();
  theta_dot = v.tail<3>();
}

MomentumRates dynamics_momentum_form(const RobotParams& p,
                                     const MomentumState& s, const Vec3& u) {
  MomentumRates d;
  velocities_from_momenta(p, s.gamma, s.Pi_s, s.Pi_rotor, d.omega,
                          d.theta_dot);
  d.Pi_s_dot = s.Pi_s.cross(d.omega);
  d.Pi_rotor_dot = u;
  d.x_dot = rolling_velocity(s.R, d.omega, p.r);
  d.gamma_dot = advection_rate(d.omega, s.gamma);
  return d;
}

Vec3 inertial_momentum(const Rotation& R, const Vec3& Pi_s) { return R * Pi_s; }

MomentumState to_momentum_state(const RobotParams& p, const RobotState& s) {
  MomentumState m;
  m.R = s.R;
  m.Pi_s = body_momentum(p, s.omega, s.theta_dot, s.gamma);
  m.Pi_rotor = rotor_momentum(p, s.omega, s.theta_dot);
  m.theta = s.theta;
  m.x = s.x;
  m.gamma = s.gamma;
  return m;
}

RobotState to_robot_state(const RobotParams& p, const MomentumState& s) {
  RobotState v;
  v.R = s.R;
  velocities_from_momenta(p, s.gamma, s.Pi_s, s.Pi_rotor, v.omega,
                          v.theta_dot);
  v.theta = s.theta;
  v.x = s.x;
  v.gamma = s.gamma;
  return v;
}

}  // namespace rollctl
