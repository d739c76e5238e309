#include "rollctl/control.hpp"

namespace rollctl {

Vec3 orientation_tracking_law(const RobotParams& p, const RobotState& s,
                              const DesiredFrame& d, const Gains& g) {
  const Vec3 dV = grad_trace_potential(s.R, d.R_d, g.Kp_diag);
  const Vec3 e = velocity_error(s.R, s.omega, d.R_d, d.omega_d);
  return dV + g.Kv * e - feedforward(p, s, d);
}

Vec3 position_tracking_law(const RobotParams& p, const RobotState& s,
                           const DesiredFrame& d, const Gains& g) {
  // f_PD = kp p - kd e. Driving with -f_PD would give
  // H_dot = (1 + kp) p.e - kd |e|^2 at omega_d = 0, so the proportional term
  // enters with the opposite sign: H_dot = (1 - kp) p.e - kd |e|^2.
  const Vec3 prop = position_gradient_term(s.R, s.x, d.x_d, p.r);
  const Vec3 e = velocity_error(s.R, s.omega, d.R_d, d.omega_d);
  return g.kp * prop + g.kd * e - feedforward(p, s, d);
}

Vec3 reduced_attitude_law(const RobotParams& p, const RobotState& s,
                          const Gains& g) {
  const Mat3 M = lock_inertia(p, s.gamma);
  const Vec3 w = g.alpha * (s.R.matrix().transpose() * Vec3::UnitZ());
  const Vec3& om = s.omega;
  const Vec3 prop =
      p.r * (s.R.matrix().transpose() * Vec3::UnitZ().cross(s.x));
  // The inertial reference alpha e3 is constant, so the feedforward has no
  // acceleration term.
  const Vec3 ff =
      0.5 * om.cross(M * w) - 0.5 * (M * om).cross(w) - M * om.cross(w);
  return g.kp * prop + g.kd * (om - w) - ff;
}

Mat3 torque_transform_matrix(const RobotParams& p, const Vec3& gamma) {
  const Mat3 J = p.rotor_inertia();
  const Mat3 locked = lock_inertia(p, gamma) + J;
  Mat3 delta = J - J * locked.llt().solve(J);
  delta = 0.5 * (delta + delta.transpose());
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(delta);
  const Vec3& ev = eig.eigenvalues();
  if (!(ev(0) > 0) || ev(2) / ev(0) > 1e12) {
    throw Error("torque transform ill-conditioned");
  }
  return delta;
}

Vec3 torque_transform(const RobotParams& p, const Vec3& gamma, const Vec3& u) {
  return torque_transform_matrix(p, gamma) * u;
}

Vec3 torque_transform_inverse(const RobotParams& p, const Vec3& gamma,
                              const Vec3& v) {
  return torque_transform_matrix(p, gamma).llt().solve(v);
}

}  // namespace rollctl
