#include "rollctl/geometry.hpp"

#include <cmath>

namespace rollctl {

void Gains::validate() const {
  if (!(Kp_diag.minCoeff() > 0)) {
    throw Error("Kp entries must be positive");
  }
  if (Kp_diag(0) == Kp_diag(1) || Kp_diag(1) == Kp_diag(2) ||
      Kp_diag(0) == Kp_diag(2)) {
    throw Error("Kp entries must be pairwise distinct");
  }
  if (!(Kv > 0 && kp > 0 && kd > 0)) {
    throw Error("Kv, kp and kd must be positive");
  }
}

double trace_potential(const Rotation& Rs, const Rotation& Rd,
                       const Vec3& Kp_diag) {
  const Mat3 Re = Rd.matrix().transpose() * Rs.matrix();
  double v = 0.0;
  for (int i = 0; i < 3; ++i) {
    v += Kp_diag(i) * (1.0 - Re(i, i));
  }
  return v;
}

namespace detail {

Vec3 grad_sum_form(const Rotation& Rs, const Rotation& Rd,
                   const Vec3& Kp_diag) {
  const Mat3 Re = Rd.matrix().transpose() * Rs.matrix();
  Vec3 g = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    // R_e^T e_i is the i-th row of R_e.
    g += Kp_diag(i) * Re.row(i).transpose().cross(Vec3::Unit(i));
  }
  return g;
}

Vec3 grad_skew_form(const Rotation& Rs, const Rotation& Rd,
                    const Vec3& Kp_diag) {
  const Mat3 A = Kp_diag.asDiagonal() * (Rd.matrix().transpose() * Rs.matrix());
  return vee(A - A.transpose());
}

}  // namespace detail

Vec3 grad_trace_potential(const Rotation& Rs, const Rotation& Rd,
                          const Vec3& Kp_diag) {
  const Vec3 sum = detail::grad_sum_form(Rs, Rd, Kp_diag);
  const Vec3 skew = detail::grad_skew_form(Rs, Rd, Kp_diag);
  if ((sum - skew).norm() > 1e-8) {
    throw Error("gradient form inconsistency");
  }
  return skew;
}

Vec3 velocity_error(const Rotation& Rs, const Vec3& omega, const Rotation& Rd,
                    const Vec3& omega_d) {
  return omega - Rs.matrix().transpose() * (Rd * omega_d);
}

Vec3 connection_product(const Mat3& M, const Vec3& xi, const Vec3& eta) {
  if ((M - M.transpose()).norm() > 1e-12 * (1.0 + M.norm())) {
    throw Error("metric not positive definite");
  }
  const Eigen::LLT<Mat3> llt(M);
  if (llt.info() != Eigen::Success) {
    throw Error("metric not positive definite");
  }
  return llt.solve(0.5 * (xi.cross(M * eta) + eta.cross(M * xi)));
}

Vec3 feedforward(const RobotParams& p, const RobotState& s,
                 const DesiredFrame& d) {
  const Mat3 M = lock_inertia(p, s.gamma);
  const Mat3 ReT = s.R.matrix().transpose() * d.R_d.matrix();
  const Vec3 w = ReT * d.omega_d;
  const Vec3& om = s.omega;
  // M (conn(om, w) + w x om + R_e^T omega_d_dot), expanded.
  return 0.5 * om.cross(M * w) - 0.5 * (M * om).cross(w) - M * om.cross(w) +
         M * (ReT * d.omega_d_dot);
}

double tracking_energy(const RobotParams& p, const RobotState& s,
                       const DesiredFrame& d, const Vec3& Kp_diag) {
  const Vec3 e = velocity_error(s.R, s.omega, d.R_d, d.omega_d);
  return trace_potential(s.R, d.R_d, Kp_diag) +
         0.5 * e.dot(lock_inertia(p, s.gamma) * e);
}

double error_norm(const Rotation& Rs, const Rotation& Rd, const Vec3& Kp_diag) {
  // Clamp the O(1e-16) negative values that appear at R_s = R_d.
  return std::sqrt(std::max(0.0, trace_potential(Rs, Rd, Kp_diag)));
}

double position_potential(const Vec3& x, const Vec3& x_d) {
  return 0.5 * (x - x_d).squaredNorm();
}

Vec3 position_gradient_term(const Rotation& Rs, const Vec3& x, const Vec3& x_d,
                            double r) {
  return r * (Rs.matrix().transpose() * Vec3::UnitZ().cross(x - x_d));
}

double position_energy(const RobotParams& p, const RobotState& s,
                       const DesiredFrame& d) {
  const Vec3 e = velocity_error(s.R, s.omega, d.R_d, d.omega_d);
  return position_potential(s.x, d.x_d) +
         0.5 * e.dot(lock_inertia(p, s.gamma) * e);
}

Mat3 hessian_trace_potential(const Rotation& Rs, const Rotation& Rd,
                             const Vec3& Kp_diag) {
  // V(Rs exp(hat(eps))) = trace(Kp (I - R_e exp(hat(eps)))); the quadratic
  // term of exp is hat(eps)^2 / 2, whose mixed partials are
  // (E_i E_j + E_j E_i) / 2 with E_i = hat(e_i).
  const Mat3 A = Kp_diag.asDiagonal() * (Rd.matrix().transpose() * Rs.matrix());
  Mat3 h;
  for (int i = 0; i < 3; ++i) {
    const Mat3 Ei = hat(Vec3::Unit(i));
    for (int j = i; j < 3; ++j) {
      const Mat3 Ej = hat(Vec3::Unit(j));
      h(i, j) = -0.5 * (A * (Ei * Ej + Ej * Ei)).trace();
      h(j, i) = h(i, j);
    }
  }
  return h;
}

}  // namespace rollctl
