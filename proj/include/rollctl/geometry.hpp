#pragma once

#include "rollctl/liegroup.hpp"
#include "rollctl/model.hpp"

namespace rollctl {

/// Feedback gains shared by the orientation and position laws.
struct Gains {
  Vec3 Kp_diag{2.0, 8.0, 1.0};  ///< trace-potential weights, pairwise distinct
  double Kv = 0.5;              ///< orientation damping
  double kp = 1.0;              ///< position stiffness
  double kd = 0.1;              ///< position damping
  double alpha = 0.0;           ///< desired vertical spin rate [rad/s]

  Mat3 Kp() const { return Kp_diag.asDiagonal(); }
  void validate() const;
};

/// Reference at one time instant. omega_d and omega_d_dot are expressed in
/// the desired body frame; only R_d * omega_d enters the position laws.
struct DesiredFrame {
  Rotation R_d;
  Vec3 omega_d = Vec3::Zero();
  Vec3 omega_d_dot = Vec3::Zero();
  Vec3 x_d = Vec3::Zero();
  Vec3 x_d_dot = Vec3::Zero();
};

/// V = trace(Kp (I - R_d^T R_s)).
double trace_potential(const Rotation& Rs, const Rotation& Rd,
                       const Vec3& Kp_diag);

/// Body-frame differential dV with d/de V(Rs exp(e hat(eta))) = dV . eta.
/// Evaluates the sum form and the skew form and throws
/// Error("gradient form inconsistency") if they differ by more than 1e-8.
Vec3 grad_trace_potential(const Rotation& Rs, const Rotation& Rd,
                          const Vec3& Kp_diag);

namespace detail {
/// sum_i lambda_i (R_e^T e_i) x e_i
Vec3 grad_sum_form(const Rotation& Rs, const Rotation& Rd, const Vec3& Kp_diag);
/// vee(Kp R_e - R_e^T Kp)
Vec3 grad_skew_form(const Rotation& Rs, const Rotation& Rd,
                    const Vec3& Kp_diag);
}  // namespace detail

/// e_w = omega - R_e^T omega_d, with R_e = R_d^T R_s.
Vec3 velocity_error(const Rotation& Rs, const Vec3& omega, const Rotation& Rd,
                    const Vec3& omega_d);

/// Bilinear part of the connection: M^-1 (xi x M eta + eta x M xi) / 2.
/// Throws Error("metric not positive definite") for a non-SPD M.
Vec3 connection_product(const Mat3& M, const Vec3& xi, const Vec3& eta);

/// Metric-scaled covariant derivative of the transported reference velocity
/// w = R_e^T omega_d along the shell velocity:
///   f_FF = M (dw/dt + conn(omega, w)),  dw/dt = w x omega + R_e^T omega_d_dot.
Vec3 feedforward(const RobotParams& p, const RobotState& s,
                 const DesiredFrame& d);

/// H = V + 1/2 e_w^T M e_w.
double tracking_energy(const RobotParams& p, const RobotState& s,
                       const DesiredFrame& d, const Vec3& Kp_diag);

/// E_R = sqrt(V).
double error_norm(const Rotation& Rs, const Rotation& Rd, const Vec3& Kp_diag);

/// V1 = 1/2 |x - x_d|^2.
double position_potential(const Vec3& x, const Vec3& x_d);

/// r R_s^T (e3 x (x - x_d)). Along rolling motion V1_dot = term . e_w.
Vec3 position_gradient_term(const Rotation& Rs, const Vec3& x, const Vec3& x_d,
                            double r);

/// H = V1 + 1/2 e_w^T M e_w.
double position_energy(const RobotParams& p, const RobotState& s,
                       const DesiredFrame& d);

/// Second derivatives of eps -> V(Rs exp(hat(eps))) at eps = 0.
Mat3 hessian_trace_potential(const Rotation& Rs, const Rotation& Rd,
                             const Vec3& Kp_diag);

}  // namespace rollctl
