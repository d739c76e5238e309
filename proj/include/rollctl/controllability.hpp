#pragma once

#include <array>
#include <functional>
#include <vector>

#include "rollctl/control.hpp"
#include "rollctl/geometry.hpp"
#include "rollctl/model.hpp"

namespace rollctl {

/// A vector field written in local coordinates z around an evaluation point
/// (z = 0 is the point itself). Rotations are charted by R exp(hat(xi)).
using CoordinateField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Mechanical connection A(G) = (I_s + J - m_T r^2 hat(G)hat(G))^-1 J. At zero
/// shell momentum omega = -A(G) theta_dot.
Mat3 mechanical_connection(const RobotParams& p, const Vec3& gamma);

/// Input fields of the attitude subsystem on SO(3) x R^3, as 6-vectors
/// (body rotation slot, omega slot): g_i = (0, -M^-1 e_i).
std::array<Eigen::Matrix<double, 6, 1>, 3> input_fields(const RobotParams& p,
                                                        const RobotState& s);

/// Attitude R with R^T e3 = gamma, obtained by the shortest rotation.
Rotation frame_from_gamma(const Vec3& gamma);

using FiberVector = Eigen::Matrix<double, 8, 1>;

/// Zero-momentum fields on SO(3) x Q_s x R^2 as 8-vectors
/// (body rotation, rotor shape, planar contact velocity):
///   g_i = (-A e_i, e_i, [(R (-A e_i)) x r e3]_xy).
std::array<FiberVector, 3> fiber_fields(const RobotParams& p, const Rotation& R);
std::array<FiberVector, 3> fiber_fields(const RobotParams& p,
                                        const Vec3& gamma);

/// Jacobian-Lie bracket [X, Y](z) = DY(z) X(z) - DX(z) Y(z), the derivative
/// of the flow pull-back of Y along X. Directional derivatives are central
/// differences with step h and one Richardson level. Throws
/// Error("bracket step underflow") for h outside [1e-10, 1).
Eigen::VectorXd lie_bracket_numeric(const CoordinateField& X,
                                    const CoordinateField& Y,
                                    const Eigen::VectorXd& z, double h = 1e-4);

struct RankResult {
  int rank = 0;
  double min_singular = 0.0;
  double max_singular = 0.0;
};

/// SVD rank with singular values below rel_tol * sigma_max treated as zero.
RankResult numerical_rank(const Eigen::MatrixXd& columns,
                          double rel_tol = 1e-8);

/// Closed-loop drift F_cl and input fields g_i of the attitude subsystem in
/// the chart (xi, v) -> (R exp(hat(xi)), omega + v) around s. Rotor rates and
/// the reference are frozen at their current values.
struct AttitudeFields {
  CoordinateField drift;
  std::array<CoordinateField, 3> inputs;
};
AttitudeFields attitude_fields(const RobotParams& p, const RobotState& s,
                               const DesiredFrame& d, const Gains& g);

/// Rank of {g_i, [F_cl, g_i]} for arbitrary charted fields.
RankResult local_rank_from_fields(const AttitudeFields& f, double h = 1e-4);

/// Rank of {g_1, g_2, g_3, [F_cl, g_1], [F_cl, g_2], [F_cl, g_3]} at s.
/// Defaults use the stabilization reference R_d = I, omega_d = 0.
RankResult local_rank(const RobotParams& p, const RobotState& s,
                      const DesiredFrame& d = {}, const Gains& g = {},
                      double h = 1e-4);

/// Charted fiber fields around R (chart z = (xi, dtheta, dx) in R^8).
std::array<CoordinateField, 3> fiber_coordinate_fields(const RobotParams& p,
                                                       const Rotation& R);

/// Rank of {g1, g2, g3, [g1, g2], [g1, g3]} restricted to the fiber
/// directions so(3) + R^2.
RankResult fiber_rank(const RobotParams& p, const Rotation& R, double h = 1e-4);
RankResult fiber_rank(const RobotParams& p, const Vec3& gamma,
                      double h = 1e-4);

/// Fiber rank for every choice of bracket pairs, for reporting.
struct FiberRankReport {
  RankResult fields_only;       ///< {g1, g2, g3}
  RankResult pair_12_13;        ///< the certificate set
  RankResult pair_12_23;
  RankResult pair_13_23;
  RankResult all_pairs;
};
FiberRankReport fiber_rank_report(const RobotParams& p, const Rotation& R,
                                  double h = 1e-4);

}  // namespace rollctl
