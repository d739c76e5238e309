#include "rollctl/controllability.hpp"

#include <cmath>

namespace rollctl {

namespace {

// Inverse right Jacobian of exp: xi_dot = jr_inv(xi) * body_velocity for
// R(t) = R0 exp(hat(xi(t))).
Mat3 jr_inv(const Vec3& xi) {
  const double theta = xi.norm();
  const Mat3 k = hat(xi);
  double c;
  if (theta < 1e-6) {
    c = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    c = 1.0 / (theta * theta) -
        (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  }
  return Mat3::Identity() + 0.5 * k + c * k * k;
}

Eigen::VectorXd directional_derivative(const CoordinateField& F,
                                       const Eigen::VectorXd& z,
                                       const Eigen::VectorXd& v, double h) {
  const double n = v.norm();
  if (n == 0.0) {
    return Eigen::VectorXd::Zero(F(z).size());
  }
  const Eigen::VectorXd dir = v / n;
  auto central = [&](double step) -> Eigen::VectorXd {
    return (F(z + step * dir) - F(z - step * dir)) / (2.0 * step);
  };
  return n * (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

}  // namespace

Mat3 mechanical_connection(const RobotParams& p, const Vec3& gamma) {
  const Mat3 locked = lock_inertia(p, gamma) + p.rotor_inertia();
  return locked.llt().solve(p.rotor_inertia());
}

std::array<Eigen::Matrix<double, 6, 1>, 3> input_fields(const RobotParams& p,
                                                        const RobotState& s) {
  const Mat3 Minv = lock_inertia(p, s.gamma).inverse();
  std::array<Eigen::Matrix<double, 6, 1>, 3> g;
  for (int i = 0; i < 3; ++i) {
    g[i] << Vec3::Zero(), -Minv.col(i);
  }
  return g;
}

Rotation frame_from_gamma(const Vec3& gamma) {
  const Vec3 n = gamma.normalized();
  const Vec3 axis = n.cross(Vec3::UnitZ());
  const double s = axis.norm();
  const double c = n.z();
  if (s < 1e-12) {
    return c > 0 ? Rotation::identity() : elem_rot(1, M_PI);
  }
  // R maps gamma onto e3, so R^T e3 = gamma.
  return exp_so3(axis / s * std::atan2(s, c));
}

std::array<FiberVector, 3> fiber_fields(const RobotParams& p,
                                        const Rotation& R) {
  const Vec3 gamma = R.matrix().transpose() * Vec3::UnitZ();
  const Mat3 A = mechanical_connection(p, gamma);
  std::array<FiberVector, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Vec3 om = -A.col(i);
    const Vec3 xdot = rolling_velocity(R, om, p.r);
    g[i] << om, Vec3::Unit(i), xdot.head<2>();
  }
  return g;
}

std::array<FiberVector, 3> fiber_fields(const RobotParams& p,
                                        const Vec3& gamma) {
  return fiber_fields(p, frame_from_gamma(gamma));
}

Eigen::VectorXd lie_bracket_numeric(const CoordinateField& X,
                                    const CoordinateField& Y,
                                    const Eigen::VectorXd& z, double h) {
  if (!(h >= 1e-10 && h < 1.0)) {
    throw Error("bracket step underflow");
  }
  const Eigen::VectorXd x = X(z);
  const Eigen::VectorXd y = Y(z);
  return directional_derivative(Y, z, x, h) - directional_derivative(X, z, y, h);
}

RankResult numerical_rank(const Eigen::MatrixXd& columns, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(columns);
  const Eigen::VectorXd& sv = svd.singularValues();
  RankResult r;
  if (sv.size() == 0) {
    return r;
  }
  r.max_singular = sv(0);
  r.min_singular = sv(sv.size() - 1);
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) {
      ++r.rank;
    }
  }
  return r;
}

AttitudeFields attitude_fields(const RobotParams& p, const RobotState& s,
                               const DesiredFrame& d, const Gains& g) {
  // State at chart coordinates z = (xi, v).
  auto at = [p, s](const Eigen::VectorXd& z) {
    RobotState q = s;
    q.R = s.R * exp_so3(z.head<3>());
    q.omega = s.omega + z.tail<3>();
    q.gamma = q.R.matrix().transpose() * Vec3::UnitZ();
    return q;
  };
  AttitudeFields f;
  f.drift = [p, d, g, at](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    const RobotState q = at(z);
    const Mat3 M = lock_inertia(p, q.gamma);
    // Conservative part of the orientation law: u = dV - f_FF.
    const Vec3 u0 =
        grad_trace_potential(q.R, d.R_d, g.Kp_diag) - feedforward(p, q, d);
    const Vec3 gyro =
        (p.shell_inertia() * q.omega + p.rotor_inertia() * q.theta_dot)
            .cross(q.omega);
    Eigen::VectorXd out(6);
    out << jr_inv(z.head<3>()) * q.omega, M.llt().solve(gyro - u0);
    return out;
  };
  for (int i = 0; i < 3; ++i) {
    f.inputs[i] = [p, at, i](const Eigen::VectorXd& z) -> Eigen::VectorXd {
      const RobotState q = at(z);
      Eigen::VectorXd out(6);
      out << Vec3::Zero(), -lock_inertia(p, q.gamma).llt().solve(Vec3::Unit(i));
      return out;
    };
  }
  return f;
}

RankResult local_rank_from_fields(const AttitudeFields& f, double h) {
  const Eigen::VectorXd z0 = Eigen::VectorXd::Zero(6);
  Eigen::MatrixXd cols(6, 6);
  for (int i = 0; i < 3; ++i) {
    cols.col(i) = f.inputs[i](z0);
    cols.col(3 + i) = lie_bracket_numeric(f.drift, f.inputs[i], z0, h);
  }
  return numerical_rank(cols);
}

RankResult local_rank(const RobotParams& p, const RobotState& s,
                      const DesiredFrame& d, const Gains& g, double h) {
  return local_rank_from_fields(attitude_fields(p, s, d, g), h);
}

std::array<CoordinateField, 3> fiber_coordinate_fields(const RobotParams& p,
                                                       const Rotation& R) {
  std::array<CoordinateField, 3> out;
  for (int i = 0; i < 3; ++i) {
    out[i] = [p, R, i](const Eigen::VectorXd& z) -> Eigen::VectorXd {
      const Vec3 xi = z.head<3>();
      const FiberVector gi = fiber_fields(p, R * exp_so3(xi))[i];
      Eigen::VectorXd v = gi;
      v.head<3>() = jr_inv(xi) * gi.head<3>();
      return v;
    };
  }
  return out;
}

namespace {

Eigen::VectorXd fiber_part(const Eigen::VectorXd& v) {
  Eigen::VectorXd out(5);
  out << v.head<3>(), v.tail<2>();
  return out;
}

RankResult fiber_rank_of(const std::array<CoordinateField, 3>& g,
                         const std::vector<std::pair<int, int>>& pairs,
                         double h) {
  const Eigen::VectorXd z0 = Eigen::VectorXd::Zero(8);
  Eigen::MatrixXd cols(5, 3 + static_cast<Eigen::Index>(pairs.size()));
  for (int i = 0; i < 3; ++i) {
    cols.col(i) = fiber_part(g[i](z0));
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [a, b] = pairs[k];
    cols.col(3 + static_cast<Eigen::Index>(k)) =
        fiber_part(lie_bracket_numeric(g[a], g[b], z0, h));
  }
  return numerical_rank(cols);
}

}  // namespace

RankResult fiber_rank(const RobotParams& p, const Rotation& R, double h) {
  return fiber_rank_of(fiber_coordinate_fields(p, R), {{0, 1}, {0, 2}}, h);
}

RankResult fiber_rank(const RobotParams& p, const Vec3& gamma, double h) {
  return fiber_rank(p, frame_from_gamma(gamma), h);
}

FiberRankReport fiber_rank_report(const RobotParams& p, const Rotation& R,
                                  double h) {
  const auto g = fiber_coordinate_fields(p, R);
  FiberRankReport r;
  r.fields_only = fiber_rank_of(g, {}, h);
  r.pair_12_13 = fiber_rank_of(g, {{0, 1}, {0, 2}}, h);
  r.pair_12_23 = fiber_rank_of(g, {{0, 1}, {1, 2}}, h);
  r.pair_13_23 = fiber_rank_of(g, {{0, 2}, {1, 2}}, h);
  r.all_pairs = fiber_rank_of(g, {{0, 1}, {0, 2}, {1, 2}}, h);
  return r;
}

}  // namespace rollctl
