#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "rollctl/checks.hpp"
#include "rollctl/geometry.hpp"
#include "rollctl/sim.hpp"

using namespace rollctl;
using std::numbers::pi;

namespace {

const RobotParams kRobot;
const Vec3 kKp(2.0, 8.0, 1.0);

Vec3 randn3(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n;
  return scale * Vec3(n(rng), n(rng), n(rng));
}

}  // namespace

TEST(Gains, Validation) {
  EXPECT_NO_THROW(Gains{}.validate());
  Gains g;
  g.Kp_diag = {2, 2, 1};
  EXPECT_THROW(g.validate(), Error);
  g = Gains{};
  g.Kv = 0;
  EXPECT_THROW(g.validate(), Error);
  g = Gains{};
  g.kd = -1;
  EXPECT_THROW(g.validate(), Error);
}

TEST(TracePotential, Examples) {
  std::mt19937_64 rng(1);
  const Rotation R = random_rotation(rng);
  EXPECT_NEAR(trace_potential(R, R, kKp), 0.0, 1e-14);
  EXPECT_NEAR(trace_potential(elem_rot(3, pi), Rotation::identity(), kKp), 20.0, 1e-13);
  const Rotation Rd = random_rotation(rng);
  EXPECT_NEAR(trace_potential(Rd * elem_rot(3, pi), Rd, kKp), 20.0, 1e-13);
}

TEST(TracePotential, NotRightInvariantForDistinctWeights) {
  std::mt19937_64 rng(2);
  double worst_distinct = 0.0, worst_iso = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Rotation Rs = random_rotation(rng), Rd = random_rotation(rng),
                   Q = random_rotation(rng);
    worst_distinct = std::max(
        worst_distinct, std::abs(trace_potential(Rs * Q, Rd * Q, kKp) -
                                 trace_potential(Rs, Rd, kKp)));
    worst_iso = std::max(worst_iso,
                         std::abs(trace_potential(Rs * Q, Rd * Q, Vec3::Constant(3)) -
                                  trace_potential(Rs, Rd, Vec3::Constant(3))));
  }
  EXPECT_GT(worst_distinct, 0.1);
  EXPECT_LT(worst_iso, 1e-12);
}

TEST(TracePotential, NonnegativeAndZeroOnlyAtTarget) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Rotation Rs = random_rotation(rng), Rd = random_rotation(rng);
    EXPECT_GT(trace_potential(Rs, Rd, kKp), 0.0);
  }
}

TEST(GradTracePotential, Examples) {
  std::mt19937_64 rng(4);
  const Rotation R = random_rotation(rng);
  EXPECT_LT(grad_trace_potential(R, R, kKp).norm(), 1e-14);
  const Vec3 g = grad_trace_potential(elem_rot(3, pi / 2), Rotation::identity(), kKp);
  EXPECT_NEAR(std::abs(g.z()), 10.0, 1e-13);
  EXPECT_LT(g.head<2>().norm(), 1e-13);
  // V(theta) = 10 (1 - cos theta) about e3 increases with theta.
  EXPECT_GT(g.z(), 0.0);
}

TEST(GradTracePotential, MatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  EXPECT_LE(gradient_fd_error(rng, 100, 1e-5), 1e-5);
}

TEST(GradTracePotential, FormsAgree) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> lam(0.1, 10.0);
  for (int i = 0; i < 100; ++i) {
    const Rotation Rs = random_rotation(rng), Rd = random_rotation(rng);
    const Vec3 Kp(lam(rng), lam(rng), lam(rng));
    EXPECT_LT((detail::grad_sum_form(Rs, Rd, Kp) - detail::grad_skew_form(Rs, Rd, Kp)).norm(),
              1e-10);
  }
}

TEST(VelocityError, Examples) {
  std::mt19937_64 rng(7);
  const Rotation R = random_rotation(rng);
  const Vec3 w = randn3(rng), wd = randn3(rng);
  EXPECT_LT((velocity_error(R, w, R, wd) - (w - wd)).norm(), 1e-15);
  const Rotation Rd = random_rotation(rng);
  const Mat3 Re = Rd.matrix().transpose() * R.matrix();
  EXPECT_LT(velocity_error(R, Re.transpose() * wd, Rd, wd).norm(), 1e-15);
}

TEST(VelocityError, TransportedIdentity) {
  // R_s(t) = R0 exp(t w), R_d(t) from the sinusoidal reference.
  std::mt19937_64 rng(8);
  for (int i = 0; i < 10; ++i) {
    const Rotation R0 = random_rotation(rng);
    const Vec3 w = randn3(rng);
    const double t = 0.37 + 0.1 * i, h = 1e-5;
    auto Rs = [&](double s) { return (R0 * exp_so3(s * w)).matrix(); };
    auto Rd = [&](double s) { return orientation_sinusoid(s).R_d.matrix(); };
    const Mat3 Rs_dot = (Rs(t + h) - Rs(t - h)) / (2 * h);
    const Mat3 Rd_dot = (Rd(t + h) - Rd(t - h)) / (2 * h);
    const DesiredFrame d = orientation_sinusoid(t);
    const Vec3 e = velocity_error(Rotation::from_matrix(Rs(t)), w, d.R_d, d.omega_d);
    const Mat3 lhs = Rs_dot - Rd_dot * Rd(t).transpose() * Rs(t);
    EXPECT_LT((lhs - Rs(t) * hat(e)).norm(), 1e-6);
  }
}

TEST(ConnectionProduct, Properties) {
  std::mt19937_64 rng(9);
  const Mat3 M = lock_inertia(kRobot, random_unit(rng));
  const Vec3 a = randn3(rng), b = randn3(rng), c = randn3(rng);
  EXPECT_LT((connection_product(M, a, a) - M.inverse() * a.cross(M * a)).norm(), 1e-10);
  EXPECT_LT(connection_product(2.5 * Mat3::Identity(), a, b).norm(), 1e-15);
  EXPECT_LT((connection_product(M, a, b) - connection_product(M, b, a)).norm(), 1e-12);
  EXPECT_LT((connection_product(M, 2 * a + 3 * c, b) -
             2 * connection_product(M, a, b) - 3 * connection_product(M, c, b))
                .norm(),
            1e-11);
}

TEST(ConnectionProduct, RejectsIndefiniteMetric) {
  const Mat3 bad = Vec3(1, -1, 1).asDiagonal();
  try {
    connection_product(bad, Vec3::UnitX(), Vec3::UnitY());
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "metric not positive definite");
  }
}

TEST(Feedforward, VanishesForRestReference) {
  std::mt19937_64 rng(10);
  const RobotState s = random_state(rng);
  DesiredFrame d;
  d.R_d = random_rotation(rng);
  EXPECT_EQ(feedforward(kRobot, s, d), Vec3::Zero());
}

TEST(Feedforward, VanishesForAlignedVerticalSpin) {
  RobotState s;
  s.omega = Vec3::UnitZ();
  DesiredFrame d;
  d.omega_d = Vec3::UnitZ();
  EXPECT_LT(feedforward(kRobot, s, d).norm(), 1e-18);
}

TEST(Feedforward, IsMetricScaledCovariantDerivative) {
  // Along R_s(t) = R0 exp(t w) and the sinusoidal reference,
  // f_FF = M [d/dt(R_e^T w_d) + conn(w, R_e^T w_d)].
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) {
    RobotState s = random_state(rng);
    const Rotation R0 = s.R;
    const double t = 0.2 + 0.13 * i, h = 1e-5;
    auto transported = [&](double tau) {
      const Rotation Rs = R0 * exp_so3((tau - t) * s.omega);
      const DesiredFrame d = orientation_sinusoid(tau);
      const Mat3 Re = d.R_d.matrix().transpose() * Rs.matrix();
      return Vec3(Re.transpose() * d.omega_d);
    };
    const Vec3 w_dot = (transported(t + h) - transported(t - h)) / (2 * h);
    const Mat3 M = lock_inertia(kRobot, s.gamma);
    const Vec3 expected = M * (w_dot + connection_product(M, s.omega, transported(t)));
    const Vec3 ff = feedforward(kRobot, s, orientation_sinusoid(t));
    EXPECT_LT((ff - expected).norm(), 1e-6) << i;
  }
}

TEST(TrackingEnergy, Examples) {
  std::mt19937_64 rng(12);
  RobotState s = random_state(rng);
  DesiredFrame d;
  d.R_d = s.R;
  d.omega_d = velocity_error(s.R, s.omega, s.R, Vec3::Zero());
  EXPECT_NEAR(tracking_energy(kRobot, s, d, kKp), 0.0, 1e-13);

  RobotState up;
  up.omega = Vec3::UnitZ();
  EXPECT_NEAR(tracking_energy(kRobot, up, DesiredFrame{}, kKp), 0.00765, 1e-15);

  const DesiredFrame d2 = orientation_sinusoid(0.4);
  const Vec3 e = velocity_error(s.R, s.omega, d2.R_d, d2.omega_d);
  const double H = trace_potential(s.R, d2.R_d, kKp) +
                   0.5 * e.dot(lock_inertia(kRobot, s.gamma) * e);
  EXPECT_NEAR(tracking_energy(kRobot, s, d2, kKp), H, 1e-13);
}

TEST(ErrorNorm, Examples) {
  std::mt19937_64 rng(13);
  const Rotation R = random_rotation(rng);
  EXPECT_NEAR(error_norm(R, R, kKp), 0.0, 1e-7);
  EXPECT_NEAR(error_norm(elem_rot(3, pi), Rotation::identity(), kKp), 4.4721, 1e-4);
  EXPECT_NEAR(error_norm(elem_rot(3, pi), Rotation::identity(), kKp), std::sqrt(20.0), 1e-13);
}

TEST(PositionPotential, Examples) {
  EXPECT_EQ(position_potential({1, 2, 0}, {1, 2, 0}), 0.0);
  EXPECT_EQ(position_gradient_term(Rotation::identity(), {1, 2, 0}, {1, 2, 0}, 0.176),
            Vec3::Zero());
  EXPECT_LT((position_gradient_term(Rotation::identity(), {1, 0, 0}, Vec3::Zero(), 0.176) -
             Vec3(0, 0.176, 0))
                .norm(),
            1e-16);
  EXPECT_NEAR(position_potential({3, 4, 0}, Vec3::Zero()), 12.5, 1e-15);
}

TEST(PositionPotential, RateAlongRollingMotionIsTermDotError) {
  // Finite differences of V1 along a simulated circle-tracking run against
  // +term . e_w.
  ScenarioConfig c;
  c.reference = CircleReference{};
  c.controller = PositionTracking{};
  c.init.x = {0.3, -0.2, 0.0};
  c.init.omega = {0.5, -1.0, 0.3};
  c.duration = 2.0;
  const TrajectoryRecord rec = run_scenario(c);
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < rec.rows.size(); k += 10) {
    auto V1 = [&](std::size_t j) {
      const DesiredFrame d = reference_at(c.reference, rec.rows[j].t, 0.176, 0.0);
      return position_potential(rec.rows[j].x, d.x_d);
    };
    const double fd = (V1(k + 1) - V1(k - 1)) / (2 * c.dt);
    const auto& row = rec.rows[k];
    const DesiredFrame d = reference_at(c.reference, row.t, 0.176, 0.0);
    const Rotation R = Rotation::from_matrix(row.R);
    const Vec3 term = position_gradient_term(R, row.x, d.x_d, 0.176);
    worst = std::max(worst, std::abs(fd - term.dot(row.e_omega)));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(Hessian, AtTargetIsTraceMinusKp) {
  std::mt19937_64 rng(14);
  const Rotation Rd = random_rotation(rng);
  const Mat3 H = hessian_trace_potential(Rd, Rd, kKp);
  EXPECT_LT((H - Vec3(9, 3, 10).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff(), 1e-8);
  const Vec3 ev = Eigen::SelfAdjointEigenSolver<Mat3>(H).eigenvalues();
  EXPECT_GT(ev.minCoeff(), 0.0);
}

TEST(Hessian, MatchesSecondDifferencesAndIsSymmetric) {
  std::mt19937_64 rng(15);
  for (int k = 0; k < 20; ++k) {
    const Rotation Rs = random_rotation(rng), Rd = random_rotation(rng);
    const Mat3 H = hessian_trace_potential(Rs, Rd, kKp);
    EXPECT_LT((H - H.transpose()).norm(), 1e-14);
    const double h = 1e-4;
    auto V = [&](const Vec3& e) { return trace_potential(Rs * exp_so3(e), Rd, kKp); };
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const Vec3 a = h * Vec3::Unit(i), b = h * Vec3::Unit(j);
        const double fd = (V(a + b) - V(a - b) - V(b - a) + V(-a - b)) / (4 * h * h);
        EXPECT_NEAR(fd, H(i, j), 1e-4);
      }
    }
  }
}
