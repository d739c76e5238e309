#include <gtest/gtest.h>

#include <random>

#include "rollctl/checks.hpp"
#include "rollctl/control.hpp"
#include "rollctl/presets.hpp"

using namespace rollctl;

namespace {

const RobotParams kRobot;

Vec3 randn3(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n;
  return scale * Vec3(n(rng), n(rng), n(rng));
}

}  // namespace

TEST(OrientationLaw, ZeroAtTarget) {
  std::mt19937_64 rng(1);
  RobotState s = random_state(rng);
  s.omega.setZero();
  DesiredFrame d;
  d.R_d = s.R;
  EXPECT_LT(orientation_tracking_law(kRobot, s, d, Gains{}).norm(), 1e-14);
}

TEST(OrientationLaw, StabilizationIsGradientPlusDamping) {
  std::mt19937_64 rng(2);
  const Gains g;
  for (int i = 0; i < 20; ++i) {
    const RobotState s = random_state(rng);
    DesiredFrame d;
    d.R_d = random_rotation(rng);
    const Vec3 expected = grad_trace_potential(s.R, d.R_d, g.Kp_diag) + g.Kv * s.omega;
    EXPECT_LT((orientation_tracking_law(kRobot, s, d, g) - expected).norm(), 1e-14);
  }
}

TEST(OrientationLaw, EnergyRateIsMinusKvOmegaSquared) {
  // H_dot from the dynamics, evaluated exactly through a directional
  // derivative of H along the closed-loop vector field.
  std::mt19937_64 rng(3);
  const Gains g;
  for (int i = 0; i < 20; ++i) {
    const RobotState s = random_state(rng);
    DesiredFrame d;
    d.R_d = random_rotation(rng);
    const Vec3 u = orientation_tracking_law(kRobot, s, d, g);
    const VelocityRates r = dynamics_velocity_form(kRobot, s, u);
    const double h = 1e-6;
    auto H = [&](double e) {
      RobotState q = s;
      q.R = s.R * exp_so3(e * s.omega);
      q.omega = s.omega + e * r.omega_dot;
      q.gamma = q.R.matrix().transpose() * Vec3::UnitZ();
      return tracking_energy(kRobot, q, d, g.Kp_diag);
    };
    const double Hdot = (H(h) - H(-h)) / (2 * h);
    EXPECT_NEAR(Hdot, -g.Kv * s.omega.squaredNorm(), 1e-6 * (1 + s.omega.squaredNorm()));
  }
}

TEST(PositionLaw, ZeroAtTarget) {
  RobotState s;
  s.x = {1, 2, 0};
  DesiredFrame d;
  d.x_d = s.x;
  EXPECT_EQ(position_tracking_law(kRobot, s, d, Gains{}), Vec3::Zero());
}

TEST(PositionLaw, RestReferenceForm) {
  std::mt19937_64 rng(4);
  Gains g;
  g.kp = 2.5;
  g.kd = 0.3;
  for (int i = 0; i < 20; ++i) {
    const RobotState s = random_state(rng);
    DesiredFrame d;
    d.x_d = {0.5, -1, 0};
    const Vec3 term = kRobot.r * (s.R.matrix().transpose() * Vec3::UnitZ().cross(s.x - d.x_d));
    const Vec3 expected = g.kp * term + g.kd * s.omega;
    EXPECT_LT((position_tracking_law(kRobot, s, d, g) - expected).norm(), 1e-14);
  }
}

TEST(PositionLaw, EnergyRateIsMinusKdOmegaSquaredAtUnitKp) {
  std::mt19937_64 rng(5);
  const Gains g;  // kp = 1
  for (int i = 0; i < 20; ++i) {
    const RobotState s = random_state(rng);
    const DesiredFrame d;
    const Vec3 u = position_tracking_law(kRobot, s, d, g);
    const VelocityRates r = dynamics_velocity_form(kRobot, s, u);
    const double h = 1e-6;
    auto H = [&](double e) {
      RobotState q = s;
      q.R = s.R * exp_so3(e * s.omega);
      q.omega = s.omega + e * r.omega_dot;
      q.x = s.x + e * r.x_dot;
      q.gamma = q.R.matrix().transpose() * Vec3::UnitZ();
      return position_energy(kRobot, q, d);
    };
    const double Hdot = (H(h) - H(-h)) / (2 * h);
    EXPECT_NEAR(Hdot, -g.kd * s.omega.squaredNorm(), 1e-6 * (1 + s.omega.squaredNorm()));
  }
}

TEST(PositionLaw, RecordedEnergyRateAlongClosedLoop) {
  ScenarioConfig c = make_preset("position_stab");
  c.duration = 10.0;
  EXPECT_LE(scaled_dissipation_residual(run_scenario(c)), 1e-4);
}

TEST(ReducedAttitudeLaw, ZeroAlphaIsPositionStabilization) {
  std::mt19937_64 rng(6);
  Gains g;
  g.alpha = 0.0;
  for (int i = 0; i < 20; ++i) {
    const RobotState s = random_state(rng);
    EXPECT_LT((reduced_attitude_law(kRobot, s, g) -
               position_tracking_law(kRobot, s, DesiredFrame{}, g))
                  .norm(),
              1e-14);
  }
}

TEST(ReducedAttitudeLaw, EqualsPositionLawWithVerticalSpinReference) {
  std::mt19937_64 rng(7);
  Gains g;
  g.alpha = 1.3;
  for (int i = 0; i < 20; ++i) {
    const RobotState s = random_state(rng);
    DesiredFrame d;
    d.omega_d = g.alpha * Vec3::UnitZ();
    EXPECT_LT((reduced_attitude_law(kRobot, s, g) - position_tracking_law(kRobot, s, d, g)).norm(),
              1e-13);
  }
}

TEST(ReducedAttitudeLaw, ZeroOnSpinningEquilibria) {
  Gains g;
  g.alpha = 1.0;
  RobotState s;
  s.omega = Vec3::UnitZ();
  EXPECT_LT(reduced_attitude_law(kRobot, s, g).norm(), 1e-16);
  // The same holds for a tilted body axis: every x = 0, omega = alpha G is a
  // closed-loop equilibrium.
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    RobotState q = random_state(rng);
    q.x.setZero();
    q.omega = g.alpha * q.gamma;
    EXPECT_LT(reduced_attitude_law(kRobot, q, g).norm(), 1e-14);
    EXPECT_LT(dynamics_velocity_form(kRobot, q, Vec3::Zero()).gamma_dot.norm(), 1e-15);
  }
}

TEST(Laws, LipschitzNearTargets) {
  std::mt19937_64 rng(9);
  const Gains g;
  RobotState s;
  DesiredFrame d;
  for (int i = 0; i < 50; ++i) {
    RobotState q = s;
    const double eps = 1e-6;
    q.R = exp_so3(randn3(rng, eps));
    q.gamma = q.R.matrix().transpose() * Vec3::UnitZ();
    q.omega = randn3(rng, eps);
    q.x = Vec3(randn3(rng, eps).x(), randn3(rng, eps).y(), 0);
    EXPECT_LT(orientation_tracking_law(kRobot, q, d, g).norm(), 100 * eps);
    EXPECT_LT(position_tracking_law(kRobot, q, d, g).norm(), 100 * eps);
    EXPECT_LT(reduced_attitude_law(kRobot, q, g).norm(), 100 * eps);
  }
}

TEST(TorqueTransform, UprightAxisValue) {
  const Mat3 D = torque_transform_matrix(kRobot, Vec3::UnitZ());
  const double expected = 6.72e-5 * (1 - 6.72e-5 / (0.0153 + 6.72e-5));
  EXPECT_NEAR(D(2, 2), expected, 1e-18);
  EXPECT_NEAR(D(2, 2), 6.6906e-5, 5e-9);
}

TEST(TorqueTransform, RoundTripAndDefinite) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 100; ++i) {
    const Vec3 gm = random_unit(rng);
    const Mat3 D = torque_transform_matrix(kRobot, gm);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Mat3>(D).eigenvalues().minCoeff(), 0.0);
    const Vec3 u = randn3(rng);
    EXPECT_LT((torque_transform_inverse(kRobot, gm, torque_transform(kRobot, gm, u)) - u).norm(),
              1e-12 * u.norm());
  }
}
