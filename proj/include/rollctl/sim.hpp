#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "rollctl/control.hpp"
#include "rollctl/geometry.hpp"
#include "rollctl/model.hpp"

namespace rollctl {

// ---------------------------------------------------------------------------
// Integrator
// ---------------------------------------------------------------------------

using StateVector = Eigen::Matrix<double, 15, 1>;

/// Point of SO(3) x R^15.
struct GroupState {
  Rotation R;
  StateVector y = StateVector::Zero();
};

/// Tangent at a GroupState; the attitude moves as R_dot = R hat(body_velocity).
struct GroupRate {
  Vec3 body_velocity = Vec3::Zero();
  StateVector y_dot = StateVector::Zero();
};

using GroupRhs = std::function<GroupRate(double t, const GroupState&)>;

/// One fourth-order Runge-Kutta-Munthe-Kaas step. The vector part takes the
/// classical RK4 update; the attitude is advanced multiplicatively,
/// R <- proj(R exp(dt * w_bar)), where w_bar is the RK4 average of stage
/// body velocities mapped through the truncated inverse dexp. Throws
/// Error("dynamics blow-up at t = ...") on non-finite rates.
GroupState rk4_step(const GroupRhs& rhs, const GroupState& s, double t,
                    double dt);

/// Packing of the two state forms into GroupState.
///   momentum: y = (Pi_s, Pi_rotor, theta, x, gamma)
///   velocity: y = (omega, theta, theta_dot, x, gamma)
GroupState pack(const MomentumState& s);
GroupState pack(const RobotState& s);
MomentumState unpack_momentum(const GroupState& g);
RobotState unpack_velocity(const GroupState& g);

// ---------------------------------------------------------------------------
// References
// ---------------------------------------------------------------------------

/// R_d(t) = exp(2 pi (1 - cos(pi t)) e2) with analytic omega_d, omega_d_dot.
DesiredFrame orientation_sinusoid(double t);

/// Frame for a planar contact-point path. R_d = I and the inertial angular
/// velocity is the no-spin solution of x_d_dot = w x r e3:
/// w = e3 x x_d_dot / r. Throws Error("non-planar reference velocity") if
/// x_d_dot or x_d_ddot has a vertical component.
DesiredFrame planar_curve(const Vec3& x_d, const Vec3& x_d_dot,
                          const Vec3& x_d_ddot, double r);

struct RestReference {};
struct OrientationConstant {
  Rotation R_d;
};
struct OrientationSinusoid {};
/// x_d = (radius sin(rate t), radius cos(rate t)).
struct CircleReference {
  double radius = 0.176;
  double rate = 1.0;
};
/// x_d = offset + velocity t.
struct LineReference {
  Eigen::Vector2d velocity{0.2, 0.3};
  Eigen::Vector2d offset{0.4, 0.6};
};
using Reference = std::variant<RestReference, OrientationConstant,
                               OrientationSinusoid, CircleReference,
                               LineReference>;

/// Evaluates a reference. Planar references place x_d at centre height
/// `height`.
DesiredFrame reference_at(const Reference& ref, double t, double r,
                          double height);

bool is_orientation_reference(const Reference& ref);

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

/// Piecewise-linear torque schedule, held constant outside its time range.
struct TorqueTable {
  std::vector<double> t;
  std::vector<Vec3> u;
  Vec3 at(double time) const;
};

struct OrientationTracking {};
struct PositionTracking {};
struct ReducedAttitude {};  ///< spin rate from Gains::alpha
struct OpenLoop {
  TorqueTable torque;
};
using Controller = std::variant<OrientationTracking, PositionTracking,
                                ReducedAttitude, OpenLoop>;

struct ScenarioConfig {
  std::string name = "scenario";
  RobotParams params;
  Gains gains;
  Reference reference = RestReference{};
  Controller controller = OpenLoop{};
  RobotState init;
  double dt = 1e-3;
  double duration = 10.0;
  std::uint64_t seed = 0;

  /// Throws Error naming the first violated invariant.
  void validate() const;
  std::size_t row_count() const;
};

/// Reference seen by the controller and the energy function at time t.
DesiredFrame scenario_frame(const ScenarioConfig& c, const RobotState& s,
                            double t);

/// Rotor torque commanded at (t, s).
Vec3 scenario_control(const ScenarioConfig& c, const RobotState& s, double t);

/// Energy H used for the scenario's diagnostics and the damping gain that
/// multiplies |e_w|^2 in its dissipation identity.
double scenario_energy(const ScenarioConfig& c, const RobotState& s, double t);
double scenario_damping(const ScenarioConfig& c);

struct TrajectoryRow {
  double t = 0.0;
  Vec3 omega, theta, theta_dot, x;
  Mat3 R;
  Vec3 gamma, u;
  double H = 0.0;
  double E_R = 0.0;
  Vec3 pi_s;
  double rho = 0.0;
  Vec3 e_omega;
  double gamma_norm_residual = 0.0;   ///< | |G| - 1 |
  double gamma_frame_residual = 0.0;  ///< |G - R^T e3|
};

struct TrajectoryRecord {
  std::string name;
  double dt = 0.0;
  std::vector<TrajectoryRow> rows;
};

enum class DynamicsForm { Momentum, Velocity };

/// Integrates the closed loop from c.init, evaluating the controller at every
/// stage, and records one row per step. rho = H_dot + k |e_w|^2 with H_dot
/// from five-point central differences of the recorded H (one-sided five-point
/// stencils at the ends).
TrajectoryRecord run_scenario(const ScenarioConfig& c,
                              DynamicsForm form = DynamicsForm::Momentum);

/// Runs scenarios concurrently on at most max_threads threads (0 = hardware
/// concurrency). Results keep the input order.
std::vector<TrajectoryRecord> run_batch(const std::vector<ScenarioConfig>& cs,
                                        unsigned max_threads = 0);

/// Thread cap from ROLLCTL_THREADS, or 0 when unset or invalid.
unsigned thread_cap_from_env();

struct DiagnosticsReport {
  bool empty = true;
  std::size_t rows = 0;
  double max_pi_drift = 0.0;
  double max_gamma_norm_residual = 0.0;
  double max_gamma_frame_residual = 0.0;
  double max_x3_drift = 0.0;
  double rho_max_abs = 0.0;
  double rho_rms = 0.0;
  double final_E_R = 0.0;
  double final_H = 0.0;
  double final_position_error = 0.0;  ///< planar distance to x_d at the end
  std::size_t H_increases = 0;        ///< steps after transient with H up
  double max_H_increase = 0.0;
};

/// Summary statistics; `x_d_final` is the planar target at the last row and
/// H monotonicity is checked for rows with t >= transient.
DiagnosticsReport diagnostics(const TrajectoryRecord& rec,
                              const Vec3& x_d_final = Vec3::Zero(),
                              double transient = 0.0,
                              double monotone_tol = 1e-9);

std::string format_report(const DiagnosticsReport& r);

/// CSV with the fixed header
/// t,w1,w2,w3,th1,th2,th3,thd1,thd2,thd3,x,y,z,R11..R33,g1,g2,g3,u1,u2,u3,
/// H,E_R,pi1,pi2,pi3,rho. Numbers use the shortest round-trip form.
void write_csv(const TrajectoryRecord& rec, std::ostream& os);
std::string csv_header();

}  // namespace rollctl
