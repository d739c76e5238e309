#include "rollctl/sim.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace rollctl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// dexp^-1 for body-trivialized velocities, truncated after the second
// commutator (enough for fourth order).
Vec3 dexpinv(const Vec3& u, const Vec3& v) {
  const Vec3 uv = u.cross(v);
  return v + 0.5 * uv + u.cross(uv) / 12.0;
}

void require_finite(const GroupRate& k, double t) {
  if (!k.body_velocity.allFinite() || !k.y_dot.allFinite()) {
    std::ostringstream os;
    os << "dynamics blow-up at t = " << t;
    throw Error(os.str());
  }
}

}  // namespace

GroupState rk4_step(const GroupRhs& rhs, const GroupState& s, double t,
                    double dt) {
  const GroupRate k1 = rhs(t, s);
  require_finite(k1, t);
  const Vec3 K1 = k1.body_velocity;

  const Vec3 u2 = 0.5 * dt * K1;
  const GroupRate k2 =
      rhs(t + 0.5 * dt, {s.R * exp_so3(u2), s.y + 0.5 * dt * k1.y_dot});
  require_finite(k2, t + 0.5 * dt);
  const Vec3 K2 = dexpinv(u2, k2.body_velocity);

  const Vec3 u3 = 0.5 * dt * K2;
  const GroupRate k3 =
      rhs(t + 0.5 * dt, {s.R * exp_so3(u3), s.y + 0.5 * dt * k2.y_dot});
  require_finite(k3, t + 0.5 * dt);
  const Vec3 K3 = dexpinv(u3, k3.body_velocity);

  const Vec3 u4 = dt * K3;
  const GroupRate k4 = rhs(t + dt, {s.R * exp_so3(u4), s.y + dt * k3.y_dot});
  require_finite(k4, t + dt);
  const Vec3 K4 = dexpinv(u4, k4.body_velocity);

  GroupState out;
  const Vec3 w_bar = (K1 + 2.0 * K2 + 2.0 * K3 + K4) / 6.0;
  out.R = project_so3(s.R.matrix() * exp_so3(dt * w_bar).matrix());
  out.y = s.y + dt / 6.0 *
                    (k1.y_dot + 2.0 * k2.y_dot + 2.0 * k3.y_dot + k4.y_dot);
  return out;
}

GroupState pack(const MomentumState& s) {
  GroupState g;
  g.R = s.R;
  g.y << s.Pi_s, s.Pi_rotor, s.theta, s.x, s.gamma;
  return g;
}

GroupState pack(const RobotState& s) {
  GroupState g;
  g.R = s.R;
  g.y << s.omega, s.theta, s.theta_dot, s.x, s.gamma;
  return g;
}

MomentumState unpack_momentum(const GroupState& g) {
  MomentumState s;
  s.R = g.R;
  s.Pi_s = g.y.segment<3>(0);
  s.Pi_rotor = g.y.segment<3>(3);
  s.theta = g.y.segment<3>(6);
  s.x = g.y.segment<3>(9);
  s.gamma = g.y.segment<3>(12);
  return s;
}

RobotState unpack_velocity(const GroupState& g) {
  RobotState s;
  s.R = g.R;
  s.omega = g.y.segment<3>(0);
  s.theta = g.y.segment<3>(3);
  s.theta_dot = g.y.segment<3>(6);
  s.x = g.y.segment<3>(9);
  s.gamma = g.y.segment<3>(12);
  return s;
}

// ---------------------------------------------------------------------------

DesiredFrame orientation_sinusoid(double t) {
  constexpr double pi = std::numbers::pi;
  DesiredFrame d;
  d.R_d = elem_rot(2, 2.0 * pi * (1.0 - std::cos(pi * t)));
  d.omega_d = 2.0 * pi * pi * std::sin(pi * t) * Vec3::UnitY();
  d.omega_d_dot = 2.0 * pi * pi * pi * std::cos(pi * t) * Vec3::UnitY();
  return d;
}

DesiredFrame planar_curve(const Vec3& x_d, const Vec3& x_d_dot,
                          const Vec3& x_d_ddot, double r) {
  if (std::abs(x_d_dot.z()) > 1e-12 || std::abs(x_d_ddot.z()) > 1e-12) {
    throw Error("non-planar reference velocity");
  }
  DesiredFrame d;
  d.R_d = Rotation::identity();
  d.omega_d = Vec3::UnitZ().cross(x_d_dot) / r;
  d.omega_d_dot = Vec3::UnitZ().cross(x_d_ddot) / r;
  d.x_d = x_d;
  d.x_d_dot = x_d_dot;
  return d;
}

DesiredFrame reference_at(const Reference& ref, double t, double r,
                          double height) {
  return std::visit(
      overloaded{
          [&](const RestReference&) {
            return planar_curve({0.0, 0.0, height}, Vec3::Zero(),
                                Vec3::Zero(), r);
          },
          [&](const OrientationConstant& c) {
            DesiredFrame d;
            d.R_d = c.R_d;
            return d;
          },
          [&](const OrientationSinusoid&) { return orientation_sinusoid(t); },
          [&](const CircleReference& c) {
            const double a = c.rate * t;
            const double k = c.rate;
            const Vec3 x(c.radius * std::sin(a), c.radius * std::cos(a),
                         height);
            const Vec3 v(c.radius * k * std::cos(a),
                         -c.radius * k * std::sin(a), 0.0);
            const Vec3 acc(-c.radius * k * k * std::sin(a),
                           -c.radius * k * k * std::cos(a), 0.0);
            return planar_curve(x, v, acc, r);
          },
          [&](const LineReference& l) {
            const Eigen::Vector2d p = l.offset + l.velocity * t;
            return planar_curve({p.x(), p.y(), height},
                                {l.velocity.x(), l.velocity.y(), 0.0},
                                Vec3::Zero(), r);
          },
      },
      ref);
}

bool is_orientation_reference(const Reference& ref) {
  return std::holds_alternative<OrientationConstant>(ref) ||
         std::holds_alternative<OrientationSinusoid>(ref);
}

// ---------------------------------------------------------------------------

Vec3 TorqueTable::at(double time) const {
  if (t.empty()) {
    return Vec3::Zero();
  }
  if (time <= t.front()) {
    return u.front();
  }
  if (time >= t.back()) {
    return u.back();
  }
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const std::size_t i = static_cast<std::size_t>(it - t.begin());
  const double w = (time - t[i - 1]) / (t[i] - t[i - 1]);
  return (1.0 - w) * u[i - 1] + w * u[i];
}

void ScenarioConfig::validate() const {
  params.validate();
  gains.validate();
  if (!(dt > 0.0 && dt <= 0.01)) {
    throw Error("dt must lie in (0, 0.01]");
  }
  if (!(duration >= dt)) {
    throw Error("duration must be at least dt");
  }
  if (init.R.orthogonality_defect() > 1e-12) {
    throw Error("initial attitude is not a rotation");
  }
  if (std::abs(init.gamma.norm() - 1.0) > 1e-9 ||
      (init.gamma - init.R.matrix().transpose() * Vec3::UnitZ()).norm() >
          1e-8) {
    throw Error("initial gamma must equal R^T e3");
  }
  if (const auto* ol = std::get_if<OpenLoop>(&controller)) {
    const auto& tab = ol->torque;
    if (tab.t.size() != tab.u.size() ||
        !std::is_sorted(tab.t.begin(), tab.t.end()) ||
        std::adjacent_find(tab.t.begin(), tab.t.end()) != tab.t.end()) {
      throw Error("torque table must have strictly increasing times");
    }
  }
}

std::size_t ScenarioConfig::row_count() const {
  return static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
}

DesiredFrame scenario_frame(const ScenarioConfig& c, const RobotState& s,
                            double t) {
  if (std::holds_alternative<ReducedAttitude>(c.controller)) {
    DesiredFrame d;
    d.omega_d = c.gains.alpha * Vec3::UnitZ();
    d.x_d = {0.0, 0.0, s.x.z()};
    return d;
  }
  return reference_at(c.reference, t, c.params.r, c.init.x.z());
}

Vec3 scenario_control(const ScenarioConfig& c, const RobotState& s, double t) {
  return std::visit(
      overloaded{
          [&](const OrientationTracking&) {
            return orientation_tracking_law(c.params, s,
                                            scenario_frame(c, s, t), c.gains);
          },
          [&](const PositionTracking&) {
            return position_tracking_law(c.params, s, scenario_frame(c, s, t),
                                         c.gains);
          },
          [&](const ReducedAttitude&) {
            return reduced_attitude_law(c.params, s, c.gains);
          },
          [&](const OpenLoop& ol) { return ol.torque.at(t); },
      },
      c.controller);
}

double scenario_energy(const ScenarioConfig& c, const RobotState& s,
                       double t) {
  const DesiredFrame d = scenario_frame(c, s, t);
  const bool orientation =
      std::holds_alternative<OrientationTracking>(c.controller) ||
      (std::holds_alternative<OpenLoop>(c.controller) &&
       is_orientation_reference(c.reference));
  return orientation ? tracking_energy(c.params, s, d, c.gains.Kp_diag)
                     : position_energy(c.params, s, d);
}

double scenario_damping(const ScenarioConfig& c) {
  return std::visit(
      overloaded{
          [&](const OrientationTracking&) { return c.gains.Kv; },
          [&](const PositionTracking&) { return c.gains.kd; },
          [&](const ReducedAttitude&) { return c.gains.kd; },
          [&](const OpenLoop&) { return 0.0; },
      },
      c.controller);
}

namespace {

TrajectoryRow make_row(const ScenarioConfig& c, const RobotState& s,
                       const Vec3& Pi_s, double t) {
  const DesiredFrame d = scenario_frame(c, s, t);
  TrajectoryRow row;
  row.t = t;
  row.omega = s.omega;
  row.theta = s.theta;
  row.theta_dot = s.theta_dot;
  row.x = s.x;
  row.R = s.R.matrix();
  row.gamma = s.gamma;
  row.u = scenario_control(c, s, t);
  row.H = scenario_energy(c, s, t);
  row.E_R = error_norm(s.R, d.R_d, c.gains.Kp_diag);
  row.pi_s = inertial_momentum(s.R, Pi_s);
  row.e_omega = velocity_error(s.R, s.omega, d.R_d, d.omega_d);
  row.gamma_norm_residual = std::abs(s.gamma.norm() - 1.0);
  row.gamma_frame_residual =
      (s.gamma - s.R.matrix().transpose() * Vec3::UnitZ()).norm();
  return row;
}

void fill_rho(TrajectoryRecord& rec, double damping) {
  auto& rows = rec.rows;
  const std::size_t n = rows.size();
  const double dt = rec.dt;
  auto H = [&](std::size_t k) { return rows[k].H; };
  for (std::size_t k = 0; k < n; ++k) {
    // Five-point stencils, fourth order; one-sided near the ends.
    double hdot = 0.0;
    if (n >= 5) {
      if (k >= 2 && k + 2 < n) {
        hdot = (H(k - 2) - 8.0 * H(k - 1) + 8.0 * H(k + 1) - H(k + 2)) /
               (12.0 * dt);
      } else if (k < 2) {
        const std::size_t b = 0;
        hdot = k == 0 ? (-25.0 * H(b) + 48.0 * H(b + 1) - 36.0 * H(b + 2) +
                         16.0 * H(b + 3) - 3.0 * H(b + 4)) /
                            (12.0 * dt)
                      : (-3.0 * H(b) - 10.0 * H(b + 1) + 18.0 * H(b + 2) -
                         6.0 * H(b + 3) + H(b + 4)) /
                            (12.0 * dt);
      } else {
        const std::size_t e = n - 1;
        hdot = k == e ? (25.0 * H(e) - 48.0 * H(e - 1) + 36.0 * H(e - 2) -
                         16.0 * H(e - 3) + 3.0 * H(e - 4)) /
                            (12.0 * dt)
                      : (3.0 * H(e) + 10.0 * H(e - 1) - 18.0 * H(e - 2) +
                         6.0 * H(e - 3) - H(e - 4)) /
                            (12.0 * dt);
      }
    } else if (n >= 2) {
      const std::size_t a = k == 0 ? 0 : k - 1;
      const std::size_t b = k + 1 < n ? k + 1 : k;
      hdot = (H(b) - H(a)) / (static_cast<double>(b - a) * dt);
    }
    rows[k].rho = hdot + damping * rows[k].e_omega.squaredNorm();
  }
}

}  // namespace

TrajectoryRecord run_scenario(const ScenarioConfig& c, DynamicsForm form) {
  c.validate();
  TrajectoryRecord rec;
  rec.name = c.name;
  rec.dt = c.dt;
  const std::size_t n = c.row_count();
  rec.rows.reserve(n);

  const RobotParams& p = c.params;
  GroupRhs rhs;
  GroupState state;
  if (form == DynamicsForm::Momentum) {
    state = pack(to_momentum_state(p, c.init));
    rhs = [&c, &p](double t, const GroupState& g) {
      MomentumState m = unpack_momentum(g);
      m.gamma.normalize();
      const RobotState s = to_robot_state(p, m);
      const MomentumRates d =
          dynamics_momentum_form(p, m, scenario_control(c, s, t));
      GroupRate k;
      k.body_velocity = d.omega;
      k.y_dot << d.Pi_s_dot, d.Pi_rotor_dot, d.theta_dot, d.x_dot,
          d.gamma_dot;
      return k;
    };
  } else {
    state = pack(c.init);
    rhs = [&c, &p](double t, const GroupState& g) {
      RobotState s = unpack_velocity(g);
      s.gamma.normalize();
      const VelocityRates d =
          dynamics_velocity_form(p, s, scenario_control(c, s, t));
      GroupRate k;
      k.body_velocity = d.omega;
      k.y_dot << d.omega_dot, d.theta_dot, d.theta_ddot, d.x_dot, d.gamma_dot;
      return k;
    };
  }

  // Intermediate RK stages leave the unit sphere by O(dt^2); the right-hand
  // sides evaluate on the radial projection, which agrees with the dynamics
  // on the sphere and keeps the method fourth order.
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * c.dt;
    RobotState s;
    Vec3 Pi_s;
    if (form == DynamicsForm::Momentum) {
      const MomentumState m = unpack_momentum(state);
      s = to_robot_state(p, m);
      Pi_s = m.Pi_s;
    } else {
      s = unpack_velocity(state);
      Pi_s = body_momentum(p, s.omega, s.theta_dot, s.gamma);
    }
    rec.rows.push_back(make_row(c, s, Pi_s, t));
    if (k + 1 < n) {
      state = rk4_step(rhs, state, t, c.dt);
    }
  }
  fill_rho(rec, scenario_damping(c));
  return rec;
}

std::vector<TrajectoryRecord> run_batch(const std::vector<ScenarioConfig>& cs,
                                        unsigned max_threads) {
  std::vector<TrajectoryRecord> out(cs.size());
  std::vector<std::exception_ptr> errors(cs.size());
  unsigned threads = max_threads ? max_threads
                                 : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cs.size()));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < cs.size(); k = next++) {
          try {
            out[k] = run_scenario(cs[k]);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return out;
}

unsigned thread_cap_from_env() {
  const char* v = std::getenv("ROLLCTL_THREADS");
  if (!v) {
    return 0;
  }
  unsigned n = 0;
  const auto [ptr, ec] = std::from_chars(v, v + std::char_traits<char>::length(v), n);
  return ec == std::errc() ? n : 0;
}

// ---------------------------------------------------------------------------

DiagnosticsReport diagnostics(const TrajectoryRecord& rec,
                              const Vec3& x_d_final, double transient,
                              double monotone_tol) {
  DiagnosticsReport r;
  if (rec.rows.empty()) {
    return r;
  }
  r.empty = false;
  r.rows = rec.rows.size();
  const auto& first = rec.rows.front();
  double rho_sq = 0.0;
  for (std::size_t k = 0; k < rec.rows.size(); ++k) {
    const auto& row = rec.rows[k];
    r.max_pi_drift = std::max(r.max_pi_drift, (row.pi_s - first.pi_s).norm());
    r.max_gamma_norm_residual =
        std::max(r.max_gamma_norm_residual, row.gamma_norm_residual);
    r.max_gamma_frame_residual =
        std::max(r.max_gamma_frame_residual, row.gamma_frame_residual);
    r.max_x3_drift = std::max(r.max_x3_drift, std::abs(row.x.z() - first.x.z()));
    r.rho_max_abs = std::max(r.rho_max_abs, std::abs(row.rho));
    rho_sq += row.rho * row.rho;
    if (k > 0 && row.t >= transient) {
      const double inc = row.H - rec.rows[k - 1].H;
      if (inc > monotone_tol) {
        ++r.H_increases;
      }
      r.max_H_increase = std::max(r.max_H_increase, inc);
    }
  }
  r.rho_rms = std::sqrt(rho_sq / static_cast<double>(rec.rows.size()));
  const auto& last = rec.rows.back();
  r.final_E_R = last.E_R;
  r.final_H = last.H;
  r.final_position_error = (last.x - x_d_final).head<2>().norm();
  return r;
}

std::string format_report(const DiagnosticsReport& r) {
  if (r.empty) {
    return "";
  }
  std::ostringstream os;
  os.precision(6);
  os << "rows                    " << r.rows << '\n'
     << "max |pi_s drift|        " << r.max_pi_drift << '\n'
     << "max | |gamma| - 1 |     " << r.max_gamma_norm_residual << '\n'
     << "max |gamma - R^T e3|    " << r.max_gamma_frame_residual << '\n'
     << "max |x3 drift|          " << r.max_x3_drift << '\n'
     << "rho max |.| / rms       " << r.rho_max_abs << " / " << r.rho_rms
     << '\n'
     << "final E_R               " << r.final_E_R << '\n'
     << "final H                 " << r.final_H << '\n'
     << "final position error    " << r.final_position_error << '\n'
     << "H increases (> tol)     " << r.H_increases << '\n'
     << "max H increase          " << r.max_H_increase << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

std::string csv_header() {
  return "t,w1,w2,w3,th1,th2,th3,thd1,thd2,thd3,x,y,z,"
         "R11,R12,R13,R21,R22,R23,R31,R32,R33,g1,g2,g3,u1,u2,u3,H,E_R,"
         "pi1,pi2,pi3,rho";
}

namespace {

void put(std::string& line, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  line.append(buf, res.ptr);
  line.push_back(',');
}

void put(std::string& line, const Vec3& v) {
  put(line, v.x());
  put(line, v.y());
  put(line, v.z());
}

}  // namespace

void write_csv(const TrajectoryRecord& rec, std::ostream& os) {
  os << csv_header() << '\n';
  std::string line;
  for (const auto& row : rec.rows) {
    line.clear();
    put(line, row.t);
    put(line, row.omega);
    put(line, row.theta);
    put(line, row.theta_dot);
    put(line, row.x);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        put(line, row.R(i, j));
      }
    }
    put(line, row.gamma);
    put(line, row.u);
    put(line, row.H);
    put(line, row.E_R);
    put(line, row.pi_s);
    put(line, row.rho);
    line.back() = '\n';
    os << line;
  }
}

}  // namespace rollctl
