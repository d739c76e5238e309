#include "rollctl/checks.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "rollctl/presets.hpp"

namespace rollctl {

Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return project_so3(q.toRotationMatrix());
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec3 v(n(rng), n(rng), n(rng));
  return v.normalized();
}

RobotState random_state(std::mt19937_64& rng, double omega_max,
                        double rotor_max) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RobotState s;
  s.R = random_rotation(rng);
  s.gamma = s.R.matrix().transpose() * Vec3::UnitZ();
  s.omega = random_unit(rng) * omega_max * std::abs(u(rng));
  s.theta_dot = rotor_max * Vec3(u(rng), u(rng), u(rng));
  s.x = {u(rng), u(rng), 0.0};
  return s;
}

namespace {

CheckResult le(std::string name, double measured, double threshold) {
  return {std::move(name), measured <= threshold, measured, threshold};
}

Mat3 exp_series(const Vec3& v) {
  const Mat3 k = hat(v);
  Mat3 term = Mat3::Identity();
  Mat3 sum = Mat3::Identity();
  for (int n = 1; n < 20; ++n) {
    term = term * k / n;
    sum += term;
  }
  return sum;
}

std::vector<CheckResult> liegroup_suite(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(0.0, 1.0);
  double exp_err = 0.0, log_err = 0.0, proj_err = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Vec3 v = random_unit(rng) * ang(rng);
    exp_err = std::max(exp_err, (exp_so3(v).matrix() - exp_series(v)).norm());
    log_err = std::max(log_err, (log_so3(exp_so3(v)) - v).norm());
    const Rotation R = random_rotation(rng);
    proj_err = std::max(proj_err, (project_so3(R.matrix()).matrix() -
                                   R.matrix()).norm());
  }
  Rotation R = Rotation::identity();
  for (int i = 0; i < 100000; ++i) {
    R = project_so3((R * exp_so3({1e-3, 2e-3, -1.5e-3})).matrix());
  }
  return {le("exp_so3 vs 20-term series, |v| <= 1", exp_err, 1e-10),
          le("log_so3(exp_so3(v)) - v", log_err, 1e-10),
          le("project_so3 idempotent", proj_err, 1e-13),
          le("orthogonality after 1e5 products", R.orthogonality_defect(),
             1e-12)};
}

std::vector<CheckResult> gradients_suite(std::mt19937_64& rng) {
  std::vector<CheckResult> out;
  out.push_back(le("dV vs central differences (rel)",
                   gradient_fd_error(rng, 100), 1e-5));
  const Vec3 Kp(2.0, 8.0, 1.0);
  const Rotation Rd = random_rotation(rng);
  const Mat3 H = hessian_trace_potential(Rd, Rd, Kp);
  const Mat3 expected =
      Kp.sum() * Mat3::Identity() - Mat3(Kp.asDiagonal());
  out.push_back(le("Hessian at R_d vs tr(Kp)I - Kp", (H - expected).norm(),
                   1e-8));
  Vec3 ev = Eigen::SelfAdjointEigenSolver<Mat3>(0.5 * (H + H.transpose()))
                .eigenvalues();
  out.push_back(le("Hessian eigenvalues {3, 9, 10}",
                   (ev - Vec3(3.0, 9.0, 10.0)).norm(), 1e-8));
  // Hessian against second differences at a random point.
  double hess_err = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Rotation Rs = random_rotation(rng);
    const Rotation Rq = random_rotation(rng);
    const Mat3 Ha = hessian_trace_potential(Rs, Rq, Kp);
    const double h = 1e-4;
    auto V = [&](const Vec3& e) { return trace_potential(Rs * exp_so3(e), Rq, Kp); };
    Mat3 Hn;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const Vec3 a = h * Vec3::Unit(i), b = h * Vec3::Unit(j);
        Hn(i, j) = (V(a + b) - V(a - b) - V(b - a) + V(-a - b)) / (4 * h * h);
      }
    }
    hess_err = std::max(hess_err, (0.5 * (Hn + Hn.transpose()) - Ha).norm());
  }
  out.push_back(le("Hessian vs second differences", hess_err, 1e-5));
  return out;
}

ScenarioConfig first_seconds(ScenarioConfig c, double seconds) {
  c.duration = std::min(c.duration, seconds);
  return c;
}

std::vector<CheckResult> conservation_suite() {
  std::vector<CheckResult> out;
  for (const auto& name : preset_names()) {
    const ScenarioConfig c = first_seconds(make_preset(name), 10.0);
    const TrajectoryRecord rec = run_scenario(c);
    out.push_back(le("pi_s drift " + name, relative_momentum_drift(rec), 1e-6));
  }
  ScenarioConfig fine = make_preset("free_spin");
  const double coarse_drift = relative_momentum_drift(run_scenario(fine));
  fine.dt *= 0.5;
  const double fine_drift = relative_momentum_drift(run_scenario(fine));
  const double ratio = coarse_drift / fine_drift;
  out.push_back({"pi_s drift ratio under dt/2 (16 +- 20%)",
                 std::abs(ratio - 16.0) <= 3.2, ratio, 16.0});
  return out;
}

std::vector<CheckResult> dissipation_suite() {
  std::vector<CheckResult> out;
  for (const char* name : {"orientation_stab", "position_stab"}) {
    const TrajectoryRecord rec = run_scenario(make_preset(name));
    out.push_back(le(std::string("|H_dot + k|w|^2| / (1+|w|^2) ") + name,
                     scaled_dissipation_residual(rec), 1e-4));
    const DiagnosticsReport d = diagnostics(rec);
    out.push_back(le(std::string("max per-step H increase ") + name,
                     d.max_H_increase, 1e-9));
  }
  return out;
}

std::vector<CheckResult> dualform_suite(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    ScenarioConfig c = make_preset("orientation_stab");
    c.init = random_state(rng);
    c.reference = OrientationConstant{random_rotation(rng)};
    c.duration = 5.0;
    worst = std::max(worst, dual_form_difference(c));
  }
  return {le("momentum vs velocity form, 10 random ICs", worst, 1e-6)};
}

}  // namespace

double gradient_fd_error(std::mt19937_64& rng, int pairs, double h) {
  const Vec3 Kp(2.0, 8.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const Rotation Rs = random_rotation(rng);
    const Rotation Rd = random_rotation(rng);
    const Vec3 dV = grad_trace_potential(Rs, Rd, Kp);
    Vec3 fd;
    for (int i = 0; i < 3; ++i) {
      const Vec3 e = h * Vec3::Unit(i);
      fd(i) = (trace_potential(Rs * exp_so3(e), Rd, Kp) -
               trace_potential(Rs * exp_so3(-e), Rd, Kp)) /
              (2.0 * h);
    }
    worst = std::max(worst, (dV - fd).norm() / std::max(1.0, dV.norm()));
  }
  return worst;
}

double relative_momentum_drift(const TrajectoryRecord& rec) {
  if (rec.rows.empty()) {
    return 0.0;
  }
  const Vec3 pi0 = rec.rows.front().pi_s;
  double worst = 0.0;
  for (const auto& row : rec.rows) {
    worst = std::max(worst, (row.pi_s - pi0).norm());
  }
  return worst / (1.0 + pi0.norm());
}

double scaled_dissipation_residual(const TrajectoryRecord& rec) {
  double worst = 0.0;
  for (const auto& row : rec.rows) {
    worst = std::max(worst, std::abs(row.rho) / (1.0 + row.omega.squaredNorm()));
  }
  return worst;
}

double dual_form_difference(const ScenarioConfig& c) {
  const TrajectoryRecord a = run_scenario(c, DynamicsForm::Momentum);
  const TrajectoryRecord b = run_scenario(c, DynamicsForm::Velocity);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    const auto& ra = a.rows[k];
    const auto& rb = b.rows[k];
    worst = std::max({worst, (ra.R - rb.R).cwiseAbs().maxCoeff(),
                      (ra.omega - rb.omega).cwiseAbs().maxCoeff(),
                      (ra.x - rb.x).cwiseAbs().maxCoeff()});
  }
  return worst;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "liegroup", "gradients", "conservation", "dissipation", "dualform", "all"};
  return names;
}

std::vector<CheckResult> run_suite(const std::string& suite,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  if (suite == "liegroup") return liegroup_suite(rng);
  if (suite == "gradients") return gradients_suite(rng);
  if (suite == "conservation") return conservation_suite();
  if (suite == "dissipation") return dissipation_suite();
  if (suite == "dualform") return dualform_suite(rng);
  if (suite == "all") {
    std::vector<CheckResult> all;
    for (const auto& s : suite_names()) {
      if (s == "all") {
        continue;
      }
      auto part = run_suite(s, seed);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  throw Error("unknown suite '" + suite + "'");
}

void print_results(const std::vector<CheckResult>& results, std::ostream& os) {
  std::size_t width = 0;
  for (const auto& r : results) {
    width = std::max(width, r.name.size());
  }
  int passed = 0;
  const auto flags = os.flags();
  for (const auto& r : results) {
    os << (r.pass ? "pass  " : "FAIL  ") << std::left
       << std::setw(static_cast<int>(width)) << r.name << "  "
       << std::scientific << std::setprecision(3) << r.measured
       << "  (limit " << r.threshold << ")\n";
    passed += r.pass;
  }
  os.flags(flags);
  os << passed << " passed, " << results.size() - passed << " failed\n";
}

}  // namespace rollctl
