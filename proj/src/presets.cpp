#include "rollctl/presets.hpp"

#include <numbers>

namespace rollctl {

namespace {

constexpr double pi = std::numbers::pi;

RobotState at_rest(const Rotation& R) {
  RobotState s;
  s.R = R;
  s.gamma = R.matrix().transpose() * Vec3::UnitZ();
  return s;
}

Rotation rot_xyz(double a, double b, double c) {
  return project_so3(elem_rot(1, a).matrix() * elem_rot(2, b).matrix() *
                     elem_rot(3, c).matrix());
}

ScenarioConfig orientation_stab() {
  ScenarioConfig c;
  c.name = "orientation_stab";
  c.reference = OrientationConstant{rot_xyz(pi / 9, pi / 18, pi / 3)};
  c.controller = OrientationTracking{};
  c.init = at_rest(Rotation::identity());
  c.init.omega = {12.5, 7.0, 1.0};
  c.duration = 20.0;
  return c;
}

ScenarioConfig orientation_track() {
  ScenarioConfig c;
  c.name = "orientation_track";
  c.reference = OrientationSinusoid{};
  c.controller = OrientationTracking{};
  c.init = at_rest(project_so3(elem_rot(1, 0.3).matrix() *
                               elem_rot(3, 0.4).matrix() *
                               elem_rot(1, 0.2).matrix()));
  c.duration = 20.0;
  return c;
}

ScenarioConfig planar(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  c.controller = PositionTracking{};
  c.init = at_rest(Rotation::identity());
  c.duration = 30.0;
  return c;
}

ScenarioConfig reduced_attitude() {
  ScenarioConfig c;
  c.name = "reduced_attitude";
  c.controller = ReducedAttitude{};
  c.gains.kp = 5.0;
  c.gains.kd = 0.2;
  c.gains.alpha = 1.0;
  c.init = at_rest(elem_rot(1, pi / 6));
  c.init.x = {4.0, 2.0, 0.0};
  c.duration = 40.0;
  return c;
}

ScenarioConfig position_stab() {
  ScenarioConfig c = reduced_attitude();
  c.name = "position_stab";
  c.controller = PositionTracking{};
  c.gains = Gains{};
  return c;
}

ScenarioConfig free_spin() {
  ScenarioConfig c;
  c.name = "free_spin";
  c.controller = OpenLoop{};
  c.init = at_rest(Rotation::identity());
  c.init.omega = {12.5, 7.0, 1.0};
  c.init.theta_dot = {300.0, -200.0, 100.0};
  c.duration = 10.0;
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"orientation_stab", "orientation_track", "reduced_attitude",
          "position_stab",    "circle",            "line",
          "free_spin"};
}

ScenarioConfig make_preset(const std::string& name) {
  if (name == "orientation_stab") return orientation_stab();
  if (name == "orientation_track") return orientation_track();
  if (name == "reduced_attitude") return reduced_attitude();
  if (name == "position_stab") return position_stab();
  if (name == "circle") {
    ScenarioConfig c = planar("circle");
    c.reference = CircleReference{};
    return c;
  }
  if (name == "line") {
    ScenarioConfig c = planar("line");
    c.reference = LineReference{};
    return c;
  }
  if (name == "free_spin") return free_spin();
  throw Error("unknown preset '" + name + "'");
}

}  // namespace rollctl
