#include "rollctl/config.hpp"

#include <charconv>
#include <fstream>
#include <algorithm>
#include <map>
#include <set>
#include <numbers>
#include <sstream>

namespace rollctl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) {
    out.push_back(w);
  }
  return out;
}

double parse_factor(const std::string& tok, const std::string& whole) {
  if (tok == "pi") {
    return std::numbers::pi;
  }
  double v = 0.0;
  const char* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (tok.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("bad number '" + whole + "'");
  }
  return v;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(const std::string& text, std::string origin)
      : origin_(std::move(origin)) {
    std::istringstream is(text);
    std::string section;
    int n = 0;
    for (std::string raw; std::getline(is, raw);) {
      ++n;
      std::string line = trim(raw.substr(0, raw.find('#')));
      if (line.empty()) {
        continue;
      }
      if (line.front() == '[') {
        if (line.back() != ']') {
          fail(n, "unterminated section header");
        }
        section = trim(line.substr(1, line.size() - 2));
        static const char* known[] = {"scenario", "params",     "gains",
                                      "reference", "controller", "init"};
        if (std::find(std::begin(known), std::end(known), section) ==
            std::end(known)) {
          fail(n, "unknown section [" + section + "]");
        }
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        fail(n, "expected key = value");
      }
      if (section.empty()) {
        fail(n, "key outside any section");
      }
      const std::string key = section + "." + trim(line.substr(0, eq));
      if (entries_.count(key)) {
        fail(n, "duplicate key '" + key + "'");
      }
      entries_[key] = {trim(line.substr(eq + 1)), n};
    }
  }

  [[noreturn]] void fail(int line, const std::string& what) const {
    std::ostringstream os;
    os << origin_ << ":" << line << ": " << what;
    throw ConfigError(os.str());
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  // Runs f on the raw value of key, if present, and rethrows errors with the
  // key and line attached.
  template <class F>
  void with(const std::string& key, F&& f) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      return;
    }
    used_.insert(key);
    try {
      f(it->second.value);
    } catch (const ConfigError& e) {
      fail(it->second.line, "key '" + key + "': " + e.what());
    } catch (const Error& e) {
      fail(it->second.line, "key '" + key + "': " + e.what());
    }
  }

  void scalar(const std::string& key, double& out) {
    with(key, [&](const std::string& v) { out = parse_scalar(v); });
  }

  void vec(const std::string& key, Vec3& out) {
    with(key, [&](const std::string& v) { out = vector<3>(v); });
  }

  template <int N>
  static Eigen::Matrix<double, N, 1> vector(const std::string& v) {
    const auto w = split_ws(v);
    if (static_cast<int>(w.size()) != N) {
      throw ConfigError("expected " + std::to_string(N) + " values");
    }
    Eigen::Matrix<double, N, 1> out;
    for (int i = 0; i < N; ++i) {
      out(i) = parse_scalar(w[static_cast<std::size_t>(i)]);
    }
    return out;
  }

  void check_all_used() const {
    for (const auto& [key, e] : entries_) {
      if (!used_.count(key)) {
        fail(e.line, "unknown key '" + key + "'");
      }
    }
  }

  int line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

 private:
  std::string origin_;
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
};

TorqueTable parse_torque_table(const std::string& v) {
  TorqueTable tab;
  std::istringstream is(v);
  for (std::string row; std::getline(is, row, ';');) {
    if (trim(row).empty()) {
      continue;
    }
    const Eigen::Vector4d r = Reader::vector<4>(row);
    tab.t.push_back(r(0));
    tab.u.push_back(r.tail<3>());
  }
  return tab;
}

}  // namespace

double parse_scalar(const std::string& expr) {
  std::string s = trim(expr);
  double sign = 1.0;
  if (!s.empty() && s.front() == '-') {
    sign = -1.0;
    s = trim(s.substr(1));
  }
  // Split on '*' and '/' but keep exponent signs such as 1e-3 intact.
  double value = 1.0;
  char op = '*';
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '*' || s[i] == '/') {
      const double f = parse_factor(trim(s.substr(start, i - start)), expr);
      value = op == '*' ? value * f : value / f;
      if (i < s.size()) {
        op = s[i];
      }
      start = i + 1;
    }
  }
  return sign * value;
}

Rotation parse_rotation(const std::string& expr) {
  const auto words = split_ws(expr);
  if (words.size() == 1 && words[0] == "identity") {
    return Rotation::identity();
  }
  if (words.empty()) {
    throw ConfigError("empty rotation");
  }
  Mat3 R = Mat3::Identity();
  for (const auto& w : words) {
    if (w.size() < 3 || w[1] != ':' || w[0] < 'x' || w[0] > 'z') {
      throw ConfigError("bad rotation factor '" + w + "'");
    }
    R = R * elem_rot(w[0] - 'x' + 1, parse_scalar(w.substr(2))).matrix();
  }
  return project_so3(R);
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
  Reader rd(text, origin);
  ScenarioConfig c;

  rd.with("scenario.name", [&](const std::string& v) {
    if (v.empty() || v.find_first_of("/\\ ") != std::string::npos) {
      throw ConfigError("name must be a plain file stem");
    }
    c.name = v;
  });
  rd.scalar("scenario.dt", c.dt);
  rd.scalar("scenario.duration", c.duration);
  rd.with("scenario.seed", [&](const std::string& v) {
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), c.seed);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
      throw ConfigError("seed must be a non-negative integer");
    }
  });

  RobotParams& p = c.params;
  rd.scalar("params.m_s", p.m_s);
  rd.scalar("params.m_rotor", p.m_rotor);
  rd.scalar("params.r", p.r);
  rd.with("params.I_s", [&](const std::string& v) {
    const auto w = split_ws(v);
    if (w.size() == 1) {
      p.I_s_diag = Vec3::Constant(parse_scalar(w[0]));
    } else {
      p.I_s_diag = Reader::vector<3>(v);
    }
  });
  if (rd.has("params.J_a") && rd.has("params.J_kgcm2")) {
    rd.fail(rd.line_of("params.J_kgcm2"), "J_a and J_kgcm2 are exclusive");
  }
  rd.scalar("params.J_a", p.J_a);
  rd.with("params.J_kgcm2",
          [&](const std::string& v) { p.J_a = parse_scalar(v) * 1e-4; });
  p.J_b = 0.5 * p.J_a;
  rd.scalar("params.J_b", p.J_b);

  Gains& g = c.gains;
  rd.vec("gains.Kp", g.Kp_diag);
  rd.scalar("gains.Kv", g.Kv);
  rd.scalar("gains.kp", g.kp);
  rd.scalar("gains.kd", g.kd);
  rd.scalar("gains.alpha", g.alpha);

  std::string ref_kind = "rest";
  rd.with("reference.kind", [&](const std::string& v) { ref_kind = v; });
  const int ref_line = rd.line_of("reference.kind");
  if (ref_kind == "rest") {
    c.reference = RestReference{};
  } else if (ref_kind == "orientation_constant") {
    OrientationConstant oc;
    rd.with("reference.R_d",
            [&](const std::string& v) { oc.R_d = parse_rotation(v); });
    c.reference = oc;
  } else if (ref_kind == "orientation_sinusoid") {
    c.reference = OrientationSinusoid{};
  } else if (ref_kind == "circle") {
    CircleReference cr;
    rd.scalar("reference.radius", cr.radius);
    rd.scalar("reference.rate", cr.rate);
    c.reference = cr;
  } else if (ref_kind == "line") {
    LineReference lr;
    rd.with("reference.velocity",
            [&](const std::string& v) { lr.velocity = Reader::vector<2>(v); });
    rd.with("reference.offset",
            [&](const std::string& v) { lr.offset = Reader::vector<2>(v); });
    c.reference = lr;
  } else {
    rd.fail(ref_line, "key 'reference.kind': unknown reference '" + ref_kind + "'");
  }

  std::string ctl_kind = "open_loop";
  rd.with("controller.kind", [&](const std::string& v) { ctl_kind = v; });
  const int ctl_line = rd.line_of("controller.kind");
  if (ctl_kind == "orientation_tracking") {
    c.controller = OrientationTracking{};
  } else if (ctl_kind == "position_tracking") {
    c.controller = PositionTracking{};
  } else if (ctl_kind == "reduced_attitude") {
    c.controller = ReducedAttitude{};
  } else if (ctl_kind == "open_loop") {
    OpenLoop ol;
    rd.with("controller.torque_table", [&](const std::string& v) {
      ol.torque = parse_torque_table(v);
    });
    c.controller = ol;
  } else {
    rd.fail(ctl_line, "key 'controller.kind': unknown controller '" + ctl_kind + "'");
  }

  RobotState& s = c.init;
  rd.with("init.R", [&](const std::string& v) { s.R = parse_rotation(v); });
  rd.vec("init.omega", s.omega);
  rd.vec("init.theta", s.theta);
  rd.vec("init.theta_dot", s.theta_dot);
  rd.vec("init.x", s.x);
  s.gamma = s.R.matrix().transpose() * Vec3::UnitZ();

  rd.check_all_used();
  try {
    c.validate();
  } catch (const Error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open " + path.string());
  }
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str(), path.string());
}

}  // namespace rollctl
