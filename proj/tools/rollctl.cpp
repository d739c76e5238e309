// rollctl: scenario runner, invariant checks and controllability report.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "rollctl/checks.hpp"
#include "rollctl/config.hpp"
#include "rollctl/controllability.hpp"

namespace fs = std::filesystem;
using namespace rollctl;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct SimulateArgs {
  std::vector<std::string> configs;
  std::string out = "results";
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<std::uint64_t> seed;
};

Vec3 final_target(const ScenarioConfig& c, const TrajectoryRecord& rec) {
  if (rec.rows.empty()) {
    return Vec3::Zero();
  }
  RobotState s;
  s.x = rec.rows.back().x;
  return scenario_frame(c, s, rec.rows.back().t).x_d;
}

int cmd_simulate(const SimulateArgs& a) {
  std::vector<ScenarioConfig> cs;
  try {
    for (const auto& path : a.configs) {
      ScenarioConfig c = load_config(path);
      if (a.dt) c.dt = *a.dt;
      if (a.duration) c.duration = *a.duration;
      if (a.seed) c.seed = *a.seed;
      c.validate();
      cs.push_back(std::move(c));
    }
  } catch (const Error& e) {
    std::cerr << "rollctl: " << e.what() << '\n';
    return kUsage;
  }

  std::vector<TrajectoryRecord> recs;
  try {
    recs = run_batch(cs, thread_cap_from_env());
  } catch (const Error& e) {
    std::cerr << "rollctl: " << e.what() << '\n';
    return kFailure;
  }

  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) {
    std::cerr << "rollctl: cannot create " << a.out << ": " << ec.message()
              << '\n';
    return kUsage;
  }
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const fs::path csv = fs::path(a.out) / (cs[i].name + ".csv");
    std::ofstream os(csv, std::ios::binary);
    write_csv(recs[i], os);
    std::ofstream sum(fs::path(a.out) / (cs[i].name + ".summary.txt"));
    sum << "scenario                " << cs[i].name << '\n'
        << "config                  " << a.configs[i] << '\n'
        << "dt                      " << cs[i].dt << '\n'
        << "duration                " << cs[i].duration << '\n'
        << "seed                    " << cs[i].seed << '\n'
        << format_report(diagnostics(recs[i], final_target(cs[i], recs[i])));
    if (!os || !sum) {
      std::cerr << "rollctl: write failed under " << a.out << '\n';
      return kFailure;
    }
    std::cout << csv.string() << "  (" << recs[i].rows.size() << " rows)\n";
  }
  return kOk;
}

int cmd_check(const std::string& suite, std::uint64_t seed) {
  std::vector<CheckResult> results;
  try {
    results = run_suite(suite, seed);
  } catch (const Error& e) {
    std::cerr << "rollctl: " << e.what() << '\n';
    return kFailure;
  }
  print_results(results, std::cout);
  const bool ok = std::all_of(results.begin(), results.end(),
                              [](const CheckResult& r) { return r.pass; });
  return ok ? kOk : kFailure;
}

int cmd_controllability(int samples, std::uint64_t seed, bool json) {
  const RobotParams p;
  std::mt19937_64 rng(seed);
  nlohmann::json rows = nlohmann::json::array();
  bool ok = true;
  if (!json) {
    std::cout << " #  local_rank  min_sv        fiber_rank  min_sv\n";
  }
  for (int k = 0; k < samples; ++k) {
    const RobotState s = random_state(rng);
    const RankResult lr = local_rank(p, s);
    const RankResult fr = fiber_rank(p, s.R);
    ok = ok && lr.rank == 6 && fr.rank == 5;
    if (json) {
      rows.push_back({{"sample", k},
                      {"gamma", {s.gamma.x(), s.gamma.y(), s.gamma.z()}},
                      {"local_rank", lr.rank},
                      {"local_min_singular", lr.min_singular},
                      {"fiber_rank", fr.rank},
                      {"fiber_min_singular", fr.min_singular}});
    } else {
      std::cout << std::setw(2) << k << "  " << std::setw(10) << lr.rank
                << "  " << std::scientific << std::setprecision(4)
                << lr.min_singular << "  " << std::setw(10) << fr.rank << "  "
                << fr.min_singular << std::defaultfloat << '\n';
    }
  }
  // Rank of every bracket-pair choice at the upright attitude.
  const FiberRankReport rep = fiber_rank_report(p, Rotation::identity());
  if (json) {
    nlohmann::json doc;
    doc["seed"] = seed;
    doc["samples"] = rows;
    doc["upright_pairs"] = {{"fields_only", rep.fields_only.rank},
                            {"12_13", rep.pair_12_13.rank},
                            {"12_23", rep.pair_12_23.rank},
                            {"13_23", rep.pair_13_23.rank},
                            {"all", rep.all_pairs.rank}};
    doc["pass"] = ok;
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << "upright fiber ranks: fields " << rep.fields_only.rank
              << ", [12][13] " << rep.pair_12_13.rank << ", [12][23] "
              << rep.pair_12_23.rank << ", [13][23] " << rep.pair_13_23.rank
              << ", all " << rep.all_pairs.rank << '\n'
              << (ok ? "all samples at ranks (6, 5)\n"
                     : "rank deficiency found\n");
  }
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rolling sphere with internal rotors: simulation and checks"};
  app.require_subcommand(1);

  SimulateArgs sim;
  double dt = 0, duration = 0;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Run scenario configs");
  simulate->add_option("--config", sim.configs, "Scenario file (repeatable)")
      ->required();
  simulate->add_option("--out", sim.out, "Output directory")
      ->capture_default_str();
  auto* dt_opt = simulate->add_option("--dt", dt, "Override step size [s]");
  auto* dur_opt =
      simulate->add_option("--duration", duration, "Override duration [s]");
  auto* seed_opt = simulate->add_option("--seed", sim_seed, "Override seed");

  std::string suite = "all";
  std::uint64_t check_seed = 1;
  auto* check = app.add_subcommand("check", "Run invariant suites");
  check->add_option("--suite", suite, "Suite name")
      ->check(CLI::IsMember(suite_names()))
      ->capture_default_str();
  check->add_option("--seed", check_seed, "RNG seed")->capture_default_str();

  int samples = 20;
  std::uint64_t ctl_seed = 1;
  bool json = false;
  auto* ctl = app.add_subcommand("controllability", "Rank certificates");
  ctl->add_option("--samples", samples, "Random configurations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ctl->add_option("--seed", ctl_seed, "RNG seed")->capture_default_str();
  ctl->add_flag("--json", json, "Emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (simulate->parsed()) {
    if (*dt_opt) sim.dt = dt;
    if (*dur_opt) sim.duration = duration;
    if (*seed_opt) sim.seed = sim_seed;
    return cmd_simulate(sim);
  }
  if (check->parsed()) {
    return cmd_check(suite, check_seed);
  }
  return cmd_controllability(samples, ctl_seed, json);
}
