// vtube: run, validate and compare virtual-tube transport scenarios.
//
// Exit codes: 0 reached terminal, 2 safety violation / tube exit / blowup,
// 3 timeout, 4 configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "vtube/error.hpp"
#include "vtube/export.hpp"
#include "vtube/kernels/nearest_segment.hpp"
#include "vtube/scenario.hpp"
#include "vtube/simulation.hpp"

namespace fs = std::filesystem;
using namespace vtube;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSafety = 2;
constexpr int kExitTimeout = 3;
constexpr int kExitConfig = 4;

struct Overrides {
  std::optional<std::string> mode;
  std::optional<std::string> controller;
  std::optional<std::string> observer;
  std::optional<double> dt;
  std::optional<double> duration;
};

void apply(const Overrides& o, Scenario& s) {
  if (o.mode) s.sim_mode = parse_sim_mode(*o.mode);
  if (o.controller) s.controller_mode = parse_controller_mode(*o.controller);
  if (o.observer) s.observer_mode = parse_observer_mode(*o.observer);
  if (o.dt) s.dt = *o.dt;
  if (o.duration) s.duration = *o.duration;
  validate_scenario(s);
}

int exit_code(const RunSummary& s) {
  if (s.safety_violation || s.status == RunStatus::LeftTube || s.status == RunStatus::Blowup) {
    return kExitSafety;
  }
  return s.status == RunStatus::ReachedTerminal ? kExitOk : kExitTimeout;
}

RunSummary run_and_export(const Scenario& s, const fs::path& out) {
  const RunRecord record = run(s);
  const RunSummary summary = compute_metrics(record);
  export_csv(record, out, s.output_stride);
  write_summary(summary, record, out);
  std::cout << "[" << to_string(s.controller_mode) << "] " << format_summary(summary, record);
  return summary;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--mode", o.mode, "closed_loop | kinematic")
      ->check(CLI::IsMember({"closed_loop", "kinematic"}));
  cmd->add_option("--controller", o.controller, "dissipative | baseline")
      ->check(CLI::IsMember({"dissipative", "baseline"}));
  cmd->add_option("--observer", o.observer, "estimate | ground_truth")
      ->check(CLI::IsMember({"estimate", "ground_truth"}));
  cmd->add_option("--dt", o.dt, "integration step [s]");
  cmd->add_option("--duration", o.duration, "simulated time [s]");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-UAV cable-suspended load transport through a virtual tube"};
  app.require_subcommand(1);
  std::string backend = "auto";
  app.add_option("--kernel", backend, "nearest-segment kernel: auto | scalar | avx2 | neon")
      ->check(CLI::IsMember({"auto", "scalar", "avx2", "neon"}));

  std::string scenario_path;
  fs::path out_dir;
  Overrides overrides;

  CLI::App* run_cmd = app.add_subcommand("run", "simulate one scenario and export CSV");
  run_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
  run_cmd->add_option("--out", out_dir, "output directory")->required();
  add_overrides(run_cmd, overrides);

  CLI::App* validate_cmd = app.add_subcommand("validate", "parse and validate a scenario");
  validate_cmd->add_option("--scenario", scenario_path, "scenario file")->required();

  CLI::App* compare_cmd = app.add_subcommand("compare", "paired dissipative / baseline runs");
  compare_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
  compare_cmd->add_option("--out", out_dir, "output directory")->required();
  add_overrides(compare_cmd, overrides);

  CLI11_PARSE(app, argc, argv);

  try {
    if (backend == "scalar") kernels::force_backend(kernels::Backend::Scalar);
    if (backend == "avx2") kernels::force_backend(kernels::Backend::Avx2);
    if (backend == "neon") kernels::force_backend(kernels::Backend::Neon);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  Scenario scenario;
  try {
    scenario = load_scenario(scenario_path);
    apply(overrides, scenario);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*validate_cmd) {
      std::cout << "ok: " << (scenario.name.empty() ? scenario_path : scenario.name) << ", "
                << scenario.uav_count() << " UAVs, tray altitude "
                << format_number(scenario.tray_altitude()) << " m\n";
      return kExitOk;
    }
    if (*run_cmd) return exit_code(run_and_export(scenario, out_dir));

    Scenario dissipative = scenario;
    dissipative.controller_mode = ControllerMode::Dissipative;
    Scenario baseline = scenario;
    baseline.controller_mode = ControllerMode::Baseline;
    const RunSummary d = run_and_export(dissipative, out_dir / "dissipative");
    const RunSummary b = run_and_export(baseline, out_dir / "baseline");
    std::ofstream cmp(out_dir / "comparison.txt", std::ios::binary | std::ios::trunc);
    cmp << "metric,dissipative,baseline\n"
        << "tension_spread," << format_number(d.tension_spread) << ","
        << format_number(b.tension_spread) << "\n"
        << "max_tension," << format_number(d.max_tension) << "," << format_number(b.max_tension) << "\n"
        << "formation_error," << format_number(d.formation_error) << ","
        << format_number(b.formation_error) << "\n"
        << "min_inter_uav," << format_number(d.min_inter_uav) << ","
        << format_number(b.min_inter_uav) << "\n"
        << "min_uav_boundary," << format_number(d.min_uav_boundary) << ","
        << format_number(b.min_uav_boundary) << "\n"
        << "status," << to_string(d.status) << "," << to_string(b.status) << "\n";
    if (!cmp) throw Error(ErrorKind::IoError, "cannot write comparison.txt");
    return exit_code(d);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.kind() == ErrorKind::IoError ? kExitConfig : kExitSafety;
  }
}
