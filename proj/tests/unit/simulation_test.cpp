#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "expect_error.hpp"
#include "vtube/export.hpp"
#include "vtube/simulation.hpp"

namespace vtube {
namespace {

using testing::expect_error;
namespace fs = std::filesystem;

const fs::path kScenarios = VTUBE_SOURCE_DIR "/scenarios";

// Two UAVs whose nodes sit at y = +-offset around the tray; collinear rest
// lengths. With pair_only the UAV nodes are tied to each other and nothing else.
std::string pair_scenario(double offset, double uav_rest, double center_rest, double half_width,
                          bool pair_only) {
  const double u = 0.75 * offset;  // UAV at z = 5 under a tray 20 m above the load
  std::ostringstream s;
  s << "duration = 20\nsim_mode = kinematic\n"
    << "[tube]\ncenterline = 0 0; 100 0\nhalf_widths = " << half_width << ' ' << half_width
    << "\nresample_count = 201\n"
    << "[load]\nposition = 5 0 0\nmass = 1\n"
    << "[uav]\nposition = 5 " << u << " 5\nrest_length = 5.1\n"
    << "[uav]\nposition = 5 " << -u << " 5\nrest_length = 5.1\n"
    << "[controller]\nk1 = 0.5\n"
    << "[intermediate]\ntray_height = 20\nrest_lengths = explicit\n"
    << "rest_length_matrix = 0 " << uav_rest << ' ' << center_rest << ' ' << center_rest << "; "
    << uav_rest << " 0 " << center_rest << ' ' << center_rest << "; " << center_rest << ' '
    << center_rest << " 0 0; " << center_rest << ' ' << center_rest << " 0 0\n";
  if (pair_only) s << "connection = 0 1 0 0; 1 0 0 0; 0 0 0 0; 0 0 0 0\n";
  return s.str();
}

RunRecord synthetic(std::size_t steps) {
  RunRecord r;
  r.uav_count = 2;
  r.node_count = 4;
  r.connection = default_connection(2);
  r.rest_lengths = SquareMatrix(4, 1.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = 0.01 * static_cast<double>(k);
    r.time.push_back(t);
    for (std::size_t i = 0; i < 2; ++i) {
      r.uav_position.push_back({t, static_cast<double>(i), 5});
      r.uav_velocity.push_back({1, 0, 0});
      r.tension.push_back(10.0 + static_cast<double>(i) + t);
    }
    r.load_position.push_back({t, 0.5, 0});
    r.load_velocity.push_back({1, 0, 0});
    for (std::size_t i = 0; i < 4; ++i) {
      r.node_position.push_back({t + 0.5 * static_cast<double>(i % 2), static_cast<double>(i / 2)});
      r.node_command.push_back({1, 0});
    }
    r.min_inter_uav.push_back(1.0 + 0.001 * static_cast<double>(k));
    r.min_uav_boundary.push_back(2.0);
    r.min_node_boundary.push_back(1.5);
    r.tray_l.push_back(0.5);
    r.approach_energy.push_back(0.0);
    r.spring_energy.push_back(0.0);
    r.barrier_energy.push_back(0.0);
    r.total_energy.push_back(1.0 / (1.0 + t));
    r.load_vertical_force.push_back(9.81);
  }
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vtube_sim_test_" + name);
  fs::remove_all(p);
  return p;
}

TEST(Metrics, SingleSample) {
  const RunRecord r = synthetic(1);
  const RunSummary s = compute_metrics(r);
  EXPECT_EQ(s.min_inter_uav, 1.0);
  EXPECT_EQ(s.min_uav_boundary, 2.0);
  EXPECT_EQ(s.min_node_boundary, 1.5);
  EXPECT_EQ(s.max_tension, 11.0);
  EXPECT_EQ(s.tension_spread, 1.0);
  EXPECT_EQ(s.max_energy_increase, 0.0);
  EXPECT_EQ(s.arrival_time, -1.0);
}

TEST(Metrics, PlantedMinimum) {
  RunRecord r = synthetic(1000);
  r.min_uav_boundary[500] = 0.37;
  r.min_inter_uav[500] = 0.37;
  const RunSummary s = compute_metrics(r);
  EXPECT_EQ(s.min_uav_boundary, 0.37);
  EXPECT_EQ(s.min_inter_uav, 0.37);
}

TEST(Metrics, FormationErrorUsesFinalWindow) {
  RunRecord r = synthetic(100);
  // Node pair (0, 1) is 0.5 apart against L0 = 1; pair (0, 2) is sqrt(1) = 1.
  const RunSummary s = compute_metrics(r);
  EXPECT_NEAR(s.formation_error, 0.5, 1e-12);
  EXPECT_NEAR(s.formation_error_ratio, 0.5, 1e-12);
  r.node_position[0] = {-50, -50};  // outside the window
  EXPECT_NEAR(compute_metrics(r).formation_error, 0.5, 1e-12);
}

TEST(Metrics, EmptyRecord) {
  expect_error(ErrorKind::EmptyRecord, [] { compute_metrics(RunRecord{}); });
}

TEST(Export, SchemaAndRows) {
  const RunRecord r = synthetic(25);
  const fs::path dir = scratch("schema");
  const auto files = export_csv(r, dir, 10);
  ASSERT_EQ(files.size(), 5u);
  for (const auto& f : files) {
    const std::string text = slurp(f);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 4) << f;  // samples 0, 10, 20, 24
  }
  const std::string tensions = slurp(dir / "tensions.csv");
  const std::string head = tensions.substr(0, tensions.find('\n'));
  EXPECT_EQ(head, "time,tension0,tension1");
  fs::remove_all(dir);
}

TEST(Export, TenUavTensionColumns) {
  RunRecord r;
  r.uav_count = 10;
  r.node_count = 12;
  r.time = {0.0};
  r.tension.assign(10, 17.5);
  r.uav_position.assign(10, Vec3{});
  r.uav_velocity.assign(10, Vec3{});
  r.load_position = {Vec3{}};
  r.load_velocity = {Vec3{}};
  r.node_position.assign(12, Vec2{});
  r.node_command.assign(12, Vec2{});
  r.min_inter_uav = r.min_uav_boundary = r.min_node_boundary = r.tray_l = {1.0};
  r.approach_energy = r.spring_energy = r.barrier_energy = r.total_energy = {0.0};
  r.load_vertical_force = {0.0};
  const fs::path dir = scratch("ten");
  export_csv(r, dir);
  std::istringstream in(slurp(dir / "tensions.csv"));
  std::string line;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ',') + 1, 11) << line;
  }
  fs::remove_all(dir);
}

TEST(Export, ReexportIsByteIdentical) {
  const RunRecord r = synthetic(50);
  const fs::path a = scratch("a");
  const fs::path b = scratch("b");
  const auto fa = export_csv(r, a);
  const auto fb = export_csv(r, b);
  write_summary(compute_metrics(r), r, a);
  write_summary(compute_metrics(r), r, b);
  for (std::size_t i = 0; i < fa.size(); ++i) EXPECT_EQ(slurp(fa[i]), slurp(fb[i]));
  EXPECT_EQ(slurp(a / "summary.txt"), slurp(b / "summary.txt"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Export, UnwritableDirectory) {
  expect_error(ErrorKind::IoError, [] { export_csv(synthetic(1), "/proc/vtube_no_such_dir"); });
}

TEST(Export, NineSignificantDigits) {
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_number(-2.5e-7), "-2.5e-07");
}

TEST(Run, ShorterThanOneStep) {
  Scenario s = parse_scenario(pair_scenario(0.75, 1.0, 0.5, 4.0, true));
  s.duration = 0.5 * s.dt;
  const RunRecord r = run(s);
  EXPECT_EQ(r.steps(), 1u);
  EXPECT_EQ(r.status, RunStatus::Timeout);
}

TEST(Run, KinematicPairRelaxes) {
  const Scenario s = parse_scenario(pair_scenario(0.75, 1.0, 0.5, 4.0, true));
  const RunRecord r = run(s);
  ASSERT_GT(r.steps(), 1000u);
  EXPECT_GT(r.spring_energy.front(), 0.01);
  for (std::size_t k = 1; k < r.steps(); ++k) {
    ASSERT_LE(r.spring_energy[k], r.spring_energy[k - 1]) << "step " << k;
  }
  const std::size_t m = r.node_count;
  const Vec2* q = r.node_position.data() + (r.steps() - 1) * m;
  EXPECT_NEAR(norm(q[0] - q[1]), 1.0, 0.01);
}

TEST(Run, KinematicMonitoredTotalNonIncreasing) {
  const Scenario s = load_scenario(kScenarios / "narrowing_three_uav.scn");
  Scenario k = s;
  k.sim_mode = SimMode::Kinematic;
  const RunRecord r = run(k);
  EXPECT_EQ(r.status, RunStatus::ReachedTerminal);
  EXPECT_LE(compute_metrics(r).max_energy_increase, 1e-6);
  for (double t : r.tension) EXPECT_EQ(t, 0.0);
}

TEST(Run, ClosedLoopStraightReachesTerminal) {
  const Scenario s = load_scenario(kScenarios / "straight_three_uav.scn");
  const RunRecord r = run(s);
  EXPECT_EQ(r.status, RunStatus::ReachedTerminal) << r.status_detail;
  EXPECT_FALSE(r.safety_violation);
  for (std::size_t k = 0; k < r.tension.size(); ++k) {
    ASSERT_LE(r.tension[k], s.cables[k % r.uav_count].max_tension) << "sample " << k;
  }
  EXPECT_EQ(r.time.size(), r.min_inter_uav.size());
  EXPECT_EQ(r.uav_position.size(), r.steps() * r.uav_count);
  EXPECT_EQ(r.node_position.size(), r.steps() * r.node_count);
  for (std::size_t k = 1; k < r.steps(); ++k) {
    ASSERT_NEAR(r.time[k] - r.time[k - 1], s.dt, 1e-12);
  }
}

TEST(Run, SafetyViolationIsFlagged) {
  // Compressed springs throw the nodes across the boundary within one coarse step.
  Scenario s = parse_scenario(pair_scenario(1.0, 6.0, 3.0, 2.0, false));
  s.dt = 1.0;
  s.duration = 3.0;
  const RunRecord r = run(s);
  EXPECT_EQ(r.status, RunStatus::LeftTube) << r.status_detail;
  EXPECT_TRUE(r.safety_violation);
  EXPECT_TRUE(compute_metrics(r).safety_violation);
}

TEST(Run, Deterministic) {
  Scenario s = load_scenario(kScenarios / "straight_three_uav.scn");
  s.duration = 2.0;
  const RunRecord a = run(s);
  const RunRecord b = run(s);
  EXPECT_EQ(a.uav_position, b.uav_position);
  EXPECT_EQ(a.tension, b.tension);
  EXPECT_EQ(a.total_energy, b.total_energy);
}

// Max node-position gap between a closed-loop run and the kinematic run at
// the same dt.
double mode_gap(Scenario s, double dt) {
  s.dt = dt;
  s.duration = 20.0;
  s.observer_mode = ObserverMode::GroundTruth;
  RunOptions opt;
  opt.thrust_limit_override = std::numeric_limits<double>::infinity();
  s.sim_mode = SimMode::ClosedLoop;
  const RunRecord c = run(s, opt);
  s.sim_mode = SimMode::Kinematic;
  const RunRecord k = run(s, opt);
  EXPECT_EQ(c.steps(), k.steps());
  double gap = 0.0;
  for (std::size_t i = 0; i < std::min(c.node_position.size(), k.node_position.size()); ++i) {
    gap = std::max(gap, norm(c.node_position[i] - k.node_position[i]));
  }
  return gap;
}

TEST(Run, ModesConvergeAsDtShrinks) {
  const Scenario s = load_scenario(kScenarios / "straight_three_uav.scn");
  const double coarse = mode_gap(s, 0.01);
  const double fine = mode_gap(s, 0.002);
  EXPECT_LT(fine, coarse);
}

TEST(RelaxSprings, EnergyMonotone) {
  VirtualNodeSet n;
  n.uav_nodes = {{2, 0, 20}, {-1, 1.5, 20}, {-1, -2, 20}};
  n.tray_center = {0, 0, 20};
  n.load_node = {0, 0, 0};
  n.connection = default_connection(3);
  // Equilateral triangle of side 1.5 sqrt(3) around the tray and load nodes.
  n.rest_lengths = SquareMatrix(5, 1.5);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) n.rest_lengths(i, j) = i == j ? 0.0 : 1.5 * std::sqrt(3.0);
  }
  n.rest_lengths(3, 3) = n.rest_lengths(4, 4) = 0.0;
  const SpringRelaxation out = relax_springs(n, 0.01, 30.0);
  ASSERT_EQ(out.energy.size(), 3001u);
  for (std::size_t k = 1; k < out.energy.size(); ++k) {
    ASSERT_LE(out.energy[k], out.energy[k - 1] + 1e-12);
  }
  EXPECT_LT(out.energy.back(), 1e-3 * out.energy.front());
}

}  // namespace
}  // namespace vtube
