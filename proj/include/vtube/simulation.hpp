#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "vtube/controller.hpp"
#include "vtube/intermediate.hpp"
#include "vtube/scenario.hpp"

namespace vtube {

enum class RunStatus { ReachedTerminal, Timeout, LeftTube, Blowup };

std::string_view to_string(RunStatus s);

inline constexpr double kTerminalArrival = 0.99;  // tray-node l at arrival

/// Per-step series stored flat: per-UAV series use stride uav_count, per-node
/// series stride node_count (UAV nodes, tray center, load node).
struct RunRecord {
  std::size_t uav_count{0};
  std::size_t node_count{0};

  std::vector<double> time;
  std::vector<Vec3> uav_position;
  std::vector<Vec3> uav_velocity;
  std::vector<Vec3> load_position;
  std::vector<Vec3> load_velocity;
  std::vector<double> tension;
  std::vector<Vec2> node_position;
  std::vector<Vec2> node_command;  // saturated combined command

  std::vector<double> min_inter_uav;      // 3D distance between UAVs
  std::vector<double> min_uav_boundary;   // UAV xy to the tube boundary
  std::vector<double> min_node_boundary;  // UAV nodes and tray center
  std::vector<double> tray_l;             // tray-node arc parameter

  std::vector<double> approach_energy;  // accumulated V_l
  std::vector<double> spring_energy;
  std::vector<double> barrier_energy;
  std::vector<double> total_energy;
  std::vector<double> load_vertical_force;  // z of the summed cable reactions on the load

  SquareMatrix connection;
  SquareMatrix rest_lengths;

  RunStatus status{RunStatus::Timeout};
  std::string status_detail;
  bool safety_violation{false};  // some step had a distance <= 0

  std::size_t steps() const { return time.size(); }
};

struct RunSummary {
  double min_uav_boundary{0.0};
  double min_node_boundary{0.0};
  double min_inter_uav{0.0};
  double max_tension{0.0};
  double tension_spread{0.0};  // time average of max - min tension
  double arrival_time{-1.0};   // -1 when the terminal was not reached
  double formation_error{0.0};        // max |l - L0| over the final 10% of steps
  double formation_error_ratio{0.0};  // max |l - L0| / L0 over the same window
  double max_energy_increase{0.0};    // max over steps of V_{k+1} - V_k
  RunStatus status{RunStatus::Timeout};
  bool safety_violation{false};
};

struct RunOptions {
  PlantConfig plant;
  double thrust_limit_override{0.0};  // > 0 replaces the scenario thrust limit
};

/// Deterministic rollout of a validated scenario. Component failures end the
/// run with status LeftTube or Blowup instead of propagating.
RunRecord run(const Scenario& scenario, const RunOptions& options = {});

/// Throws EmptyRecord for a record without samples.
RunSummary compute_metrics(const RunRecord& record);

struct SpringRelaxation {
  std::vector<double> energy;  // per step, including the initial state
  VirtualNodeSet final_nodes;
};

/// Moves every node at its spring command alone for `duration`, with no tube.
SpringRelaxation relax_springs(VirtualNodeSet nodes, double dt, double duration);

}  // namespace vtube
