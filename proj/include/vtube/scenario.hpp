#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vtube/controller.hpp"
#include "vtube/intermediate.hpp"
#include "vtube/low_level.hpp"
#include "vtube/plant.hpp"
#include "vtube/tube.hpp"

namespace vtube {

enum class SimMode { ClosedLoop, Kinematic };
enum class ObserverMode { Estimate, GroundTruth };
enum class RestLengthMode { FromInitial, Explicit };

std::string_view to_string(SimMode m);
std::string_view to_string(ControllerMode m);
std::string_view to_string(ObserverMode m);

SimMode parse_sim_mode(std::string_view s);
ControllerMode parse_controller_mode(std::string_view s);
ObserverMode parse_observer_mode(std::string_view s);

/// Ring of UAVs around the load, equal inclination and equal tension, whose
/// virtual nodes average `node_radius` from the load node.
struct RingFormation {
  std::size_t uav_count{0};
  double node_radius{3.0};  // m
  double phase{0.0};        // rad, angle of UAV 0
  double uav_mass{2.0};
  std::vector<double> cable_lengths;
  double stiffness{5000.0};
  double damping{50.0};
  double max_tension{20.0};
};

struct RingPlacement {
  std::vector<UavState> uavs;
  std::vector<CableParams> cables;
  double inclination{0.0};  // rad from vertical
  double tension{0.0};      // N per cable at equilibrium
};

/// Static equilibrium placement. Throws ValidationError when the radius is
/// unreachable or the equilibrium tension reaches max_tension.
RingPlacement place_ring(const RingFormation& ring, const LoadState& load, double tray_height);

struct Scenario {
  std::string name;

  std::vector<Vec2> centerline;
  std::vector<double> half_widths;
  std::size_t resample_count{1001};

  LoadState load;
  std::vector<UavState> uavs;
  std::vector<CableParams> cables;

  double tray_height{0.0};  // z_u - z_l; 0 selects max rest length + 1 m
  SquareMatrix connection;  // empty selects default_connection
  RestLengthMode rest_length_mode{RestLengthMode::FromInitial};
  SquareMatrix rest_lengths;  // used when rest_length_mode == Explicit

  ControllerParams controller;
  VelocityLoopGains low_level;
  double observer_bandwidth{20.0};

  double dt{0.001};
  double duration{60.0};
  SimMode sim_mode{SimMode::ClosedLoop};
  ControllerMode controller_mode{ControllerMode::Dissipative};
  ObserverMode observer_mode{ObserverMode::Estimate};
  double baseline_max_tension{100.0};
  std::size_t output_stride{1};

  std::size_t uav_count() const { return uavs.size(); }
  double tray_altitude() const;
};

/// Throws ParseError (with line numbers) or ValidationError.
Scenario parse_scenario(std::string_view text, std::string_view source = "<memory>");
Scenario load_scenario(const std::filesystem::path& path);

/// Throws ValidationError naming the violated invariant.
void validate_scenario(const Scenario& s);

Tube build_tube(const Scenario& s);

/// Maps the initial UAVs to the tray, places the tray center over the load and
/// fills W and L0.
VirtualNodeSet initial_nodes(const Scenario& s);

/// Rebuilds the UAV and load node positions from the physical state; the tray
/// center is left untouched.
void map_nodes(const SystemState& state, double tray_altitude, VirtualNodeSet& nodes);

}  // namespace vtube
