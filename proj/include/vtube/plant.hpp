#pragma once

#include <span>
#include <vector>

#include "vtube/geometry.hpp"

namespace vtube {

inline constexpr double kGravity = 9.81;  // m/s^2

struct UavState {
  Vec3 position;
  Vec3 velocity;
  double mass{2.0};
};

struct LoadState {
  Vec3 position;
  Vec3 velocity;
  double mass{18.0};
};

struct CableParams {
  double stiffness{5000.0};   // N/m
  double damping{50.0};       // N s/m
  double rest_length{8.0};    // m
  double max_tension{20.0};   // N
};

struct SystemState {
  std::vector<UavState> uavs;
  LoadState load;
  std::vector<CableParams> cables;  // one per UAV
  double time{0.0};

  std::size_t uav_count() const { return uavs.size(); }
};

struct CableForce {
  Vec3 on_uav;     // pulls the UAV toward the load
  double tension;  // in [0, max_tension]
};

/// Per-step force bookkeeping. The load receives the reaction -on_uav of
/// every cable; `load_cable_total` is that sum.
struct ForceBreakdown {
  std::vector<Vec3> thrust;
  std::vector<Vec3> gravity;
  std::vector<Vec3> cable_on_uav;
  std::vector<double> tension;
  Vec3 load_cable_total;
};

struct PlantConfig {
  double gravity{kGravity};
};

/// Unilateral clamped spring-damper cable. Throws CoincidentEndpoints when the
/// UAV and load are closer than 1e-9 m.
CableForce cable_force(const UavState& uav, const LoadState& load, const CableParams& cable);

ForceBreakdown compute_forces(const SystemState& state, std::span<const Vec3> thrusts,
                              const PlantConfig& config = {});

/// Cable reactions on the load plus its weight.
Vec3 load_net_force(const SystemState& state, const PlantConfig& config = {});

Vec3 uav_acceleration(const UavState& uav, const Vec3& thrust, const Vec3& cable_force_on_uav,
                      const PlantConfig& config = {});

Vec3 load_acceleration(const SystemState& state, const PlantConfig& config = {});

/// Semi-implicit Euler: v += a(x) dt, then x += v dt. Throws
/// PreconditionViolation for dt <= 0 or a thrust count mismatch, and
/// NumericalBlowup if any state component leaves [-1e9, 1e9].
SystemState step(const SystemState& state, std::span<const Vec3> thrusts, double dt,
                 const PlantConfig& config = {});

}  // namespace vtube
