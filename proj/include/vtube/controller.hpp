#pragma once

#include <cstddef>
#include <vector>

#include "vtube/geometry.hpp"
#include "vtube/intermediate.hpp"
#include "vtube/plant.hpp"
#include "vtube/tube.hpp"

namespace vtube {

struct ControllerParams {
  double k1{1.0};   // approach gain, 1/s
  double k2{1.0};   // spring gain, 1/s
  double k3{1.0};   // barrier gain
  double v_m{1.5};  // per-node speed cap, m/s
  double r_s{0.4};  // safety radius, m
  double eps_t{0.1};
  double eps_s{0.1};
  double terminal_decay_distance{5.0};  // m of centerline before the end terminal
  double midline_epsilon{1e-6};         // m
};

/// Throws ValidationError naming the first violated invariant.
void validate(const ControllerParams& params);

enum class ControllerMode { Dissipative, Baseline };

struct ShapingFields {
  double l_field{1.0};
  double eta_field{1.0};
};

struct NodeCommand {
  Vec2 approach;
  Vec2 spring;
  Vec2 keep;
  Vec2 unsaturated;  // approach + spring + keep
  Vec2 combined;     // unsaturated clamped to v_m
  double barrier_value{0.0};
  Vec2 barrier_gradient;  // gradient of the barrier value w.r.t. the node position
  Vec2 tangent;
  double boundary_distance{0.0};  // +inf for the load node, which ignores the tube
  double l_star{0.0};
};

/// Smooth-step cutoff: 1 for d <= r_s, 0 for d >= (1 + eps_s) r_s, C1 between.
double barrier_cutoff(double d, const ControllerParams& params);
/// min(x, 1 + eps) with a C1 quadratic blend over [1 + eps/2, 1 + 3 eps/2].
double barrier_saturation(double x, double eps);

/// Barrier value as a function of boundary distance d > 0.
double barrier_of_distance(double d, const ControllerParams& params);
/// Derivative of barrier_of_distance with respect to d (<= 0).
double barrier_slope(double d, const ControllerParams& params);

/// Throws OutsideTube when q is not strictly inside the tube.
ShapingFields shaping_fields(const Tube& tube, Vec2 q, const ControllerParams& params);

Vec2 approach_command(const Tube& tube, Vec2 q, const ControllerParams& params);

/// Throws BoundaryContact when the boundary distance is <= 0.
double barrier_value(const Tube& tube, Vec2 q, const ControllerParams& params);

/// Gradient of barrier_value with respect to q (analytic).
Vec2 barrier_gradient(const Tube& tube, Vec2 q, const ControllerParams& params);

/// -(I - t t^T) c with c the barrier gradient; zero on the midline and where the
/// barrier is inactive.
Vec2 keep_command(const Tube& tube, Vec2 q, const ControllerParams& params);

/// UAV nodes and the tray center receive approach + spring + keep; the load node
/// receives the spring term only. Baseline mode drops the spring term.
NodeCommand node_command(std::size_t i, const VirtualNodeSet& nodes, const Tube& tube,
                         const ControllerParams& params,
                         ControllerMode mode = ControllerMode::Dissipative);

NodeCommand baseline_command(std::size_t i, const VirtualNodeSet& nodes, const Tube& tube,
                             const ControllerParams& params);

/// Maps every UAV node's combined command through node_velocity_to_uav, zeroes
/// the vertical component and saturates to v_m.
std::vector<Vec3> uav_desired_velocities(const SystemState& state, const VirtualNodeSet& nodes,
                                         const Tube& tube, const ControllerParams& params,
                                         ControllerMode mode = ControllerMode::Dissipative);

/// Same mapping from already computed node commands.
std::vector<Vec3> uav_desired_velocities(const SystemState& state, const VirtualNodeSet& nodes,
                                         const std::vector<NodeCommand>& commands,
                                         const ControllerParams& params);

}  // namespace vtube
