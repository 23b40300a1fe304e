#include "vtube/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vtube/error.hpp"

namespace vtube {

void validate(const ControllerParams& p) {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::ValidationError, what);
  };
  check(p.k1 > 0.0, "k1 must be positive");
  check(p.k2 > 0.0, "k2 must be positive");
  check(p.k3 > 0.0, "k3 must be positive");
  check(p.v_m > 0.0, "v_m must be positive");
  check(p.r_s > 0.0, "r_s must be positive");
  check(p.eps_t > 0.0 && p.eps_t <= 1.0, "eps_t must lie in (0, 1]");
  check(p.eps_s > 0.0 && p.eps_s <= 1.0, "eps_s must lie in (0, 1]");
  check(p.terminal_decay_distance > 0.0, "terminal_decay_distance must be positive");
  check(p.midline_epsilon > 0.0, "midline_epsilon must be positive");
}

double barrier_cutoff(double d, const ControllerParams& p) {
  const double x = (d - p.r_s) / (p.eps_s * p.r_s);
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  return 1.0 - x * x * (3.0 - 2.0 * x);
}

namespace {

double cutoff_slope(double d, const ControllerParams& p) {
  const double w = p.eps_s * p.r_s;
  const double x = (d - p.r_s) / w;
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -6.0 * x * (1.0 - x) / w;
}

double saturation_slope(double x, double eps) {
  const double lo = 1.0 + 0.5 * eps;
  if (x <= lo) return 1.0;
  if (x >= lo + eps) return 0.0;
  return 1.0 - (x - lo) / eps;
}

}  // namespace

double barrier_saturation(double x, double eps) {
  const double lo = 1.0 + 0.5 * eps;
  if (x <= lo) return x;
  if (x >= lo + eps) return 1.0 + eps;
  const double u = x - lo;
  return x - u * u / (2.0 * eps);
}

double barrier_of_distance(double d, const ControllerParams& p) {
  const double sigma = barrier_cutoff(d, p);
  if (sigma == 0.0) return 0.0;
  const double den = (1.0 + p.eps_t) * d - p.r_s * barrier_saturation(d / p.r_s, p.eps_s);
  return p.k3 * sigma / den;
}

double barrier_slope(double d, const ControllerParams& p) {
  const double sigma = barrier_cutoff(d, p);
  if (sigma == 0.0) return 0.0;
  const double den = (1.0 + p.eps_t) * d - p.r_s * barrier_saturation(d / p.r_s, p.eps_s);
  const double den_slope = (1.0 + p.eps_t) - saturation_slope(d / p.r_s, p.eps_s);
  return p.k3 * (cutoff_slope(d, p) * den - sigma * den_slope) / (den * den);
}

namespace {

TubeProjection project_inside(const Tube& tube, Vec2 q) {
  const TubeProjection proj = tube.project(q);
  if (!(proj.boundary_distance > 0.0)) {
    throw Error(ErrorKind::OutsideTube, "node is not strictly inside the tube");
  }
  return proj;
}

ShapingFields fields_at(const Tube& tube, const TubeProjection& proj,
                        const ControllerParams& p) {
  const double remaining = std::max(0.0, tube.length() - proj.arc);
  return {std::min(1.0, remaining / p.terminal_decay_distance), 1.0};
}

Vec2 approach_at(const Tube& tube, const TubeProjection& proj, const ControllerParams& p) {
  const ShapingFields f = fields_at(tube, proj, p);
  return saturate((p.k1 * f.l_field * f.eta_field) * proj.tangent, p.v_m);
}

Vec2 gradient_at(Vec2 q, const TubeProjection& proj, const ControllerParams& p) {
  const double slope = barrier_slope(proj.boundary_distance, p);
  if (slope == 0.0) return {};
  const Vec2 offset = q - proj.midpoint;
  const double r = norm(offset);
  const Vec2 normal = r > 0.0 ? offset / r : Vec2{};
  return slope * (proj.half_width_gradient - normal);
}

Vec2 keep_at(Vec2 q, const TubeProjection& proj, const Vec2& gradient,
             const ControllerParams& p) {
  if (norm(q - proj.midpoint) < p.midline_epsilon) return {};
  const Vec2& t = proj.tangent;
  return -(gradient - dot(t, gradient) * t);
}

}  // namespace

ShapingFields shaping_fields(const Tube& tube, Vec2 q, const ControllerParams& p) {
  return fields_at(tube, project_inside(tube, q), p);
}

Vec2 approach_command(const Tube& tube, Vec2 q, const ControllerParams& p) {
  return approach_at(tube, project_inside(tube, q), p);
}

double barrier_value(const Tube& tube, Vec2 q, const ControllerParams& p) {
  const double d = tube.project(q).boundary_distance;
  if (!(d > 0.0)) throw Error(ErrorKind::BoundaryContact, "node touches or crosses the boundary");
  return barrier_of_distance(d, p);
}

Vec2 barrier_gradient(const Tube& tube, Vec2 q, const ControllerParams& p) {
  return gradient_at(q, project_inside(tube, q), p);
}

Vec2 keep_command(const Tube& tube, Vec2 q, const ControllerParams& p) {
  const TubeProjection proj = project_inside(tube, q);
  return keep_at(q, proj, gradient_at(q, proj, p), p);
}

NodeCommand node_command(std::size_t i, const VirtualNodeSet& nodes, const Tube& tube,
                         const ControllerParams& p, ControllerMode mode) {
  NodeCommand c;
  c.boundary_distance = std::numeric_limits<double>::infinity();
  if (mode == ControllerMode::Dissipative) c.spring = spring_command(i, nodes);
  if (i != nodes.load_index()) {
    const Vec2 q = nodes.planar_position(i);
    const TubeProjection proj = project_inside(tube, q);
    c.tangent = proj.tangent;
    c.boundary_distance = proj.boundary_distance;
    c.l_star = proj.l_star;
    c.approach = approach_at(tube, proj, p);
    c.barrier_value = barrier_of_distance(proj.boundary_distance, p);
    c.barrier_gradient = gradient_at(q, proj, p);
    c.keep = keep_at(q, proj, c.barrier_gradient, p);
  }
  c.unsaturated = c.approach + c.spring + c.keep;
  c.combined = saturate(c.unsaturated, p.v_m);
  return c;
}

NodeCommand baseline_command(std::size_t i, const VirtualNodeSet& nodes, const Tube& tube,
                             const ControllerParams& p) {
  return node_command(i, nodes, tube, p, ControllerMode::Baseline);
}

std::vector<Vec3> uav_desired_velocities(const SystemState& state, const VirtualNodeSet& nodes,
                                         const std::vector<NodeCommand>& commands,
                                         const ControllerParams& p) {
  require(state.uav_count() == nodes.uav_count(), ErrorKind::PreconditionViolation,
          "UAV count must match node count");
  require(commands.size() >= nodes.uav_count(), ErrorKind::PreconditionViolation,
          "missing node commands");
  const double z_u = nodes.tray_center.z;
  std::vector<Vec3> out(state.uav_count());
  for (std::size_t i = 0; i < state.uav_count(); ++i) {
    Vec3 v = node_velocity_to_uav(lift(commands[i].combined, 0.0), state.load.velocity, z_u,
                                  state.uavs[i].position.z, state.load.position.z);
    v.z = 0.0;
    out[i] = saturate(v, p.v_m);
  }
  return out;
}

std::vector<Vec3> uav_desired_velocities(const SystemState& state, const VirtualNodeSet& nodes,
                                         const Tube& tube, const ControllerParams& p,
                                         ControllerMode mode) {
  std::vector<NodeCommand> commands(nodes.uav_count());
  for (std::size_t i = 0; i < nodes.uav_count(); ++i) {
    commands[i] = node_command(i, nodes, tube, p, mode);
  }
  return uav_desired_velocities(state, nodes, commands, p);
}

}  // namespace vtube
