#include "vtube/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vtube/error.hpp"
#include "vtube/low_level.hpp"
#include "vtube/plant.hpp"

namespace vtube {

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ReachedTerminal: return "reached_terminal";
    case RunStatus::Timeout: return "timeout";
    case RunStatus::LeftTube: return "left_tube";
    case RunStatus::Blowup: return "blowup";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t step_count(double duration, double dt) {
  return static_cast<std::size_t>(std::floor(duration / dt + 1e-9));
}

class Rollout {
 public:
  Rollout(const Scenario& sc, const RunOptions& opt)
      : sc_(sc), opt_(opt), tube_(build_tube(sc)), params_(sc.controller),
        z_u_(sc.tray_altitude()), nodes_(initial_nodes(sc)) {
    state_.uavs = sc.uavs;
    state_.load = sc.load;
    state_.cables = sc.cables;
    if (sc.controller_mode == ControllerMode::Baseline) {
      for (CableParams& c : state_.cables) c.max_tension = sc.baseline_max_tension;
    }
    gains_ = sc.low_level;
    if (opt.thrust_limit_override > 0.0) gains_.thrust_limit = opt.thrust_limit_override;
    loops_.resize(state_.uav_count());
    last_thrust_.resize(state_.uav_count());
    for (std::size_t i = 0; i < state_.uav_count(); ++i) {
      ObserverState& obs = loops_[i].observer;
      obs.bandwidth = sc.observer_bandwidth;
      obs.estimate = -cable_force(state_.uavs[i], state_.load, state_.cables[i]).on_uav;
      obs.last_velocity = state_.uavs[i].velocity;
    }
    commands_.resize(nodes_.node_count());

    rec_.uav_count = state_.uav_count();
    rec_.node_count = nodes_.node_count();
    rec_.connection = nodes_.connection;
    rec_.rest_lengths = nodes_.rest_lengths;
  }

  RunRecord execute() {
    const std::size_t steps = step_count(sc_.duration, sc_.dt);
    reserve(steps + 1);
    try {
      evaluate();
      record(0);
      if (arrived()) return finish(RunStatus::ReachedTerminal, "");
      for (std::size_t k = 1; k <= steps; ++k) {
        const std::vector<Vec2> before = planar_nodes();
        if (sc_.sim_mode == SimMode::ClosedLoop) {
          advance_closed_loop();
        } else {
          advance_kinematic();
        }
        accumulate_approach(before);
        evaluate();
        record(k);
        if (arrived()) return finish(RunStatus::ReachedTerminal, "");
      }
    } catch (const Error& e) {
      const bool outside =
          e.kind() == ErrorKind::OutsideTube || e.kind() == ErrorKind::BoundaryContact;
      if (outside) rec_.safety_violation = true;
      return finish(outside ? RunStatus::LeftTube : RunStatus::Blowup, e.what());
    }
    return finish(RunStatus::Timeout, "");
  }

 private:
  void reserve(std::size_t n) {
    rec_.time.reserve(n);
    rec_.uav_position.reserve(n * rec_.uav_count);
    rec_.uav_velocity.reserve(n * rec_.uav_count);
    rec_.tension.reserve(n * rec_.uav_count);
    rec_.node_position.reserve(n * rec_.node_count);
    rec_.node_command.reserve(n * rec_.node_count);
  }

  RunRecord finish(RunStatus status, std::string detail) {
    rec_.status = status;
    rec_.status_detail = std::move(detail);
    return std::move(rec_);
  }

  void evaluate() {
    const ControllerMode mode = sc_.controller_mode;
    for (std::size_t i = 0; i < nodes_.node_count(); ++i) {
      commands_[i] = node_command(i, nodes_, tube_, params_, mode);
    }
  }

  bool arrived() const { return commands_[nodes_.tray_index()].l_star >= kTerminalArrival; }

  std::vector<Vec2> planar_nodes() const {
    std::vector<Vec2> q(nodes_.node_count());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = nodes_.planar_position(i);
    return q;
  }

  void advance_tray() {
    const std::size_t t = nodes_.tray_index();
    nodes_.tray_center += lift(commands_[t].combined * sc_.dt, 0.0);
  }

  void advance_closed_loop() {
    const double dt = sc_.dt;
    const std::vector<Vec3> desired = uav_desired_velocities(state_, nodes_, commands_, params_);
    std::vector<Vec3> thrusts(state_.uav_count());
    for (std::size_t i = 0; i < state_.uav_count(); ++i) {
      const UavState& u = state_.uavs[i];
      VelocityLoopState& loop = loops_[i];
      if (sc_.observer_mode == ObserverMode::GroundTruth) {
        loop.observer.estimate = -cable_force(u, state_.load, state_.cables[i]).on_uav;
        loop.observer.last_velocity = u.velocity;
      } else if (primed_) {
        loop.observer = observe_disturbance(loop.observer, u, last_thrust_[i], dt, opt_.plant.gravity);
      }
      const ThrustResult r = thrust_command(loop, gains_, u, desired[i], dt, opt_.plant.gravity);
      loop = r.state;
      thrusts[i] = r.thrust;
    }
    state_ = step(state_, thrusts, dt, opt_.plant);
    last_thrust_ = thrusts;
    primed_ = true;
    advance_tray();
    map_nodes(state_, z_u_, nodes_);
  }

  void advance_kinematic() {
    const double dt = sc_.dt;
    const double z_l = state_.load.position.z;
    for (std::size_t i = 0; i < nodes_.node_count(); ++i) {
      nodes_.set_position(i, nodes_.position(i) + lift(commands_[i].combined * dt, 0.0));
    }
    // The physical state follows the nodes through the inverse tray mapping.
    const Vec2 load_xy = nodes_.planar_position(nodes_.load_index());
    state_.load.position = lift(load_xy, z_l);
    state_.load.velocity = lift(commands_[nodes_.load_index()].combined, 0.0);
    const std::vector<Vec3> desired = uav_desired_velocities(state_, nodes_, commands_, params_);
    for (std::size_t i = 0; i < state_.uav_count(); ++i) {
      UavState& u = state_.uavs[i];
      const double shrink = std::abs(z_u_ - u.position.z) / std::abs(z_u_ - z_l);
      u.position = lift(load_xy + shrink * (nodes_.planar_position(i) - load_xy), u.position.z);
      u.velocity = desired[i];
    }
    state_.time += dt;
  }

  // V_l grows by -(a + t t^T grad V_t) . dq per node, so V_l + springs + barriers
  // changes by -v_unsat . v_sat dt to first order.
  void accumulate_approach(const std::vector<Vec2>& before) {
    for (std::size_t i = 0; i < nodes_.node_count(); ++i) {
      if (i == nodes_.load_index()) continue;
      const NodeCommand& c = commands_[i];
      const Vec2 drive = c.approach + dot(c.tangent, c.barrier_gradient) * c.tangent;
      approach_energy_ -= dot(drive, nodes_.planar_position(i) - before[i]);
    }
  }

  void record(std::size_t k) {
    const std::size_t n = state_.uav_count();
    rec_.time.push_back(static_cast<double>(k) * sc_.dt);
    double min_pair = kInf;
    double min_uav_boundary = kInf;
    Vec3 load_force;
    for (std::size_t i = 0; i < n; ++i) {
      const UavState& u = state_.uavs[i];
      rec_.uav_position.push_back(u.position);
      rec_.uav_velocity.push_back(u.velocity);
      double tension = 0.0;
      if (sc_.sim_mode == SimMode::ClosedLoop) {
        const CableForce f = cable_force(u, state_.load, state_.cables[i]);
        tension = f.tension;
        load_force -= f.on_uav;
      }
      rec_.tension.push_back(tension);
      for (std::size_t j = i + 1; j < n; ++j) {
        min_pair = std::min(min_pair, norm(u.position - state_.uavs[j].position));
      }
      min_uav_boundary = std::min(min_uav_boundary, tube_.project(planar(u.position)).boundary_distance);
    }
    rec_.load_position.push_back(state_.load.position);
    rec_.load_velocity.push_back(state_.load.velocity);
    rec_.load_vertical_force.push_back(load_force.z);

    double min_node_boundary = kInf;
    double barrier = 0.0;
    for (std::size_t i = 0; i < nodes_.node_count(); ++i) {
      rec_.node_position.push_back(nodes_.planar_position(i));
      rec_.node_command.push_back(commands_[i].combined);
      min_node_boundary = std::min(min_node_boundary, commands_[i].boundary_distance);
      barrier += commands_[i].barrier_value;
    }
    const double spring = spring_lyapunov(nodes_).total;
    rec_.min_inter_uav.push_back(min_pair);
    rec_.min_uav_boundary.push_back(min_uav_boundary);
    rec_.min_node_boundary.push_back(min_node_boundary);
    rec_.tray_l.push_back(commands_[nodes_.tray_index()].l_star);
    rec_.approach_energy.push_back(approach_energy_);
    rec_.spring_energy.push_back(spring);
    rec_.barrier_energy.push_back(barrier);
    rec_.total_energy.push_back(approach_energy_ + spring + barrier);
    if (min_pair <= 0.0 || min_uav_boundary <= 0.0 || min_node_boundary <= 0.0) {
      rec_.safety_violation = true;
    }
  }

  const Scenario& sc_;
  RunOptions opt_;
  Tube tube_;
  ControllerParams params_;
  double z_u_;
  VirtualNodeSet nodes_;
  SystemState state_;
  VelocityLoopGains gains_;
  std::vector<VelocityLoopState> loops_;
  std::vector<Vec3> last_thrust_;
  std::vector<NodeCommand> commands_;
  bool primed_{false};
  double approach_energy_{0.0};
  RunRecord rec_;
};

}  // namespace

RunRecord run(const Scenario& scenario, const RunOptions& options) {
  validate_scenario(scenario);
  return Rollout(scenario, options).execute();
}

RunSummary compute_metrics(const RunRecord& r) {
  const std::size_t steps = r.steps();
  require(steps > 0, ErrorKind::EmptyRecord, "run record has no samples");
  const std::size_t n = r.uav_count;
  RunSummary s;
  s.status = r.status;
  s.safety_violation = r.safety_violation;
  s.min_uav_boundary = *std::min_element(r.min_uav_boundary.begin(), r.min_uav_boundary.end());
  s.min_node_boundary = *std::min_element(r.min_node_boundary.begin(), r.min_node_boundary.end());
  s.min_inter_uav = *std::min_element(r.min_inter_uav.begin(), r.min_inter_uav.end());

  double spread_sum = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const auto first = r.tension.begin() + static_cast<std::ptrdiff_t>(k * n);
    const auto [lo, hi] = std::minmax_element(first, first + static_cast<std::ptrdiff_t>(n));
    s.max_tension = std::max(s.max_tension, *hi);
    spread_sum += *hi - *lo;
  }
  s.tension_spread = spread_sum / static_cast<double>(steps);
  if (r.status == RunStatus::ReachedTerminal) s.arrival_time = r.time.back();

  const double window_start = 0.9 * r.time.back();
  const std::size_t m = r.node_count;
  for (std::size_t k = 0; k < steps; ++k) {
    if (r.time[k] < window_start) continue;
    const Vec2* q = r.node_position.data() + k * m;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        if (r.connection(i, j) == 0.0) continue;
        const double l0 = r.rest_lengths(i, j);
        const double err = std::abs(norm(q[i] - q[j]) - l0);
        s.formation_error = std::max(s.formation_error, err);
        s.formation_error_ratio = std::max(s.formation_error_ratio, err / l0);
      }
    }
  }
  for (std::size_t k = 1; k < steps; ++k) {
    s.max_energy_increase =
        std::max(s.max_energy_increase, r.total_energy[k] - r.total_energy[k - 1]);
  }
  return s;
}

SpringRelaxation relax_springs(VirtualNodeSet nodes, double dt, double duration) {
  require(dt > 0.0, ErrorKind::PreconditionViolation, "dt must be positive");
  const std::size_t steps = step_count(duration, dt);
  SpringRelaxation out;
  out.energy.reserve(steps + 1);
  out.energy.push_back(spring_lyapunov(nodes).total);
  std::vector<Vec2> v(nodes.node_count());
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = spring_command(i, nodes);
    for (std::size_t i = 0; i < v.size(); ++i) {
      nodes.set_position(i, nodes.position(i) + lift(v[i] * dt, 0.0));
    }
    out.energy.push_back(spring_lyapunov(nodes).total);
  }
  out.final_nodes = std::move(nodes);
  return out;
}

}  // namespace vtube
