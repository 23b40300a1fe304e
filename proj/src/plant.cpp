#include "vtube/plant.hpp"

#include <algorithm>
#include <cmath>

#include "vtube/error.hpp"

namespace vtube {

namespace {

constexpr double kBlowupLimit = 1e9;

bool blown_up(const Vec3& v) {
  return !is_finite(v) || std::abs(v.x) > kBlowupLimit || std::abs(v.y) > kBlowupLimit ||
         std::abs(v.z) > kBlowupLimit;
}

}  // namespace

CableForce cable_force(const UavState& uav, const LoadState& load, const CableParams& cable) {
  const Vec3 span = load.position - uav.position;
  const double length = norm(span);
  require(length > 1e-9, ErrorKind::CoincidentEndpoints, "UAV and load positions coincide");
  const Vec3 u = span / length;
  const double stretch_rate = dot(load.velocity - uav.velocity, u);
  const double raw = cable.stiffness * (length - cable.rest_length) + cable.damping * stretch_rate;
  const double tension = std::clamp(raw, 0.0, cable.max_tension);
  return {u * tension, tension};
}

ForceBreakdown compute_forces(const SystemState& state, std::span<const Vec3> thrusts,
                              const PlantConfig& config) {
  const std::size_t n = state.uav_count();
  require(state.cables.size() == n, ErrorKind::PreconditionViolation,
          "cable count must match UAV count");
  require(thrusts.size() == n, ErrorKind::PreconditionViolation,
          "thrust count must match UAV count");
  ForceBreakdown f;
  f.thrust.assign(thrusts.begin(), thrusts.end());
  f.gravity.resize(n);
  f.cable_on_uav.resize(n);
  f.tension.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CableForce c = cable_force(state.uavs[i], state.load, state.cables[i]);
    f.gravity[i] = {0.0, 0.0, -state.uavs[i].mass * config.gravity};
    f.cable_on_uav[i] = c.on_uav;
    f.tension[i] = c.tension;
    f.load_cable_total -= c.on_uav;
  }
  return f;
}

Vec3 load_net_force(const SystemState& state, const PlantConfig& config) {
  Vec3 total{0.0, 0.0, -state.load.mass * config.gravity};
  for (std::size_t i = 0; i < state.uav_count(); ++i) {
    total -= cable_force(state.uavs[i], state.load, state.cables[i]).on_uav;
  }
  return total;
}

Vec3 uav_acceleration(const UavState& uav, const Vec3& thrust, const Vec3& cable_force_on_uav,
                      const PlantConfig& config) {
  require(uav.mass > 0.0, ErrorKind::PreconditionViolation, "UAV mass must be positive");
  const Vec3 gravity{0.0, 0.0, -uav.mass * config.gravity};
  return (thrust + gravity + cable_force_on_uav) / uav.mass;
}

Vec3 load_acceleration(const SystemState& state, const PlantConfig& config) {
  require(state.load.mass > 0.0, ErrorKind::PreconditionViolation, "load mass must be positive");
  Vec3 cables;
  for (std::size_t i = 0; i < state.uav_count(); ++i) {
    cables -= cable_force(state.uavs[i], state.load, state.cables[i]).on_uav;
  }
  return Vec3{0.0, 0.0, -config.gravity} + cables / state.load.mass;
}

SystemState step(const SystemState& state, std::span<const Vec3> thrusts, double dt,
                 const PlantConfig& config) {
  require(dt > 0.0, ErrorKind::PreconditionViolation, "dt must be positive");
  const ForceBreakdown forces = compute_forces(state, thrusts, config);

  SystemState next = state;
  for (std::size_t i = 0; i < state.uav_count(); ++i) {
    UavState& u = next.uavs[i];
    u.velocity += uav_acceleration(u, forces.thrust[i], forces.cable_on_uav[i], config) * dt;
    u.position += u.velocity * dt;
    if (blown_up(u.position) || blown_up(u.velocity)) {
      throw Error(ErrorKind::NumericalBlowup, "UAV state diverged");
    }
  }
  LoadState& l = next.load;
  require(l.mass > 0.0, ErrorKind::PreconditionViolation, "load mass must be positive");
  const Vec3 load_acc = Vec3{0.0, 0.0, -config.gravity} + forces.load_cable_total / l.mass;
  l.velocity += load_acc * dt;
  l.position += l.velocity * dt;
  if (blown_up(l.position) || blown_up(l.velocity)) {
    throw Error(ErrorKind::NumericalBlowup, "load state diverged");
  }
  next.time = state.time + dt;
  return next;
}

}  // namespace vtube
