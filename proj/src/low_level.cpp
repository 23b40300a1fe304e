#include "vtube/low_level.hpp"

#include "vtube/error.hpp"

namespace vtube {

void validate(const VelocityLoopGains& g) {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::ValidationError, what);
  };
  check(g.kp.x > 0.0 && g.kp.y > 0.0 && g.kp.z > 0.0, "kp must be positive on every axis");
  check(g.ki.x >= 0.0 && g.ki.y >= 0.0 && g.ki.z >= 0.0, "ki must be non-negative");
  check(g.kd.x >= 0.0 && g.kd.y >= 0.0 && g.kd.z >= 0.0, "kd must be non-negative");
  check(g.integral_limit > 0.0, "integral_limit must be positive");
  check(g.thrust_limit > 0.0, "thrust_limit must be positive");
}

ObserverState observe_disturbance(const ObserverState& obs, const UavState& uav,
                                  const Vec3& applied_thrust, double dt, double gravity) {
  require(dt > 0.0, ErrorKind::PreconditionViolation, "dt must be positive");
  require(obs.bandwidth > 0.0, ErrorKind::PreconditionViolation, "bandwidth must be positive");
  const Vec3 weight{0.0, 0.0, -uav.mass * gravity};
  const Vec3 residual = (uav.velocity - obs.last_velocity) * (uav.mass / dt) - applied_thrust - weight;
  ObserverState next = obs;
  next.estimate += (obs.bandwidth * dt) * (-residual - obs.estimate);
  next.last_velocity = uav.velocity;
  return next;
}

ThrustResult thrust_command(const VelocityLoopState& loop, const VelocityLoopGains& g,
                            const UavState& uav, const Vec3& v_desired, double dt,
                            double gravity) {
  require(dt > 0.0, ErrorKind::PreconditionViolation, "dt must be positive");
  ThrustResult r;
  r.state = loop;
  const Vec3 e = v_desired - uav.velocity;
  r.state.integral_error = saturate(loop.integral_error + e * dt, g.integral_limit);
  const Vec3 de = loop.primed ? (e - loop.previous_error) / dt : Vec3{};
  r.state.previous_error = e;
  r.state.primed = true;

  const Vec3 weight{0.0, 0.0, -uav.mass * gravity};
  r.breakdown.proportional = uav.mass * hadamard(g.kp, e);
  r.breakdown.integral = uav.mass * hadamard(g.ki, r.state.integral_error);
  r.breakdown.derivative = uav.mass * hadamard(g.kd, de);
  r.breakdown.feedforward = loop.observer.estimate - weight;
  r.breakdown.raw = r.breakdown.proportional + r.breakdown.integral + r.breakdown.derivative +
                    r.breakdown.feedforward;
  r.thrust = saturate(r.breakdown.raw, g.thrust_limit);
  return r;
}

}  // namespace vtube
