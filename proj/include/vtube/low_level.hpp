#pragma once

#include "vtube/geometry.hpp"
#include "vtube/plant.hpp"

namespace vtube {

struct VelocityLoopGains {
  Vec3 kp{2.0, 2.0, 2.0};
  Vec3 ki{0.1, 0.1, 0.1};
  Vec3 kd{0.1, 0.1, 0.1};
  double integral_limit{2.0};
  double thrust_limit{30.0};  // N
};

void validate(const VelocityLoopGains& gains);

/// f_hat tracks the cable reaction, i.e. the negated force the cable applies to
/// the UAV, so that T = ... + f_hat - G cancels it.
struct ObserverState {
  Vec3 estimate;
  double bandwidth{20.0};  // rad/s
  Vec3 last_velocity;
};

struct VelocityLoopState {
  Vec3 integral_error;
  Vec3 previous_error;
  ObserverState observer;
  bool primed{false};  // false until the first thrust_command; suppresses the derivative kick
};

/// r = m (v - v_last) / dt - T_applied - G;  f_hat += bandwidth dt (-r - f_hat).
ObserverState observe_disturbance(const ObserverState& obs, const UavState& uav,
                                  const Vec3& applied_thrust, double dt,
                                  double gravity = kGravity);

struct ThrustBreakdown {
  Vec3 proportional;
  Vec3 integral;
  Vec3 derivative;
  Vec3 feedforward;  // f_hat - G
  Vec3 raw;          // sum before the thrust clamp
};

struct ThrustResult {
  Vec3 thrust;
  VelocityLoopState state;
  ThrustBreakdown breakdown;
};

/// T = m (kp e + ki int(e) + kd de/dt) + f_hat - G, norm-clamped to thrust_limit.
ThrustResult thrust_command(const VelocityLoopState& loop, const VelocityLoopGains& gains,
                            const UavState& uav, const Vec3& v_desired, double dt,
                            double gravity = kGravity);

}  // namespace vtube
