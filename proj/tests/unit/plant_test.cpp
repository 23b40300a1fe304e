#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "vtube/error.hpp"
#include "vtube/plant.hpp"

namespace vtube {
namespace {

UavState uav_at(Vec3 p, Vec3 v = {}, double m = 2.0) { return {p, v, m}; }
LoadState load_at(Vec3 p, Vec3 v = {}, double m = 18.0) { return {p, v, m}; }

TEST(CableForce, SlackCableIsZero) {
  const CableForce f = cable_force(uav_at({0, 0, 5}), load_at({0, 0, 0}), {5000, 50, 8.0, 20});
  EXPECT_EQ(f.tension, 0.0);
  EXPECT_EQ(f.on_uav, (Vec3{0, 0, 0}));
}

TEST(CableForce, ClampedAtMaxTension) {
  const CableForce f = cable_force(uav_at({0, 0, 8.4}), load_at({0, 0, 0}), {5000, 50, 8.3, 20});
  EXPECT_DOUBLE_EQ(f.tension, 20.0);
  EXPECT_NEAR(f.on_uav.z, -20.0, 1e-12);
}

TEST(CableForce, HookeanSubstitution) {
  const CableForce f = cable_force(uav_at({0, 0, 0}), load_at({1.05, 0, 0}), {100, 0, 1.0, 50});
  EXPECT_NEAR(f.tension, 5.0, 1e-9);
  EXPECT_NEAR(f.on_uav.x, 5.0, 1e-9);
  EXPECT_NEAR(f.on_uav.y, 0.0, 1e-12);
}

TEST(CableForce, DampingUsesRelativeVelocity) {
  // Load moving away at 0.1 m/s along the cable adds b * 0.1.
  const CableForce f = cable_force(uav_at({0, 0, 0}), load_at({1.01, 0, 0}, {0.1, 0, 0}),
                                   {100, 10, 1.0, 50});
  EXPECT_NEAR(f.tension, 100 * 0.01 + 10 * 0.1, 1e-9);
}

TEST(CableForce, CoincidentEndpoints) {
  try {
    cable_force(uav_at({1, 1, 1}), load_at({1, 1, 1}), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CoincidentEndpoints);
  }
}

SystemState two_cable_45(double tension_stretch) {
  // UAVs at +-45 deg above the load, cable length sqrt(2).
  SystemState s;
  s.load = load_at({0, 0, 0});
  s.uavs = {uav_at({1, 0, 1}), uav_at({-1, 0, 1})};
  const CableParams c{1000, 0, std::sqrt(2.0) - tension_stretch, 1000};
  s.cables = {c, c};
  return s;
}

TEST(LoadNetForce, SlackIsGravityOnly) {
  SystemState s = two_cable_45(-0.1);
  const Vec3 f = load_net_force(s);
  EXPECT_EQ(f, (Vec3{0, 0, -18.0 * kGravity}));
}

TEST(LoadNetForce, SymmetricFortyFiveDegrees) {
  SystemState s = two_cable_45(0.01);
  const double T = 1000 * 0.01;
  const Vec3 f = load_net_force(s);
  EXPECT_NEAR(f.x, 0.0, 1e-12);
  EXPECT_NEAR(f.z, 2 * T * std::cos(M_PI / 4) - 18.0 * kGravity, 1e-9);
}

TEST(LoadNetForce, RestLengthRingIsGravityOnly) {
  const std::vector<double> lengths{8.3, 7.0, 8.6, 8.8, 8.3, 8.5, 8.4, 7.7, 8.3, 7.3};
  SystemState s;
  s.load = load_at({0, 0, 0});
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const double a = 2 * M_PI * i / lengths.size();
    const double r = 0.5 * lengths[i];
    const double h = std::sqrt(lengths[i] * lengths[i] - r * r);
    s.uavs.push_back(uav_at({r * std::cos(a), r * std::sin(a), h}));
    s.cables.push_back({5000, 50, lengths[i], 20});
  }
  const Vec3 f = load_net_force(s);
  EXPECT_NEAR(f.x, 0.0, 1e-9);
  EXPECT_NEAR(f.y, 0.0, 1e-9);
  EXPECT_NEAR(f.z, -18.0 * kGravity, 1e-6);
}

TEST(UavAcceleration, Examples) {
  const UavState u = uav_at({}, {}, 2.0);
  const Vec3 pull{0, 0, -5};
  const Vec3 hover = Vec3{0, 0, 2.0 * kGravity} - pull;
  EXPECT_EQ(uav_acceleration(u, hover, pull), (Vec3{0, 0, 0}));
  EXPECT_NEAR(uav_acceleration(u, {}, {}).z, -kGravity, 1e-15);
  EXPECT_NEAR(uav_acceleration(u, {0, 0, 25}, pull).z, (25 - 19.62 - 5) / 2, 1e-12);
}

TEST(LoadAcceleration, Examples) {
  SystemState s;
  s.load = load_at({0, 0, 0});
  s.uavs = {uav_at({0, 0, 10})};
  s.cables = {{100, 0, 20, 1000}};
  EXPECT_NEAR(load_acceleration(s).z, -kGravity, 1e-15);
  // 180 N upward from a single taut vertical cable.
  s.cables = {{180, 0, 9, 1000}};
  EXPECT_NEAR(load_acceleration(s).z, 10.0 - 9.81, 1e-12);
  s.cables = {{18 * kGravity, 0, 9, 1000}};
  EXPECT_NEAR(load_acceleration(s).z, 0.0, 1e-12);
}

TEST(Step, ConstantVelocityAdvance) {
  SystemState s;
  s.load = load_at({0, 0, 0});
  s.uavs = {uav_at({0, 0, 1}, {1, 0, 0})};
  s.cables = {{100, 0, 5, 10}};
  const Vec3 thrust{0, 0, 2.0 * kGravity};
  const SystemState n = step(s, std::vector<Vec3>{thrust}, 0.001, {0.0});
  EXPECT_NEAR(n.uavs[0].position.x, 0.001, 1e-15);
  EXPECT_DOUBLE_EQ(n.time, 0.001);
}

TEST(Step, FreeFallWithinSemiImplicitBias) {
  SystemState s;
  s.load = load_at({0, 0, -100});
  s.uavs = {uav_at({0, 0, 0})};
  s.cables = {{100, 0, 1000, 10}};
  const double dt = 1e-3;
  for (int k = 0; k < 1000; ++k) s = step(s, std::vector<Vec3>{{}}, dt);
  const double exact = -0.5 * kGravity;
  const double bias = kGravity * dt * 1.0 / 2.0;
  EXPECT_NEAR(s.uavs[0].position.z, exact, bias + 1e-9);
  EXPECT_NEAR(s.uavs[0].position.z, -4.9054, 0.005);
}

TEST(Step, Preconditions) {
  SystemState s = two_cable_45(0.0);
  const std::vector<Vec3> thrusts(2);
  EXPECT_THROW(step(s, thrusts, 0.0), Error);
  EXPECT_THROW(step(s, std::vector<Vec3>(1), 0.001), Error);
}

TEST(Step, BlowupDetected) {
  SystemState s = two_cable_45(0.0);
  const std::vector<Vec3> thrusts{{1e15, 0, 0}, {}};
  try {
    step(s, thrusts, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NumericalBlowup);
  }
}

SystemState random_system(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SystemState s;
  s.load = load_at({u(rng), u(rng), 0}, {u(rng), u(rng), u(rng)}, 5.0);
  for (int i = 0; i < 4; ++i) {
    const double a = M_PI / 2 * i;
    s.uavs.push_back(uav_at({2 * std::cos(a), 2 * std::sin(a), 2}, {u(rng), u(rng), u(rng)}));
    s.cables.push_back({500, 5, 2.7, 40});
  }
  return s;
}

TEST(StepProperties, UnilateralAndThirdLaw) {
  std::mt19937_64 rng(3);
  SystemState s = random_system(rng);
  const std::vector<Vec3> thrusts(4, Vec3{0, 0, 2.0 * kGravity + 5.0});
  for (int k = 0; k < 2000; ++k) {
    const ForceBreakdown f = compute_forces(s, thrusts);
    Vec3 reactions;
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_GE(f.tension[i], 0.0);
      EXPECT_LE(f.tension[i], s.cables[i].max_tension);
      reactions -= f.cable_on_uav[i];
    }
    EXPECT_LT(norm(reactions - f.load_cable_total), 1e-12);
    s = step(s, thrusts, 1e-3);
  }
}

TEST(StepProperties, SlackHorizonHasNoCableForce) {
  SystemState s;
  s.load = load_at({0, 0, 0}, {0.1, 0, 0});
  s.uavs = {uav_at({0, 0, 5})};
  s.cables = {{5000, 50, 6.0, 20}};
  const std::vector<Vec3> thrusts{{0, 0, 0}};
  for (int k = 0; k < 500; ++k) {
    EXPECT_EQ(compute_forces(s, thrusts).tension[0], 0.0);
    s = step(s, thrusts, 1e-3, {0.0});
  }
}

TEST(StepProperties, MomentumConservedWithoutGravity) {
  std::mt19937_64 rng(5);
  SystemState s = random_system(rng);
  auto momentum = [](const SystemState& st) {
    Vec3 p = st.load.velocity * st.load.mass;
    for (const auto& u : st.uavs) p += u.velocity * u.mass;
    return p;
  };
  const std::vector<Vec3> zero(4);
  Vec3 p0 = momentum(s);
  for (int k = 0; k < 2000; ++k) {
    s = step(s, zero, 1e-3, {0.0});
    const Vec3 p1 = momentum(s);
    EXPECT_LE(norm(p1 - p0), 1e-9 * std::max(1.0, norm(p0)));
    p0 = p1;
  }
}

TEST(StepProperties, Deterministic) {
  std::mt19937_64 r1(9), r2(9);
  SystemState a = random_system(r1), b = random_system(r2);
  const std::vector<Vec3> thrusts(4, Vec3{0.3, -0.2, 25.0});
  for (int k = 0; k < 1000; ++k) {
    a = step(a, thrusts, 1e-3);
    b = step(b, thrusts, 1e-3);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.uavs[i].position, b.uavs[i].position);
    EXPECT_EQ(a.uavs[i].velocity, b.uavs[i].velocity);
  }
  EXPECT_EQ(a.load.position, b.load.position);
}

}  // namespace
}  // namespace vtube
