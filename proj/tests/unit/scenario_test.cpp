#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "expect_error.hpp"
#include "vtube/scenario.hpp"

namespace vtube {
namespace {

using testing::expect_error;

const std::filesystem::path kScenarios = VTUBE_SOURCE_DIR "/scenarios";

const char* kMinimal = R"(# three UAVs in a straight tube
duration = 5

[tube]
centerline = 0 0; 30 0
half_widths = 4 4
resample_count = 301

[load]
position = 4 0 0
mass = 4.5

[formation]
uav_count = 3
node_radius = 3
cable_lengths = 8.3 7 8.6
)";

const char* kExplicit = R"(
[tube]
centerline = 0 0; 20 0
half_widths = 3 3

[load]
position = 2 0 0
mass = 1

[uav]
position = 2.5 0 5
rest_length = 5.02
[uav]
position = 1.5 0 5
rest_length = 5.02
max_tension = 30

[intermediate]
rest_lengths = explicit
rest_length_matrix = 0 1 1 1; 1 0 1 1; 1 1 0 0; 1 1 0 0
)";

TEST(ParseScenario, MinimalUsesDefaults) {
  const Scenario s = parse_scenario(kMinimal);
  EXPECT_EQ(s.uav_count(), 3u);
  EXPECT_EQ(s.duration, 5.0);
  EXPECT_EQ(s.dt, 0.001);
  EXPECT_EQ(s.controller.k1, 1.0);
  EXPECT_EQ(s.controller.k2, 1.0);
  EXPECT_EQ(s.controller.k3, 1.0);
  EXPECT_EQ(s.controller.v_m, 1.5);
  EXPECT_EQ(s.low_level.kp, (Vec3{2, 2, 2}));
  EXPECT_EQ(s.sim_mode, SimMode::ClosedLoop);
  EXPECT_EQ(s.controller_mode, ControllerMode::Dissipative);
  EXPECT_EQ(s.observer_mode, ObserverMode::Estimate);
  EXPECT_EQ(s.centerline.size(), 2u);
  EXPECT_EQ(s.resample_count, 301u);
  EXPECT_NO_THROW(validate_scenario(s));
}

TEST(ParseScenario, DefaultTrayHeightIsLongestCablePlusOne) {
  const Scenario s = parse_scenario(kMinimal);
  EXPECT_NEAR(s.tray_altitude(), s.load.position.z + 8.6 + 1.0, 1e-12);
}

TEST(ParseScenario, ExplicitBlocks) {
  const Scenario s = parse_scenario(kExplicit);
  ASSERT_EQ(s.uav_count(), 2u);
  EXPECT_EQ(s.uavs[1].position, (Vec3{1.5, 0, 5}));
  EXPECT_EQ(s.cables[0].rest_length, 5.02);
  EXPECT_EQ(s.cables[0].max_tension, 20.0);
  EXPECT_EQ(s.cables[1].max_tension, 30.0);
  EXPECT_EQ(s.rest_length_mode, RestLengthMode::Explicit);
  EXPECT_EQ(s.rest_lengths(0, 1), 1.0);
  EXPECT_EQ(s.rest_lengths.size(), 4u);
}

TEST(ParseScenario, PerAxisGains) {
  std::string text = kMinimal;
  text += "\n[low_level]\nkp = 1 2 3\nki = 0.5\n";
  const Scenario s = parse_scenario(text);
  EXPECT_EQ(s.low_level.kp, (Vec3{1, 2, 3}));
  EXPECT_EQ(s.low_level.ki, (Vec3{0.5, 0.5, 0.5}));
}

TEST(ParseScenario, ErrorsCarryLineAndField) {
  std::string text = kMinimal;
  text += "\n[controller]\nk1 = fast\n";
  try {
    parse_scenario(text, "bad.scn");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    const std::string what = e.what();
    EXPECT_NE(what.find("bad.scn:19"), std::string::npos) << what;
    EXPECT_NE(what.find("k1"), std::string::npos) << what;
  }
}

TEST(ParseScenario, Malformed) {
  expect_error(ErrorKind::ParseError, [] { parse_scenario("[tube\n"); });
  expect_error(ErrorKind::ParseError, [] { parse_scenario("[nowhere]\n"); });
  expect_error(ErrorKind::ParseError, [] { parse_scenario("dt 0.1\n"); });
  expect_error(ErrorKind::ParseError, [] { parse_scenario("speed = 3\n"); });
  expect_error(ErrorKind::ParseError, [] { parse_scenario("dt =\n"); });
  expect_error(ErrorKind::ParseError, [] { parse_scenario("sim_mode = fast\n"); });
  expect_error(ErrorKind::ParseError,
               [] { parse_scenario(std::string(kMinimal) + "\n[uav]\nposition = 1 1 1\n"); });
  expect_error(ErrorKind::ParseError,
               [] { parse_scenario(std::string(kMinimal) + "\n[low_level]\nkp = 1 2\n"); });
}

TEST(ValidateScenario, ZeroDuration) {
  expect_error(ErrorKind::ValidationError,
               [] {
    std::string text = kMinimal;
    text.replace(text.find("duration = 5"), 12, "duration = 0");
    parse_scenario(text);
  });
}

TEST(ValidateScenario, Invariants) {
  const Scenario good = parse_scenario(kMinimal);
  Scenario s = good;
  s.dt = 0.0;
  expect_error(ErrorKind::ValidationError, [&] { validate_scenario(s); });
  s = good;
  s.cables.pop_back();
  expect_error(ErrorKind::ValidationError, [&] { validate_scenario(s); });
  s = good;
  s.half_widths = {0.3, 0.3};
  expect_error(ErrorKind::ValidationError, [&] { validate_scenario(s); });
  s = good;
  s.controller.eps_s = 2.0;
  expect_error(ErrorKind::ValidationError, [&] { validate_scenario(s); });
  s = good;
  s.load.position = {4, 3.9, 0};
  expect_error(ErrorKind::ValidationError, [&] { validate_scenario(s); });
  s = good;
  s.tray_height = 5.0;
  expect_error(ErrorKind::ValidationError, [&] { validate_scenario(s); });
}

TEST(Modes, RoundTrip) {
  for (const auto m : {SimMode::ClosedLoop, SimMode::Kinematic}) {
    EXPECT_EQ(parse_sim_mode(to_string(m)), m);
  }
  for (const auto m : {ControllerMode::Dissipative, ControllerMode::Baseline}) {
    EXPECT_EQ(parse_controller_mode(to_string(m)), m);
  }
  for (const auto m : {ObserverMode::Estimate, ObserverMode::GroundTruth}) {
    EXPECT_EQ(parse_observer_mode(to_string(m)), m);
  }
  expect_error(ErrorKind::ValidationError, [] { parse_sim_mode("dynamic"); });
}

TEST(PlaceRing, StaticEquilibrium) {
  RingFormation ring;
  ring.uav_count = 10;
  ring.node_radius = 3.0;
  ring.phase = 0.3;
  ring.cable_lengths = {8.3, 7.0, 8.6, 8.8, 8.3, 8.5, 8.4, 7.7, 8.3, 7.3};
  const LoadState load{{4, 0, 0}, {}, 18.0};
  const double tray_height = 20.0;
  const RingPlacement r = place_ring(ring, load, tray_height);
  ASSERT_EQ(r.uavs.size(), 10u);

  SystemState st;
  st.uavs = r.uavs;
  st.load = load;
  st.cables = r.cables;
  const Vec3 net = load_net_force(st);
  EXPECT_LT(norm(net), 1e-6);

  const double want = 18.0 * kGravity / (10.0 * std::cos(r.inclination));
  EXPECT_NEAR(r.tension, want, 1e-9);
  double radius = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_NEAR(cable_force(r.uavs[i], load, r.cables[i]).tension, r.tension, 1e-6);
    const Vec3 q = uav_to_node(r.uavs[i].position, load.position, tray_height, 0.0);
    radius += norm(planar(q) - planar(load.position)) / 10.0;
  }
  EXPECT_NEAR(radius, 3.0, 1e-6);
}

TEST(PlaceRing, OverloadRejected) {
  RingFormation ring;
  ring.uav_count = 3;
  ring.cable_lengths = {8, 8, 8};
  const LoadState load{{0, 0, 0}, {}, 18.0};
  expect_error(ErrorKind::ValidationError, [&] { place_ring(ring, load, 20.0); });
}

TEST(InitialNodes, TrayOverLoadAndMappedUavs) {
  const Scenario s = parse_scenario(kMinimal);
  const VirtualNodeSet n = initial_nodes(s);
  const double z_u = s.tray_altitude();
  EXPECT_EQ(planar(n.tray_center), planar(s.load.position));
  EXPECT_EQ(n.tray_center.z, z_u);
  EXPECT_EQ(planar(n.load_node), planar(s.load.position));
  for (std::size_t i = 0; i < s.uav_count(); ++i) {
    const Vec3 q = uav_to_node(s.uavs[i].position, s.load.position, z_u, s.load.position.z);
    EXPECT_NEAR(n.uav_nodes[i].x, q.x, 1e-12);
    EXPECT_NEAR(n.uav_nodes[i].y, q.y, 1e-12);
    EXPECT_EQ(n.uav_nodes[i].z, z_u);
  }
  EXPECT_NO_THROW(validate_node_set(n));
}

TEST(BundledScenarios, TableOneValues) {
  const Scenario s = load_scenario(kScenarios / "table1_ten_uav.scn");
  ASSERT_EQ(s.uav_count(), 10u);
  const double cables[] = {8.3, 7.0, 8.6, 8.8, 8.3, 8.5, 8.4, 7.7, 8.3, 7.3};
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(s.uavs[i].mass, 2.0);
    EXPECT_EQ(s.cables[i].rest_length, cables[i]);
    EXPECT_EQ(s.cables[i].max_tension, 20.0);
  }
  EXPECT_EQ(s.load.mass, 18.0);
  EXPECT_EQ(s.controller.k1, 1.0);
  EXPECT_EQ(s.controller.v_m, 1.5);
  EXPECT_EQ(s.low_level.kp, (Vec3{2, 2, 2}));
}

TEST(BundledScenarios, AllValidate) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kScenarios)) {
    if (entry.path().extension() != ".scn") continue;
    EXPECT_NO_THROW(load_scenario(entry.path())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 6);
}

TEST(LoadScenario, MissingFile) {
  expect_error(ErrorKind::ParseError, [] { load_scenario("/nonexistent/x.scn"); });
}

}  // namespace
}  // namespace vtube
