#include "vtube/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "vtube/error.hpp"

namespace vtube {

std::string_view to_string(SimMode m) {
  return m == SimMode::ClosedLoop ? "closed_loop" : "kinematic";
}

std::string_view to_string(ControllerMode m) {
  return m == ControllerMode::Dissipative ? "dissipative" : "baseline";
}

std::string_view to_string(ObserverMode m) {
  return m == ObserverMode::Estimate ? "estimate" : "ground_truth";
}

SimMode parse_sim_mode(std::string_view s) {
  if (s == "closed_loop") return SimMode::ClosedLoop;
  if (s == "kinematic") return SimMode::Kinematic;
  throw Error(ErrorKind::ValidationError, "sim_mode must be closed_loop or kinematic, got '" +
                                              std::string(s) + "'");
}

ControllerMode parse_controller_mode(std::string_view s) {
  if (s == "dissipative") return ControllerMode::Dissipative;
  if (s == "baseline") return ControllerMode::Baseline;
  throw Error(ErrorKind::ValidationError,
              "controller_mode must be dissipative or baseline, got '" + std::string(s) + "'");
}

ObserverMode parse_observer_mode(std::string_view s) {
  if (s == "estimate") return ObserverMode::Estimate;
  if (s == "ground_truth") return ObserverMode::GroundTruth;
  throw Error(ErrorKind::ValidationError,
              "observer_mode must be estimate or ground_truth, got '" + std::string(s) + "'");
}

double Scenario::tray_altitude() const {
  double h = tray_height;
  if (h == 0.0) {
    double longest = 0.0;
    for (const CableParams& c : cables) longest = std::max(longest, c.rest_length);
    h = longest + 1.0;
  }
  return load.position.z + h;
}

RingPlacement place_ring(const RingFormation& ring, const LoadState& load, double tray_height) {
  const std::size_t n = ring.uav_count;
  auto invalid = [](const std::string& what) { throw Error(ErrorKind::ValidationError, what); };
  if (n == 0) invalid("formation.uav_count must be at least 1");
  if (ring.cable_lengths.size() != n) invalid("formation.cable_lengths must have uav_count entries");
  if (!(ring.node_radius > 0.0)) invalid("formation.node_radius must be positive");
  if (!(tray_height > 0.0)) invalid("tray_height must be positive");
  if (!(ring.stiffness > 0.0)) invalid("formation.stiffness must be positive");

  const double weight = load.mass * kGravity;
  // Mean node radius minus target for inclination theta; NaN when a UAV would
  // reach the tray altitude.
  auto residual = [&](double theta) {
    const double tension = weight / (static_cast<double>(n) * std::cos(theta));
    double sum = 0.0;
    for (double len : ring.cable_lengths) {
      const double l = len + tension / ring.stiffness;
      const double h = l * std::cos(theta);
      if (h >= tray_height) return std::nan("");
      sum += l * std::sin(theta) * tray_height / (tray_height - h);
    }
    return sum / static_cast<double>(n) - ring.node_radius;
  };

  constexpr int kScan = 4000;
  double lo = 0.0, hi = -1.0;
  for (int k = 1; k < kScan; ++k) {
    const double theta = 0.5 * std::numbers::pi * k / kScan;
    const double r = residual(theta);
    if (std::isnan(r)) break;
    if (r >= 0.0) {
      hi = theta;
      break;
    }
    lo = theta;
  }
  if (hi < 0.0) invalid("formation.node_radius is unreachable with this tray_height");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) < 0.0) lo = mid; else hi = mid;
  }
  const double theta = 0.5 * (lo + hi);

  RingPlacement out;
  out.inclination = theta;
  out.tension = weight / (static_cast<double>(n) * std::cos(theta));
  if (!(out.tension < ring.max_tension)) {
    invalid("formation equilibrium tension " + std::to_string(out.tension) +
            " N is not below max_tension");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = ring.phase + 2.0 * std::numbers::pi * static_cast<double>(i) / n;
    const double l = ring.cable_lengths[i] + out.tension / ring.stiffness;
    const double r = l * std::sin(theta);
    const Vec3 offset{r * std::cos(phi), r * std::sin(phi), l * std::cos(theta)};
    out.uavs.push_back({load.position + offset, load.velocity, ring.uav_mass});
    out.cables.push_back({ring.stiffness, ring.damping, ring.cable_lengths[i], ring.max_tension});
  }
  return out;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class Parser {
 public:
  explicit Parser(std::string_view source) : source_(source) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::ParseError,
                std::string(source_) + ":" + std::to_string(line_) + ": " + what);
  }

  void at(std::size_t line, std::string key) {
    line_ = line;
    key_ = std::move(key);
  }

  double number(std::string_view text) const {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
      fail("field '" + key_ + "': expected a number, got '" + t + "'");
    }
    return v;
  }

  std::size_t count(std::string_view text) const {
    const double v = number(text);
    if (v < 0.0 || v != std::floor(v)) fail("field '" + key_ + "': expected a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  std::vector<double> list(std::string_view text) const {
    std::string t(text);
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(number(tok));
    if (out.empty()) fail("field '" + key_ + "': expected at least one number");
    return out;
  }

  std::vector<std::vector<double>> rows(std::string_view text) const {
    std::vector<std::vector<double>> out;
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto end = std::min(text.find(';', start), text.size());
      if (!trim(text.substr(start, end - start)).empty()) {
        out.push_back(list(text.substr(start, end - start)));
      }
      start = end + 1;
    }
    if (out.empty()) fail("field '" + key_ + "': expected at least one row");
    return out;
  }

  Vec3 vec3(std::string_view text) const {
    const auto v = list(text);
    if (v.size() != 3) fail("field '" + key_ + "': expected 3 numbers");
    return {v[0], v[1], v[2]};
  }

  Vec3 axes(std::string_view text) const {
    const auto v = list(text);
    if (v.size() == 1) return {v[0], v[0], v[0]};
    if (v.size() != 3) fail("field '" + key_ + "': expected 1 or 3 numbers");
    return {v[0], v[1], v[2]};
  }

  SquareMatrix matrix(std::string_view text) const {
    const auto r = rows(text);
    SquareMatrix m(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i].size() != r.size()) fail("field '" + key_ + "': matrix must be square");
      for (std::size_t j = 0; j < r.size(); ++j) m(i, j) = r[i][j];
    }
    return m;
  }

 private:
  std::string_view source_;
  std::size_t line_{0};
  std::string key_;
};

struct UavBlock {
  UavState uav;
  CableParams cable;
  bool has_position{false};
  bool has_rest_length{false};
  std::size_t line{0};
};

}  // namespace

Scenario parse_scenario(std::string_view text, std::string_view source) {
  Scenario s;
  Parser p(source);
  std::string section;
  RingFormation ring;
  bool has_ring = false;
  std::vector<UavBlock> blocks;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    p.at(line_no, "");

    if (line.front() == '[') {
      if (line.back() != ']') p.fail("unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section == "uav") {
        blocks.push_back({});
        blocks.back().line = line_no;
      } else if (section == "formation") {
        has_ring = true;
      } else if (section != "tube" && section != "load" && section != "intermediate" &&
                 section != "controller" && section != "low_level") {
        p.fail("unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) p.fail("expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) p.fail("empty key");
    if (value.empty()) p.fail("field '" + key + "' has no value");
    p.at(line_no, key);

    auto unknown = [&]() {
      p.fail("unknown field '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"));
    };
    auto modes = [&](auto parse) {
      try {
        return parse(value);
      } catch (const Error& e) {
        p.fail(e.what());
      }
    };

    if (section.empty()) {
      if (key == "name") s.name = value;
      else if (key == "dt") s.dt = p.number(value);
      else if (key == "duration") s.duration = p.number(value);
      else if (key == "sim_mode") s.sim_mode = modes(parse_sim_mode);
      else if (key == "controller_mode") s.controller_mode = modes(parse_controller_mode);
      else if (key == "observer_mode") s.observer_mode = modes(parse_observer_mode);
      else if (key == "baseline_max_tension") s.baseline_max_tension = p.number(value);
      else if (key == "output_stride") s.output_stride = p.count(value);
      else unknown();
    } else if (section == "tube") {
      if (key == "centerline") {
        s.centerline.clear();
        for (const auto& row : p.rows(value)) {
          if (row.size() != 2) p.fail("field 'centerline': each point needs x and y");
          s.centerline.push_back({row[0], row[1]});
        }
      } else if (key == "half_widths") {
        s.half_widths = p.list(value);
      } else if (key == "resample_count") {
        s.resample_count = p.count(value);
      } else {
        unknown();
      }
    } else if (section == "load") {
      if (key == "position") s.load.position = p.vec3(value);
      else if (key == "velocity") s.load.velocity = p.vec3(value);
      else if (key == "mass") s.load.mass = p.number(value);
      else unknown();
    } else if (section == "formation") {
      if (key == "uav_count") ring.uav_count = p.count(value);
      else if (key == "node_radius") ring.node_radius = p.number(value);
      else if (key == "phase") ring.phase = p.number(value);
      else if (key == "uav_mass") ring.uav_mass = p.number(value);
      else if (key == "cable_lengths") ring.cable_lengths = p.list(value);
      else if (key == "stiffness") ring.stiffness = p.number(value);
      else if (key == "damping") ring.damping = p.number(value);
      else if (key == "max_tension") ring.max_tension = p.number(value);
      else unknown();
    } else if (section == "uav") {
      UavBlock& b = blocks.back();
      if (key == "position") {
        b.uav.position = p.vec3(value);
        b.has_position = true;
      } else if (key == "velocity") {
        b.uav.velocity = p.vec3(value);
      } else if (key == "mass") {
        b.uav.mass = p.number(value);
      } else if (key == "rest_length") {
        b.cable.rest_length = p.number(value);
        b.has_rest_length = true;
      } else if (key == "stiffness") {
        b.cable.stiffness = p.number(value);
      } else if (key == "damping") {
        b.cable.damping = p.number(value);
      } else if (key == "max_tension") {
        b.cable.max_tension = p.number(value);
      } else {
        unknown();
      }
    } else if (section == "intermediate") {
      if (key == "tray_height") {
        s.tray_height = p.number(value);
      } else if (key == "rest_lengths") {
        if (value == "from_initial") s.rest_length_mode = RestLengthMode::FromInitial;
        else if (value == "explicit") s.rest_length_mode = RestLengthMode::Explicit;
        else p.fail("field 'rest_lengths': expected from_initial or explicit");
      } else if (key == "connection") {
        if (value == "default") s.connection = SquareMatrix();
        else s.connection = p.matrix(value);
      } else if (key == "rest_length_matrix") {
        s.rest_lengths = p.matrix(value);
      } else {
        unknown();
      }
    } else if (section == "controller") {
      ControllerParams& c = s.controller;
      if (key == "k1") c.k1 = p.number(value);
      else if (key == "k2") c.k2 = p.number(value);
      else if (key == "k3") c.k3 = p.number(value);
      else if (key == "v_m") c.v_m = p.number(value);
      else if (key == "r_s") c.r_s = p.number(value);
      else if (key == "eps_t") c.eps_t = p.number(value);
      else if (key == "eps_s") c.eps_s = p.number(value);
      else if (key == "terminal_decay_distance") c.terminal_decay_distance = p.number(value);
      else if (key == "midline_epsilon") c.midline_epsilon = p.number(value);
      else unknown();
    } else if (section == "low_level") {
      VelocityLoopGains& g = s.low_level;
      if (key == "kp") g.kp = p.axes(value);
      else if (key == "ki") g.ki = p.axes(value);
      else if (key == "kd") g.kd = p.axes(value);
      else if (key == "integral_limit") g.integral_limit = p.number(value);
      else if (key == "thrust_limit") g.thrust_limit = p.number(value);
      else if (key == "observer_bandwidth") s.observer_bandwidth = p.number(value);
      else unknown();
    }
  }

  if (has_ring && !blocks.empty()) {
    p.at(blocks.front().line, "");
    p.fail("[formation] and [uav] blocks are mutually exclusive");
  }
  if (has_ring) {
    const double tray = s.tray_height != 0.0
                            ? s.tray_height
                            : (ring.cable_lengths.empty()
                                   ? 0.0
                                   : *std::max_element(ring.cable_lengths.begin(),
                                                       ring.cable_lengths.end()) + 1.0);
    RingPlacement placed = place_ring(ring, s.load, tray);
    s.uavs = std::move(placed.uavs);
    s.cables = std::move(placed.cables);
  }
  for (const UavBlock& b : blocks) {
    p.at(b.line, "");
    if (!b.has_position) p.fail("[uav] block needs a position");
    if (!b.has_rest_length) p.fail("[uav] block needs a rest_length");
    s.uavs.push_back(b.uav);
    s.cables.push_back(b.cable);
  }
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

void validate_scenario(const Scenario& s) {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::ValidationError, what);
  };
  check(s.dt > 0.0, "dt must be positive");
  check(s.duration > 0.0, "duration must be positive");
  check(s.uav_count() >= 1, "at least one UAV is required");
  check(s.cables.size() == s.uav_count(), "cable count must equal UAV count");
  check(s.output_stride >= 1, "output_stride must be at least 1");
  check(s.load.mass > 0.0, "load mass must be positive");
  check(is_finite(s.load.position) && is_finite(s.load.velocity), "load state must be finite");
  check(s.baseline_max_tension > 0.0, "baseline_max_tension must be positive");
  check(s.observer_bandwidth > 0.0, "observer_bandwidth must be positive");
  check(s.tray_height >= 0.0, "tray_height must be positive (or 0 for the default)");
  for (std::size_t i = 0; i < s.uav_count(); ++i) {
    const std::string tag = "uav " + std::to_string(i) + ": ";
    check(s.uavs[i].mass > 0.0, tag + "mass must be positive");
    check(is_finite(s.uavs[i].position) && is_finite(s.uavs[i].velocity),
          tag + "state must be finite");
    const CableParams& c = s.cables[i];
    check(c.stiffness > 0.0, tag + "cable stiffness must be positive");
    check(c.damping >= 0.0, tag + "cable damping must be non-negative");
    check(c.rest_length > 0.0, tag + "cable rest_length must be positive");
    check(c.max_tension > 0.0, tag + "cable max_tension must be positive");
    check(norm(s.uavs[i].position - s.load.position) > 1e-9, tag + "UAV coincides with the load");
  }
  validate(s.controller);
  validate(s.low_level);

  const double z_u = s.tray_altitude();
  check(std::abs(z_u - s.load.position.z) > kMinAltitudeGap,
        "tray altitude must differ from the load altitude");
  for (std::size_t i = 0; i < s.uav_count(); ++i) {
    check(z_u - s.uavs[i].position.z > kMinAltitudeGap,
          "uav " + std::to_string(i) + ": must fly below the tray altitude");
  }

  check(s.centerline.size() >= 2, "tube centerline needs at least two points");
  check(s.half_widths.size() == s.centerline.size(),
        "tube half_widths must have one entry per centerline point");
  check(s.resample_count >= 2, "tube resample_count must be at least 2");
  const Tube tube = build_tube(s);
  check(tube.min_half_width() > s.controller.r_s,
        "tube min half-width must exceed r_s (room for one agent)");

  const std::size_t m = s.uav_count() + 2;
  if (s.connection.size() != 0) {
    check(s.connection.size() == m, "connection matrix must be (n+2)x(n+2)");
  }
  if (s.rest_length_mode == RestLengthMode::Explicit) {
    check(s.rest_lengths.size() == m, "rest_length_matrix must be (n+2)x(n+2)");
  }
  VirtualNodeSet nodes;
  try {
    nodes = initial_nodes(s);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ValidationError) throw;
    check(false, std::string("initial virtual nodes: ") + e.what());
  }
  validate_node_set(nodes);
  for (std::size_t i = 0; i < m; ++i) {
    if (i == nodes.load_index()) continue;
    check(tube.contains(nodes.planar_position(i)),
          "initial virtual node " + std::to_string(i) + " must lie strictly inside the tube");
  }
}

Tube build_tube(const Scenario& s) {
  try {
    return Tube::build(s.centerline, s.half_widths, s.resample_count);
  } catch (const Error& e) {
    throw Error(ErrorKind::ValidationError, std::string("tube: ") + e.what());
  }
}

void map_nodes(const SystemState& state, double tray_altitude, VirtualNodeSet& nodes) {
  const Vec3& p_l = state.load.position;
  nodes.uav_nodes.resize(state.uav_count());
  for (std::size_t i = 0; i < state.uav_count(); ++i) {
    const Vec3 q = uav_to_node(state.uavs[i].position, p_l, tray_altitude, p_l.z);
    nodes.uav_nodes[i] = {q.x, q.y, tray_altitude};
  }
  nodes.load_node = {p_l.x, p_l.y, tray_altitude};
}

VirtualNodeSet initial_nodes(const Scenario& s) {
  const double z_u = s.tray_altitude();
  SystemState state;
  state.uavs = s.uavs;
  state.load = s.load;
  VirtualNodeSet nodes;
  map_nodes(state, z_u, nodes);
  nodes.tray_center = {s.load.position.x, s.load.position.y, z_u};
  nodes.connection = s.connection.size() == 0 ? default_connection(s.uav_count()) : s.connection;
  nodes.spring_gain = s.controller.k2;
  nodes.rest_lengths = SquareMatrix(nodes.node_count());
  if (s.rest_length_mode == RestLengthMode::Explicit) {
    nodes.rest_lengths = s.rest_lengths;
  } else {
    nodes.rest_lengths = rest_lengths_from_initial(nodes);
  }
  return nodes;
}

}  // namespace vtube
