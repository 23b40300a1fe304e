#include "vtube/intermediate.hpp"

#include <cmath>
#include <string>

#include "vtube/error.hpp"

namespace vtube {

Vec3 VirtualNodeSet::position(std::size_t k) const {
  if (k < uav_nodes.size()) return uav_nodes[k];
  if (k == tray_index()) return tray_center;
  require(k == load_index(), ErrorKind::PreconditionViolation, "node index out of range");
  return load_node;
}

void VirtualNodeSet::set_position(std::size_t k, Vec3 p) {
  if (k < uav_nodes.size()) {
    uav_nodes[k] = p;
  } else if (k == tray_index()) {
    tray_center = p;
  } else {
    require(k == load_index(), ErrorKind::PreconditionViolation, "node index out of range");
    load_node = p;
  }
}

SquareMatrix default_connection(std::size_t uav_count) {
  const std::size_t m = uav_count + 2;
  SquareMatrix w(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) w(i, i) = 0.0;
  w(uav_count, uav_count + 1) = 0.0;
  w(uav_count + 1, uav_count) = 0.0;
  return w;
}

Vec3 uav_to_node(Vec3 p_i, Vec3 p_l, double z_u, double z_l) {
  const double gap = std::abs(z_u - p_i.z);
  require(gap > kMinAltitudeGap, ErrorKind::TrayAltitudeSingularity,
          "UAV altitude coincides with the tray altitude");
  return p_l + (std::abs(z_u - z_l) / gap) * (p_i - p_l);
}

Vec3 node_velocity_to_uav(Vec3 v_node, Vec3 v_l, double z_u, double z_i, double z_l) {
  const double gap = std::abs(z_u - z_l);
  require(gap > kMinAltitudeGap, ErrorKind::LoadAltitudeSingularity,
          "load altitude coincides with the tray altitude");
  return v_l + (std::abs(z_u - z_i) / gap) * (v_node - v_l);
}

SquareMatrix rest_lengths_from_initial(const VirtualNodeSet& nodes) {
  const std::size_t m = nodes.node_count();
  require(nodes.connection.size() == m, ErrorKind::PreconditionViolation,
          "connection matrix size must be n + 2");
  SquareMatrix l0(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (nodes.connection(i, j) == 0.0) continue;
      const double d = norm(nodes.planar_position(i) - nodes.planar_position(j));
      require(d >= kMinNodeSeparation, ErrorKind::CoincidentNodes,
              "connected virtual nodes coincide");
      l0(i, j) = d;
      l0(j, i) = d;
    }
  }
  return l0;
}

Vec2 pair_spring_command(std::size_t i, std::size_t j, const VirtualNodeSet& nodes) {
  const double w = nodes.connection(i, j);
  if (w == 0.0 || i == j) return {};
  const Vec2 qij = nodes.planar_position(i) - nodes.planar_position(j);
  const double l = norm(qij);
  if (l < kMinNodeSeparation) throw Error(ErrorKind::CoincidentNodes, "connected virtual nodes coincide");
  return (-nodes.spring_gain * w * (1.0 - nodes.rest_lengths(i, j) / l)) * qij;
}

Vec2 spring_command(std::size_t i, const VirtualNodeSet& nodes) {
  Vec2 v;
  for (std::size_t j = 0; j < nodes.node_count(); ++j) v += pair_spring_command(i, j, nodes);
  return v;
}

SpringEnergy spring_lyapunov(const VirtualNodeSet& nodes) {
  const std::size_t m = nodes.node_count();
  SpringEnergy e{SquareMatrix(m), 0.0};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j || nodes.connection(i, j) == 0.0) continue;
      const double l = norm(nodes.planar_position(i) - nodes.planar_position(j));
      const double dl = l - nodes.rest_lengths(i, j);
      e.per_pair(i, j) = 0.5 * dl * dl;
      e.total += 0.5 * nodes.spring_gain * nodes.connection(i, j) * e.per_pair(i, j);
    }
  }
  return e;
}

void validate_node_set(const VirtualNodeSet& nodes) {
  const std::size_t m = nodes.node_count();
  auto fail = [](const std::string& what) { throw Error(ErrorKind::ValidationError, what); };
  if (nodes.uav_count() < 1) fail("at least one UAV node is required");
  if (nodes.connection.size() != m) fail("connection matrix must be (n+2)x(n+2)");
  if (nodes.rest_lengths.size() != m) fail("rest-length matrix must be (n+2)x(n+2)");
  if (!(nodes.spring_gain >= 0.0)) fail("spring gain must be non-negative");
  for (std::size_t i = 0; i < m; ++i) {
    if (nodes.connection(i, i) != 0.0) fail("connection matrix diagonal must be zero");
    for (std::size_t j = 0; j < m; ++j) {
      const double w = nodes.connection(i, j);
      if (w != 0.0 && w != 1.0) fail("connection entries must be 0 or 1");
      if (w != nodes.connection(j, i)) fail("connection matrix must be symmetric");
      if (nodes.rest_lengths(i, j) != nodes.rest_lengths(j, i)) fail("rest lengths must be symmetric");
      if (w == 1.0 && !(nodes.rest_lengths(i, j) > 0.0)) {
        fail("rest length must be positive for connected pairs");
      }
    }
  }
  if (nodes.connection(nodes.tray_index(), nodes.load_index()) != 0.0) {
    fail("tray center and load node must be unconnected");
  }
  const double z_u = nodes.tray_center.z;
  for (const Vec3& q : nodes.uav_nodes) {
    if (q.z != z_u) fail("UAV nodes must lie at the tray altitude");
  }
}

}  // namespace vtube
