#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vtube/geometry.hpp"

namespace vtube {

inline constexpr double kMinNodeSeparation = 1e-6;  // m
inline constexpr double kMinAltitudeGap = 1e-6;     // m

/// Virtual tray abstraction. Node indices 0..n-1 are the UAV nodes, n is the
/// tray center and n+1 the load node; W and L0 use the same ordering.
/// Springs live in the tray plane, so only x and y of node positions matter.
struct VirtualNodeSet {
  std::vector<Vec3> uav_nodes;
  Vec3 tray_center;
  Vec3 load_node;
  SquareMatrix connection;
  SquareMatrix rest_lengths;
  double spring_gain{1.0};

  std::size_t uav_count() const { return uav_nodes.size(); }
  std::size_t node_count() const { return uav_nodes.size() + 2; }
  std::size_t tray_index() const { return uav_nodes.size(); }
  std::size_t load_index() const { return uav_nodes.size() + 1; }

  Vec3 position(std::size_t k) const;
  void set_position(std::size_t k, Vec3 p);
  Vec2 planar_position(std::size_t k) const { return planar(position(k)); }
};

/// All UAV nodes mutually connected and tied to both the tray center and the
/// load node; tray and load unconnected.
SquareMatrix default_connection(std::size_t uav_count);

/// q_i = p_l + |z_u - z_l| / |z_u - z_i| * (p_i - p_l).
/// Throws TrayAltitudeSingularity when |z_u - z_i| <= 1e-6.
Vec3 uav_to_node(Vec3 p_i, Vec3 p_l, double z_u, double z_l);

/// v_i = v_l + |z_u - z_i| / |z_u - z_l| * (v_node - v_l).
/// Throws LoadAltitudeSingularity when |z_u - z_l| <= 1e-6.
Vec3 node_velocity_to_uav(Vec3 v_node, Vec3 v_l, double z_u, double z_i, double z_l);

/// Planar distances between connected node pairs at the current positions;
/// zero where W is zero. Throws CoincidentNodes for connected pairs closer
/// than 1e-6 m.
SquareMatrix rest_lengths_from_initial(const VirtualNodeSet& nodes);

/// -k2 * sum_j w_ij (1 - L0_ij / l_ij) (q_i - q_j) in the tray plane.
Vec2 spring_command(std::size_t i, const VirtualNodeSet& nodes);

/// Contribution of the (i, j) spring alone to spring_command(i).
Vec2 pair_spring_command(std::size_t i, std::size_t j, const VirtualNodeSet& nodes);

struct SpringEnergy {
  SquareMatrix per_pair;  // 0.5 (l - L0)^2 where connected
  double total{0.0};      // sum_i 0.5 k2 sum_{j != i} w_ij per_pair(i, j)
};

SpringEnergy spring_lyapunov(const VirtualNodeSet& nodes);

/// Checks W (symmetric, zero diagonal, 0/1 entries, tray-load unconnected) and
/// L0 (symmetric, positive where connected). Throws ValidationError.
void validate_node_set(const VirtualNodeSet& nodes);

}  // namespace vtube
