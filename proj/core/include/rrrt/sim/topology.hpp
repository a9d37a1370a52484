#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "rrrt/sim/types.hpp"

namespace rrrt::sim {

enum class NodeRole : std::uint8_t { Sensor, SubSink, Relay };

std::string_view to_string(NodeRole role) noexcept;

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Position& a, const Position& b);

struct NodeInfo {
  NodeId id;
  NodeRole role = NodeRole::Sensor;
  Position pos;
};

struct LinkParams {
  double distance_m = 0.0;
  double bit_rate = 0.0;     // bits per second
  double propagation = 0.0;  // seconds
  double loss = 0.0;         // i.i.d. per-packet loss probability
};

/// Node set, directed links and static next-hop tables. Routes are computed
/// once by shortest hop count; ties go to the neighbour geographically closest
/// to the destination, then to the one best aligned with the bearing toward
/// it, then to the lowest id. An optional alternate entry per (node, destination)
/// names another neighbour that is also strictly closer (in hops) to the
/// destination, so rerouting never forms a loop.
class Topology {
 public:
  static constexpr double kSignalSpeed = 3.0e8;

  NodeId add_node(NodeRole role, Position pos);
  /// Adds both directions. Throws Errc::UnknownLink for self-links and
  /// Errc::UnknownTarget for unknown endpoints.
  void add_link(NodeId a, NodeId b, double bit_rate, double loss = 0.0);
  /// Connects every pair of nodes within `range` metres.
  void connect_within(double range, double bit_rate, double loss = 0.0);

  /// Fills the next-hop and hop-count tables for every (node, destination).
  void compute_routes(bool with_alternates);

  std::size_t size() const { return nodes_.size(); }
  const NodeInfo& node(NodeId id) const;
  const std::vector<NodeInfo>& nodes() const { return nodes_; }
  bool contains(NodeId id) const { return id.index() < nodes_.size(); }

  /// Throws Errc::UnknownLink.
  const LinkParams& link(LinkRef ref) const;
  bool has_link(LinkRef ref) const;
  const std::vector<NodeId>& neighbours(NodeId id) const;

  /// Primary/alternate next hop, ignoring faults. nullopt when none.
  std::optional<NodeId> primary_hop(NodeId node, NodeId dest) const;
  std::optional<NodeId> alternate_hop(NodeId node, NodeId dest) const;
  /// Hop distance, or nullopt when unreachable.
  std::optional<std::uint32_t> hop_count(NodeId node, NodeId dest) const;

  /// Path (inclusive of both ends) along primary routes.
  std::vector<NodeId> path(NodeId from, NodeId to) const;

 private:
  static constexpr std::uint32_t kNone = 0xffffffffu;

  std::size_t slot(NodeId node, NodeId dest) const { return node.index() * nodes_.size() + dest.index(); }

  std::vector<NodeInfo> nodes_;
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<std::vector<LinkParams>> link_params_;  // parallel to adjacency_
  std::vector<std::uint32_t> primary_;
  std::vector<std::uint32_t> alternate_;
  std::vector<std::uint32_t> hops_;
  bool routed_ = false;
};

}  // namespace rrrt::sim
