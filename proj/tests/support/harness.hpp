#pragma once

#include <memory>
#include <vector>

#include "rrrt/sim/network.hpp"

namespace testing {

/// Owns everything a hand-built network needs.
struct Bench {
  rrrt::sim::Simulator sim;
  rrrt::sim::Topology topo;
  std::unique_ptr<rrrt::sim::DelayModel> delays;
  rrrt::sim::SimulationTrace trace;
  std::unique_ptr<rrrt::sim::Network> net;

  /// Call after the topology is complete.
  void start(rrrt::sim::ChannelAccessModel ca = rrrt::sim::ChannelAccessModel::fixed(0.001),
             rrrt::sim::NetworkConfig cfg = {}, std::uint64_t seed = 1, bool alternates = true) {
    topo.compute_routes(alternates);
    delays = std::make_unique<rrrt::sim::DelayModel>(topo, ca);
    net = std::make_unique<rrrt::sim::Network>(sim, topo, *delays, cfg, trace, seed);
  }
};

/// n nodes on a line, `spacing` metres apart, all links at `bps`.
inline void chain(Bench& b, int n, double spacing = 30.0, double bps = 250000.0, double loss = 0.0) {
  for (int i = 0; i < n; ++i) b.topo.add_node(rrrt::sim::NodeRole::Relay, {i * spacing, 0.0});
  for (int i = 1; i < n; ++i)
    b.topo.add_link(rrrt::sim::NodeId{static_cast<std::uint32_t>(i - 1)},
                    rrrt::sim::NodeId{static_cast<std::uint32_t>(i)}, bps, loss);
}

inline rrrt::sim::Packet data(std::uint32_t from, std::uint32_t to, double bits = 1000.0) {
  rrrt::sim::Packet p;
  p.kind = rrrt::sim::PacketKind::Data;
  p.origin = rrrt::sim::NodeId{from};
  p.dest = rrrt::sim::NodeId{to};
  p.bits = bits;
  return p;
}

inline std::size_t count(const rrrt::sim::SimulationTrace& t, rrrt::sim::TraceKind kind,
                         rrrt::sim::TraceReason reason) {
  std::size_t n = 0;
  for (const auto& e : t.events) n += e.kind == kind && e.reason == reason;
  return n;
}

}  // namespace testing
