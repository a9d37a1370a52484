#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <variant>
#include <vector>

#include "rrrt/congestion/buffer.hpp"
#include "rrrt/sim/delay_model.hpp"
#include "rrrt/sim/packet.hpp"
#include "rrrt/sim/rng.hpp"
#include "rrrt/sim/simulator.hpp"
#include "rrrt/sim/topology.hpp"
#include "rrrt/sim/trace.hpp"

namespace rrrt::sim {

enum class FaultMode { Crash, DropAll };

struct Fault {
  std::variant<NodeId, LinkRef> target;
  Time at = 0.0;
  FaultMode mode = FaultMode::Crash;
};

struct NetworkConfig {
  std::uint32_t buffer_capacity = 32;
  double epoch = 0.1;
};

/// Store-and-forward packet network on top of the kernel. Every node owns one
/// FIFO buffer served by a single transmitter: a copy occupies the buffer from
/// admission until its transmission ends (ca_del + t_del), then propagates for
/// p_del to the next hop. b_del is the measured wait in the buffer.
class Network {
 public:
  using ArrivalHandler = std::function<void(const Packet&)>;
  using BroadcastHandler = std::function<void(NodeId, const Packet&)>;

  Network(Simulator& sim, const Topology& topo, const DelayModel& delays, NetworkConfig cfg, SimulationTrace& trace,
          std::uint64_t seed);

  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  Simulator& simulator() { return *sim_; }
  const Topology& topology() const { return *topo_; }
  const DelayModel& delay_model() const { return *delays_; }
  Time now() const { return sim_->now(); }

  /// Called for every copy that reaches its destination node.
  void set_arrival_handler(NodeId node, ArrivalHandler handler);

  /// Injects a copy at pkt.origin. Assigns id and inject_time; returns the id.
  PacketId send(Packet pkt);

  /// Floods `pkt` from its origin down the tree formed by every node's primary
  /// route to that origin. Control priority: bypasses data buffers but pays
  /// ca_del + t_del + p_del per hop and stops at faulted nodes. `handler` runs
  /// at every node reached. Broadcast copies are not unicast copies and do not
  /// enter the gen/arrive/drop accounting.
  void broadcast(Packet pkt, BroadcastHandler handler);

  /// Next hop honouring faults active now. Throws Errc::NoRoute.
  NodeId next_hop(NodeId node, NodeId dest) const;

  /// Throws Errc::UnknownTarget / Errc::PastTime.
  void inject_fault(Fault fault);

  bool node_faulted(NodeId node, std::optional<FaultMode> mode = std::nullopt) const;
  bool link_faulted(LinkRef link, std::optional<FaultMode> mode = std::nullopt) const;

  /// Per-packet delay a forwarding node reports to probes: (queued + 1) times
  /// the expected service time of its outgoing link toward `dest`.
  double node_delay(NodeId node, NodeId dest, double bits) const;

  const congestion::NodeBuffer& buffer(NodeId node) const { return nodes_.at(node.index()).buffer; }
  bool congestion_flag(NodeId node);

  RngStream& rng(NodeId node) { return nodes_.at(node.index()).rng; }

  /// Unicast copies currently held in buffers or on links.
  std::uint64_t in_flight() const { return in_flight_; }
  std::uint64_t generated() const { return generated_; }

  SimulationTrace& trace() { return *trace_; }

 private:
  struct Queued {
    Packet pkt;
    Time enqueued_at;
  };

  struct NodeState {
    congestion::NodeBuffer buffer;
    congestion::EpochSampler sampler;
    std::deque<Queued> queue;
    bool busy = false;
    RngStream rng;
    ArrivalHandler on_arrival;
  };

  void enqueue(NodeId node, Packet pkt);
  void start_service(NodeId node);
  void finish_service(NodeId node, NodeId next, DelayBreakdown hop);
  void arrive(NodeId node, Packet pkt);
  void drop(NodeId node, const Packet& pkt, TraceReason reason);
  void forward_broadcast(NodeId node, const Packet& pkt, const std::shared_ptr<BroadcastHandler>& handler);
  bool fault_active(const Fault& f) const;
  /// Fault when a structural route exists but faults block it, else NoRoute.
  TraceReason unroutable_reason(NodeId node, NodeId dest) const;

  Simulator* sim_;
  const Topology* topo_;
  const DelayModel* delays_;
  NetworkConfig cfg_;
  SimulationTrace* trace_;
  std::vector<NodeState> nodes_;
  std::vector<Fault> faults_;
  std::unordered_map<std::uint32_t, std::vector<std::vector<NodeId>>> trees_;  // root -> children per node
  PacketId next_id_ = 1;
  std::uint64_t in_flight_ = 0;
  std::uint64_t generated_ = 0;
};

}  // namespace rrrt::sim
