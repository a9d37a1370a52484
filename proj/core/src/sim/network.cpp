#include "rrrt/sim/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rrrt/error.hpp"
#include "rrrt/transport/transport.hpp"

namespace rrrt::sim {

Network::Network(Simulator& sim, const Topology& topo, const DelayModel& delays, NetworkConfig cfg,
                 SimulationTrace& trace, std::uint64_t seed)
    : sim_(&sim), topo_(&topo), delays_(&delays), cfg_(cfg), trace_(&trace) {
  nodes_.reserve(topo.size());
  for (std::size_t i = 0; i < topo.size(); ++i) {
    nodes_.push_back(NodeState{congestion::NodeBuffer{cfg.buffer_capacity, 0, 0, 0},
                               congestion::EpochSampler(cfg.epoch), {}, false, RngStream(seed, i), {}});
  }
}

void Network::set_arrival_handler(NodeId node, ArrivalHandler handler) {
  nodes_.at(node.index()).on_arrival = std::move(handler);
}

PacketId Network::send(Packet pkt) {
  pkt.id = next_id_++;
  pkt.inject_time = now();
  pkt.hops = 0;
  pkt.delays = {};
  ++generated_;
  ++in_flight_;
  trace_->record(now(), pkt.origin, TraceKind::Gen, pkt.id, pkt.retransmission ? TraceReason::Retx : TraceReason::None);
  const PacketId id = pkt.id;
  enqueue(pkt.origin, std::move(pkt));
  return id;
}

bool Network::fault_active(const Fault& f) const { return f.at <= now(); }

bool Network::node_faulted(NodeId node, std::optional<FaultMode> mode) const {
  for (const Fault& f : faults_) {
    const auto* target = std::get_if<NodeId>(&f.target);
    if (target && *target == node && fault_active(f) && (!mode || *mode == f.mode)) return true;
  }
  return false;
}

bool Network::link_faulted(LinkRef link, std::optional<FaultMode> mode) const {
  for (const Fault& f : faults_) {
    const auto* target = std::get_if<LinkRef>(&f.target);
    if (target && *target == link && fault_active(f) && (!mode || *mode == f.mode)) return true;
  }
  return false;
}

NodeId Network::next_hop(NodeId node, NodeId dest) const {
  if (node == dest) throw Error(Errc::NoRoute, "destination is the node itself");
  auto usable = [&](std::optional<NodeId> hop) {
    return hop && !node_faulted(*hop, FaultMode::Crash) && !link_faulted({node, *hop}, FaultMode::Crash);
  };
  if (auto p = topo_->primary_hop(node, dest); usable(p)) return *p;
  if (auto a = topo_->alternate_hop(node, dest); usable(a)) return *a;
  throw Error(Errc::NoRoute, "no route " + std::to_string(node.value) + "->" + std::to_string(dest.value));
}

TraceReason Network::unroutable_reason(NodeId node, NodeId dest) const {
  return node != dest && topo_->primary_hop(node, dest) ? TraceReason::Fault : TraceReason::NoRoute;
}

void Network::inject_fault(Fault fault) {
  if (fault.at < now()) throw Error(Errc::PastTime, "fault time precedes clock");
  NodeId where{};
  if (const auto* n = std::get_if<NodeId>(&fault.target)) {
    if (!topo_->contains(*n)) throw Error(Errc::UnknownTarget, "fault on unknown node " + std::to_string(n->value));
    where = *n;
  } else {
    const auto& l = std::get<LinkRef>(fault.target);
    if (!topo_->has_link(l)) throw Error(Errc::UnknownTarget, "fault on unknown link");
    where = l.from;
  }
  faults_.push_back(fault);
  sim_->schedule(fault.at, where, EventKind::Generic, [this, where] {
    trace_->record(now(), where, TraceKind::Fault);
  });
}

double Network::node_delay(NodeId node, NodeId dest, double bits) const {
  const NodeId nh = next_hop(node, dest);
  const auto queued = static_cast<double>(nodes_[node.index()].buffer.occupancy);
  return (queued + 1.0) * delays_->service_time({node, nh}, bits);
}

bool Network::congestion_flag(NodeId node) {
  NodeState& ns = nodes_.at(node.index());
  ns.sampler.advance(ns.buffer, now());
  return ns.sampler.flag();
}

void Network::drop(NodeId node, const Packet& pkt, TraceReason reason) {
  ensure(in_flight_ > 0, "drop with nothing in flight");
  --in_flight_;
  trace_->record(now(), node, TraceKind::Drop, pkt.id, reason);
}

void Network::enqueue(NodeId node, Packet pkt) {
  NodeState& ns = nodes_[node.index()];
  ns.sampler.advance(ns.buffer, now());
  if (node_faulted(node)) {
    drop(node, pkt, TraceReason::Fault);
    return;
  }
  // Forwarding nodes report their per-packet delay to rate probes and data.
  if (pkt.kind == PacketKind::Probe || pkt.kind == PacketKind::Data) {
    double nd = 0.0;
    try {
      nd = node_delay(node, pkt.dest, pkt.bits);
    } catch (const Error&) {
      drop(node, pkt, unroutable_reason(node, pkt.dest));
      return;
    }
    if (auto* probe = std::get_if<transport::ProbePacket>(&pkt.payload)) {
      *probe = transport::on_probe_forward(*probe, nd);
    }
    pkt.bottleneck_delay = std::max(pkt.bottleneck_delay, nd);
  }
  if (ns.buffer.on_enqueue() == congestion::EnqueueResult::Dropped) {
    drop(node, pkt, TraceReason::Overflow);
    return;
  }
  ensure(ns.buffer.occupancy <= ns.buffer.capacity, "buffer occupancy exceeds capacity");
  ns.queue.push_back(Queued{std::move(pkt), now()});
  if (!ns.busy) start_service(node);
}

void Network::start_service(NodeId node) {
  NodeState& ns = nodes_[node.index()];
  while (!ns.queue.empty()) {
    Queued& head = ns.queue.front();
    NodeId nh{};
    try {
      nh = next_hop(node, head.pkt.dest);
    } catch (const Error&) {
      ns.sampler.advance(ns.buffer, now());
      ns.buffer.on_dequeue();
      Packet dead = std::move(head.pkt);
      ns.queue.pop_front();
      drop(node, dead, unroutable_reason(node, dead.dest));
      continue;
    }
    DelayBreakdown hop = delays_->sample_channel_delays({node, nh}, head.pkt.bits, ns.queue.size() - 1, ns.rng);
    hop.b_del = now() - head.enqueued_at;
    ns.busy = true;
    sim_->schedule(now() + hop.ca_del + hop.t_del, node, EventKind::ServiceDone,
                   [this, node, nh, hop] { finish_service(node, nh, hop); });
    return;
  }
  ns.busy = false;
}

void Network::finish_service(NodeId node, NodeId next, DelayBreakdown hop) {
  NodeState& ns = nodes_[node.index()];
  ns.sampler.advance(ns.buffer, now());
  ns.buffer.on_dequeue();
  Packet pkt = std::move(ns.queue.front().pkt);
  ns.queue.pop_front();

  if (node_faulted(node)) {
    drop(node, pkt, TraceReason::Fault);
    while (!ns.queue.empty()) {
      ns.buffer.on_dequeue();
      drop(node, ns.queue.front().pkt, TraceReason::Fault);
      ns.queue.pop_front();
    }
    ns.busy = false;
    return;
  }

  trace_->record(now(), node, TraceKind::Tx, pkt.id);
  pkt = congestion::mark_packet(std::move(pkt), ns.sampler.flag());
  pkt.delays += hop;
  ++pkt.hops;

  const LinkRef link{node, next};
  const double loss = topo_->link(link).loss;
  if (link_faulted(link)) {
    drop(node, pkt, TraceReason::Fault);
  } else if (loss > 0.0 && ns.rng.bernoulli(loss)) {
    drop(node, pkt, TraceReason::Loss);
  } else {
    sim_->schedule(now() + hop.p_del, next, EventKind::Arrival,
                   [this, next, p = std::move(pkt)]() mutable { arrive(next, std::move(p)); });
  }
  start_service(node);
}

void Network::arrive(NodeId node, Packet pkt) {
  if (node_faulted(node)) {
    drop(node, pkt, TraceReason::Fault);
    return;
  }
  trace_->record(now(), node, TraceKind::Rx, pkt.id);
  if (node != pkt.dest) {
    enqueue(node, std::move(pkt));
    return;
  }
  const double elapsed = now() - pkt.inject_time;
  ensure(std::abs(elapsed - pkt.delays.total()) <= 1e-9 * std::max(1.0, elapsed),
         "end-to-end delay differs from summed per-hop breakdown");
  --in_flight_;
  trace_->record(now(), node, TraceKind::Arrive, pkt.id);
  if (const auto& handler = nodes_[node.index()].on_arrival) handler(pkt);
}

void Network::broadcast(Packet pkt, BroadcastHandler handler) {
  const NodeId root = pkt.origin;
  auto [it, fresh] = trees_.try_emplace(root.value);
  if (fresh) {
    it->second.assign(topo_->size(), {});
    for (const NodeInfo& n : topo_->nodes()) {
      if (auto up = topo_->primary_hop(n.id, root)) it->second[up->index()].push_back(n.id);
    }
  }
  pkt.id = next_id_++;
  pkt.inject_time = now();
  forward_broadcast(root, pkt, std::make_shared<BroadcastHandler>(std::move(handler)));
}

void Network::forward_broadcast(NodeId node, const Packet& pkt, const std::shared_ptr<BroadcastHandler>& handler) {
  const auto& children = trees_.at(pkt.origin.value)[node.index()];
  if (children.empty() || node_faulted(node)) return;
  NodeState& ns = nodes_[node.index()];
  const double ca = delays_->channel_access().sample(ns.rng);
  const double t = pkt.bits / topo_->link({node, children.front()}).bit_rate;
  sim_->schedule(now() + ca + t, node, EventKind::Broadcast, [this, node, pkt, handler] {
    if (node_faulted(node)) return;
    trace_->record(now(), node, TraceKind::Tx, pkt.id);
    for (const NodeId& child : trees_.at(pkt.origin.value)[node.index()]) {
      const double p = topo_->link({node, child}).propagation;
      sim_->schedule(now() + p, child, EventKind::Broadcast, [this, child, pkt, handler] {
        if (node_faulted(child)) return;
        trace_->record(now(), child, TraceKind::Rx, pkt.id);
        (*handler)(child, pkt);
        forward_broadcast(child, pkt, handler);
      });
    }
  });
}

}  // namespace rrrt::sim
