#pragma once

#include <cstdint>

namespace rrrt::congestion {

enum class EnqueueResult { Queued, Dropped };

/// Forwarding buffer accounting for one node. Occupancy counts every packet
/// the node holds, including the one being transmitted.
struct NodeBuffer {
  std::uint32_t capacity = 0;
  std::uint32_t occupancy = 0;
  std::uint32_t prev_occupancy = 0;
  std::uint64_t drops = 0;

  /// Admits one packet, or counts an overflow drop when full.
  EnqueueResult on_enqueue();
  /// Releases one packet after transmission.
  void on_dequeue();
  /// Evaluates congestion_flag() for the epoch that just ended, then rolls
  /// prev_occupancy forward.
  bool sample_epoch();
};

/// Predictive rule: congested iff occupancy + (occupancy - prev_occupancy)
/// exceeds capacity.
bool congestion_flag(const NodeBuffer& buf);

/// CN marking is a monotone OR along the path.
constexpr bool mark(bool packet_cn, bool local_cn) { return packet_cn || local_cn; }

/// Tracks the epoch grid for one node and holds the flag sampled at the most
/// recent boundary. Sampling is lazy: advance() replays every boundary crossed
/// since the last call.
class EpochSampler {
 public:
  explicit EpochSampler(double epoch) : epoch_(epoch) {}

  /// Must be called before any buffer mutation at time `now`.
  void advance(NodeBuffer& buf, double now);
  bool flag() const { return flag_; }
  double epoch() const { return epoch_; }

 private:
  double epoch_;
  std::int64_t last_epoch_ = 0;
  bool flag_ = false;
};

}  // namespace rrrt::congestion

#include "rrrt/sim/packet.hpp"

namespace rrrt::congestion {

/// Sets pkt.cn to pkt.cn OR local_cn; nothing else changes.
inline sim::Packet mark_packet(sim::Packet pkt, bool local_cn) {
  pkt.cn = mark(pkt.cn, local_cn);
  return pkt;
}

}  // namespace rrrt::congestion
