#pragma once

#include <cstdint>
#include <string_view>
#include <variant>

#include "rrrt/sim/delay_model.hpp"
#include "rrrt/sim/types.hpp"
#include "rrrt/transport/messages.hpp"

namespace rrrt::sim {

enum class PacketKind : std::uint8_t { Data, Probe, Feedback, Sack, FrequencyBroadcast };

std::string_view to_string(PacketKind kind) noexcept;

struct FrequencyPayload {
  double frequency = 0.0;
};

using Payload = std::variant<std::monostate, transport::ProbePacket, transport::RateFeedback,
                             transport::SackInfo, FrequencyPayload>;

/// Simulated datagram. `gen_time` is when the carried data was first
/// generated (retransmissions keep it); `inject_time` is when this copy
/// entered the network.
struct Packet {
  PacketId id = 0;
  PacketKind kind = PacketKind::Data;
  NodeId origin{};
  NodeId dest{};
  std::uint32_t flow = 0;
  std::uint64_t seq = 0;
  std::uint64_t stream_total = 0;
  Time gen_time = 0.0;
  Time inject_time = 0.0;
  double bits = 1000.0;
  bool cn = false;
  bool retransmission = false;
  std::uint32_t hops = 0;
  /// Path maximum of the per-node delay reported by forwarding nodes.
  double bottleneck_delay = 0.0;
  DelayBreakdown delays;
  Payload payload;
};

}  // namespace rrrt::sim
