#pragma once

#include <cstdint>
#include <vector>

namespace rrrt::transport {

using Seq = std::uint64_t;

/// Start-up/probe control packet. Each forwarding node raises
/// `bottleneck_delay` to its own per-packet delay if that is larger.
struct ProbePacket {
  double bottleneck_delay = 0.0;
  std::uint32_t hop_count = 0;
  double sent_at = 0.0;

  bool operator==(const ProbePacket&) const = default;
};

/// Receiver-to-sender rate feedback.
struct RateFeedback {
  double r_f = 0.0;  // packets/s
  std::uint32_t hop_count = 0;
  double issued_at = 0.0;
  /// Send time of the probe this feedback answers, or negative for periodic feedback.
  double probe_echo = -1.0;

  bool operator==(const RateFeedback&) const = default;
};

struct SeqRange {
  Seq lo = 0;
  Seq hi = 0;

  bool operator==(const SeqRange&) const = default;
};

/// Selective acknowledgement: everything in [1, cumulative_ack] plus every
/// block was received; anything else was not.
struct SackInfo {
  Seq cumulative_ack = 0;
  std::vector<SeqRange> blocks;
  double issued_at = 0.0;

  Seq max_acked() const { return blocks.empty() ? cumulative_ack : blocks.back().hi; }
  bool covers(Seq s) const;
  bool operator==(const SackInfo&) const = default;
};

}  // namespace rrrt::transport
