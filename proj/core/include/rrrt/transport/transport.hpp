#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "rrrt/sim/types.hpp"
#include "rrrt/transport/messages.hpp"
#include "rrrt/transport/phase.hpp"

namespace rrrt::transport {

using sim::Time;

struct TransportParams {
  double t_fdbk = 0.2;           // receiver feedback period
  double t_p = 0.2;              // probe retry period
  double decrease_factor = 0.5;  // per missed feedback period
  double hold_band = 0.02;       // |r_f - r_c| <= hold_band * r_f enters Hold
  double rtt_estimate = 0.05;    // initial RTT estimate; t_fdbk and t_p must exceed it
};

/// Sender-side rate control state.
struct TransportState {
  Phase phase = Phase::StartUp;
  double r_c = 0.0;    // current rate, packets/s
  double r_min = 0.0;  // deadline-derived floor, packets/s
  int m = 1;           // increase fraction divisor, 1..4
  int missed_feedback = 0;
  double rtt_estimate = 0.05;
  double srtt = 0.05;  // smoothed RTT from probe round trips
  double t_fdbk = 0.2;
  double t_p = 0.2;
  double last_feedback_issued = -sim::kInfinity;
};

struct DeliveryGoal {
  std::uint64_t b_remaining = 0;
  Time deadline = 0.0;  // absolute event-to-action deadline

  double delta_re2a(Time now) const { return deadline - now; }
};

/// R_min = b / delta_re2a. Throws Errc::DeadlineExpired when the deadline has
/// passed with data outstanding; returns 0 when nothing remains.
double min_transmission_rate(std::uint64_t b, double delta_re2a);

/// Fresh StartUp state with r_min precomputed from the goal.
TransportState initial_state(const DeliveryGoal& goal, Time now, const TransportParams& params);

/// bottleneck_delay <- max(bottleneck_delay, node_delay); hop_count + 1.
ProbePacket on_probe_forward(ProbePacket probe, double node_delay);

/// r_f = 1 / bottleneck_delay. Throws Errc::DegenerateProbe on a zero field.
RateFeedback feedback_from_probe(const ProbePacket& probe, Time issued_at);

/// min(max(hop_count, 1), 4).
int increase_fraction(std::uint32_t hop_count);

struct FeedbackResult {
  TransportState state;
  bool applied = false;  // false: stale feedback, state unchanged
};

/// Steady state: Hold inside the band, Increase by (r_f - r_c) / m, or
/// Decrease to max(r_f, r_min). In StartUp/Probe the first feedback captures
/// the rate directly: r_c = max(r_f, r_min), phase Hold.
FeedbackResult apply_rate_feedback(TransportState state, const RateFeedback& fb, double hold_band);

struct TimeoutResult {
  TransportState state;
  bool send_probe = false;
};

/// One feedback period without feedback: r_c <- max(r_c * factor, r_min);
/// the second consecutive miss moves to Probe. No-op in StartUp/Probe.
TimeoutResult on_feedback_timeout(TransportState state, double decrease_factor);

/// Cumulative point plus maximal runs above the first hole.
SackInfo build_sack(const std::set<Seq>& received, Time issued_at = 0.0);

struct TxRecord {
  Time first_tx = 0.0;
  Time last_tx = 0.0;
  std::uint32_t tx_count = 1;
};

/// Unacknowledged data keyed by sequence number.
using RetxBuffer = std::map<Seq, TxRecord>;

/// Drops acknowledged entries, then returns every hole below the highest
/// acknowledged sequence in one batch. A hole retransmitted less than one
/// smoothed RTT ago is still in flight and is not repeated, so duplicate
/// SACKs are idempotent. Returned entries are stamped with `now`.
std::vector<Seq> on_sack(const TransportState& state, const SackInfo& sack, RetxBuffer& buffer, Time now);

/// Outstanding sequences above the highest acknowledged one that were last
/// sent at least one smoothed RTT before the SACK was issued (lost tail).
std::vector<Seq> tail_losses(const TransportState& state, const SackInfo& sack, RetxBuffer& buffer, Time now);

}  // namespace rrrt::transport
