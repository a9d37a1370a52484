#pragma once

#include <deque>
#include <optional>
#include <set>

#include "rrrt/sim/network.hpp"
#include "rrrt/transport/transport.hpp"

namespace rrrt::transport {

struct SenderConfig {
  sim::NodeId self{};
  sim::NodeId peer{};
  std::uint32_t flow = 1;
  std::uint64_t total_packets = 1000;
  Time deadline = 60.0;  // absolute
  TransportParams params;
  bool sack = true;
  /// Fixed-rate baseline: no probing, no feedback reaction, no retransmission.
  bool naive = false;
  double naive_rate = 100.0;
  double data_bits = 1000.0;
  double control_bits = 256.0;
};

/// Rate-controlled reliable sender. All transitions happen on kernel events.
class Sender {
 public:
  Sender(sim::Network& net, SenderConfig cfg);

  Sender(const Sender&) = delete;
  Sender& operator=(const Sender&) = delete;

  /// Sends the start-up probe. Throws Errc::NoRoute.
  void start_connection();
  void on_packet(const sim::Packet& pkt);

  /// Next data packet under the current phase and rate, or nullopt when the
  /// phase forbids data or nothing is left. Recomputes R_min from the
  /// remaining goal. Throws Errc::DeadlineExpired once when the deadline
  /// passes with data outstanding.
  std::optional<sim::Packet> tick_send(Time now);

  const TransportState& state() const { return state_; }
  const SenderConfig& config() const { return cfg_; }
  bool complete() const { return complete_; }
  bool deadline_expired() const { return deadline_expired_; }
  std::uint64_t retransmit_count() const { return retransmits_; }
  std::uint64_t acked() const { return acked_; }
  std::uint64_t data_sent() const { return data_sent_; }
  std::uint64_t probes_sent() const { return probes_sent_; }
  std::uint64_t feedback_received() const { return feedback_received_; }
  std::optional<Time> first_feedback_at() const { return first_feedback_at_; }
  std::optional<Time> first_probe_at() const { return first_probe_at_; }
  /// Packets still owed to the receiver: unacknowledged ones with SACK,
  /// otherwise the ones not yet sent.
  std::uint64_t b_remaining() const {
    return cfg_.sack ? cfg_.total_packets - acked_ : cfg_.total_packets - (next_new_ - 1);
  }

 private:
  bool sending_phase() const;
  void send_probe();
  void on_send_timer();
  void schedule_send();
  void arm_feedback_timer(Time at);
  void on_feedback_timer();
  void on_probe_timer();
  void on_feedback(const RateFeedback& fb);
  void on_sack_packet(const SackInfo& sack);
  void refresh_floor(Time now);
  void finish();
  void log_state(double r_f);

  sim::Network* net_;
  SenderConfig cfg_;
  TransportState state_;
  RetxBuffer unacked_;
  std::deque<Seq> retx_queue_;
  Seq next_new_ = 1;
  std::uint64_t acked_ = 0;
  std::uint64_t retransmits_ = 0;
  std::uint64_t data_sent_ = 0;
  std::uint64_t probes_sent_ = 0;
  std::uint64_t feedback_received_ = 0;
  bool complete_ = false;
  bool deadline_expired_ = false;
  bool started_ = false;
  Time last_send_ = -sim::kInfinity;
  std::optional<Time> first_feedback_at_;
  std::optional<Time> first_probe_at_;
  sim::EventHandle send_timer_;
  sim::EventHandle feedback_timer_;
  sim::EventHandle probe_timer_;
};

struct ReceiverConfig {
  sim::NodeId self{};
  sim::NodeId peer{};
  std::uint32_t flow = 1;
  double t_fdbk = 0.2;
  bool sack = true;
  double control_bits = 256.0;
};

/// Receiving sub-sink: dedups data for the application, answers probes and
/// sends rate feedback (plus a SACK) every t_fdbk while the stream is open.
class Receiver {
 public:
  Receiver(sim::Network& net, ReceiverConfig cfg);

  Receiver(const Receiver&) = delete;
  Receiver& operator=(const Receiver&) = delete;

  void on_packet(const sim::Packet& pkt);

  std::uint64_t delivered() const { return received_.size(); }
  std::uint64_t duplicates() const { return duplicates_; }
  std::uint64_t feedback_sent() const { return feedback_sent_; }
  std::uint64_t periodic_feedback_sent() const { return periodic_sent_; }
  bool complete() const;
  const std::set<Seq>& received() const { return received_; }

 private:
  void send_feedback(const RateFeedback& fb);
  void on_periodic();

  sim::Network* net_;
  ReceiverConfig cfg_;
  std::set<Seq> received_;
  std::uint64_t stream_total_ = 0;
  std::uint64_t duplicates_ = 0;
  std::uint64_t feedback_sent_ = 0;
  std::uint64_t periodic_sent_ = 0;
  double last_bottleneck_ = 0.0;
  std::uint32_t last_hops_ = 0;
  bool periodic_running_ = false;
  bool closed_ = false;
  sim::EventHandle periodic_timer_;
};

}  // namespace rrrt::transport
