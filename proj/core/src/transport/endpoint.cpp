#include "rrrt/transport/endpoint.hpp"

#include <algorithm>

#include "rrrt/error.hpp"

namespace rrrt::transport {

using sim::EventKind;
using sim::Packet;
using sim::PacketKind;

Sender::Sender(sim::Network& net, SenderConfig cfg) : net_(&net), cfg_(cfg) {
  state_.rtt_estimate = cfg_.params.rtt_estimate;
  state_.srtt = cfg_.params.rtt_estimate;
  state_.t_fdbk = cfg_.params.t_fdbk;
  state_.t_p = cfg_.params.t_p;
}

bool Sender::sending_phase() const {
  return state_.phase == Phase::Increase || state_.phase == Phase::Decrease || state_.phase == Phase::Hold;
}

void Sender::start_connection() {
  (void)net_->next_hop(cfg_.self, cfg_.peer);  // throws NoRoute
  const Time now = net_->now();
  started_ = true;
  if (cfg_.naive) {
    state_.phase = Phase::Hold;
    state_.r_c = cfg_.naive_rate;
    log_state(0.0);
    schedule_send();
    return;
  }
  state_ = initial_state(DeliveryGoal{cfg_.total_packets, cfg_.deadline}, now, cfg_.params);
  log_state(0.0);
  send_probe();
}

void Sender::log_state(double r_f) {
  net_->trace().connections.push_back(sim::ConnectionRow{net_->now(), state_.phase, state_.r_c, r_f, state_.r_min,
                                                         state_.missed_feedback, retransmits_});
}

void Sender::send_probe() {
  const Time now = net_->now();
  Packet p;
  p.kind = PacketKind::Probe;
  p.origin = cfg_.self;
  p.dest = cfg_.peer;
  p.flow = cfg_.flow;
  p.gen_time = now;
  // Probes are sized like data.
  p.bits = cfg_.data_bits;
  p.payload = ProbePacket{0.0, 0, now};
  net_->send(std::move(p));
  ++probes_sent_;
  if (!first_probe_at_) first_probe_at_ = now;
  net_->simulator().cancel(probe_timer_);
  probe_timer_ = net_->simulator().schedule(now + state_.t_p, cfg_.self, EventKind::Timer, [this] { on_probe_timer(); });
}

void Sender::on_probe_timer() {
  probe_timer_ = {};
  if (complete_) return;
  if (state_.phase == Phase::StartUp || state_.phase == Phase::Probe) send_probe();
}

void Sender::refresh_floor(Time now) {
  if (deadline_expired_) {
    state_.r_min = 0.0;
    return;
  }
  try {
    state_.r_min = min_transmission_rate(b_remaining(), cfg_.deadline - now);
  } catch (const Error&) {
    deadline_expired_ = true;
    state_.r_min = 0.0;
    net_->trace().record(now, cfg_.self, sim::TraceKind::Deadline);
    throw;
  }
  state_.r_c = std::max(state_.r_c, state_.r_min);
}

std::optional<Packet> Sender::tick_send(Time now) {
  if (complete_ || !started_) return std::nullopt;
  if (!cfg_.naive) {
    if (!sending_phase()) return std::nullopt;
    refresh_floor(now);
  }

  Seq seq = 0;
  bool retx = false;
  while (!retx_queue_.empty()) {
    const Seq s = retx_queue_.front();
    retx_queue_.pop_front();
    if (unacked_.count(s) != 0) {
      seq = s;
      retx = true;
      break;
    }
  }
  if (!retx) {
    if (next_new_ > cfg_.total_packets) return std::nullopt;
    seq = next_new_++;
  }

  Packet p;
  p.kind = PacketKind::Data;
  p.origin = cfg_.self;
  p.dest = cfg_.peer;
  p.flow = cfg_.flow;
  p.seq = seq;
  p.stream_total = cfg_.total_packets;
  p.bits = cfg_.data_bits;
  p.retransmission = retx;
  if (retx) {
    p.gen_time = unacked_.at(seq).first_tx;
    ++retransmits_;
  } else {
    p.gen_time = now;
    if (cfg_.sack && !cfg_.naive) unacked_.emplace(seq, TxRecord{now, now, 1});
  }
  return p;
}

void Sender::schedule_send() {
  if (complete_ || send_timer_.valid() || !(state_.r_c > 0.0)) return;
  const Time now = net_->now();
  const Time at = std::max(now, last_send_ + 1.0 / state_.r_c);
  send_timer_ = net_->simulator().schedule(at, cfg_.self, EventKind::Timer, [this] { on_send_timer(); });
}

void Sender::on_send_timer() {
  send_timer_ = {};
  const Time now = net_->now();
  std::optional<Packet> p;
  try {
    p = tick_send(now);
  } catch (const Error& e) {
    if (e.code() != Errc::DeadlineExpired) throw;
    p = tick_send(now);  // floor is now zero; keep delivering
  }
  if (!p) {
    if (cfg_.naive || (!cfg_.sack && next_new_ > cfg_.total_packets)) finish();
    return;
  }
  net_->send(std::move(*p));
  ++data_sent_;
  last_send_ = now;
  if (cfg_.naive && next_new_ > cfg_.total_packets) {
    finish();
    return;
  }
  schedule_send();
}

void Sender::arm_feedback_timer(Time at) {
  net_->simulator().cancel(feedback_timer_);
  feedback_timer_ = net_->simulator().schedule(at, cfg_.self, EventKind::Timer, [this] { on_feedback_timer(); });
}

void Sender::on_feedback_timer() {
  feedback_timer_ = {};
  if (complete_ || !sending_phase()) return;
  const TimeoutResult res = on_feedback_timeout(state_, cfg_.params.decrease_factor);
  state_ = res.state;
  log_state(0.0);
  if (res.send_probe) {
    net_->simulator().cancel(send_timer_);
    send_timer_ = {};
    send_probe();
  } else {
    arm_feedback_timer(net_->now() + state_.t_fdbk);
  }
}

void Sender::on_packet(const Packet& pkt) {
  if (cfg_.naive || complete_ || pkt.flow != cfg_.flow) return;
  if (const auto* fb = std::get_if<RateFeedback>(&pkt.payload)) {
    on_feedback(*fb);
  } else if (const auto* sack = std::get_if<SackInfo>(&pkt.payload)) {
    on_sack_packet(*sack);
  }
}

void Sender::on_feedback(const RateFeedback& fb) {
  const Time now = net_->now();
  ++feedback_received_;
  if (!first_feedback_at_) first_feedback_at_ = now;
  if (fb.probe_echo >= 0.0) {
    const double sample = now - fb.probe_echo;
    state_.srtt = feedback_received_ == 1 ? sample : 0.875 * state_.srtt + 0.125 * sample;
  }
  const bool was_probing = state_.phase == Phase::StartUp || state_.phase == Phase::Probe;
  const FeedbackResult res = apply_rate_feedback(state_, fb, cfg_.params.hold_band);
  if (!res.applied) return;
  state_ = res.state;
  if (was_probing) {
    net_->simulator().cancel(probe_timer_);
    probe_timer_ = {};
  }
  try {
    refresh_floor(now);
  } catch (const Error& e) {
    if (e.code() != Errc::DeadlineExpired) throw;
  }
  log_state(fb.r_f);
  // First deadline allows half a period of jitter; later ones are one period apart.
  arm_feedback_timer(now + 1.5 * state_.t_fdbk);
  if (send_timer_.valid()) {
    net_->simulator().cancel(send_timer_);
    send_timer_ = {};
  }
  schedule_send();
}

void Sender::on_sack_packet(const SackInfo& sack) {
  if (!cfg_.sack) return;
  const Time now = net_->now();
  const std::size_t before = unacked_.size();
  std::vector<Seq> lost = on_sack(state_, sack, unacked_, now);
  const std::size_t newly_acked = before - unacked_.size();
  acked_ += newly_acked;
  if (next_new_ > cfg_.total_packets) {
    const std::vector<Seq> tail = tail_losses(state_, sack, unacked_, now);
    lost.insert(lost.end(), tail.begin(), tail.end());
  }
  for (Seq s : lost) retx_queue_.push_back(s);
  if (next_new_ > cfg_.total_packets && unacked_.empty()) {
    finish();
    return;
  }
  if (!lost.empty() && sending_phase()) schedule_send();
}

void Sender::finish() {
  complete_ = true;
  auto& sim = net_->simulator();
  sim.cancel(send_timer_);
  sim.cancel(feedback_timer_);
  sim.cancel(probe_timer_);
  send_timer_ = feedback_timer_ = probe_timer_ = {};
  log_state(0.0);
}

Receiver::Receiver(sim::Network& net, ReceiverConfig cfg) : net_(&net), cfg_(cfg) {}

bool Receiver::complete() const { return stream_total_ != 0 && received_.size() == stream_total_; }

void Receiver::send_feedback(const RateFeedback& fb) {
  const Time now = net_->now();
  Packet p;
  p.kind = PacketKind::Feedback;
  p.origin = cfg_.self;
  p.dest = cfg_.peer;
  p.flow = cfg_.flow;
  p.gen_time = now;
  p.bits = cfg_.control_bits;
  p.payload = fb;
  net_->send(std::move(p));
  ++feedback_sent_;
  if (cfg_.sack) {
    Packet s;
    s.kind = PacketKind::Sack;
    s.origin = cfg_.self;
    s.dest = cfg_.peer;
    s.flow = cfg_.flow;
    s.gen_time = now;
    s.bits = cfg_.control_bits;
    s.payload = build_sack(received_, now);
    net_->send(std::move(s));
  }
}

void Receiver::on_periodic() {
  periodic_timer_ = {};
  if (closed_) return;
  if (last_bottleneck_ > 0.0) {
    ++periodic_sent_;
    send_feedback(RateFeedback{1.0 / last_bottleneck_, last_hops_, net_->now(), -1.0});
  }
  if (complete()) {
    closed_ = true;
    return;
  }
  periodic_timer_ =
      net_->simulator().schedule(net_->now() + cfg_.t_fdbk, cfg_.self, EventKind::Timer, [this] { on_periodic(); });
}

void Receiver::on_packet(const Packet& pkt) {
  if (pkt.flow != cfg_.flow) return;
  const Time now = net_->now();
  if (pkt.kind == PacketKind::Probe) {
    const auto& probe = std::get<ProbePacket>(pkt.payload);
    if (probe.bottleneck_delay > 0.0) {
      last_bottleneck_ = probe.bottleneck_delay;
      last_hops_ = probe.hop_count;
      send_feedback(feedback_from_probe(probe, now));
    }
    if (!periodic_running_) {
      periodic_running_ = true;
      periodic_timer_ =
          net_->simulator().schedule(now + cfg_.t_fdbk, cfg_.self, EventKind::Timer, [this] { on_periodic(); });
    }
    return;
  }
  if (pkt.kind != PacketKind::Data) return;
  if (pkt.bottleneck_delay > 0.0) {
    last_bottleneck_ = pkt.bottleneck_delay;
    last_hops_ = pkt.hops;
  }
  stream_total_ = std::max(stream_total_, pkt.stream_total);
  if (received_.insert(pkt.seq).second) {
    net_->trace().record(now, cfg_.self, sim::TraceKind::Deliver, pkt.id, sim::TraceReason::None, now - pkt.gen_time,
                         pkt.delays.b_del);
    if (complete() && !closed_) {
      // Final acknowledgement for the whole stream.
      send_feedback(RateFeedback{1.0 / last_bottleneck_, last_hops_, now, -1.0});
      closed_ = true;
      net_->simulator().cancel(periodic_timer_);
      periodic_timer_ = {};
    }
  } else {
    ++duplicates_;
    net_->trace().record(now, cfg_.self, sim::TraceKind::Duplicate, pkt.id);
  }
}

}  // namespace rrrt::transport
