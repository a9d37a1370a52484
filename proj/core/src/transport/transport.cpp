#include "rrrt/transport/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "rrrt/error.hpp"

namespace rrrt::transport {

namespace {
constexpr std::array<std::string_view, 5> kPhaseNames{"startup", "increase", "decrease", "hold", "probe"};
}

std::string_view to_string(Phase p) noexcept { return kPhaseNames[static_cast<std::size_t>(p)]; }

std::optional<Phase> parse_phase(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kPhaseNames.size(); ++i) {
    if (kPhaseNames[i] == s) return static_cast<Phase>(i);
  }
  return std::nullopt;
}

bool SackInfo::covers(Seq s) const {
  if (s >= 1 && s <= cumulative_ack) return true;
  auto it = std::lower_bound(blocks.begin(), blocks.end(), s, [](const SeqRange& r, Seq v) { return r.hi < v; });
  return it != blocks.end() && it->lo <= s;
}

double min_transmission_rate(std::uint64_t b, double delta_re2a) {
  if (b == 0) return 0.0;
  if (!(delta_re2a > 0.0)) {
    throw Error(Errc::DeadlineExpired, std::to_string(b) + " packets outstanding past the deadline");
  }
  return static_cast<double>(b) / delta_re2a;
}

TransportState initial_state(const DeliveryGoal& goal, Time now, const TransportParams& params) {
  TransportState st;
  st.phase = Phase::StartUp;
  st.r_c = 0.0;
  st.r_min = min_transmission_rate(goal.b_remaining, goal.delta_re2a(now));
  st.rtt_estimate = params.rtt_estimate;
  st.srtt = params.rtt_estimate;
  st.t_fdbk = params.t_fdbk;
  st.t_p = params.t_p;
  return st;
}

ProbePacket on_probe_forward(ProbePacket probe, double node_delay) {
  probe.bottleneck_delay = std::max(probe.bottleneck_delay, node_delay);
  ++probe.hop_count;
  return probe;
}

RateFeedback feedback_from_probe(const ProbePacket& probe, Time issued_at) {
  if (!(probe.bottleneck_delay > 0.0)) {
    throw Error(Errc::DegenerateProbe, "probe reached the receiver with a zero bottleneck delay");
  }
  return RateFeedback{1.0 / probe.bottleneck_delay, probe.hop_count, issued_at, probe.sent_at};
}

int increase_fraction(std::uint32_t hop_count) {
  return static_cast<int>(std::clamp<std::uint32_t>(hop_count, 1, 4));
}

FeedbackResult apply_rate_feedback(TransportState st, const RateFeedback& fb, double hold_band) {
  if (fb.issued_at <= st.last_feedback_issued) return {st, false};
  st.last_feedback_issued = fb.issued_at;
  st.m = increase_fraction(fb.hop_count);
  st.missed_feedback = 0;

  if (st.phase == Phase::StartUp || st.phase == Phase::Probe) {
    st.r_c = std::max(fb.r_f, st.r_min);
    st.phase = Phase::Hold;
    return {st, true};
  }
  if (std::abs(fb.r_f - st.r_c) <= hold_band * fb.r_f) {
    st.phase = Phase::Hold;
  } else if (fb.r_f > st.r_c) {
    st.phase = Phase::Increase;
    st.r_c += (fb.r_f - st.r_c) / st.m;
  } else {
    st.phase = Phase::Decrease;
    st.r_c = std::max(fb.r_f, st.r_min);
  }
  return {st, true};
}

TimeoutResult on_feedback_timeout(TransportState st, double decrease_factor) {
  if (st.phase == Phase::StartUp || st.phase == Phase::Probe) return {st, false};
  ++st.missed_feedback;
  st.r_c = std::max(st.r_c * decrease_factor, st.r_min);
  if (st.missed_feedback >= 2) {
    st.missed_feedback = 2;
    st.phase = Phase::Probe;
    return {st, true};
  }
  return {st, false};
}

SackInfo build_sack(const std::set<Seq>& received, Time issued_at) {
  SackInfo sack;
  sack.issued_at = issued_at;
  auto it = received.begin();
  // Sequence numbers start at 1.
  while (it != received.end() && *it == sack.cumulative_ack + 1) {
    ++sack.cumulative_ack;
    ++it;
  }
  while (it != received.end()) {
    if (*it <= sack.cumulative_ack) {
      ++it;
      continue;
    }
    SeqRange run{*it, *it};
    ++it;
    while (it != received.end() && *it == run.hi + 1) {
      run.hi = *it;
      ++it;
    }
    sack.blocks.push_back(run);
  }
  return sack;
}

std::vector<Seq> on_sack(const TransportState& state, const SackInfo& sack, RetxBuffer& buffer, Time now) {
  const Seq top = sack.max_acked();
  std::vector<Seq> out;
  for (auto it = buffer.begin(); it != buffer.end();) {
    if (sack.covers(it->first)) {
      it = buffer.erase(it);
      continue;
    }
    if (it->first >= top) break;
    if (now - it->second.last_tx >= state.srtt) {
      it->second.last_tx = now;
      ++it->second.tx_count;
      out.push_back(it->first);
    }
    ++it;
  }
  return out;
}

std::vector<Seq> tail_losses(const TransportState& state, const SackInfo& sack, RetxBuffer& buffer, Time now) {
  std::vector<Seq> out;
  for (auto it = buffer.upper_bound(sack.max_acked()); it != buffer.end(); ++it) {
    if (it->second.last_tx + state.srtt <= sack.issued_at) {
      it->second.last_tx = now;
      ++it->second.tx_count;
      out.push_back(it->first);
    }
  }
  return out;
}

}  // namespace rrrt::transport
