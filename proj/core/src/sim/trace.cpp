#include "rrrt/sim/trace.hpp"

#include <algorithm>
#include <array>

#include "rrrt/sim/packet.hpp"

namespace rrrt::sim {

namespace {

constexpr std::array<std::string_view, 11> kKindNames{"gen",        "tx",    "rx",    "arrive",   "deliver", "duplicate",
                                                      "drop",       "freq",  "fault", "deadline", "tick"};
constexpr std::array<std::string_view, 6> kReasonNames{"", "overflow", "fault", "noroute", "loss", "retx"};

}  // namespace

std::string_view to_string(TraceKind k) noexcept { return kKindNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(TraceReason r) noexcept { return kReasonNames[static_cast<std::size_t>(r)]; }

std::optional<TraceKind> parse_trace_kind(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<TraceKind>(i);
  }
  return std::nullopt;
}

std::optional<TraceReason> parse_trace_reason(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kReasonNames.size(); ++i) {
    if (kReasonNames[i] == s) return static_cast<TraceReason>(i);
  }
  return std::nullopt;
}

std::string_view to_string(PacketKind kind) noexcept {
  switch (kind) {
    case PacketKind::Data: return "data";
    case PacketKind::Probe: return "probe";
    case PacketKind::Feedback: return "feedback";
    case PacketKind::Sack: return "sack";
    case PacketKind::FrequencyBroadcast: return "frequency";
  }
  return "?";
}

std::size_t SimulationTrace::count(TraceKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [kind](const TraceRecord& r) { return r.kind == kind; }));
}

}  // namespace rrrt::sim
