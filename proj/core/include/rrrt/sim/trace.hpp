#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rrrt/reliability/condition.hpp"
#include "rrrt/sim/types.hpp"
#include "rrrt/transport/phase.hpp"

namespace rrrt::sim {

enum class TraceKind : std::uint8_t {
  Gen,        // copy injected at its origin
  Tx,         // node finished transmitting a copy
  Rx,         // node received a copy from a link
  Arrive,     // copy reached its destination node
  Deliver,    // first application-layer delivery of a data item (value = latency, aux = summed b_del)
  Duplicate,  // data copy for an already-delivered item
  Drop,       // copy discarded (reason says why)
  FreqUpdate, // source applied a broadcast frequency (value = Hz)
  Fault,      // fault became active
  Deadline,   // transport deadline expired with data outstanding
  Tick,       // generic timer record
};

enum class TraceReason : std::uint8_t { None, Overflow, Fault, NoRoute, Loss, Retx };

std::string_view to_string(TraceKind k) noexcept;
std::string_view to_string(TraceReason r) noexcept;
std::optional<TraceKind> parse_trace_kind(std::string_view s) noexcept;
std::optional<TraceReason> parse_trace_reason(std::string_view s) noexcept;

inline constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

struct TraceRecord {
  Time time = 0.0;
  NodeId node{};
  TraceKind kind = TraceKind::Tick;
  TraceReason reason = TraceReason::None;
  PacketId packet = 0;
  double value = kNoValue;
  double aux = kNoValue;
};

/// One controller decision per closed interval.
struct IntervalRow {
  std::int64_t interval = 0;
  Time end_time = 0.0;
  std::uint64_t dr_o = 0;
  std::uint64_t dr_d = 0;
  double alpha = 0.0;
  double t_i = kInfinity;
  bool cn = false;
  reliability::NetworkCondition condition = reliability::NetworkCondition::AdequateRelNoCong;
  double f_i = 0.0;
  double f_next = 0.0;
  int x = 1;
};

/// Sender state snapshot, logged whenever the transport state changes.
struct ConnectionRow {
  Time time = 0.0;
  transport::Phase phase = transport::Phase::StartUp;
  double r_c = 0.0;
  double r_f = 0.0;
  double r_min = 0.0;
  int missed_feedback = 0;
  std::uint64_t retransmit_count = 0;
};

/// Parameters the metrics need to recompute a report from a stored trace.
struct TraceMeta {
  std::string version;
  std::uint64_t scenario_hash = 0;
  std::uint64_t seed = 0;
  double e_tx = 50e-6;
  double e_rx = 25e-6;
  double interval_len = 1.0;
  double beta = 0.05;
  double delta_e2a = 0.0;
  double ep_del = 0.0;
  double a_del = 0.0;
  Time horizon = 0.0;
  std::uint64_t in_flight = 0;
};

/// Append-only record of a run.
struct SimulationTrace {
  TraceMeta meta;
  std::vector<TraceRecord> events;
  std::vector<IntervalRow> intervals;
  std::vector<ConnectionRow> connections;

  void record(Time t, NodeId node, TraceKind kind, PacketId packet = 0, TraceReason reason = TraceReason::None,
              double value = kNoValue, double aux = kNoValue) {
    events.push_back({t, node, kind, reason, packet, value, aux});
  }

  std::size_t count(TraceKind kind) const;
};

}  // namespace rrrt::sim
