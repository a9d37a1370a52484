#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "rrrt/sim/types.hpp"

namespace rrrt::sim {

enum class EventKind : std::uint8_t {
  Generic,
  Arrival,
  ServiceDone,
  Timer,
  Broadcast,
  IntervalClose,
};

struct SimEvent {
  Time time = 0.0;
  std::uint64_t ordinal = 0;
  NodeId target{};
  EventKind kind = EventKind::Generic;
  std::function<void()> action;
};

struct EventHandle {
  std::uint64_t ordinal = 0;
  bool valid() const { return ordinal != 0; }
};

/// Single-threaded discrete-event engine. Events fire in (time, ordinal)
/// order; the ordinal is assigned at schedule time and breaks ties.
class Simulator {
 public:
  Time now() const { return now_; }

  /// Throws Errc::PastTime when `time < now()`.
  EventHandle schedule(Time time, NodeId target, EventKind kind, std::function<void()> action);
  EventHandle schedule_in(Time delay, NodeId target, EventKind kind, std::function<void()> action) {
    return schedule(now_ + delay, target, kind, std::move(action));
  }

  /// Cancelling an already-fired or unknown handle is a no-op.
  void cancel(EventHandle handle);

  /// Processes every event with time <= t_end. Returns the number fired.
  std::uint64_t run_until(Time t_end);

  /// Stops the current run_until after the event being processed.
  void stop() { stopped_ = true; }

  std::size_t pending() const { return queue_.size() - cancelled_.size(); }
  std::uint64_t fired() const { return fired_; }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.ordinal > b.ordinal;
    }
  };

  Time now_ = 0.0;
  std::uint64_t next_ordinal_ = 1;
  std::uint64_t fired_ = 0;
  bool stopped_ = false;
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
  std::unordered_set<std::uint64_t> cancelled_;
  std::unordered_set<std::uint64_t> live_;
};

}  // namespace rrrt::sim
