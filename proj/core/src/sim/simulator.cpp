#include "rrrt/sim/simulator.hpp"

#include <string>

#include "rrrt/error.hpp"

namespace rrrt::sim {

EventHandle Simulator::schedule(Time time, NodeId target, EventKind kind, std::function<void()> action) {
  if (time < now_) {
    throw Error(Errc::PastTime, "event at t=" + std::to_string(time) + " precedes clock " + std::to_string(now_));
  }
  const std::uint64_t ordinal = next_ordinal_++;
  queue_.push(SimEvent{time, ordinal, target, kind, std::move(action)});
  live_.insert(ordinal);
  return EventHandle{ordinal};
}

void Simulator::cancel(EventHandle handle) {
  if (handle.valid() && live_.count(handle.ordinal) != 0) cancelled_.insert(handle.ordinal);
}

std::uint64_t Simulator::run_until(Time t_end) {
  std::uint64_t fired_here = 0;
  stopped_ = false;
  while (!queue_.empty() && !stopped_) {
    if (queue_.top().time > t_end) break;
    SimEvent ev = std::move(const_cast<SimEvent&>(queue_.top()));
    queue_.pop();
    live_.erase(ev.ordinal);
    if (auto it = cancelled_.find(ev.ordinal); it != cancelled_.end()) {
      cancelled_.erase(it);
      continue;
    }
    now_ = ev.time;
    ++fired_;
    ++fired_here;
    if (ev.action) ev.action();
  }
  if (!stopped_ && now_ < t_end) now_ = t_end;
  return fired_here;
}

}  // namespace rrrt::sim
