#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>

namespace rrrt::sim {

/// Virtual time in seconds.
using Time = double;

inline constexpr Time kInfinity = std::numeric_limits<double>::infinity();

struct NodeId {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const NodeId&) const = default;
  constexpr std::size_t index() const { return value; }
};

/// Directed link reference (from -> to).
struct LinkRef {
  NodeId from;
  NodeId to;

  constexpr auto operator<=>(const LinkRef&) const = default;
};

using PacketId = std::uint64_t;

}  // namespace rrrt::sim

template <>
struct std::hash<rrrt::sim::NodeId> {
  std::size_t operator()(const rrrt::sim::NodeId& id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
