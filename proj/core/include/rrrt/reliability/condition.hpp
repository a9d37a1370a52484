#pragma once

#include <optional>
#include <string_view>

namespace rrrt::reliability {

/// Five-way network state classification driving the frequency update law.
enum class NetworkCondition {
  EarlyRelNoCong,
  EarlyRelCong,
  LowRelNoCong,
  LowRelCong,
  AdequateRelNoCong,
};

std::string_view to_string(NetworkCondition c) noexcept;
std::optional<NetworkCondition> parse_condition(std::string_view s) noexcept;

}  // namespace rrrt::reliability
