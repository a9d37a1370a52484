#pragma once

#include <optional>
#include <string_view>

namespace rrrt::transport {

enum class Phase { StartUp, Increase, Decrease, Hold, Probe };

std::string_view to_string(Phase p) noexcept;
std::optional<Phase> parse_phase(std::string_view s) noexcept;

}  // namespace rrrt::transport
