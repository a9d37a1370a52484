#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rrrt::scenario {

/// Shortest text that parses back to the same bits. NaN prints empty, infinities as "inf"/"-inf".
std::string format_double(double v);

/// Inverse of format_double. Empty text is NaN.
std::optional<double> parse_double(std::string_view text);

std::string hex64(std::uint64_t v);

}  // namespace rrrt::scenario
