#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "rrrt/metrics/metrics.hpp"
#include "rrrt/sim/trace.hpp"

namespace rrrt::scenario {

/// "# rrrt <version> scenario=<hash> seed=<n>"
std::string preamble(const sim::TraceMeta& meta);

/// Sectioned CSV: preamble, [events], [intervals], [connections], [end].
void write_trace(std::ostream& out, const sim::SimulationTrace& trace);
std::string serialize_trace(const sim::SimulationTrace& trace);

/// Throws Errc::Corrupt with the byte offset of the first bad line, or of the
/// end of input when the [end] marker is missing. Empty input is an empty trace.
sim::SimulationTrace parse_trace(std::string_view text);
/// Throws Errc::Io, Errc::Corrupt.
sim::SimulationTrace read_trace(const std::filesystem::path& path);

void write_interval_csv(std::ostream& out, const sim::SimulationTrace& trace);
void write_connection_csv(std::ostream& out, const sim::SimulationTrace& trace);
void write_summary_csv(std::ostream& out, const sim::TraceMeta& meta, const metrics::MetricsReport& report);
void write_summary_json(std::ostream& out, const sim::TraceMeta& meta, const metrics::MetricsReport& report);

}  // namespace rrrt::scenario
