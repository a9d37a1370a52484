#include "rrrt/scenario/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "rrrt/error.hpp"
#include "rrrt/scenario/format.hpp"

namespace rrrt::scenario {

namespace {

constexpr std::string_view kEventsHeader = "time,node,kind,packet_id,reason,value,aux";
constexpr std::string_view kIntervalsHeader = "interval,end_time,dr_o,dr_d,alpha,t_i,cn,condition,f_i,f_next,x";
constexpr std::string_view kConnectionsHeader = "time,phase,r_c,r_f,r_min,missed_feedback,retransmit_count";

std::string fd(double v) { return format_double(v); }

void write_meta(std::ostream& out, const sim::TraceMeta& m) {
  out << preamble(m) << '\n';
  out << "# e_tx=" << fd(m.e_tx) << " e_rx=" << fd(m.e_rx) << " interval_len=" << fd(m.interval_len)
      << " beta=" << fd(m.beta) << " delta_e2a=" << fd(m.delta_e2a) << " ep_del=" << fd(m.ep_del)
      << " a_del=" << fd(m.a_del) << " horizon=" << fd(m.horizon) << " in_flight=" << m.in_flight << '\n';
}

void write_interval_row(std::ostream& out, const sim::IntervalRow& r) {
  out << r.interval << ',' << fd(r.end_time) << ',' << r.dr_o << ',' << r.dr_d << ',' << fd(r.alpha) << ','
      << fd(r.t_i) << ',' << (r.cn ? 1 : 0) << ',' << reliability::to_string(r.condition) << ',' << fd(r.f_i) << ','
      << fd(r.f_next) << ',' << r.x << '\n';
}

void write_connection_row(std::ostream& out, const sim::ConnectionRow& r) {
  out << fd(r.time) << ',' << transport::to_string(r.phase) << ',' << fd(r.r_c) << ',' << fd(r.r_f) << ','
      << fd(r.r_min) << ',' << r.missed_feedback << ',' << r.retransmit_count << '\n';
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

bool parse_real(std::string_view s, double& out) {
  auto v = parse_double(s);
  if (!v) return false;
  out = *v;
  return true;
}

[[noreturn]] void corrupt(std::size_t offset, const std::string& what) {
  throw Error(Errc::Corrupt, "corrupt trace at byte " + std::to_string(offset) + ": " + what);
}

bool parse_meta_line(std::string_view line, sim::TraceMeta& m) {
  // "# rrrt <version...> scenario=<hex> seed=<n>" or "# key=value ..."
  line.remove_prefix(2);
  if (line.starts_with("rrrt ")) {
    auto sc = line.find(" scenario=");
    if (sc == std::string_view::npos) return false;
    m.version = std::string(line.substr(0, sc));
    auto rest = split(line.substr(sc + 1), ' ');
    if (rest.size() != 2 || !rest[0].starts_with("scenario=") || !rest[1].starts_with("seed=")) return false;
    auto hex = rest[0].substr(9);
    auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), m.scenario_hash, 16);
    if (ec != std::errc{} || p != hex.data() + hex.size()) return false;
    return parse_int(rest[1].substr(5), m.seed);
  }
  for (auto kv : split(line, ' ')) {
    auto eq = kv.find('=');
    if (eq == std::string_view::npos) return false;
    auto key = kv.substr(0, eq);
    auto val = kv.substr(eq + 1);
    bool ok = true;
    if (key == "e_tx") ok = parse_real(val, m.e_tx);
    else if (key == "e_rx") ok = parse_real(val, m.e_rx);
    else if (key == "interval_len") ok = parse_real(val, m.interval_len);
    else if (key == "beta") ok = parse_real(val, m.beta);
    else if (key == "delta_e2a") ok = parse_real(val, m.delta_e2a);
    else if (key == "ep_del") ok = parse_real(val, m.ep_del);
    else if (key == "a_del") ok = parse_real(val, m.a_del);
    else if (key == "horizon") ok = parse_real(val, m.horizon);
    else if (key == "in_flight") ok = parse_int(val, m.in_flight);
    else ok = false;
    if (!ok) return false;
  }
  return true;
}

bool parse_event(std::string_view line, sim::TraceRecord& r) {
  auto f = split(line, ',');
  if (f.size() != 7) return false;
  auto kind = sim::parse_trace_kind(f[2]);
  auto reason = sim::parse_trace_reason(f[4]);
  if (!kind || !reason) return false;
  r.kind = *kind;
  r.reason = *reason;
  return parse_real(f[0], r.time) && parse_int(f[1], r.node.value) && parse_int(f[3], r.packet) &&
         parse_real(f[5], r.value) && parse_real(f[6], r.aux);
}

bool parse_interval(std::string_view line, sim::IntervalRow& r) {
  auto f = split(line, ',');
  if (f.size() != 11) return false;
  auto cond = reliability::parse_condition(f[7]);
  if (!cond) return false;
  r.condition = *cond;
  if (f[6] != "0" && f[6] != "1") return false;
  r.cn = f[6] == "1";
  return parse_int(f[0], r.interval) && parse_real(f[1], r.end_time) && parse_int(f[2], r.dr_o) &&
         parse_int(f[3], r.dr_d) && parse_real(f[4], r.alpha) && parse_real(f[5], r.t_i) &&
         parse_real(f[8], r.f_i) && parse_real(f[9], r.f_next) && parse_int(f[10], r.x);
}

bool parse_connection(std::string_view line, sim::ConnectionRow& r) {
  auto f = split(line, ',');
  if (f.size() != 7) return false;
  auto phase = transport::parse_phase(f[1]);
  if (!phase) return false;
  r.phase = *phase;
  return parse_real(f[0], r.time) && parse_real(f[2], r.r_c) && parse_real(f[3], r.r_f) &&
         parse_real(f[4], r.r_min) && parse_int(f[5], r.missed_feedback) && parse_int(f[6], r.retransmit_count);
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string preamble(const sim::TraceMeta& meta) {
  return "# " + meta.version + " scenario=" + hex64(meta.scenario_hash) + " seed=" + std::to_string(meta.seed);
}

void write_trace(std::ostream& out, const sim::SimulationTrace& trace) {
  write_meta(out, trace.meta);
  out << "[events]\n" << kEventsHeader << '\n';
  for (const auto& e : trace.events) {
    out << fd(e.time) << ',' << e.node.value << ',' << sim::to_string(e.kind) << ',' << e.packet << ','
        << sim::to_string(e.reason) << ',' << fd(e.value) << ',' << fd(e.aux) << '\n';
  }
  out << "[intervals]\n" << kIntervalsHeader << '\n';
  for (const auto& r : trace.intervals) write_interval_row(out, r);
  out << "[connections]\n" << kConnectionsHeader << '\n';
  for (const auto& r : trace.connections) write_connection_row(out, r);
  out << "[end]\n";
}

std::string serialize_trace(const sim::SimulationTrace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

sim::SimulationTrace parse_trace(std::string_view text) {
  sim::SimulationTrace trace;
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return trace;

  enum class Section { Preamble, Events, Intervals, Connections, End } section = Section::Preamble;
  bool expect_header = false;
  std::size_t offset = 0;
  while (offset < text.size()) {
    auto nl = text.find('\n', offset);
    if (nl == std::string_view::npos) corrupt(offset, "unterminated line");
    std::string_view line = text.substr(offset, nl - offset);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (section == Section::End) corrupt(offset, "data after end marker");
    if (line == "[events]" && section == Section::Preamble) {
      section = Section::Events;
      expect_header = true;
    } else if (line == "[intervals]" && section == Section::Events) {
      section = Section::Intervals;
      expect_header = true;
    } else if (line == "[connections]" && section == Section::Intervals) {
      section = Section::Connections;
      expect_header = true;
    } else if (line == "[end]" && section == Section::Connections) {
      section = Section::End;
    } else if (expect_header) {
      std::string_view want = section == Section::Events      ? kEventsHeader
                              : section == Section::Intervals ? kIntervalsHeader
                                                              : kConnectionsHeader;
      if (line != want) corrupt(offset, "unexpected header");
      expect_header = false;
    } else {
      bool ok = false;
      switch (section) {
        case Section::Preamble:
          ok = line.starts_with("# ") && parse_meta_line(line, trace.meta);
          break;
        case Section::Events: {
          sim::TraceRecord r;
          ok = parse_event(line, r);
          if (ok) trace.events.push_back(r);
          break;
        }
        case Section::Intervals: {
          sim::IntervalRow r;
          ok = parse_interval(line, r);
          if (ok) trace.intervals.push_back(r);
          break;
        }
        case Section::Connections: {
          sim::ConnectionRow r;
          ok = parse_connection(line, r);
          if (ok) trace.connections.push_back(r);
          break;
        }
        case Section::End:
          break;
      }
      if (!ok) corrupt(offset, "malformed line");
    }
    offset = nl + 1;
  }
  if (section != Section::End) corrupt(text.size(), "missing end marker");
  return trace;
}

sim::SimulationTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open trace file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

void write_interval_csv(std::ostream& out, const sim::SimulationTrace& trace) {
  out << preamble(trace.meta) << '\n' << kIntervalsHeader << '\n';
  for (const auto& r : trace.intervals) write_interval_row(out, r);
}

void write_connection_csv(std::ostream& out, const sim::SimulationTrace& trace) {
  out << preamble(trace.meta) << '\n' << kConnectionsHeader << '\n';
  for (const auto& r : trace.connections) write_connection_row(out, r);
}

void write_summary_csv(std::ostream& out, const sim::TraceMeta& meta, const metrics::MetricsReport& report) {
  out << preamble(meta) << '\n';
  out << "convergence_time,total_energy,aggregate_throughput,average_packet_delay,intervals,per_run_seed,"
         "budget_literal_met,budget_full_sum_met\n";
  out << (report.convergence_time ? fd(*report.convergence_time) : "") << ',' << fd(report.total_energy) << ','
      << report.aggregate_throughput << ','
      << (report.average_packet_delay ? fd(*report.average_packet_delay) : "") << ','
      << report.per_interval.size() << ',' << report.per_run_seed << ',' << report.budget_literal_met << ','
      << report.budget_full_sum_met << '\n';
}

void write_summary_json(std::ostream& out, const sim::TraceMeta& meta, const metrics::MetricsReport& report) {
  nlohmann::json j;
  j["version"] = meta.version;
  j["scenario"] = hex64(meta.scenario_hash);
  j["seed"] = meta.seed;
  j["convergence_time"] = optional_json(report.convergence_time);
  j["total_energy"] = report.total_energy;
  j["aggregate_throughput"] = report.aggregate_throughput;
  j["average_packet_delay"] = optional_json(report.average_packet_delay);
  j["per_run_seed"] = report.per_run_seed;
  j["budget_literal_met"] = report.budget_literal_met;
  j["budget_full_sum_met"] = report.budget_full_sum_met;
  auto& rows = j["per_interval"] = nlohmann::json::array();
  for (const auto& r : report.per_interval) {
    rows.push_back({{"interval", r.interval},
                    {"end_time", r.end_time},
                    {"dr_o", r.dr_o},
                    {"dr_d", r.dr_d},
                    {"alpha", r.alpha},
                    {"t_i", std::isfinite(r.t_i) ? nlohmann::json(r.t_i) : nlohmann::json(nullptr)},
                    {"cn", r.cn},
                    {"condition", reliability::to_string(r.condition)},
                    {"f_i", r.f_i},
                    {"f_next", r.f_next},
                    {"x", r.x}});
  }
  out << j.dump(2) << '\n';
}

}  // namespace rrrt::scenario
