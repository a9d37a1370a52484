#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rrrt/error.hpp"
#include "rrrt/metrics/metrics.hpp"
#include "rrrt/scenario/config.hpp"
#include "rrrt/scenario/experiment.hpp"
#include "rrrt/scenario/format.hpp"
#include "rrrt/scenario/trace_io.hpp"

using namespace rrrt;
using namespace rrrt::scenario;

namespace {

const std::filesystem::path kDir = RRRT_SCENARIO_DIR;

std::vector<Violation> violations_of(std::string_view text) {
  try {
    parse_scenario_text(text);
  } catch (const ValidationError& e) {
    return e.violations();
  }
  return {};
}

bool names(const std::vector<Violation>& v, std::string_view field, std::string_view reason = {}) {
  for (const auto& x : v)
    if (x.field == field && (reason.empty() || x.reason == reason)) return true;
  return false;
}

ScenarioConfig short_field(double horizon = 8.0) {
  auto c = parse_scenario(kDir / "field_default.ini");
  c.sim.horizon = horizon;
  return c;
}

ScenarioConfig small_transport() {
  auto c = parse_scenario(kDir / "transport_default.ini");
  c.transport.goal_packets = 200;
  c.sim.horizon = 60;
  return c;
}

}  // namespace

TEST_CASE("the default field file carries the reference values") {
  const auto c = parse_scenario(kDir / "field_default.ini");
  CHECK(c.topology.n == 81);
  CHECK(c.reliability.t_sa == 1.0);
  CHECK(c.reliability.beta == 0.05);
  CHECK(c.topology.event_radius == 45.0);
  CHECK(c.reliability.interval_len == 1.0);
  CHECK(validate(c).empty());
}

TEST_CASE("unset timers are derived from the chain") {
  const auto c = parse_scenario(kDir / "transport_default.ini");
  const double rtt = chain_rtt_estimate(c);
  CHECK(rtt > 0.0);
  CHECK(c.transport.t_fdbk == doctest::Approx(2.0 * rtt));
  CHECK(c.transport.t_p == c.transport.t_fdbk);
  const auto interval = parse_scenario_text("[reliability]\nt_sa = 2\n");
  CHECK(interval.reliability.interval_len == 2.0);
  ScenarioConfig code;
  code.sim.kind = "transport";
  CHECK(checked(code).transport.t_fdbk == doctest::Approx(2.0 * chain_rtt_estimate(code)));
}

TEST_CASE("violations name the field and all of them are reported") {
  auto v = violations_of("[reliability]\nbeta = 0\n");
  CHECK(names(v, "reliability.beta", "must be in (0,1)"));
  v = violations_of("[scenario]\nkind = transport\n[transport]\nt_fdbk = 0.0001\n");
  CHECK(names(v, "transport.t_fdbk", "must exceed RTT"));
  v = violations_of("[reliability]\nbeta = 2\nf_min = 0\n[topology]\nn = 0\n");
  CHECK(v.size() >= 3);
  CHECK(names(v, "reliability.beta"));
  CHECK(names(v, "reliability.f_min"));
  CHECK(names(v, "topology.n"));
}

TEST_CASE("unknown keys and malformed values are rejected") {
  CHECK(names(violations_of("[reliability]\ngamma = 1\n"), "reliability.gamma"));
  CHECK(names(violations_of("[warp]\nspeed = 9\n"), "warp.speed"));
  CHECK_FALSE(violations_of("[reliability]\nbeta = half\n").empty());
  CHECK_FALSE(violations_of("[transport]\nsack = maybe\n").empty());
}

TEST_CASE("a missing file is an io error") {
  try {
    parse_scenario(kDir / "nope.ini");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Io);
  }
}

TEST_CASE("canonical text round-trips and drives the hash") {
  for (const char* f : {"field_default.ini", "transport_default.ini"}) {
    const auto c = parse_scenario(kDir / f);
    const auto text = serialize_scenario(c);
    CHECK(parse_scenario_text(text) == c);
    CHECK(serialize_scenario(parse_scenario_text(text)) == text);
    CHECK(scenario_hash(c) == scenario_hash(parse_scenario_text(text)));
  }
  const auto c = parse_scenario(kDir / "field_default.ini");
  CHECK(scenario_hash(c) != scenario_hash(with_parameter(c, "reliability.f_init", "3")));
}

TEST_CASE("parameters are set by path") {
  const auto c = parse_scenario(kDir / "field_default.ini");
  CHECK(with_parameter(c, "reliability.f_init", "8").reliability.f_init == 8.0);
  CHECK(with_parameter(c, "congestion.buffer_capacity", "16").congestion.buffer_capacity == 16);
  CHECK(with_parameter(c, "transport.sack", "false").transport.sack == false);
  try {
    with_parameter(c, "reliability.gamma", "1");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownParameter);
  }
  CHECK_THROWS_AS(with_parameter(c, "reliability.beta", "0"), ValidationError);
}

TEST_CASE("doubles print shortest and parse back") {
  for (double d : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5, 0.0}) CHECK(*parse_double(format_double(d)) == d);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(sim::kInfinity) == "inf");
  CHECK(format_double(sim::kNoValue).empty());
  CHECK(std::isnan(*parse_double("")));
  CHECK_FALSE(parse_double("1.5x").has_value());
  CHECK(*parse_double("-inf") == -sim::kInfinity);
  CHECK(hex64(0xabc) == "0000000000000abc");
}

TEST_CASE("the same seed gives a byte-identical trace") {
  const auto c = short_field();
  const auto a = serialize_trace(run_trace(c, 3));
  CHECK(a == serialize_trace(run_trace(c, 3)));
  CHECK(a != serialize_trace(run_trace(c, 4)));
  CHECK(run_experiment(c, 1) == run_experiment(c, 1));
  const auto t = small_transport();
  CHECK(serialize_trace(run_trace(t, 5)) == serialize_trace(run_trace(t, 5)));
}

TEST_CASE("traces round-trip through text") {
  for (const auto& c : {short_field(), small_transport()}) {
    const auto trace = run_trace(c, 2);
    const auto text = serialize_trace(trace);
    CHECK(text.rfind(preamble(trace.meta), 0) == 0);
    const auto back = parse_trace(text);
    CHECK(serialize_trace(back) == text);
    CHECK(metrics::compute_report(back) == metrics::compute_report(trace));
    CHECK(back.meta.seed == 2);
    CHECK(back.meta.scenario_hash == scenario_hash(c));
  }
}

TEST_CASE("truncated and garbled traces are corrupt, empty ones are empty") {
  const auto text = serialize_trace(run_trace(small_transport(), 1));
  const auto cut = text.substr(0, text.size() / 2);
  try {
    parse_trace(cut);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Corrupt);
  }
  auto garbled = text;
  const auto at = garbled.find("\n", garbled.find("[events]") + 10) + 1;
  garbled.insert(at, "x,y,z\n");
  try {
    parse_trace(garbled);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Corrupt);
    CHECK(std::string(e.what()).find("byte " + std::to_string(at)) != std::string::npos);
  }
  const auto empty = parse_trace("");
  CHECK(empty.events.empty());
  const auto rep = metrics::compute_report(empty);
  CHECK(rep.aggregate_throughput == 0);
  CHECK(rep.total_energy == 0.0);
  CHECK_FALSE(rep.average_packet_delay.has_value());
}

TEST_CASE("every field trace conserves packets and prices energy by count") {
  const auto c = short_field();
  const auto trace = run_trace(c, 1);
  auto cons = metrics::conservation(trace);
  cons.in_flight = trace.meta.in_flight;
  CHECK(cons.holds());
  CHECK(cons.generated > 0);
  std::uint64_t tx = 0, rx = 0;
  for (const auto& e : trace.events) {
    tx += e.kind == sim::TraceKind::Tx;
    rx += e.kind == sim::TraceKind::Rx;
  }
  const auto rep = metrics::compute_report(trace);
  CHECK(rep.total_energy == doctest::Approx(tx * c.energy.e_tx + rx * c.energy.e_rx).epsilon(1e-12));
}

TEST_CASE("a lossless transport run delivers the whole goal") {
  auto c = small_transport();
  c.transport.loss = 0.0;
  const auto rep = run_experiment(c, 1);
  CHECK(rep.aggregate_throughput == c.transport.goal_packets);
}

TEST_CASE("starting below the target in the linear regime converges") {
  auto c = short_field(33.0);
  c.reliability.warmup = 3;
  c.congestion.buffer_capacity = 128;
  FieldExperiment exp(c, 1);
  const auto trace = exp.run();
  REQUIRE_FALSE(trace.intervals.empty());
  CHECK(trace.intervals.front().condition == reliability::NetworkCondition::LowRelNoCong);
  CHECK(metrics::compute_report(trace).convergence_time.has_value());
}

TEST_CASE("broadcast frequencies reach every source") {
  auto c = short_field(5.0);
  FieldExperiment exp(c, 1);
  const auto trace = exp.run();
  REQUIRE(trace.intervals.size() >= 2);
  const double f = trace.intervals[trace.intervals.size() - 2].f_next;
  for (std::size_t i = 0; i < exp.sources().size(); ++i) CHECK(exp.source_frequency(i) > 0.0);
  std::size_t updates = 0;
  for (const auto& e : trace.events) updates += e.kind == sim::TraceKind::FreqUpdate && e.value == f;
  CHECK(updates >= exp.sources().size());
}

TEST_CASE("sweeps have one row per value") {
  auto c = short_field(4.0);
  const auto rows = sweep(c, {"reliability.f_init", {"8", "1", "4", "2"}, 3, 0});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].value == "1");
  CHECK(rows[3].value == "8");
  for (const auto& r : rows) {
    CHECK(r.repetitions == 3);
    CHECK(r.total_energy.samples == 3);
  }
  const auto csv = sweep_csv(c, {"reliability.f_init", {}, 3, 0}, rows);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# rrrt", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("parameter,value,repetitions,", 0) == 0);
  int data = 0;
  while (std::getline(in, line)) data += !line.empty();
  CHECK(data == 4);
}

TEST_CASE("a single repetition has zero spread and unknown paths are refused") {
  auto c = short_field(3.0);
  const auto rows = sweep(c, {"reliability.f_init", {"2"}, 1, 1});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].total_energy.stddev == 0.0);
  CHECK(rows[0].aggregate_throughput.stddev == 0.0);
  CHECK_THROWS_AS(sweep(c, {"reliability.gamma", {"1"}, 1, 1}), Error);
  const auto s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.stddev == doctest::Approx(1.2909944487));
}

TEST_CASE("sweep results do not depend on the thread count") {
  auto c = short_field(3.0);
  const auto one = sweep(c, {"reliability.f_init", {"2", "6"}, 2, 1});
  const auto many = sweep(c, {"reliability.f_init", {"2", "6"}, 2, 4});
  REQUIRE(one.size() == many.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].total_energy.mean == many[i].total_energy.mean);
    CHECK(one[i].aggregate_throughput.mean == many[i].aggregate_throughput.mean);
  }
}

TEST_CASE("an unreachable field is refused") {
  auto c = short_field();
  c.topology.radio_range = 3.0;
  try {
    run_trace(c, 1);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(names(e.violations(), "topology.radio_range"));
  }
}
