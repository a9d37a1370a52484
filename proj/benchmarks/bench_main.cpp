#include <benchmark/benchmark.h>

#include <random>

#include "rrrt/reliability/controller.hpp"
#include "rrrt/scenario/config.hpp"
#include "rrrt/scenario/experiment.hpp"
#include "rrrt/scenario/trace_io.hpp"
#include "rrrt/sim/simulator.hpp"
#include "rrrt/transport/transport.hpp"

using namespace rrrt;

namespace {

const std::filesystem::path kDir = RRRT_SCENARIO_DIR;

void BM_EventQueue(benchmark::State& state) {
  const auto n = state.range(0);
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> at(0.0, 100.0);
  std::vector<double> times(n);
  for (auto& t : times) t = at(g);
  for (auto _ : state) {
    sim::Simulator s;
    std::uint64_t hits = 0;
    for (double t : times) s.schedule(t, sim::NodeId{0}, sim::EventKind::Generic, [&hits] { ++hits; });
    s.run_until(100.0);
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EventQueue)->Arg(1 << 10)->Arg(1 << 16);

void BM_UpdateFrequency(benchmark::State& state) {
  const reliability::ReliabilityTargets t{324, 1.0, 0.05, 1.0};
  const reliability::FrequencyBounds b{0.1, 50.0, {}};
  reliability::IntervalStats s;
  s.dr_o = 250;
  s.cn = true;
  s.x = 2;
  double f = 20.0;
  for (auto _ : state) {
    const auto u = reliability::update_frequency(f, reliability::NetworkCondition::LowRelCong, s, t, b);
    benchmark::DoNotOptimize(u);
  }
}
BENCHMARK(BM_UpdateFrequency);

void BM_BuildSack(benchmark::State& state) {
  std::set<transport::Seq> got;
  std::mt19937_64 g(3);
  for (transport::Seq s = 1; s <= 1000; ++s)
    if (g() % 10 != 0) got.insert(s);
  for (auto _ : state) benchmark::DoNotOptimize(transport::build_sack(got));
}
BENCHMARK(BM_BuildSack);

void BM_FieldRun(benchmark::State& state) {
  auto cfg = scenario::parse_scenario(kDir / "field_default.ini");
  cfg.sim.horizon = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(scenario::run_trace(cfg, 1).events.size());
}
BENCHMARK(BM_FieldRun)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_TransportRun(benchmark::State& state) {
  const auto cfg = scenario::parse_scenario(kDir / "transport_default.ini");
  for (auto _ : state) benchmark::DoNotOptimize(scenario::run_trace(cfg, 1).events.size());
}
BENCHMARK(BM_TransportRun)->Unit(benchmark::kMillisecond);

void BM_TraceRoundTrip(benchmark::State& state) {
  const auto trace = scenario::run_trace(scenario::parse_scenario(kDir / "transport_default.ini"), 1);
  for (auto _ : state) benchmark::DoNotOptimize(scenario::parse_trace(scenario::serialize_trace(trace)).events.size());
}
BENCHMARK(BM_TraceRoundTrip)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
