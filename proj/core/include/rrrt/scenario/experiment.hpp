#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rrrt/metrics/metrics.hpp"
#include "rrrt/reliability/controller.hpp"
#include "rrrt/scenario/config.hpp"
#include "rrrt/sim/network.hpp"
#include "rrrt/transport/endpoint.hpp"

namespace rrrt::scenario {

using sim::Time;

/// Kernel, topology and network shared by both experiment kinds.
class Testbed {
 public:
  Testbed(const ScenarioConfig& cfg, std::uint64_t seed, sim::Topology topo);

  Testbed(const Testbed&) = delete;
  Testbed& operator=(const Testbed&) = delete;

  sim::Simulator& simulator() { return sim_; }
  const sim::Topology& topology() const { return topo_; }
  sim::Network& network() { return *net_; }
  sim::SimulationTrace& trace() { return trace_; }
  const ScenarioConfig& config() const { return cfg_; }

 protected:
  /// Runs to the horizon and stamps the trace metadata.
  sim::SimulationTrace finish_run();

  ScenarioConfig cfg_;
  std::uint64_t seed_;
  sim::Simulator sim_;
  sim::Topology topo_;
  sim::DelayModel delays_;
  sim::SimulationTrace trace_;
  std::unique_ptr<sim::Network> net_;
};

/// n periodic sources reporting an event to one sub-sink that runs the
/// reliability controller and broadcasts the next reporting frequency.
class FieldExperiment : public Testbed {
 public:
  FieldExperiment(const ScenarioConfig& cfg, std::uint64_t seed);

  sim::NodeId subsink() const { return subsink_; }
  const std::vector<sim::NodeId>& sources() const { return sources_; }
  const reliability::ReliabilityController& controller() const { return controller_; }
  /// Frequency each source currently applies, indexed like sources().
  double source_frequency(std::size_t i) const { return src_.at(i).frequency; }

  void inject_fault(const sim::Fault& fault) { net_->inject_fault(fault); }

  sim::SimulationTrace run();

 private:
  struct Source {
    sim::NodeId node;
    double frequency = 0.0;
    Time next_at = 0.0;
    sim::EventHandle next;
    std::uint64_t seq = 0;
  };

  void generate(std::size_t i);
  void schedule_generate(std::size_t i, Time at);
  void apply_frequency(std::size_t i, double f);
  void close_interval();

  sim::NodeId subsink_{};
  std::vector<sim::NodeId> sources_;
  std::vector<Source> src_;
  std::vector<std::size_t> source_index_;  // by node index
  reliability::ReliabilityController controller_;
};

/// One reliable stream between two sub-sinks along a chain of relays.
class TransportExperiment : public Testbed {
 public:
  TransportExperiment(const ScenarioConfig& cfg, std::uint64_t seed);

  sim::NodeId source() const { return source_; }
  sim::NodeId destination() const { return destination_; }
  transport::Sender& sender() { return *sender_; }
  transport::Receiver& receiver() { return *receiver_; }
  /// Service rate of the slowest hop, data packets per second.
  double bottleneck_rate() const { return bottleneck_rate_; }

  sim::SimulationTrace run();

 private:
  sim::NodeId source_{};
  sim::NodeId destination_{};
  double bottleneck_rate_ = 0.0;
  std::unique_ptr<transport::Sender> sender_;
  std::unique_ptr<transport::Receiver> receiver_;
};

/// Sensor grid (or seeded uniform disk) around the epicenter plus the sub-sink as the last node.
sim::Topology build_field_topology(const ScenarioConfig& cfg, std::uint64_t seed);
/// hops + 1 nodes spaced hop_distance apart; node 0 sends, the last node receives.
sim::Topology build_chain_topology(const ScenarioConfig& cfg);

sim::SimulationTrace run_trace(const ScenarioConfig& cfg, std::uint64_t seed);
metrics::MetricsReport run_experiment(const ScenarioConfig& cfg, std::uint64_t seed);

struct SweepSpec {
  std::string parameter;
  std::vector<std::string> values;
  std::uint32_t repetitions = 10;
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;
};

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;
  std::uint32_t samples = 0;
};

struct SweepRow {
  std::string value;
  std::uint32_t repetitions = 0;
  MetricSummary convergence_time;
  MetricSummary total_energy;
  MetricSummary aggregate_throughput;
  MetricSummary average_packet_delay;
};

/// Mean and sample standard deviation; one sample gives stddev 0.
MetricSummary summarize(const std::vector<double>& samples);

/// One row per value, sorted by value; cell seeds are cfg.sim.seed + repetition.
/// Throws Errc::UnknownParameter.
std::vector<SweepRow> sweep(const ScenarioConfig& cfg, const SweepSpec& spec);
std::string sweep_csv(const ScenarioConfig& cfg, const SweepSpec& spec, const std::vector<SweepRow>& rows);

}  // namespace rrrt::scenario
