#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rrrt/sim/trace.hpp"

namespace rrrt::metrics {

/// Per-packet radio energy: every Tx record costs e_tx, every Rx record e_rx.
struct EnergyLedger {
  double e_tx = 50e-6;
  double e_rx = 25e-6;
  std::vector<std::uint64_t> tx_count;  // indexed by node
  std::vector<std::uint64_t> rx_count;

  double node_energy(std::size_t node) const;
  double total() const;
};

EnergyLedger build_energy_ledger(const sim::SimulationTrace& trace, double e_tx, double e_rx);

/// Sum over nodes of tx_count * e_tx + rx_count * e_rx.
double total_energy(const sim::SimulationTrace& trace, double e_tx, double e_rx);

/// End time of the first interval from which every later recorded interval is
/// AdequateRelNoCong under `beta`; nullopt when that never holds.
std::optional<double> convergence_time(std::span<const sim::IntervalRow> rows, double beta);

/// Unique application-layer deliveries.
std::uint64_t aggregate_throughput(const sim::SimulationTrace& trace);

/// Mean delivery latency. Throws Errc::NoDeliveries.
double average_packet_delay(const sim::SimulationTrace& trace);

struct Conservation {
  std::uint64_t generated = 0;
  std::uint64_t arrived = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;

  bool holds() const { return generated == arrived + dropped + in_flight; }
};

Conservation conservation(const sim::SimulationTrace& trace);

struct MetricsReport {
  std::optional<double> convergence_time;
  double total_energy = 0.0;
  std::uint64_t aggregate_throughput = 0;
  std::optional<double> average_packet_delay;
  std::vector<sim::IntervalRow> per_interval;
  std::uint64_t per_run_seed = 0;
  /// Deliveries whose delay fits the event-to-action budget, per budget mode.
  std::uint64_t budget_literal_met = 0;
  std::uint64_t budget_full_sum_met = 0;

  bool operator==(const MetricsReport& o) const;
};

/// Everything in the report is a pure function of the trace and its metadata.
MetricsReport compute_report(const sim::SimulationTrace& trace);

}  // namespace rrrt::metrics
