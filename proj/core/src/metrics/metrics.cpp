#include "rrrt/metrics/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "rrrt/error.hpp"
#include "rrrt/reliability/controller.hpp"

namespace rrrt::metrics {

using sim::TraceKind;

double EnergyLedger::node_energy(std::size_t node) const {
  const double tx = node < tx_count.size() ? static_cast<double>(tx_count[node]) : 0.0;
  const double rx = node < rx_count.size() ? static_cast<double>(rx_count[node]) : 0.0;
  return tx * e_tx + rx * e_rx;
}

double EnergyLedger::total() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < std::max(tx_count.size(), rx_count.size()); ++i) sum += node_energy(i);
  return sum;
}

EnergyLedger build_energy_ledger(const sim::SimulationTrace& trace, double e_tx, double e_rx) {
  EnergyLedger ledger{e_tx, e_rx, {}, {}};
  for (const sim::TraceRecord& r : trace.events) {
    if (r.kind != TraceKind::Tx && r.kind != TraceKind::Rx) continue;
    auto& counts = r.kind == TraceKind::Tx ? ledger.tx_count : ledger.rx_count;
    if (counts.size() <= r.node.index()) counts.resize(r.node.index() + 1, 0);
    ++counts[r.node.index()];
  }
  return ledger;
}

double total_energy(const sim::SimulationTrace& trace, double e_tx, double e_rx) {
  return build_energy_ledger(trace, e_tx, e_rx).total();
}

std::optional<double> convergence_time(std::span<const sim::IntervalRow> rows, double beta) {
  std::optional<double> since;
  for (const sim::IntervalRow& row : rows) {
    const auto cond = reliability::classify_condition(row.alpha, row.cn, beta);
    if (cond == reliability::NetworkCondition::AdequateRelNoCong) {
      if (!since) since = row.end_time;
    } else {
      since.reset();
    }
  }
  return since;
}

std::uint64_t aggregate_throughput(const sim::SimulationTrace& trace) { return trace.count(TraceKind::Deliver); }

double average_packet_delay(const sim::SimulationTrace& trace) {
  double sum = 0.0;
  std::uint64_t n = 0;
  for (const sim::TraceRecord& r : trace.events) {
    if (r.kind != TraceKind::Deliver) continue;
    sum += r.value;
    ++n;
  }
  if (n == 0) throw Error(Errc::NoDeliveries, "no deliveries in trace");
  return sum / static_cast<double>(n);
}

Conservation conservation(const sim::SimulationTrace& trace) {
  Conservation c;
  for (const sim::TraceRecord& r : trace.events) {
    switch (r.kind) {
      case TraceKind::Gen: ++c.generated; break;
      case TraceKind::Arrive: ++c.arrived; break;
      case TraceKind::Drop: ++c.dropped; break;
      default: break;
    }
  }
  c.in_flight = trace.meta.in_flight;
  return c;
}

namespace {

bool same(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

bool same(const std::optional<double>& a, const std::optional<double>& b) {
  return a.has_value() == b.has_value() && (!a || same(*a, *b));
}

bool same(const sim::IntervalRow& a, const sim::IntervalRow& b) {
  return a.interval == b.interval && same(a.end_time, b.end_time) && a.dr_o == b.dr_o && a.dr_d == b.dr_d &&
         same(a.alpha, b.alpha) && same(a.t_i, b.t_i) && a.cn == b.cn && a.condition == b.condition &&
         same(a.f_i, b.f_i) && same(a.f_next, b.f_next) && a.x == b.x;
}

}  // namespace

bool MetricsReport::operator==(const MetricsReport& o) const {
  if (per_interval.size() != o.per_interval.size()) return false;
  for (std::size_t i = 0; i < per_interval.size(); ++i) {
    if (!same(per_interval[i], o.per_interval[i])) return false;
  }
  return same(convergence_time, o.convergence_time) && same(total_energy, o.total_energy) &&
         aggregate_throughput == o.aggregate_throughput && same(average_packet_delay, o.average_packet_delay) &&
         per_run_seed == o.per_run_seed && budget_literal_met == o.budget_literal_met &&
         budget_full_sum_met == o.budget_full_sum_met;
}

MetricsReport compute_report(const sim::SimulationTrace& trace) {
  MetricsReport rep;
  rep.per_run_seed = trace.meta.seed;
  rep.per_interval = trace.intervals;
  rep.convergence_time = convergence_time(trace.intervals, trace.meta.beta);
  rep.total_energy = total_energy(trace, trace.meta.e_tx, trace.meta.e_rx);
  rep.aggregate_throughput = aggregate_throughput(trace);
  if (rep.aggregate_throughput > 0) rep.average_packet_delay = average_packet_delay(trace);

  const reliability::DelayBudget budget{trace.meta.delta_e2a, trace.meta.ep_del, trace.meta.a_del};
  for (const sim::TraceRecord& r : trace.events) {
    if (r.kind != TraceKind::Deliver) continue;
    // value holds the full transport delay, aux the buffering share of it.
    sim::DelayBreakdown literal;
    literal.b_del = r.aux;
    sim::DelayBreakdown full;
    full.b_del = r.value;
    if (reliability::check_delay_budget(budget, literal, reliability::BudgetMode::Literal)) ++rep.budget_literal_met;
    if (reliability::check_delay_budget(budget, full, reliability::BudgetMode::FullSum)) ++rep.budget_full_sum_met;
  }
  return rep;
}

}  // namespace rrrt::metrics
