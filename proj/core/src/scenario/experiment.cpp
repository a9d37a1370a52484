#include "rrrt/scenario/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>
#include <thread>

#include "rrrt/scenario/format.hpp"
#include "rrrt/scenario/trace_io.hpp"

namespace rrrt::scenario {

using sim::NodeId;
using sim::Packet;
using sim::PacketKind;

namespace {

sim::ChannelAccessModel channel_access(const RadioSpec& r) {
  return r.ca_model == "fixed" ? sim::ChannelAccessModel::fixed(r.ca_mean)
                               : sim::ChannelAccessModel::exponential(r.ca_mean, r.ca_cap);
}

constexpr std::uint64_t kPlacementStream = 0x706c6163ull;

}  // namespace

sim::Topology build_field_topology(const ScenarioConfig& cfg, std::uint64_t seed) {
  const auto& t = cfg.topology;
  const auto k = static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(t.n))));
  // Corners of the k x k grid sit on the event radius.
  const double spacing = k > 1 ? 2.0 * t.event_radius / ((k - 1) * std::numbers::sqrt2) : t.event_radius;
  const double half = (k - 1) / 2.0;

  sim::Topology topo;
  if (t.placement == "grid") {
    for (std::uint32_t i = 0; i < t.n; ++i) {
      const double gx = static_cast<double>(i % k) - half;
      const double gy = static_cast<double>(i / k) - half;
      topo.add_node(sim::NodeRole::Sensor, {gx * spacing, gy * spacing});
    }
  } else {
    sim::RngStream rng(seed, kPlacementStream);
    for (std::uint32_t i = 0; i < t.n; ++i) {
      const double r = t.event_radius * std::sqrt(rng.uniform());
      const double a = 2.0 * std::numbers::pi * rng.uniform();
      topo.add_node(sim::NodeRole::Sensor, {r * std::cos(a), r * std::sin(a)});
    }
  }
  // Centre of the grid cell nearest the epicenter; never on top of a sensor.
  const double off = t.placement == "grid" && k % 2 == 1 ? spacing / 2.0 : 0.0;
  const NodeId sink = topo.add_node(sim::NodeRole::SubSink, {off, off});

  topo.connect_within(t.radio_range, cfg.radio.link_bps, cfg.radio.loss);
  topo.compute_routes(t.alternate_routes);
  for (std::uint32_t i = 0; i < t.n; ++i) {
    if (!topo.hop_count(NodeId{i}, sink)) {
      throw ValidationError(std::vector<Violation>{{"topology.radio_range", "sensor " + std::to_string(i) + " cannot reach the sub-sink"}});
    }
  }
  return topo;
}

sim::Topology build_chain_topology(const ScenarioConfig& cfg) {
  const auto& tr = cfg.transport;
  const double loss = tr.loss > 0.0 ? tr.loss : cfg.radio.loss;
  sim::Topology topo;
  for (std::uint32_t i = 0; i <= tr.hops; ++i) {
    const bool end = i == 0 || i == tr.hops;
    topo.add_node(end ? sim::NodeRole::SubSink : sim::NodeRole::Relay, {i * tr.hop_distance, 0.0});
  }
  for (std::uint32_t link = 1; link <= tr.hops; ++link) {
    const double bps = link == tr.bottleneck_link ? tr.bottleneck_bps : cfg.radio.link_bps;
    topo.add_link(NodeId{link - 1}, NodeId{link}, bps, loss);
  }
  topo.compute_routes(false);
  return topo;
}

Testbed::Testbed(const ScenarioConfig& cfg, std::uint64_t seed, sim::Topology topo)
    : cfg_(checked(cfg)), seed_(seed), topo_(std::move(topo)), delays_(topo_, channel_access(cfg.radio)) {
  net_ = std::make_unique<sim::Network>(
      sim_, topo_, delays_, sim::NetworkConfig{cfg_.congestion.buffer_capacity, cfg_.congestion.epoch}, trace_, seed_);
}

sim::SimulationTrace Testbed::finish_run() {
  sim_.run_until(cfg_.sim.horizon);
  auto& m = trace_.meta;
  m.version = std::string(kArtifactVersion);
  m.scenario_hash = scenario_hash(cfg_);
  m.seed = seed_;
  m.e_tx = cfg_.energy.e_tx;
  m.e_rx = cfg_.energy.e_rx;
  m.interval_len = cfg_.reliability.interval_len;
  m.beta = cfg_.reliability.beta;
  m.delta_e2a = cfg_.budget.delta_e2a;
  m.ep_del = cfg_.budget.ep_del;
  m.a_del = cfg_.budget.a_del;
  m.horizon = cfg_.sim.horizon;
  m.in_flight = net_->in_flight();
  return std::move(trace_);
}

FieldExperiment::FieldExperiment(const ScenarioConfig& cfg, std::uint64_t seed)
    : Testbed(cfg, seed, build_field_topology(checked(cfg), seed)),
      controller_(reliability::ReliabilityTargets{cfg_.reliability.dr_d, cfg_.reliability.t_sa, cfg_.reliability.beta,
                                                  cfg_.reliability.interval_len},
                  reliability::FrequencyBounds{cfg_.reliability.f_min, cfg_.reliability.f_cap, std::nullopt},
                  reliability::UpdateOptions{cfg_.reliability.early_cong_ratio_cap, cfg_.reliability.low_cong_linear},
                  cfg_.reliability.f_init, cfg_.reliability.warmup) {
  subsink_ = NodeId{cfg_.topology.n};
  source_index_.assign(topo_.size(), SIZE_MAX);
  for (std::uint32_t i = 0; i < cfg_.topology.n; ++i) {
    sources_.push_back(NodeId{i});
    src_.push_back(Source{NodeId{i}, cfg_.reliability.f_init, 0.0, {}, 0});
    source_index_[i] = i;
  }
  net_->set_arrival_handler(subsink_, [this](const Packet& pkt) {
    if (pkt.kind != PacketKind::Data) return;
    const Time now = sim_.now();
    if (now >= cfg_.reliability.warmup) controller_.on_data(pkt.gen_time, pkt.cn, now);
    trace_.record(now, subsink_, sim::TraceKind::Deliver, pkt.id, sim::TraceReason::None, now - pkt.gen_time,
                  pkt.delays.b_del);
  });
}

void FieldExperiment::generate(std::size_t i) {
  auto& s = src_[i];
  s.next = {};
  const Time now = sim_.now();
  Packet p;
  p.kind = PacketKind::Data;
  p.origin = s.node;
  p.dest = subsink_;
  p.flow = s.node.value;
  p.seq = ++s.seq;
  p.gen_time = now;
  p.bits = cfg_.radio.data_bits;
  schedule_generate(i, now + 1.0 / s.frequency);
  net_->send(std::move(p));
}

void FieldExperiment::schedule_generate(std::size_t i, Time at) {
  auto& s = src_[i];
  s.next_at = at;
  s.next = sim_.schedule(at, s.node, sim::EventKind::Timer, [this, i] { generate(i); });
}

void FieldExperiment::apply_frequency(std::size_t i, double f) {
  auto& s = src_[i];
  const Time now = sim_.now();
  trace_.record(now, s.node, sim::TraceKind::FreqUpdate, 0, sim::TraceReason::None, f);
  if (f == s.frequency) return;
  // Keep the source's phase: the unexpired fraction of the old period is
  // carried over to the new one.
  const double left = s.next.valid() ? (s.next_at - now) * s.frequency : 0.0;
  s.frequency = f;
  if (!s.next.valid()) return;
  sim_.cancel(s.next);
  schedule_generate(i, now + left / f);
}

void FieldExperiment::close_interval() {
  const Time now = sim_.now();
  const sim::IntervalRow row = controller_.close_interval(now);
  trace_.intervals.push_back(row);

  Packet p;
  p.kind = PacketKind::FrequencyBroadcast;
  p.origin = subsink_;
  p.gen_time = now;
  p.bits = cfg_.radio.control_bits;
  p.payload = sim::FrequencyPayload{row.f_next};
  net_->broadcast(std::move(p), [this](NodeId node, const Packet& pkt) {
    const std::size_t i = node.index() < source_index_.size() ? source_index_[node.index()] : SIZE_MAX;
    if (i == SIZE_MAX) return;
    apply_frequency(i, std::get<sim::FrequencyPayload>(pkt.payload).frequency);
  });

  const Time next = now + cfg_.reliability.interval_len;
  if (next <= cfg_.sim.horizon) {
    sim_.schedule(next, subsink_, sim::EventKind::IntervalClose, [this] { close_interval(); });
  }
}

sim::SimulationTrace FieldExperiment::run() {
  for (std::size_t i = 0; i < src_.size(); ++i) {
    auto& s = src_[i];
    schedule_generate(i, net_->rng(s.node).uniform(0.0, 1.0 / s.frequency));
  }
  const Time first_close = cfg_.reliability.warmup + cfg_.reliability.interval_len;
  if (first_close <= cfg_.sim.horizon) {
    sim_.schedule(first_close, subsink_, sim::EventKind::IntervalClose,
                  [this] { close_interval(); });
  }
  return finish_run();
}

TransportExperiment::TransportExperiment(const ScenarioConfig& cfg, std::uint64_t seed)
    : Testbed(cfg, seed, build_chain_topology(checked(cfg))) {
  source_ = NodeId{0};
  destination_ = NodeId{cfg_.transport.hops};
  bottleneck_rate_ = sim::kInfinity;
  for (std::uint32_t link = 1; link <= cfg_.transport.hops; ++link) {
    bottleneck_rate_ = std::min(bottleneck_rate_, delays_.service_rate({NodeId{link - 1}, NodeId{link}},
                                                                       cfg_.radio.data_bits));
  }

  const auto& tr = cfg_.transport;
  transport::SenderConfig sc;
  sc.self = source_;
  sc.peer = destination_;
  sc.total_packets = tr.goal_packets;
  sc.deadline = tr.delta_e2a;
  sc.params = transport::TransportParams{tr.t_fdbk, tr.t_p, tr.decrease_factor, tr.hold_band,
                                         chain_rtt_estimate(cfg_)};
  sc.sack = tr.sack;
  sc.naive = tr.sender == "naive";
  sc.naive_rate = tr.naive_rate_factor * bottleneck_rate_;
  sc.data_bits = cfg_.radio.data_bits;
  sc.control_bits = cfg_.radio.control_bits;
  sender_ = std::make_unique<transport::Sender>(*net_, sc);

  transport::ReceiverConfig rc;
  rc.self = destination_;
  rc.peer = source_;
  rc.t_fdbk = tr.t_fdbk;
  rc.sack = tr.sack;
  rc.control_bits = cfg_.radio.control_bits;
  receiver_ = std::make_unique<transport::Receiver>(*net_, rc);

  net_->set_arrival_handler(source_, [this](const Packet& pkt) { sender_->on_packet(pkt); });
  net_->set_arrival_handler(destination_, [this](const Packet& pkt) { receiver_->on_packet(pkt); });
}

sim::SimulationTrace TransportExperiment::run() {
  sim_.schedule(0.0, source_, sim::EventKind::Timer, [this] { sender_->start_connection(); });
  return finish_run();
}

sim::SimulationTrace run_trace(const ScenarioConfig& cfg, std::uint64_t seed) {
  if (cfg.sim.kind == "transport") {
    TransportExperiment exp(cfg, seed);
    return exp.run();
  }
  FieldExperiment exp(cfg, seed);
  return exp.run();
}

metrics::MetricsReport run_experiment(const ScenarioConfig& cfg, std::uint64_t seed) {
  return metrics::compute_report(run_trace(cfg, seed));
}

MetricSummary summarize(const std::vector<double>& samples) {
  MetricSummary s;
  s.samples = static_cast<std::uint32_t>(samples.size());
  if (samples.empty()) return s;
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / samples.size();
  if (samples.size() > 1) {
    double sq = 0.0;
    for (double v : samples) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / (samples.size() - 1));
  }
  return s;
}

std::vector<SweepRow> sweep(const ScenarioConfig& cfg, const SweepSpec& spec) {
  if (spec.repetitions == 0) throw ValidationError(std::vector<Violation>{{"repetitions", "must be at least 1"}});
  std::vector<ScenarioConfig> cells;
  for (const auto& v : spec.values) cells.push_back(with_parameter(cfg, spec.parameter, v));

  struct Job {
    std::size_t cell;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::uint32_t r = 0; r < spec.repetitions; ++r) jobs.push_back({c, cfg.sim.seed + r});

  std::vector<metrics::MetricsReport> reports(jobs.size());
  const unsigned workers = std::max(1u, spec.threads != 0 ? spec.threads : std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < jobs.size(); start += workers) {
    std::vector<std::future<metrics::MetricsReport>> batch;
    const std::size_t end = std::min(jobs.size(), start + workers);
    for (std::size_t j = start; j < end; ++j) {
      batch.push_back(std::async(std::launch::async, [&cells, job = jobs[j]] {
        return run_experiment(cells[job.cell], job.seed);
      }));
    }
    for (std::size_t j = start; j < end; ++j) reports[j] = batch[j - start].get();
  }

  std::vector<SweepRow> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> conv, energy, thr, delay;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (jobs[j].cell != c) continue;
      const auto& r = reports[j];
      if (r.convergence_time) conv.push_back(*r.convergence_time);
      energy.push_back(r.total_energy);
      thr.push_back(static_cast<double>(r.aggregate_throughput));
      if (r.average_packet_delay) delay.push_back(*r.average_packet_delay);
    }
    rows.push_back(SweepRow{spec.values[c], spec.repetitions, summarize(conv), summarize(energy), summarize(thr),
                            summarize(delay)});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    const auto x = parse_double(a.value);
    const auto y = parse_double(b.value);
    if (x && y && !std::isnan(*x) && !std::isnan(*y)) return *x < *y;
    return a.value < b.value;
  });
  return rows;
}

std::string sweep_csv(const ScenarioConfig& cfg, const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  sim::TraceMeta meta;
  meta.version = std::string(kArtifactVersion);
  meta.scenario_hash = scenario_hash(cfg);
  meta.seed = cfg.sim.seed;
  out << preamble(meta) << '\n';
  out << "parameter,value,repetitions";
  for (const char* m : {"convergence_time", "total_energy", "aggregate_throughput", "average_packet_delay"})
    out << ',' << m << "_mean," << m << "_std," << m << "_n";
  out << '\n';
  for (const auto& r : rows) {
    out << spec.parameter << ',' << r.value << ',' << r.repetitions;
    for (const auto* m : {&r.convergence_time, &r.total_energy, &r.aggregate_throughput, &r.average_packet_delay}) {
      if (m->samples == 0)
        out << ",,,0";
      else
        out << ',' << format_double(m->mean) << ',' << format_double(m->stddev) << ',' << m->samples;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace rrrt::scenario
