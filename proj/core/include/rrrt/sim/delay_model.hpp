#pragma once

#include "rrrt/sim/rng.hpp"
#include "rrrt/sim/topology.hpp"

namespace rrrt::sim {

/// Per-hop delay components of the event transport delay.
struct DelayBreakdown {
  double b_del = 0.0;   // buffering
  double ca_del = 0.0;  // channel access
  double t_del = 0.0;   // transmission
  double p_del = 0.0;   // propagation

  double total() const { return b_del + ca_del + t_del + p_del; }

  DelayBreakdown& operator+=(const DelayBreakdown& o) {
    b_del += o.b_del;
    ca_del += o.ca_del;
    t_del += o.t_del;
    p_del += o.p_del;
    return *this;
  }
  bool operator==(const DelayBreakdown&) const = default;
};

/// Channel-access delay distribution: a constant, or an exponential truncated
/// at `cap`.
struct ChannelAccessModel {
  enum class Kind { Fixed, Exponential };

  Kind kind = Kind::Exponential;
  double mean = 0.002;
  double cap = 0.050;

  static ChannelAccessModel fixed(double c) { return {Kind::Fixed, c, c}; }
  static ChannelAccessModel exponential(double mean, double cap) { return {Kind::Exponential, mean, cap}; }

  double sample(RngStream& rng) const;
  /// Expected value of sample(), accounting for truncation.
  double expected() const;
};

class DelayModel {
 public:
  DelayModel(const Topology& topo, ChannelAccessModel ca) : topo_(&topo), ca_(ca) {}

  const ChannelAccessModel& channel_access() const { return ca_; }

  /// Expected per-packet service time on `link`: E[ca_del] + t_del.
  double service_time(LinkRef link, double packet_bits) const;
  double service_rate(LinkRef link, double packet_bits) const { return 1.0 / service_time(link, packet_bits); }

  /// b_del = queue_depth / service_rate, t_del = bits / bit_rate,
  /// p_del = distance / signal speed, ca_del drawn from the configured model.
  /// Throws Errc::UnknownLink (self-links included).
  DelayBreakdown sample_channel_delays(LinkRef link, double packet_bits, std::size_t queue_depth,
                                       RngStream& rng) const;

 private:
  const Topology* topo_;
  ChannelAccessModel ca_;
};

}  // namespace rrrt::sim
