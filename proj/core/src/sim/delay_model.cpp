#include "rrrt/sim/delay_model.hpp"

#include <algorithm>
#include <cmath>

#include "rrrt/error.hpp"

namespace rrrt::sim {

double ChannelAccessModel::sample(RngStream& rng) const {
  if (kind == Kind::Fixed) return mean;
  return std::min(rng.exponential(mean), cap);
}

double ChannelAccessModel::expected() const {
  if (kind == Kind::Fixed) return mean;
  // E[min(X, cap)] for X ~ Exp(mean)
  return mean * -std::expm1(-cap / mean);
}

double DelayModel::service_time(LinkRef link, double packet_bits) const {
  const LinkParams& lp = topo_->link(link);
  return ca_.expected() + packet_bits / lp.bit_rate;
}

DelayBreakdown DelayModel::sample_channel_delays(LinkRef link, double packet_bits, std::size_t queue_depth,
                                                 RngStream& rng) const {
  if (link.from == link.to) throw Error(Errc::UnknownLink, "self-link");
  if (!(packet_bits > 0.0)) throw Error(Errc::Validation, "packet length must be positive");
  const LinkParams& lp = topo_->link(link);
  DelayBreakdown d;
  d.b_del = static_cast<double>(queue_depth) * service_time(link, packet_bits);
  d.ca_del = ca_.sample(rng);
  d.t_del = packet_bits / lp.bit_rate;
  d.p_del = lp.distance_m / Topology::kSignalSpeed;
  return d;
}

}  // namespace rrrt::sim
