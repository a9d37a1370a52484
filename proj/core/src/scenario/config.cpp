#include "rrrt/scenario/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "rrrt/scenario/format.hpp"

namespace rrrt::scenario {

namespace pt = boost::property_tree;

namespace {

std::string join_violations(const std::vector<Violation>& v) {
  std::string out;
  for (const auto& e : v) {
    if (!out.empty()) out += "; ";
    out += e.field + ": " + e.reason;
  }
  return out;
}

template <typename T>
bool parse_value(const std::string& text, T& out) {
  if constexpr (std::is_same_v<T, std::string>) {
    out = text;
    return true;
  } else if constexpr (std::is_same_v<T, bool>) {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "1" || t == "yes" || t == "on") {
      out = true;
      return true;
    }
    if (t == "false" || t == "0" || t == "no" || t == "off") {
      out = false;
      return true;
    }
    return false;
  } else {
    T v{};
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) return false;
    out = v;
    return true;
  }
}

template <typename T>
std::string format_value(const T& v) {
  if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_floating_point_v<T>) {
    return format_double(v);
  } else {
    return std::to_string(v);
  }
}

struct Field {
  std::string section;
  std::string key;
  std::function<bool(ScenarioConfig&, const std::string&)> read;
  std::function<std::string(const ScenarioConfig&)> write;

  std::string path() const { return section + "." + key; }
};

template <typename S, typename T>
Field field(std::string section, std::string key, S ScenarioConfig::*group, T S::*member) {
  return Field{std::move(section), std::move(key),
               [group, member](ScenarioConfig& c, const std::string& text) {
                 return parse_value(text, c.*group.*member);
               },
               [group, member](const ScenarioConfig& c) { return format_value(c.*group.*member); }};
}

const std::vector<Field>& fields() {
  using C = ScenarioConfig;
  static const std::vector<Field> table = {
      field("scenario", "kind", &C::sim, &SimSpec::kind),
      field("scenario", "horizon", &C::sim, &SimSpec::horizon),
      field("scenario", "seed", &C::sim, &SimSpec::seed),
      field("scenario", "repetitions", &C::sim, &SimSpec::repetitions),

      field("topology", "n", &C::topology, &TopologySpec::n),
      field("topology", "event_radius", &C::topology, &TopologySpec::event_radius),
      field("topology", "radio_range", &C::topology, &TopologySpec::radio_range),
      field("topology", "placement", &C::topology, &TopologySpec::placement),
      field("topology", "alternate_routes", &C::topology, &TopologySpec::alternate_routes),

      field("radio", "link_bps", &C::radio, &RadioSpec::link_bps),
      field("radio", "data_bits", &C::radio, &RadioSpec::data_bits),
      field("radio", "control_bits", &C::radio, &RadioSpec::control_bits),
      field("radio", "ca_model", &C::radio, &RadioSpec::ca_model),
      field("radio", "ca_mean", &C::radio, &RadioSpec::ca_mean),
      field("radio", "ca_cap", &C::radio, &RadioSpec::ca_cap),
      field("radio", "loss", &C::radio, &RadioSpec::loss),

      field("reliability", "dr_d", &C::reliability, &ReliabilitySpec::dr_d),
      field("reliability", "t_sa", &C::reliability, &ReliabilitySpec::t_sa),
      field("reliability", "beta", &C::reliability, &ReliabilitySpec::beta),
      field("reliability", "interval_len", &C::reliability, &ReliabilitySpec::interval_len),
      field("reliability", "f_init", &C::reliability, &ReliabilitySpec::f_init),
      field("reliability", "warmup", &C::reliability, &ReliabilitySpec::warmup),
      field("reliability", "f_min", &C::reliability, &ReliabilitySpec::f_min),
      field("reliability", "f_cap", &C::reliability, &ReliabilitySpec::f_cap),
      field("reliability", "early_cong_ratio_cap", &C::reliability, &ReliabilitySpec::early_cong_ratio_cap),
      field("reliability", "low_cong_linear", &C::reliability, &ReliabilitySpec::low_cong_linear),

      field("budget", "delta_e2a", &C::budget, &BudgetSpec::delta_e2a),
      field("budget", "ep_del", &C::budget, &BudgetSpec::ep_del),
      field("budget", "a_del", &C::budget, &BudgetSpec::a_del),
      field("budget", "mode", &C::budget, &BudgetSpec::mode),

      field("congestion", "buffer_capacity", &C::congestion, &CongestionSpec::buffer_capacity),
      field("congestion", "epoch", &C::congestion, &CongestionSpec::epoch),

      field("transport", "hops", &C::transport, &TransportSpec::hops),
      field("transport", "hop_distance", &C::transport, &TransportSpec::hop_distance),
      field("transport", "bottleneck_link", &C::transport, &TransportSpec::bottleneck_link),
      field("transport", "bottleneck_bps", &C::transport, &TransportSpec::bottleneck_bps),
      field("transport", "goal_packets", &C::transport, &TransportSpec::goal_packets),
      field("transport", "delta_e2a", &C::transport, &TransportSpec::delta_e2a),
      field("transport", "t_fdbk", &C::transport, &TransportSpec::t_fdbk),
      field("transport", "t_p", &C::transport, &TransportSpec::t_p),
      field("transport", "decrease_factor", &C::transport, &TransportSpec::decrease_factor),
      field("transport", "hold_band", &C::transport, &TransportSpec::hold_band),
      field("transport", "sender", &C::transport, &TransportSpec::sender),
      field("transport", "naive_rate_factor", &C::transport, &TransportSpec::naive_rate_factor),
      field("transport", "sack", &C::transport, &TransportSpec::sack),
      field("transport", "loss", &C::transport, &TransportSpec::loss),

      field("energy", "e_tx", &C::energy, &EnergySpec::e_tx),
      field("energy", "e_rx", &C::energy, &EnergySpec::e_rx),
  };
  return table;
}

const Field* find_field(const std::string& path) {
  for (const auto& f : fields())
    if (f.path() == path) return &f;
  return nullptr;
}

void need(std::vector<Violation>& out, bool ok, std::string field, std::string reason) {
  if (!ok) out.push_back({std::move(field), std::move(reason)});
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }
bool probability(double v) { return v >= 0.0 && v < 1.0; }

// Fills the derived timers; left untouched when the inputs they depend on are invalid.
void resolve_defaults(ScenarioConfig& cfg, const std::set<std::string>& present) {
  if (!present.contains("reliability.interval_len")) cfg.reliability.interval_len = cfg.reliability.t_sa;
  cfg = resolve_timers(std::move(cfg));
}

ScenarioConfig from_tree(const pt::ptree& tree) {
  ScenarioConfig cfg;
  std::vector<Violation> violations;
  std::set<std::string> present;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      violations.push_back({section, "key outside of any section"});
      continue;
    }
    for (const auto& [key, value] : body) {
      const std::string path = section + "." + key;
      const Field* f = find_field(path);
      if (f == nullptr) {
        violations.push_back({path, "unknown key"});
        continue;
      }
      present.insert(path);
      if (!f->read(cfg, value.data())) violations.push_back({path, "cannot parse '" + value.data() + "'"});
    }
  }
  resolve_defaults(cfg, present);
  auto more = validate(cfg);
  violations.insert(violations.end(), more.begin(), more.end());
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return cfg;
}

pt::ptree to_tree(const ScenarioConfig& cfg) {
  pt::ptree tree;
  for (const auto& f : fields()) tree.put(pt::ptree::path_type(f.path(), '.'), f.write(cfg));
  return tree;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(Errc::Validation, join_violations(violations)), violations_(std::move(violations)) {}

double chain_rtt_estimate(const ScenarioConfig& cfg) {
  const auto& r = cfg.radio;
  const auto& t = cfg.transport;
  if (t.hops == 0 || !positive(r.link_bps) || !positive(r.data_bits) || !positive(r.control_bits))
    return std::numeric_limits<double>::quiet_NaN();
  double ca = r.ca_mean;
  if (r.ca_model == "exponential" && positive(r.ca_mean) && positive(r.ca_cap))
    ca = r.ca_mean * (1.0 - std::exp(-r.ca_cap / r.ca_mean));
  const double prop = t.hop_distance / 3e8;
  double rtt = 0.0;
  for (std::uint32_t link = 1; link <= t.hops; ++link) {
    double bps = r.link_bps;
    if (link == t.bottleneck_link && positive(t.bottleneck_bps)) bps = t.bottleneck_bps;
    rtt += 2.0 * (ca + prop) + r.data_bits / bps + r.control_bits / bps;
  }
  return rtt;
}

std::vector<Violation> validate(const ScenarioConfig& cfg) {
  std::vector<Violation> v;
  const auto& s = cfg.sim;
  need(v, s.kind == "field" || s.kind == "transport", "scenario.kind", "must be 'field' or 'transport'");
  need(v, positive(s.horizon), "scenario.horizon", "must be positive");
  need(v, s.repetitions >= 1, "scenario.repetitions", "must be at least 1");

  const auto& t = cfg.topology;
  need(v, t.n >= 1, "topology.n", "must be at least 1");
  need(v, positive(t.event_radius), "topology.event_radius", "must be positive");
  need(v, positive(t.radio_range), "topology.radio_range", "must be positive");
  need(v, t.placement == "grid" || t.placement == "random", "topology.placement", "must be 'grid' or 'random'");

  const auto& r = cfg.radio;
  need(v, positive(r.link_bps), "radio.link_bps", "must be positive");
  need(v, positive(r.data_bits), "radio.data_bits", "must be positive");
  need(v, positive(r.control_bits), "radio.control_bits", "must be positive");
  need(v, r.ca_model == "fixed" || r.ca_model == "exponential", "radio.ca_model",
       "must be 'fixed' or 'exponential'");
  need(v, std::isfinite(r.ca_mean) && r.ca_mean >= 0.0, "radio.ca_mean", "must be non-negative");
  need(v, r.ca_model != "exponential" || positive(r.ca_cap), "radio.ca_cap", "must be positive");
  need(v, probability(r.loss), "radio.loss", "must be in [0,1)");

  const auto& rel = cfg.reliability;
  need(v, rel.dr_d >= 1, "reliability.dr_d", "must be positive");
  need(v, positive(rel.t_sa), "reliability.t_sa", "must be positive");
  need(v, rel.beta > 0.0 && rel.beta < 1.0, "reliability.beta", "must be in (0,1)");
  need(v, positive(rel.interval_len), "reliability.interval_len", "must be positive");
  need(v, std::isfinite(rel.warmup) && rel.warmup >= 0.0, "reliability.warmup", "must be non-negative");
  need(v, positive(rel.f_min), "reliability.f_min", "must be positive");
  need(v, positive(rel.f_cap) && rel.f_cap >= rel.f_min, "reliability.f_cap", "must be at least f_min");
  need(v, rel.f_init >= rel.f_min && rel.f_init <= rel.f_cap, "reliability.f_init", "must lie in [f_min, f_cap]");

  const auto& b = cfg.budget;
  need(v, positive(b.delta_e2a), "budget.delta_e2a", "must be positive");
  need(v, std::isfinite(b.ep_del) && b.ep_del >= 0.0, "budget.ep_del", "must be non-negative");
  need(v, std::isfinite(b.a_del) && b.a_del >= 0.0, "budget.a_del", "must be non-negative");
  need(v, b.mode == "literal" || b.mode == "full-sum", "budget.mode", "must be 'literal' or 'full-sum'");

  const auto& c = cfg.congestion;
  need(v, c.buffer_capacity >= 1, "congestion.buffer_capacity", "must be at least 1");
  need(v, positive(c.epoch), "congestion.epoch", "must be positive");

  const auto& tr = cfg.transport;
  need(v, tr.hops >= 1, "transport.hops", "must be at least 1");
  need(v, positive(tr.hop_distance), "transport.hop_distance", "must be positive");
  need(v, tr.bottleneck_link <= tr.hops, "transport.bottleneck_link", "must name a link of the chain");
  need(v, tr.bottleneck_link == 0 || positive(tr.bottleneck_bps), "transport.bottleneck_bps", "must be positive");
  need(v, tr.goal_packets >= 1, "transport.goal_packets", "must be at least 1");
  need(v, positive(tr.delta_e2a), "transport.delta_e2a", "must be positive");
  const double rtt = chain_rtt_estimate(cfg);
  if (std::isfinite(rtt)) {
    need(v, tr.t_fdbk > rtt, "transport.t_fdbk", "must exceed RTT");
    need(v, tr.t_p > rtt, "transport.t_p", "must exceed RTT");
  }
  need(v, tr.decrease_factor > 0.0 && tr.decrease_factor < 1.0, "transport.decrease_factor", "must be in (0,1)");
  need(v, tr.hold_band >= 0.0 && tr.hold_band < 1.0, "transport.hold_band", "must be in [0,1)");
  need(v, tr.sender == "rrrt" || tr.sender == "naive", "transport.sender", "must be 'rrrt' or 'naive'");
  need(v, positive(tr.naive_rate_factor), "transport.naive_rate_factor", "must be positive");
  need(v, probability(tr.loss), "transport.loss", "must be in [0,1)");

  const auto& e = cfg.energy;
  need(v, std::isfinite(e.e_tx) && e.e_tx >= 0.0, "energy.e_tx", "must be non-negative");
  need(v, std::isfinite(e.e_rx) && e.e_rx >= 0.0, "energy.e_rx", "must be non-negative");
  return v;
}

ScenarioConfig resolve_timers(ScenarioConfig cfg) {
  const double rtt = chain_rtt_estimate(cfg);
  if (cfg.transport.t_fdbk == 0.0 && std::isfinite(rtt) && rtt > 0.0) cfg.transport.t_fdbk = 2.0 * rtt;
  if (cfg.transport.t_p == 0.0) cfg.transport.t_p = cfg.transport.t_fdbk;
  return cfg;
}

ScenarioConfig checked(const ScenarioConfig& cfg) {
  ScenarioConfig out = resolve_timers(cfg);
  auto v = validate(out);
  if (!v.empty()) throw ValidationError(std::move(v));
  return out;
}

ScenarioConfig parse_scenario_text(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::vector<Violation>{{"line " + std::to_string(e.line()), e.message()}});
  }
  return from_tree(tree);
}

ScenarioConfig parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  std::ostringstream out;
  pt::write_ini(out, to_tree(cfg));
  return out.str();
}

std::uint64_t scenario_hash(const ScenarioConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : serialize_scenario(cfg)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

ScenarioConfig with_parameter(const ScenarioConfig& cfg, const std::string& path, const std::string& value) {
  if (find_field(path) == nullptr) throw Error(Errc::UnknownParameter, "unknown parameter '" + path + "'");
  pt::ptree tree = to_tree(cfg);
  tree.put(pt::ptree::path_type(path, '.'), value);
  return from_tree(tree);
}

}  // namespace rrrt::scenario
