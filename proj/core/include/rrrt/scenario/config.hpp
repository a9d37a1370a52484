#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rrrt/error.hpp"

namespace rrrt::scenario {

inline constexpr std::string_view kArtifactVersion = "rrrt 0.1.0";

struct TopologySpec {
  std::uint32_t n = 81;
  double event_radius = 45.0;
  double radio_range = 12.0;
  std::string placement = "grid";  // grid | random
  bool alternate_routes = true;
  bool operator==(const TopologySpec&) const = default;
};

struct RadioSpec {
  double link_bps = 250000.0;
  double data_bits = 1000.0;
  double control_bits = 256.0;
  std::string ca_model = "exponential";  // fixed | exponential
  double ca_mean = 0.002;
  double ca_cap = 0.050;
  double loss = 0.0;
  bool operator==(const RadioSpec&) const = default;
};

struct ReliabilitySpec {
  std::uint64_t dr_d = 324;
  double t_sa = 1.0;
  double beta = 0.05;
  double interval_len = 1.0;
  double f_init = 4.0;
  double warmup = 0.0;  // sources run at f_init this long before the first decision interval opens
  double f_min = 0.1;
  double f_cap = 50.0;
  bool early_cong_ratio_cap = false;
  bool low_cong_linear = false;
  bool operator==(const ReliabilitySpec&) const = default;
};

struct BudgetSpec {
  double delta_e2a = 2.0;
  double ep_del = 0.05;
  double a_del = 0.1;
  std::string mode = "full-sum";  // literal | full-sum
  bool operator==(const BudgetSpec&) const = default;
};

struct CongestionSpec {
  std::uint32_t buffer_capacity = 128;
  double epoch = 0.1;
  bool operator==(const CongestionSpec&) const = default;
};

struct TransportSpec {
  std::uint32_t hops = 4;
  double hop_distance = 30.0;
  std::uint32_t bottleneck_link = 0;  // 1-based link index along the chain; 0 = none
  double bottleneck_bps = 125000.0;
  std::uint64_t goal_packets = 1000;
  double delta_e2a = 60.0;
  double t_fdbk = 0.0;  // 0 on input: twice the RTT estimate
  double t_p = 0.0;     // 0 on input: t_fdbk
  double decrease_factor = 0.5;
  double hold_band = 0.02;
  std::string sender = "rrrt";  // rrrt | naive
  double naive_rate_factor = 2.0;
  bool sack = true;
  double loss = 0.0;  // per-hop loss on the chain
  bool operator==(const TransportSpec&) const = default;
};

struct EnergySpec {
  double e_tx = 50e-6;
  double e_rx = 25e-6;
  bool operator==(const EnergySpec&) const = default;
};

struct SimSpec {
  std::string kind = "field";  // field | transport
  double horizon = 60.0;
  std::uint64_t seed = 1;
  std::uint32_t repetitions = 10;
  bool operator==(const SimSpec&) const = default;
};

/// One file fully determines a run except the seed override.
struct ScenarioConfig {
  SimSpec sim;
  TopologySpec topology;
  RadioSpec radio;
  ReliabilitySpec reliability;
  BudgetSpec budget;
  CongestionSpec congestion;
  TransportSpec transport;
  EnergySpec energy;

  bool operator==(const ScenarioConfig&) const = default;
};

struct Violation {
  std::string field;
  std::string reason;
};

/// Carries every violation found, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Parses sectioned key = value text. Throws ValidationError.
ScenarioConfig parse_scenario_text(std::string_view text);
/// Throws Errc::Io or ValidationError.
ScenarioConfig parse_scenario(const std::filesystem::path& path);

/// Checks every cross-field constraint. Returns all violations.
std::vector<Violation> validate(const ScenarioConfig& cfg);

/// Canonical text form; parse_scenario_text(serialize_scenario(c)) == c.
std::string serialize_scenario(const ScenarioConfig& cfg);

/// FNV-1a over the canonical text.
std::uint64_t scenario_hash(const ScenarioConfig& cfg);

/// Sets one "section.key" parameter. Throws Errc::UnknownParameter or ValidationError.
ScenarioConfig with_parameter(const ScenarioConfig& cfg, const std::string& path, const std::string& value);

/// Fills transport.t_fdbk (twice the chain RTT) and transport.t_p (t_fdbk)
/// when they are left at 0.
ScenarioConfig resolve_timers(ScenarioConfig cfg);

/// Returns the resolved config or throws ValidationError.
ScenarioConfig checked(const ScenarioConfig& cfg);

/// Round-trip time of an empty chain: data forward plus control back.
double chain_rtt_estimate(const ScenarioConfig& cfg);

}  // namespace rrrt::scenario
