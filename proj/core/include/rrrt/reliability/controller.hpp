#pragma once

#include <cstdint>
#include <optional>

#include "rrrt/reliability/condition.hpp"
#include "rrrt/sim/delay_model.hpp"
#include "rrrt/sim/trace.hpp"
#include "rrrt/sim/types.hpp"

namespace rrrt::reliability {

using sim::Time;

struct ReliabilityTargets {
  std::uint64_t dr_d = 1;   // on-time packets wanted per decision interval
  double t_sa = 1.0;        // sensor -> sub-sink delay bound, seconds
  double beta = 0.05;       // tolerance band around alpha = 1
  double interval_len = 1.0;

  /// Throws Errc::InvalidTarget naming the first violated constraint.
  void validate() const;
};

/// Sub-sink accounting for one decision interval.
struct IntervalStats {
  std::int64_t index = 0;
  Time start = 0.0;
  std::uint64_t dr_o = 0;   // on-time packets
  std::uint64_t late = 0;   // arrivals past t_sa (diagnostic only)
  double t_i = sim::kInfinity;  // time from interval start until dr_o reached dr_d
  bool cn = false;
  double f_i = 0.0;
  int x = 1;
};

struct FrequencyBounds {
  double f_min = 0.1;
  double f_cap = 50.0;
  /// Lowest frequency at which congestion has been observed; recorded, never configured.
  std::optional<double> f_max_observed;
};

/// Alternative update rules for the two congested conditions.
struct UpdateOptions {
  /// Early reliability with congestion: min(f*T_i/T_sa, f*DR_d/DR_o) instead of f*T_i/T_sa.
  bool early_cong_ratio_cap = false;
  /// Low reliability with congestion: f*DR_o/(DR_d*x) instead of f^(DR_o/(DR_d*x)).
  bool low_cong_linear = false;
};

struct FrequencyUpdate {
  double f_next = 0.0;
  double f_unclamped = 0.0;
  int x_next = 1;
};

/// Counts an arrival: on time iff now - gen_time <= t_sa. On-time packets
/// raise dr_o, OR their CN bit into the interval verdict and, on reaching
/// dr_d, fix t_i. Late packets only bump the late counter.
void record_packet_arrival(IntervalStats& stats, Time gen_time, bool cn, Time now, const ReliabilityTargets& targets);

/// alpha = dr_o / dr_d. Throws Errc::InvalidTarget when dr_d == 0.
double reliability_indicator(std::uint64_t dr_o, std::uint64_t dr_d);

/// Congestion: alpha < 1 -> LowRelCong, else EarlyRelCong (alpha == 1 included).
/// No congestion: below 1 - beta -> LowRelNoCong, above 1 + beta ->
/// EarlyRelNoCong, otherwise AdequateRelNoCong.
NetworkCondition classify_condition(double alpha, bool cn, double beta);

/// Applies the per-condition update law and clamps into [f_min, f_cap].
/// x increments only on LowRelCong and resets to 1 otherwise. Throws
/// Errc::InconsistentStats when a low-reliability condition arrives with
/// dr_o >= dr_d and a finite t_i.
FrequencyUpdate update_frequency(double f_i, NetworkCondition cond, const IntervalStats& stats,
                                 const ReliabilityTargets& targets, const FrequencyBounds& bounds,
                                 const UpdateOptions& options = {});

/// Event-to-action budget check.
enum class BudgetMode { Literal, FullSum };

struct DelayBudget {
  double delta_e2a = 1.0;
  double ep_del = 0.0;
  double a_del = 0.0;
};

/// Literal: delta_e2a >= b_del + ep_del + a_del.
/// FullSum: delta_e2a >= (b_del + ca_del + t_del + p_del) + ep_del + a_del.
bool check_delay_budget(const DelayBudget& budget, const sim::DelayBreakdown& observed, BudgetMode mode);

/// Per-sub-sink controller state: the open interval plus the frequency in
/// force. close_interval() runs the full decision pipeline and opens the next
/// interval with x carried over.
class ReliabilityController {
 public:
  ReliabilityController(ReliabilityTargets targets, FrequencyBounds bounds, UpdateOptions options, double f_init,
                        Time start = 0.0);

  void on_data(Time gen_time, bool cn, Time now) { record_packet_arrival(open_, gen_time, cn, now, targets_); }

  /// Returns the decision row; the caller broadcasts row.f_next.
  sim::IntervalRow close_interval(Time now);

  const IntervalStats& open_interval() const { return open_; }
  double frequency() const { return open_.f_i; }
  const ReliabilityTargets& targets() const { return targets_; }
  const FrequencyBounds& bounds() const { return bounds_; }

 private:
  ReliabilityTargets targets_;
  FrequencyBounds bounds_;
  UpdateOptions options_;
  IntervalStats open_;
};

}  // namespace rrrt::reliability
