#include "rrrt/reliability/controller.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "rrrt/error.hpp"

namespace rrrt::reliability {

namespace {
constexpr std::array<std::string_view, 5> kConditionNames{"early_rel_no_cong", "early_rel_cong", "low_rel_no_cong",
                                                          "low_rel_cong", "adequate_rel_no_cong"};
}

std::string_view to_string(NetworkCondition c) noexcept { return kConditionNames[static_cast<std::size_t>(c)]; }

std::optional<NetworkCondition> parse_condition(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kConditionNames.size(); ++i) {
    if (kConditionNames[i] == s) return static_cast<NetworkCondition>(i);
  }
  return std::nullopt;
}

void ReliabilityTargets::validate() const {
  if (dr_d < 1) throw Error(Errc::InvalidTarget, "dr_d must be >= 1");
  if (!(t_sa > 0.0)) throw Error(Errc::InvalidTarget, "t_sa must be > 0");
  if (!(beta > 0.0 && beta < 1.0)) throw Error(Errc::InvalidTarget, "beta must be in (0,1)");
  if (!(interval_len > 0.0)) throw Error(Errc::InvalidTarget, "interval_len must be > 0");
}

void record_packet_arrival(IntervalStats& stats, Time gen_time, bool cn, Time now, const ReliabilityTargets& targets) {
  if (now - gen_time > targets.t_sa) {
    ++stats.late;
    return;
  }
  ++stats.dr_o;
  stats.cn = stats.cn || cn;
  if (stats.dr_o == targets.dr_d) stats.t_i = now - stats.start;
}

double reliability_indicator(std::uint64_t dr_o, std::uint64_t dr_d) {
  if (dr_d == 0) throw Error(Errc::InvalidTarget, "dr_d must be >= 1");
  return static_cast<double>(dr_o) / static_cast<double>(dr_d);
}

NetworkCondition classify_condition(double alpha, bool cn, double beta) {
  if (cn) return alpha < 1.0 ? NetworkCondition::LowRelCong : NetworkCondition::EarlyRelCong;
  if (alpha < 1.0 - beta) return NetworkCondition::LowRelNoCong;
  if (alpha > 1.0 + beta) return NetworkCondition::EarlyRelNoCong;
  return NetworkCondition::AdequateRelNoCong;
}

FrequencyUpdate update_frequency(double f_i, NetworkCondition cond, const IntervalStats& stats,
                                 const ReliabilityTargets& targets, const FrequencyBounds& bounds,
                                 const UpdateOptions& options) {
  const bool reached = stats.dr_o >= targets.dr_d;
  const double dr_o = static_cast<double>(stats.dr_o);
  const double dr_d = static_cast<double>(targets.dr_d);

  FrequencyUpdate out;
  switch (cond) {
    case NetworkCondition::EarlyRelNoCong:
    case NetworkCondition::EarlyRelCong: {
      if (!std::isfinite(stats.t_i)) {
        throw Error(Errc::InconsistentStats, "early-reliability condition without a finite t_i");
      }
      const double scaled = f_i * stats.t_i / targets.t_sa;
      if (cond == NetworkCondition::EarlyRelNoCong) {
        out.f_unclamped = scaled;
      } else if (options.early_cong_ratio_cap && stats.dr_o > 0) {
        out.f_unclamped = std::min(scaled, f_i * dr_d / dr_o);
      } else {
        out.f_unclamped = std::min(scaled, scaled);
      }
      out.x_next = 1;
      break;
    }
    case NetworkCondition::LowRelNoCong:
      if (reached && std::isfinite(stats.t_i)) {
        throw Error(Errc::InconsistentStats, "low-reliability condition with dr_o >= dr_d");
      }
      // Nothing arrived on time: jump to the cap.
      out.f_unclamped = stats.dr_o == 0 ? bounds.f_cap : f_i * dr_d / dr_o;
      out.x_next = 1;
      break;
    case NetworkCondition::LowRelCong: {
      if (reached && std::isfinite(stats.t_i)) {
        throw Error(Errc::InconsistentStats, "low-reliability condition with dr_o >= dr_d");
      }
      const double exponent = dr_o / (dr_d * static_cast<double>(stats.x));
      if (options.low_cong_linear) {
        out.f_unclamped = f_i * exponent;
      } else {
        // For f_i <= 1 the power would raise the frequency; never increase here.
        out.f_unclamped = std::min(f_i, std::pow(f_i, exponent));
      }
      out.x_next = stats.x + 1;
      break;
    }
    case NetworkCondition::AdequateRelNoCong:
      out.f_unclamped = f_i;
      out.x_next = 1;
      break;
  }
  out.f_next = std::clamp(out.f_unclamped, bounds.f_min, bounds.f_cap);
  return out;
}

bool check_delay_budget(const DelayBudget& budget, const sim::DelayBreakdown& observed, BudgetMode mode) {
  const double transport = mode == BudgetMode::Literal ? observed.b_del : observed.total();
  return budget.delta_e2a >= transport + budget.ep_del + budget.a_del;
}

ReliabilityController::ReliabilityController(ReliabilityTargets targets, FrequencyBounds bounds,
                                             UpdateOptions options, double f_init, Time start)
    : targets_(targets), bounds_(bounds), options_(options) {
  targets_.validate();
  if (!(bounds_.f_min > 0.0 && bounds_.f_min <= bounds_.f_cap)) {
    throw Error(Errc::InvalidTarget, "frequency bounds must satisfy 0 < f_min <= f_cap");
  }
  open_.start = start;
  open_.f_i = std::clamp(f_init, bounds_.f_min, bounds_.f_cap);
}

sim::IntervalRow ReliabilityController::close_interval(Time now) {
  const double alpha = reliability_indicator(open_.dr_o, targets_.dr_d);
  const NetworkCondition cond = classify_condition(alpha, open_.cn, targets_.beta);
  const FrequencyUpdate upd = update_frequency(open_.f_i, cond, open_, targets_, bounds_, options_);
  ensure(upd.f_next >= bounds_.f_min && upd.f_next <= bounds_.f_cap, "emitted frequency outside bounds");
  if (open_.cn) {
    bounds_.f_max_observed = bounds_.f_max_observed ? std::min(*bounds_.f_max_observed, open_.f_i) : open_.f_i;
  }

  sim::IntervalRow row{open_.index, now,           open_.dr_o, targets_.dr_d, alpha, open_.t_i,
                       open_.cn,    cond,          open_.f_i,  upd.f_next,    open_.x};

  IntervalStats next;
  next.index = open_.index + 1;
  next.start = now;
  next.f_i = upd.f_next;
  next.x = upd.x_next;
  open_ = next;
  return row;
}

}  // namespace rrrt::reliability
