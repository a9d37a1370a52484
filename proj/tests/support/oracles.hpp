#pragma once

// Independent reference models used by the unit and acceptance tests. Nothing
// here calls into the library's computations; shared types only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Frequency update as one straight-line branch chain.

enum Cond { kEarlyNoCong = 0, kEarlyCong = 1, kLowNoCong = 2, kLowCong = 3, kAdequate = 4 };

struct Update {
  double f_next;
  int x_next;
  Cond cond;
};

inline Update fig1(double f, std::uint64_t dr_o, std::uint64_t dr_d, double t_i, double t_sa, bool cn, double beta,
                   int x, double f_min, double f_cap, bool early_cong_ratio_cap = false, bool low_cong_linear = false) {
  const double a = static_cast<double>(dr_o) / static_cast<double>(dr_d);
  Cond c;
  if (cn) {
    c = a < 1.0 ? kLowCong : kEarlyCong;
  } else if (a > 1.0 + beta) {
    c = kEarlyNoCong;
  } else if (a < 1.0 - beta) {
    c = kLowNoCong;
  } else {
    c = kAdequate;
  }

  double g = f;
  int xn = 1;
  if (c == kEarlyNoCong) {
    g = f * t_i / t_sa;
  } else if (c == kEarlyCong) {
    const double p = f * t_i / t_sa;
    g = early_cong_ratio_cap ? std::min(p, f * dr_d / dr_o) : std::min(p, p);
  } else if (c == kLowNoCong) {
    g = dr_o == 0 ? f_cap : f * dr_d / dr_o;
  } else if (c == kLowCong) {
    if (low_cong_linear) {
      g = f * dr_o / (dr_d * x);
    } else {
      g = std::pow(f, dr_o / (static_cast<double>(dr_d) * x));
      if (g > f) g = f;
    }
    xn = x + 1;
  }
  if (g < f_min) g = f_min;
  if (g > f_cap) g = f_cap;
  return {g, xn, c};
}

// ---------------------------------------------------------------------------
// Probe bottleneck: the slowest node on the path dictates the rate.

inline double path_max(const std::vector<double>& node_delays) {
  double m = 0.0;
  for (double d : node_delays) m = d > m ? d : m;
  return m;
}

/// Saturated tandem of FIFO servers with deterministic service times. Returns
/// the steady departure rate measured over the last half of `packets`.
inline double tandem_throughput(const std::vector<double>& service, int packets = 2000) {
  std::vector<double> done(service.size(), 0.0);
  std::vector<double> departures;
  for (int p = 0; p < packets; ++p) {
    double ready = 0.0;  // every packet is available at the source at t = 0
    for (std::size_t s = 0; s < service.size(); ++s) {
      const double start = std::max(ready, done[s]);
      done[s] = start + service[s];
      ready = done[s];
    }
    departures.push_back(ready);
  }
  const int half = packets / 2;
  return (packets - 1 - half) / (departures[packets - 1] - departures[half]);
}

// ---------------------------------------------------------------------------
// Rate control under constant feedback.

inline double geometric_gap(double gap0, int m, int k) { return gap0 * std::pow(1.0 - 1.0 / m, k); }

// ---------------------------------------------------------------------------
// SACK: every loss pattern of a short stream.

struct SackCase {
  std::set<std::uint64_t> received;
  std::set<std::uint64_t> lost;
};

/// All 2^n delivery patterns of sequences 1..n.
inline std::vector<SackCase> loss_patterns(int n) {
  std::vector<SackCase> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    SackCase c;
    for (int i = 0; i < n; ++i) {
      const std::uint64_t seq = i + 1;
      if (mask & (1u << i))
        c.lost.insert(seq);
      else
        c.received.insert(seq);
    }
    out.push_back(c);
  }
  return out;
}

/// Holes a receiver can prove: missing sequences below the highest one received.
inline std::set<std::uint64_t> provable_holes(const std::set<std::uint64_t>& received) {
  std::set<std::uint64_t> holes;
  if (received.empty()) return holes;
  for (std::uint64_t s = 1; s < *received.rbegin(); ++s)
    if (!received.contains(s)) holes.insert(s);
  return holes;
}

// ---------------------------------------------------------------------------
// Interval-level fluid model of the sensor field feeding one sub-sink.

struct FieldModel {
  int n = 81;
  double t_sa = 1.0;
  double interval = 1.0;
  std::uint64_t dr_d = 324;
  double beta = 0.05;
  double f_min = 0.1;
  double f_cap = 50.0;
  double service = 667.0;     // packets/s the sub-sink neighbourhood can drain
  double cn_load = 600.0;     // offered packets/s above which buffers are flagged
  double backlog_cap = 1000;  // packets the field can hold before dropping
  double cn_backlog = 800;    // backlog at which buffers are flagged regardless of load
  double jitter = 0.01;       // relative per-interval variation of the offered count
};

struct FieldRow {
  Cond cond;
  double f_i;
  double f_next;
};

/// On-time share of the traffic drained during one interval when the
/// backlog moves linearly from q0 to q1 and a packet waits backlog/service.
inline double on_time_share(double q0, double q1, const FieldModel& m) {
  const double limit = m.service * m.t_sa;
  if (std::max(q0, q1) <= limit) return 1.0;
  if (std::min(q0, q1) >= limit) return 0.0;
  const double cross = (limit - q0) / (q1 - q0);
  return q1 > q0 ? cross : 1.0 - cross;
}

/// The field starts empty and reports open-loop at f0 for `warmup` intervals
/// before the controller's first decision interval.
inline std::vector<FieldRow> run_field_model(const FieldModel& m, double f0, int warmup, int intervals,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-m.jitter, m.jitter);
  std::vector<FieldRow> rows;
  double f = f0;
  double q = 0.0;
  int x = 1;
  for (int i = -warmup; i < intervals; ++i) {
    const double offered = m.n * f * m.interval * (1.0 + u(rng));
    const double drained = std::min(q + offered, m.service * m.interval);
    const double q1 = std::min(q + offered - drained, m.backlog_cap);
    const bool cn = offered / m.interval > m.cn_load || q1 > m.cn_backlog;
    const auto dr_o = static_cast<std::uint64_t>(std::floor(drained * on_time_share(q, q1, m)));
    q = q1;
    if (i < 0) continue;
    const double t_i = dr_o >= m.dr_d ? m.interval * static_cast<double>(m.dr_d) / static_cast<double>(dr_o)
                                      : std::numeric_limits<double>::infinity();
    const Update up = fig1(f, dr_o, m.dr_d, t_i, m.t_sa, cn, m.beta, x, m.f_min, m.f_cap);
    rows.push_back({up.cond, f, up.f_next});
    f = up.f_next;
    x = up.x_next;
  }
  return rows;
}

/// Number of intervals up to and including the first one from which every
/// later row is adequate; nullopt when never sustained.
inline std::optional<int> intervals_to_sustained(const std::vector<FieldRow>& rows) {
  std::optional<int> first;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].cond == kAdequate) {
      if (!first) first = static_cast<int>(i) + 1;
    } else {
      first.reset();
    }
  }
  return first;
}

struct ConvergenceStudy {
  int max_intervals = 0;
  int runs = 0;
  int never = 0;
  int per_start[4] = {0, 0, 0, 0};  // max per starting condition
};

/// Brute-force sweep: every starting frequency in `starts`, every warmup up
/// to `max_warmup` intervals, `seeds` jitter seeds. Runs are grouped by the
/// condition of their first decision interval.
inline ConvergenceStudy convergence_study(const FieldModel& m, const std::vector<double>& starts, int max_warmup,
                                          int seeds, int horizon) {
  ConvergenceStudy s;
  for (double f0 : starts) {
    for (int warmup = 0; warmup <= max_warmup; ++warmup) {
      for (int seed = 0; seed < seeds; ++seed) {
        const auto rows = run_field_model(m, f0, warmup, horizon, 1000 + seed);
        if (rows.front().cond == kAdequate) continue;
        ++s.runs;
        const auto k = intervals_to_sustained(rows);
        if (!k) {
          ++s.never;
          continue;
        }
        s.max_intervals = std::max(s.max_intervals, *k);
        auto& slot = s.per_start[rows.front().cond];
        slot = std::max(slot, *k);
      }
    }
  }
  return s;
}

/// Bound = observed maximum plus 50 %.
inline int convergence_bound(const ConvergenceStudy& s) {
  return static_cast<int>(std::ceil(1.5 * s.max_intervals));
}

}  // namespace oracle
