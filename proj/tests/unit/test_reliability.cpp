#include <cmath>
#include <random>

#include "doctest.h"
#include "rrrt/error.hpp"
#include "rrrt/reliability/controller.hpp"
#include "support/oracles.hpp"

using namespace rrrt;
using namespace rrrt::reliability;

namespace {

ReliabilityTargets targets(std::uint64_t dr_d, double t_sa = 1.0, double beta = 0.05) {
  return {dr_d, t_sa, beta, 1.0};
}

IntervalStats stats(std::uint64_t dr_o, double t_i, bool cn, double f, int x = 1) {
  IntervalStats s;
  s.dr_o = dr_o;
  s.t_i = t_i;
  s.cn = cn;
  s.f_i = f;
  s.x = x;
  return s;
}

const FrequencyBounds kWide{1e-9, 1e9, {}};

bool same(double a, double b) { return a == b || std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("arrivals inside the bound count, late ones do not") {
  const auto t = targets(3);
  IntervalStats s;
  record_packet_arrival(s, 0.0, false, 0.8, t);
  CHECK(s.dr_o == 1);
  record_packet_arrival(s, 0.0, true, 1.2, t);
  CHECK(s.dr_o == 1);
  CHECK(s.late == 1);
  CHECK_FALSE(s.cn);
  record_packet_arrival(s, 0.0, false, 1.0, t);
  CHECK(s.dr_o == 2);
}

TEST_CASE("t_i is the time of the dr_d-th on-time arrival") {
  const auto t = targets(3);
  IntervalStats s;
  s.start = 4.0;
  for (double at : {4.2, 4.5, 4.9}) {
    CHECK_FALSE(std::isfinite(s.t_i));
    record_packet_arrival(s, at - 0.1, false, at, t);
  }
  CHECK(s.t_i == doctest::Approx(0.9));
  record_packet_arrival(s, 4.95, true, 4.99, t);
  CHECK(s.t_i == doctest::Approx(0.9));
  CHECK(s.cn);
}

TEST_CASE("indicator") {
  CHECK(reliability_indicator(80, 100) == 0.8);
  CHECK(reliability_indicator(100, 100) == 1.0);
  CHECK(reliability_indicator(0, 100) == 0.0);
  CHECK_THROWS_AS(reliability_indicator(5, 0), Error);
}

TEST_CASE("classification examples") {
  CHECK(classify_condition(0.5, true, 0.05) == NetworkCondition::LowRelCong);
  CHECK(classify_condition(1.2, false, 0.05) == NetworkCondition::EarlyRelNoCong);
  CHECK(classify_condition(1.0, false, 0.05) == NetworkCondition::AdequateRelNoCong);
  CHECK(classify_condition(1.0, true, 0.05) == NetworkCondition::EarlyRelCong);
  CHECK(classify_condition(0.0, false, 0.05) == NetworkCondition::LowRelNoCong);
}

TEST_CASE("classifier matches a decision table over a grid") {
  // Integer table: tenths of alpha, hundredths of beta.
  for (int b : {1, 5, 20}) {
    for (int k = 0; k <= 20; ++k) {
      for (bool cn : {false, true}) {
        NetworkCondition want;
        if (cn)
          want = k < 10 ? NetworkCondition::LowRelCong : NetworkCondition::EarlyRelCong;
        else if (10 * k < 100 - b)
          want = NetworkCondition::LowRelNoCong;
        else if (10 * k > 100 + b)
          want = NetworkCondition::EarlyRelNoCong;
        else
          want = NetworkCondition::AdequateRelNoCong;
        CAPTURE(k);
        CAPTURE(b);
        CHECK(classify_condition(reliability_indicator(k, 10), cn, b / 100.0) == want);
      }
    }
  }
}

TEST_CASE("condition names round-trip") {
  for (int c = 0; c < 5; ++c) {
    const auto cond = static_cast<NetworkCondition>(c);
    CHECK(parse_condition(to_string(cond)) == cond);
  }
  CHECK_FALSE(parse_condition("calm").has_value());
}

TEST_CASE("update law spot values") {
  const FrequencyBounds b{0.1, 50.0, {}};
  auto u = update_frequency(10.0, NetworkCondition::EarlyRelNoCong, stats(120, 0.5, false, 10.0), targets(100), b);
  CHECK(u.f_next == 5.0);
  CHECK(u.x_next == 1);
  u = update_frequency(4.0, NetworkCondition::LowRelNoCong, stats(80, sim::kInfinity, false, 4.0), targets(100), b);
  CHECK(u.f_next == 5.0);
  u = update_frequency(16.0, NetworkCondition::LowRelCong, stats(50, sim::kInfinity, true, 16.0, 2), targets(100), b);
  CHECK(u.f_next == 2.0);
  CHECK(u.x_next == 3);
  u = update_frequency(7.0, NetworkCondition::AdequateRelNoCong, stats(100, 0.9, false, 7.0, 4), targets(100), b);
  CHECK(u.f_next == 7.0);
  CHECK(u.x_next == 1);
}

TEST_CASE("congested low reliability never raises a sub-unity frequency") {
  const FrequencyBounds b{0.1, 50.0, {}};
  const auto u =
      update_frequency(0.5, NetworkCondition::LowRelCong, stats(50, sim::kInfinity, true, 0.5), targets(100), b);
  CHECK(u.f_next == 0.5);
  CHECK(u.f_unclamped == 0.5);
}

TEST_CASE("eq4 and eq6 variants") {
  const auto t = targets(100);
  auto u = update_frequency(10.0, NetworkCondition::EarlyRelCong, stats(200, 0.8, true, 10.0), t, kWide);
  CHECK(u.f_next == 8.0);
  u = update_frequency(10.0, NetworkCondition::EarlyRelCong, stats(200, 0.8, true, 10.0), t, kWide, {true, false});
  CHECK(u.f_next == 5.0);
  u = update_frequency(16.0, NetworkCondition::LowRelCong, stats(50, sim::kInfinity, true, 16.0, 2), t, kWide,
                       {false, true});
  CHECK(u.f_next == 4.0);
}

TEST_CASE("zero on-time arrivals without congestion jump to the cap") {
  const FrequencyBounds b{0.1, 50.0, {}};
  const auto u =
      update_frequency(3.0, NetworkCondition::LowRelNoCong, stats(0, sim::kInfinity, false, 3.0), targets(100), b);
  CHECK(u.f_next == 50.0);
}

TEST_CASE("inconsistent stats are rejected") {
  CHECK_THROWS_AS(update_frequency(4.0, NetworkCondition::LowRelNoCong, stats(100, 0.5, false, 4.0), targets(100),
                                   kWide),
                  Error);
  CHECK_THROWS_AS(update_frequency(4.0, NetworkCondition::EarlyRelNoCong,
                                   stats(120, sim::kInfinity, false, 4.0), targets(100), kWide),
                  Error);
}

TEST_CASE("results are clamped into the bounds") {
  const FrequencyBounds b{0.5, 8.0, {}};
  auto u = update_frequency(4.0, NetworkCondition::LowRelNoCong, stats(10, sim::kInfinity, false, 4.0), targets(100), b);
  CHECK(u.f_unclamped == 40.0);
  CHECK(u.f_next == 8.0);
  u = update_frequency(4.0, NetworkCondition::EarlyRelNoCong, stats(500, 0.01, false, 4.0), targets(100), b);
  CHECK(u.f_next == 0.5);
}

TEST_CASE("update law properties") {
  std::mt19937_64 g(17);
  std::uniform_real_distribution<double> f(1.01, 100.0), frac(0.01, 0.99);
  for (int i = 0; i < 2000; ++i) {
    const double fi = f(g);
    const auto t = targets(100);
    // Early reliability contracts.
    auto u = update_frequency(fi, NetworkCondition::EarlyRelNoCong, stats(150, frac(g), false, fi), t, kWide);
    CHECK(u.f_unclamped < fi);
    // Low reliability expands.
    const auto dr_o = 1 + g() % 99;
    u = update_frequency(fi, NetworkCondition::LowRelNoCong, stats(dr_o, sim::kInfinity, false, fi), t, kWide);
    CHECK(u.f_unclamped > fi);
    // Congested low reliability sharpens with x and tends to 1.
    double prev = fi;
    for (int x = 1; x <= 12; ++x) {
      u = update_frequency(fi, NetworkCondition::LowRelCong, stats(dr_o, sim::kInfinity, true, fi, x), t, kWide);
      CHECK(u.f_unclamped <= prev);
      CHECK(u.f_unclamped >= 1.0);
      CHECK(u.x_next == x + 1);
      prev = u.f_unclamped;
    }
    u = update_frequency(fi, NetworkCondition::LowRelCong, stats(dr_o, sim::kInfinity, true, fi, 1000000), t, kWide);
    CHECK(u.f_unclamped == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("update law agrees with a straight-line oracle on random tuples") {
  std::mt19937_64 g(2024);
  std::uniform_real_distribution<double> freq(0.1, 100.0), tsa(1e-6, 5.0);
  const double betas[] = {0.01, 0.05, 0.2};
  int bitwise = 0;
  for (int i = 0; i < 10000; ++i) {
    const double fi = freq(g);
    const std::uint64_t dr_o = 1 + g() % 200, dr_d = 1 + g() % 200;
    const double t_sa = tsa(g);
    const double t_i = dr_o >= dr_d ? tsa(g) : sim::kInfinity;
    const bool cn = g() % 2;
    const double beta = betas[g() % 3];
    const int x = 1 + static_cast<int>(g() % 10);
    const UpdateOptions opt{g() % 4 == 0, g() % 4 == 0};
    const FrequencyBounds b{0.1, 100.0, {}};

    const auto want = oracle::fig1(fi, dr_o, dr_d, t_i, t_sa, cn, beta, x, b.f_min, b.f_cap, opt.early_cong_ratio_cap, opt.low_cong_linear);
    const ReliabilityTargets t{dr_d, t_sa, beta, 1.0};
    const auto cond = classify_condition(reliability_indicator(dr_o, dr_d), cn, beta);
    REQUIRE(static_cast<int>(cond) == static_cast<int>(want.cond));
    const auto got = update_frequency(fi, cond, stats(dr_o, t_i, cn, fi, x), t, b, opt);
    CHECK(same(got.f_next, want.f_next));
    CHECK(got.x_next == want.x_next);
    bitwise += got.f_next == want.f_next;
    const bool congested = cond == NetworkCondition::LowRelCong || cond == NetworkCondition::EarlyRelCong;
    // T_i cannot exceed an interval of length T_sa in a running controller.
    if (congested && !(t_i > t_sa)) CHECK(got.f_next <= fi);
  }
  CHECK(bitwise > 9000);
}

TEST_CASE("delay budget modes") {
  const DelayBudget budget{1.0, 0.3, 0.4};
  sim::DelayBreakdown d;
  d.b_del = 0.2;
  CHECK(check_delay_budget(budget, d, BudgetMode::Literal));
  d.ca_del = 0.1;
  d.t_del = 0.05;
  d.p_del = 0.05;
  CHECK(check_delay_budget(budget, d, BudgetMode::Literal));
  CHECK_FALSE(check_delay_budget(budget, d, BudgetMode::FullSum));
  CHECK(check_delay_budget({}, {}, BudgetMode::Literal));
  CHECK(check_delay_budget({}, {}, BudgetMode::FullSum));
}

TEST_CASE("controller closes intervals and carries x") {
  ReliabilityController c(targets(10), {0.1, 50.0, {}}, {}, 16.0, 0.0);
  CHECK_THROWS_AS(ReliabilityController(targets(0), {}, {}, 1.0), Error);
  CHECK_THROWS_AS(ReliabilityController(targets(10), {2.0, 1.0, {}}, {}, 1.0), Error);

  // Exactly dr_d on time: fixed point.
  for (int i = 0; i < 10; ++i) c.on_data(0.05 * i, false, 0.05 * i + 0.01);
  auto row = c.close_interval(1.0);
  CHECK(row.condition == NetworkCondition::AdequateRelNoCong);
  CHECK(row.f_next == 16.0);
  CHECK(row.alpha == 1.0);
  CHECK(c.open_interval().index == 1);
  CHECK(c.open_interval().dr_o == 0);
  CHECK(c.open_interval().start == 1.0);

  // Two congested low intervals: the second one uses x = 2.
  for (int i = 0; i < 5; ++i) c.on_data(1.1, true, 1.2);
  row = c.close_interval(2.0);
  CHECK(row.condition == NetworkCondition::LowRelCong);
  CHECK(row.x == 1);
  CHECK(row.f_next == doctest::Approx(4.0));
  CHECK(c.bounds().f_max_observed == 16.0);
  for (int i = 0; i < 5; ++i) c.on_data(2.1, true, 2.2);
  row = c.close_interval(3.0);
  CHECK(row.x == 2);
  CHECK(row.f_next == doctest::Approx(std::pow(4.0, 0.25)));
  CHECK(c.open_interval().x == 3);

  // Silence: straight to the cap, x reset.
  row = c.close_interval(4.0);
  CHECK(row.condition == NetworkCondition::LowRelNoCong);
  CHECK(row.f_next == 50.0);
  CHECK(c.open_interval().x == 1);
}

TEST_CASE("one expansion step lands in band when deliveries scale linearly with frequency") {
  std::mt19937_64 g(8);
  std::uniform_real_distribution<double> slope(1.0, 40.0), start(0.2, 5.0);
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t dr_d = 100 + g() % 300;
    const double k = slope(g);  // on-time packets per Hz
    double f = start(g);
    if (k * f >= 0.95 * dr_d) f = 0.5 * dr_d / k;
    ReliabilityController c(targets(dr_d), {0.01, 1000.0, {}}, {}, f);
    auto feed = [&](double at) {
      const auto n = static_cast<std::uint64_t>(std::floor(k * c.frequency()));
      for (std::uint64_t p = 0; p < n; ++p) c.on_data(at, false, at + 0.01);
    };
    feed(0.0);
    const auto first = c.close_interval(1.0);
    if (first.dr_o == 0) continue;
    REQUIRE(first.condition == NetworkCondition::LowRelNoCong);
    feed(1.0);
    const auto second = c.close_interval(2.0);
    // Flooring costs at most one packet per count.
    CHECK(second.alpha >= 1.0 - 1.0 / dr_d);
    CHECK(second.alpha <= 1.0 + 1.0 / first.dr_o);
    if (first.dr_o >= 20) CHECK(second.condition == NetworkCondition::AdequateRelNoCong);
  }
}
