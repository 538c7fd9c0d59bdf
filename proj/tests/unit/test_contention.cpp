#include <doctest.h>

#include <array>
#include <set>

#include "abft/contention.hpp"
#include "abft/errors.hpp"
#include "oracles/oracles.hpp"

using namespace abft;

namespace {

SbaParams sba(double p, int n, int m) { return SbaParams{p, n, m, Micros{5}}; }

StaState edmg(int fail = 0, int prohibit = 0) {
  StaState s;
  s.kind = StaKind::Edmg;
  s.fail_count = fail;
  s.prohibit_count = prohibit;
  return s;
}

}  // namespace

TEST_CASE("p_stage_bound") {
  CHECK(p_stage_bound(0, sba(0.3, 4, 3)) == doctest::Approx(1.0));
  CHECK(p_stage_bound(4, sba(0.5, 4, 3)) == doctest::Approx(0.5));
  CHECK(p_stage_bound(2, sba(0.5, 4, 3)) == doctest::Approx(0.75));
  CHECK_THROWS_AS(p_stage_bound(5, sba(0.5, 4, 3)), RangeError);
  CHECK_THROWS_AS(p_stage_bound(-1, sba(0.5, 4, 3)), RangeError);

  const SbaParams params = sba(0.2, 6, 3);
  for (int j = 1; j <= 6; ++j) {
    CHECK(p_stage_bound(j, params) < p_stage_bound(j - 1, params));
    CHECK(p_stage_bound(j, params) >= params.p_floor - 1e-15);
  }
}

TEST_CASE("entry_probability") {
  CHECK(entry_probability(0, sba(0.8, 4, 3)) == doctest::Approx(0.8));
  CHECK(entry_probability(4, sba(0.37, 4, 3)) == 1.0);
  CHECK(entry_probability(2, sba(0.5, 4, 3)) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(entry_probability(5, sba(0.5, 4, 3)), RangeError);

  // entry * bound == P for every j, and entry rises with j.
  for (double p : {0.1, 0.5, 0.8, 1.0}) {
    for (int n : {1, 3, 7}) {
      const SbaParams params = sba(p, n, 3);
      for (int j = 0; j <= n; ++j) {
        CHECK(std::abs(entry_probability(j, params) * p_stage_bound(j, params) - p) < 1e-12);
        if (j > 0 && p < 1.0) CHECK(entry_probability(j, params) > entry_probability(j - 1, params));
      }
    }
  }
}

TEST_CASE("p_phase_gate") {
  Rng rng(7);
  SUBCASE("saturated prohibition always admits") {
    for (int t = 0; t < 10000; ++t) CHECK(p_phase_gate(edmg(0, 4), sba(0.05, 4, 3), rng));
  }
  SUBCASE("P = 1 always admits") {
    for (int j = 0; j <= 4; ++j)
      for (int t = 0; t < 1000; ++t) CHECK(p_phase_gate(edmg(0, j), sba(1.0, 4, 3), rng));
  }
  SUBCASE("admission rate at j = 0 is P") {
    int admitted = 0;
    const int draws = 1000000;
    for (int t = 0; t < draws; ++t) admitted += p_phase_gate(edmg(), sba(0.5, 4, 3), rng) ? 1 : 0;
    CHECK(std::abs(admitted / double(draws) - 0.5) < 0.002);
  }
  SUBCASE("admission rate at intermediate j is P / P_j") {
    int admitted = 0;
    const int draws = 400000;
    for (int t = 0; t < draws; ++t) admitted += p_phase_gate(edmg(0, 2), sba(0.5, 4, 3), rng) ? 1 : 0;
    CHECK(std::abs(admitted / double(draws) - 2.0 / 3.0) < 0.004);
  }
}

TEST_CASE("select_slot regions") {
  Rng rng(11);
  const AbftLayout layout{8, 8, 16, {}};
  StaState dmg;
  dmg.kind = StaKind::Dmg;

  SUBCASE("legacy is uniform over the A-BFT Length slots") {
    std::array<int, 8> hits{};
    const int draws = 1000000;
    for (int t = 0; t < draws; ++t) {
      const int slot = select_slot(edmg(), layout, SchemeId::Legacy80211ad, rng);
      REQUIRE(slot >= 0);
      REQUIRE(slot < 8);
      ++hits[static_cast<std::size_t>(slot)];
    }
    for (int h : hits) CHECK(std::abs(h / double(draws) - 0.125) < 0.003);
  }
  SUBCASE("sa-bft: EDMG spans both regions, DMG stays in the first") {
    std::set<int> seen_edmg, seen_dmg;
    for (int t = 0; t < 20000; ++t) {
      seen_edmg.insert(select_slot(edmg(), layout, SchemeId::SaBft, rng));
      seen_dmg.insert(select_slot(dmg, layout, SchemeId::SaBft, rng));
    }
    CHECK(seen_edmg.size() == 16);
    CHECK(*seen_edmg.begin() == 0);
    CHECK(*seen_edmg.rbegin() == 15);
    CHECK(*seen_dmg.rbegin() == 7);
  }
  SUBCASE("sba-bft regions are disjoint") {
    std::set<int> seen_edmg, seen_dmg;
    for (int t = 0; t < 20000; ++t) {
      seen_edmg.insert(select_slot(edmg(), layout, SchemeId::SbaBft, rng));
      seen_dmg.insert(select_slot(dmg, layout, SchemeId::SbaBft, rng));
    }
    CHECK(seen_edmg == std::set<int>{8, 9, 10, 11, 12, 13, 14, 15});
    CHECK(seen_dmg == std::set<int>{0, 1, 2, 3, 4, 5, 6, 7});
  }
  SUBCASE("sba-bft needs an extended region for EDMG") {
    CHECK_THROWS_AS(select_slot(edmg(), AbftLayout{8, 0, 16, {}}, SchemeId::SbaBft, rng), ConfigError);
    CHECK_NOTHROW(select_slot(dmg, AbftLayout{8, 0, 16, {}}, SchemeId::SbaBft, rng));
  }
}

TEST_CASE("backoff windows halve per stage") {
  CHECK(backoff_window_subslots(0, sba(1, 3, 3)) == 8);
  CHECK(backoff_window_subslots(3, sba(1, 3, 3)) == 1);
  CHECK(backoff_window_subslots(2, sba(1, 5, 5)) == 8);
  CHECK_THROWS_AS(backoff_window_subslots(4, sba(1, 3, 3)), RangeError);
  for (int m = 1; m <= 5; ++m) {
    for (int i = 1; i <= m; ++i) {
      CHECK(backoff_window_subslots(i, sba(1, m, m)) * 2 == backoff_window_subslots(i - 1, sba(1, m, m)));
    }
  }
  // 8 subslots of aSlotTime = 40 us at m = 3.
  CHECK(backoff_window_subslots(0, sba(1, 3, 3)) * sba(1, 3, 3).w_min == Micros{40});
}

TEST_CASE("draw_backoff") {
  Rng rng(3);
  for (int t = 0; t < 1000; ++t) CHECK(draw_backoff(3, sba(1, 3, 3), rng) == 0);
  std::set<int> binary;
  for (int t = 0; t < 1000; ++t) binary.insert(draw_backoff(0, sba(1, 1, 1), rng));
  CHECK(binary == std::set<int>{0, 1});

  std::array<int, 8> hits{};
  const int draws = 1000000;
  for (int t = 0; t < draws; ++t) ++hits[static_cast<std::size_t>(draw_backoff(0, sba(1, 3, 3), rng))];
  for (int h : hits) CHECK(std::abs(h / double(draws) - 0.125) < 0.002);
}

TEST_CASE("slot_contest outcomes") {
  Rng rng(5);
  const SbaParams params = sba(1, 3, 3);

  CHECK(slot_contest(std::vector<int>{}, params, rng).kind == SlotContestOutcome::Kind::Idle);

  for (int stage = 0; stage <= 3; ++stage) {
    const auto single = slot_contest(std::vector<int>{stage}, params, rng);
    CHECK(single.is_success());
    CHECK(single.winner() == StationId{0});
  }

  SUBCASE("everyone at the last stage collides in subslot 0") {
    for (int c = 2; c <= 6; ++c) {
      const auto out = slot_contest(std::vector<int>(static_cast<std::size_t>(c), 3), params, rng);
      CHECK(out.is_collision());
      CHECK(out.subslot == 0);
      CHECK(out.stations.size() == static_cast<std::size_t>(c));
      CHECK(out.deferred.empty());
    }
  }

  SUBCASE("outcome partitions the contenders") {
    Rng gen(99);
    for (int t = 0; t < 2000; ++t) {
      std::vector<int> stages(1 + gen() % 6);
      for (int& s : stages) s = static_cast<int>(gen() % 4);
      const auto out = slot_contest(stages, params, rng);
      CHECK(out.stations.size() + out.deferred.size() == stages.size());
      CHECK(out.is_success() == (out.stations.size() == 1));
      std::set<std::uint32_t> ids;
      for (auto id : out.stations) ids.insert(id.value);
      for (auto id : out.deferred) ids.insert(id.value);
      CHECK(ids.size() == stages.size());
    }
  }

  SUBCASE("two stage-0 contenders succeed 56/64 of the time") {
    const auto exact = oracle::enumerate_equal_stage(2, 3);
    CHECK(exact.favourable == 56);
    CHECK(exact.total == 64);
    int wins = 0;
    const int trials = 1000000;
    const std::vector<int> stages{0, 0};
    for (int t = 0; t < trials; ++t) wins += slot_contest(stages, params, rng).is_success() ? 1 : 0;
    CHECK(std::abs(wins / double(trials) - 0.875) < 0.003);
  }
}

TEST_CASE("slot_contest matches enumeration for equal and mixed stages") {
  Rng rng(17);
  const int trials = 200000;
  struct Case {
    int m;
    std::vector<int> stages;
  };
  const std::vector<Case> cases{{2, {0, 0, 0}}, {3, {0, 0, 0, 0}}, {4, {0, 0}}, {3, {0, 1}},
                                {3, {0, 2, 2}}, {5, {0, 0, 0}},    {3, {1, 1, 2, 3}}};
  for (const Case& c : cases) {
    const SbaParams params = sba(1, c.m, c.m);
    std::vector<int> windows;
    for (int s : c.stages) windows.push_back(1 << (c.m - s));
    const double exact = oracle::enumerate_unique_minimum(windows).ratio();
    int wins = 0;
    for (int t = 0; t < trials; ++t) wins += slot_contest(c.stages, params, rng).is_success() ? 1 : 0;
    CAPTURE(c.m);
    CHECK(std::abs(wins / double(trials) - exact) < 0.006);
  }
}

TEST_CASE("frames wasted and sendable") {
  const std::array<int, 5> wasted{1, 2, 3, 5, 10};
  const std::array<int, 5> sendable{15, 14, 13, 11, 6};
  for (int m = 1; m <= 5; ++m) {
    // ceil(2^m * 5 / 16) in exact integer arithmetic.
    CHECK(frames_wasted(m) == ((1 << m) * 5 + 15) / 16);
    CHECK(frames_wasted(m) == wasted[static_cast<std::size_t>(m - 1)]);
    CHECK(frames_sendable(m, 16) == sendable[static_cast<std::size_t>(m - 1)]);
  }
  CHECK(frames_sendable(5, 4) == 0);
  CHECK_THROWS_AS(frames_wasted(0), RangeError);
  CHECK_THROWS_AS(frames_wasted(6), RangeError);
  CHECK_THROWS_AS(frames_sendable(6, 16), RangeError);

  CHECK(frames_wasted_at(0) == 0);
  CHECK(frames_wasted_at(1) == 1);
  CHECK(frames_wasted_at(3) == 1);
  CHECK(frames_wasted_at(4) == 2);
  CHECK(frames_wasted_at(7) == 3);
}

TEST_CASE("validate_sba") {
  CHECK_NOTHROW(validate_sba(sba(1.0, 1, 1)));
  CHECK_THROWS_AS(validate_sba(sba(0.0, 3, 3)), RangeError);
  CHECK_THROWS_AS(validate_sba(sba(1.1, 3, 3)), RangeError);
  CHECK_THROWS_AS(validate_sba(sba(0.5, 0, 3)), RangeError);
  CHECK_THROWS_AS(validate_sba(sba(0.5, 3, 6)), RangeError);
  CHECK_THROWS_AS(validate_sba(sba(0.5, 3, 0)), RangeError);
}
