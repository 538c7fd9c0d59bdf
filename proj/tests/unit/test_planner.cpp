#include <doctest.h>

#include "abft/markov.hpp"
#include "abft/planner.hpp"

using namespace abft;
using namespace abft::planner;

namespace {

BiResult bi(int successes, int collisions, int contenders) {
  BiResult r;
  r.successes = successes;
  r.contenders = contenders;
  for (int k = 0; k < successes; ++k) r.slots.push_back({SlotContestOutcome::Kind::Success, 0, {StationId{}}, {}});
  for (int k = 0; k < collisions; ++k) {
    r.slots.push_back({SlotContestOutcome::Kind::Collision, 0, {StationId{}, StationId{}}, {}});
  }
  return r;
}

}  // namespace

TEST_CASE("t_max doubles per stage") {
  const std::vector<long> expected{10, 20, 40, 80, 160};
  for (int m = 1; m <= 5; ++m) CHECK(t_max_us(m).count() == expected[static_cast<std::size_t>(m - 1)]);
  CHECK_THROWS_AS(t_max_us(0), RangeError);
}

TEST_CASE("n_slot at a light load is the sendable frame count") {
  const std::vector<double> expected{15, 14, 13, 11, 6};
  for (int m = 1; m <= 5; ++m) CHECK(n_slot(m, 0.5, 1.0) == expected[static_cast<std::size_t>(m - 1)]);
  CHECK(n_slot(3, 0.5, 1.0, 8) == 5.0);
  CHECK_THROWS_AS(n_slot(3, 1.0, 1.0, 0), RangeError);
}

TEST_CASE("optimize_m") {
  const MPlan light = optimize_m(0.5, 1.0);
  CHECK(light.rows.size() == 5);
  CHECK(light.best_m == 1);
  for (const MPlanRow& row : light.rows) {
    CHECK(row.converged);
    CHECK(row.pe == 1.0);
    CHECK(row.n_send + row.n_waste == 16);
  }

  for (double s : {2.0, 8.0, 20.0, 30.0}) {
    for (double p : {0.5, 1.0}) {
      const MPlan plan = optimize_m(s, p);
      CHECK(plan.rows.size() == 5);
      double best = 0.0;
      for (const MPlanRow& row : plan.rows) {
        CHECK(row.n_slot == doctest::Approx(row.n_send * row.pe));
        CHECK(row.pe == doctest::Approx(markov::solve_fixed_point({p, row.m, row.m, s}).p_e));
        best = std::max(best, row.n_slot);
      }
      CHECK(plan.rows[static_cast<std::size_t>(plan.best_m - 1)].n_slot == best);
      for (int m = 1; m < plan.best_m; ++m) CHECK(plan.rows[static_cast<std::size_t>(m - 1)].n_slot < best);
    }
  }
}

TEST_CASE("overload decision thresholds at n_th") {
  CHECK(overload_decision(5) == 0);
  CHECK(overload_decision(6) == 1);
  CHECK(overload_decision(0, {1, Estimator::Exact}) == 0);
  CHECK(overload_decision(20, {30, Estimator::Exact}) == 0);
  CHECK_THROWS_AS(overload_decision(3, {0, Estimator::Exact}), RangeError);
  CHECK_THROWS_AS(overload_decision(-1), RangeError);
}

TEST_CASE("contender estimation") {
  const std::vector<BiResult> none;
  CHECK(estimate_contenders(none, 4) == 0);

  const std::vector<BiResult> history{bi(3, 0, 3), bi(2, 2, 9), bi(4, 1, 7)};
  CHECK(estimate_contenders(std::span(history).first(1), 1) == 3);
  CHECK(estimate_contenders(history, 1) == 6);
  CHECK(estimate_contenders(history, 2) == 6);
  CHECK(estimate_contenders(history, 10) == 5);
  CHECK(exact_contenders(history, 2) == 8);
  CHECK(exact_contenders(history, 3) == 6);
  CHECK(estimate(history, 3, {6, Estimator::Exact}) == 6);
  CHECK(estimate(history, 3, {6, Estimator::Historical}) == 5);
  CHECK_THROWS_AS(estimate_contenders(history, 0), RangeError);

  // The estimate is a lower bound on what the simulator saw.
  for (const BiResult& r : history) {
    const std::vector<BiResult> one{r};
    CHECK(estimate_contenders(one, 1) <= exact_contenders(one, 1));
  }
}
