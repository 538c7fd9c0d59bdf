#include "abft/planner.hpp"

#include <algorithm>
#include <cmath>

#include "abft/contention.hpp"
#include "abft/errors.hpp"
#include "abft/markov.hpp"

namespace abft::planner {

Micros t_max_us(int m, const TimingParams& timing) {
  require_in_range("m", m, 1, kMaxBackoffStage);
  return (1 << m) * timing.a_slot_time;
}

namespace {

double fixed_point_pe(int m, double s, double p_floor) {
  return markov::solve_fixed_point(markov::ChainParams{p_floor, m, m, s}).p_e;
}

}  // namespace

double n_slot(int m, double s, double p_floor, int fss) {
  require_in_range("m", m, 1, kMaxBackoffStage);
  require_in_range("fss", fss, 1, kMaxFss);
  return frames_sendable(m, fss) * fixed_point_pe(m, s, p_floor);
}

MPlan optimize_m(double s, double p_floor, int fss) {
  require_in_range("fss", fss, 1, kMaxFss);
  MPlan plan;
  plan.s = s;
  plan.p_floor = p_floor;
  double best = -1.0;
  for (int m = 1; m <= kMaxBackoffStage; ++m) {
    MPlanRow row;
    row.m = m;
    row.n_waste = frames_wasted(m);
    row.n_send = frames_sendable(m, fss);
    try {
      row.pe = fixed_point_pe(m, s, p_floor);
      row.n_slot = row.n_send * row.pe;
    } catch (const markov::ConvergenceError& e) {
      row.converged = false;
      row.pe = e.last_iterate().p_e;
      row.n_slot = row.n_send * row.pe;
    }
    if (row.converged && row.n_slot > best) {
      best = row.n_slot;
      plan.best_m = m;
    }
    plan.rows.push_back(row);
  }
  if (best < 0.0) throw NumericalError("no backoff cap produced a converged fixed point");
  return plan;
}

std::uint8_t overload_decision(int s_estimate, const OverloadConfig& cfg) {
  if (cfg.n_th < 1) throw RangeError("n_th must be >= 1");
  if (s_estimate < 0) throw RangeError("s_estimate must be >= 0");
  return s_estimate < cfg.n_th ? 0 : 1;
}

namespace {

template <typename PerBi>
int window_mean(std::span<const BiResult> history, int window, PerBi per_bi) {
  if (window < 1) throw RangeError("window must be >= 1");
  const std::size_t count = std::min(history.size(), static_cast<std::size_t>(window));
  if (count == 0) return 0;
  double sum = 0.0;
  for (const BiResult& bi : history.last(count)) sum += per_bi(bi);
  return static_cast<int>(std::lround(sum / static_cast<double>(count)));
}

}  // namespace

int estimate_contenders(std::span<const BiResult> history, int window) {
  return window_mean(history, window, [](const BiResult& bi) {
    return std::max(bi.successes, bi.successes + 2 * bi.collision_slots());
  });
}

int exact_contenders(std::span<const BiResult> history, int window) {
  return window_mean(history, window, [](const BiResult& bi) { return bi.contenders; });
}

int estimate(std::span<const BiResult> history, int window, const OverloadConfig& cfg) {
  return cfg.estimator == Estimator::Exact ? exact_contenders(history, window)
                                           : estimate_contenders(history, window);
}

}  // namespace abft::planner
