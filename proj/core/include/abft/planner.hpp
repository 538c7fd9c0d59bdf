#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "abft/core.hpp"
#include "abft/sim.hpp"

namespace abft::planner {

/// Maximum secondary-backoff time, 2^m * aSlotTime.
Micros t_max_us(int m, const TimingParams& timing = {});

/// Expected SSW frames per slot, (fss - N_waste(m)) * P_e(m, s, P).
double n_slot(int m, double s, double p_floor, int fss = kMaxFss);

struct MPlanRow {
  int m{0};
  int n_waste{0};
  int n_send{0};
  double pe{0.0};
  double n_slot{0.0};
  bool converged{true};

  friend bool operator==(const MPlanRow&, const MPlanRow&) = default;
};

struct MPlan {
  double s{0.0};
  double p_floor{1.0};
  std::vector<MPlanRow> rows;  // m = 1..5
  int best_m{1};

  friend bool operator==(const MPlan&, const MPlan&) = default;
};

/// Evaluates every m in [1, 5]; best_m is the argmax of n_slot, smallest m
/// on ties. Rows whose fixed point fails are flagged and skipped.
MPlan optimize_m(double s, double p_floor, int fss = kMaxFss);

enum class Estimator : std::uint8_t { Exact, Historical };

struct OverloadConfig {
  int n_th{6};
  Estimator estimator{Estimator::Historical};
};

/// Overload Indicator: 0 (legacy A-BFT) if s_estimate < n_th, else 1.
std::uint8_t overload_decision(int s_estimate, const OverloadConfig& cfg = {});

/// Hidden-contender lower bound from the last `window` BIs: successes plus
/// two per collided slot, averaged over the window.
int estimate_contenders(std::span<const BiResult> history, int window);

/// Contenders actually observed by the simulator, averaged over the window.
int exact_contenders(std::span<const BiResult> history, int window);

int estimate(std::span<const BiResult> history, int window, const OverloadConfig& cfg);

}  // namespace abft::planner
