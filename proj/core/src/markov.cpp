#include "abft/markov.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "abft/rng.hpp"

namespace abft::markov {

ChainParams validate_chain(const ChainParams& params) {
  if (!(params.p_floor > 0.0 && params.p_floor <= 1.0)) {
    throw RangeError("p_floor = " + std::to_string(params.p_floor) + " outside (0, 1]");
  }
  require_in_range("m", params.m, 1, 5);
  if (params.n != params.m) {
    throw RangeError("n = " + std::to_string(params.n) + " must equal m = " +
                     std::to_string(params.m) + " for the analytic chain");
  }
  if (!(params.s >= 0.0) || !std::isfinite(params.s)) {
    throw RangeError("s = " + std::to_string(params.s) + " must be a finite value >= 0");
  }
  return params;
}

StateSpace::StateSpace(int m) : m_(m) {
  require_in_range("m", m, 1, 5);
  for (int i = 0; i <= m; ++i) {
    offsets_.push_back(states_.size());
    for (int k = -1; k < window(i); ++k) states_.push_back({i, i, k});
  }
}

bool StateSpace::contains(const ChainState& s) const {
  return s.j == s.i && s.i >= 0 && s.i <= m_ && s.k >= -1 && s.k < window(s.i);
}

std::size_t StateSpace::index_of(const ChainState& s) const {
  if (!contains(s)) {
    throw RangeError("state (" + std::to_string(s.j) + "," + std::to_string(s.i) + "," +
                     std::to_string(s.k) + ") outside the chain with m = " + std::to_string(m_));
  }
  return offsets_[static_cast<std::size_t>(s.i)] + static_cast<std::size_t>(s.k + 1);
}

namespace {

void require_probability(const char* name, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw RangeError(std::string(name) + " = " + std::to_string(p) + " outside [0, 1]");
  }
}

// P / P_i, the admission probability of the P phase at stage i. Pinned to 1
// at i = n, where P_n = P.
std::vector<double> admission(const ChainParams& params) {
  std::vector<double> q(static_cast<std::size_t>(params.m) + 1);
  for (int i = 0; i <= params.m; ++i) {
    const double bound = 1.0 - i * (1.0 - params.p_floor) / params.n;
    q[static_cast<std::size_t>(i)] = i == params.n ? 1.0 : params.p_floor / bound;
  }
  return q;
}

}  // namespace

double transition_probability(const ChainState& from, const ChainState& to, double pe,
                              const ChainParams& params) {
  validate_chain(params);
  require_probability("pe", pe);
  const StateSpace space(params.m);
  space.index_of(from);
  space.index_of(to);

  const int i = from.i;
  if (from.k >= 1) {
    return to == ChainState{from.j, i, from.k - 1} ? 1.0 : 0.0;
  }
  if (from.k == 0) {
    const int next = std::min(i + 1, params.m);
    double p = 0.0;
    if (to == ChainState{0, 0, -1}) p += pe;
    if (to == ChainState{next, next, -1}) p += 1.0 - pe;
    return p;
  }
  const double q = admission(params)[static_cast<std::size_t>(i)];
  double p = 0.0;
  if (to.i == i && to.k >= 0) p += q / space.window(i);
  if (i < params.m && to == ChainState{i + 1, i + 1, -1}) p += 1.0 - q;
  return p;
}

StationaryDistribution stationary_distribution(double pe, const ChainParams& params) {
  validate_chain(params);
  require_probability("pe", pe);
  const int m = params.m;
  const std::vector<double> q = admission(params);
  const StateSpace space(m);

  // Mass of the P-phase states b_{i,i,-1}, up to normalization. Balance gives
  // x_i = x_{i-1} (1 - pe q_{i-1}) below the cap and pe x_m = x_{m-1} (1 - pe q_{m-1}).
  std::vector<double> gate(static_cast<std::size_t>(m) + 1, 0.0);
  if (pe > 0.0) {
    gate[0] = 1.0;
    for (int i = 1; i < m; ++i) gate[i] = gate[i - 1] * (1.0 - pe * q[i - 1]);
    gate[m] = gate[m - 1] * (1.0 - pe * q[m - 1]) / pe;
  } else {
    gate[m] = 1.0;  // every station ends up stuck at the last stage
  }

  StationaryDistribution dist;
  dist.probs.assign(space.size(), 0.0);
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    const ChainState& s = space.at(idx);
    const double x = gate[static_cast<std::size_t>(s.i)];
    if (s.k < 0) {
      dist.probs[idx] = x;
    } else {
      const int w = space.window(s.i);
      dist.probs[idx] = static_cast<double>(w - s.k) / w * q[static_cast<std::size_t>(s.i)] * x;
    }
  }

  const double total = std::accumulate(dist.probs.begin(), dist.probs.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalError("stationary normalization sum " + std::to_string(total) + " is not positive");
  }
  for (double& p : dist.probs) p /= total;
  dist.b000 = dist.probs[space.index_of({0, 0, 0})];
  dist.normalization_residual =
      std::abs(std::accumulate(dist.probs.begin(), dist.probs.end(), 0.0) - 1.0);
  return dist;
}

double p_tr_of(double b000, double pe, const ChainParams& params) {
  validate_chain(params);
  require_probability("b000", b000);
  require_probability("pe", pe);
  double series = 1.0;
  double bound_product = 1.0;
  for (int i = 1; i <= params.m; ++i) {
    bound_product *= 1.0 - i * (1.0 - params.p_floor) / params.n;
    series += std::pow(1.0 - pe, i) * std::pow(params.p_floor, i) / bound_product;
  }
  return b000 * series;
}

double transmit_probability(const StationaryDistribution& dist, const ChainParams& params) {
  const StateSpace space(params.m);
  double sum = 0.0;
  for (int i = 0; i <= params.m; ++i) sum += dist.probs[space.index_of({i, i, 0})];
  return sum;
}

double pe_of_count(std::int64_t c, int m) {
  require_in_range("m", m, 1, 5);
  if (c <= 1) return 1.0;
  const double slots = static_cast<double>(1 << m);
  const double cf = static_cast<double>(c);
  double sum = 0.0;
  // The first station alone in subslot j, the other c-1 strictly later.
  for (int j = 0; j < (1 << m); ++j) {
    sum += cf / slots * std::pow((slots - 1.0 - j) / slots, cf - 1.0);
  }
  return sum;
}

double pe_of(double p_tr, double s, int m) {
  const double load = s * p_tr;
  if (!(load >= 0.0) || !std::isfinite(load)) {
    throw RangeError("s * p_tr = " + std::to_string(load) + " must be a finite value >= 0");
  }
  return pe_of_count(static_cast<std::int64_t>(std::ceil(load)), m);
}

ChainSolution solve_fixed_point(const ChainParams& params, SolverOptions options) {
  validate_chain(params);
  if (!(options.tol > 0.0)) throw RangeError("tol must be > 0");
  if (options.max_iter < 1) throw RangeError("max_iter must be >= 1");
  if (!(options.damping > 0.0 && options.damping <= 1.0)) throw RangeError("damping outside (0, 1]");

  const StateSpace space(params.m);
  auto make_solution = [&](double pe, const StationaryDistribution& dist, double p_tr, double target,
                           int iterations) {
    ChainSolution sol;
    sol.b000 = dist.b000;
    sol.p_tr = p_tr;
    sol.p_tr_series = p_tr_of(dist.b000, pe, params);
    sol.p_e = pe;
    sol.contenders = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(params.s * p_tr)));
    sol.states.assign(space.states().begin(), space.states().end());
    sol.state_probs = dist.probs;
    sol.residual = dist.normalization_residual;
    sol.fixed_point_residual = std::abs(pe - target);
    sol.iterations = iterations;
    return sol;
  };

  double pe = 1.0;
  for (int iter = 0;; ++iter) {
    const StationaryDistribution dist = stationary_distribution(pe, params);
    const double p_tr = transmit_probability(dist, params);
    const double target = pe_of(p_tr, params.s, params.m);
    if (std::abs(target - pe) < options.tol) return make_solution(pe, dist, p_tr, target, iter);
    if (iter >= options.max_iter) {
      throw ConvergenceError("fixed point did not converge within " + std::to_string(options.max_iter) +
                                 " iterations",
                             make_solution(pe, dist, p_tr, target, iter));
    }
    pe = (1.0 - options.damping) * pe + options.damping * target;
  }
}

std::vector<double> chain_monte_carlo(const ChainParams& params, double pe, std::int64_t steps,
                                      std::uint64_t seed) {
  validate_chain(params);
  require_probability("pe", pe);
  if (steps < 1) throw RangeError("steps must be >= 1");

  const StateSpace space(params.m);
  const std::vector<double> q = admission(params);
  std::vector<std::int64_t> visits(space.size(), 0);
  Rng rng = make_stream(seed, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  int stage = 0;
  int timer = -1;
  for (std::int64_t t = 0; t < steps; ++t) {
    ++visits[space.index_of({stage, stage, timer})];
    if (timer >= 1) {
      --timer;
    } else if (timer == 0) {
      if (unit(rng) < pe) {
        stage = 0;
      } else {
        stage = std::min(stage + 1, params.m);
      }
      timer = -1;
    } else if (unit(rng) < q[static_cast<std::size_t>(stage)]) {
      std::uniform_int_distribution<int> pick(0, space.window(stage) - 1);
      timer = pick(rng);
    } else {
      ++stage;  // q = 1 at the cap, so stage < m here
    }
  }

  std::vector<double> freq(space.size());
  for (std::size_t k = 0; k < visits.size(); ++k) {
    freq[k] = static_cast<double>(visits[k]) / static_cast<double>(steps);
  }
  return freq;
}

}  // namespace abft::markov
