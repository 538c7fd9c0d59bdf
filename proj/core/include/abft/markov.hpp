#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "abft/errors.hpp"

namespace abft::markov {

/// Inputs of the secondary-backoff chain. Windows are counted in subslots,
/// W_i = 2^(m - i). The analytic model requires n == m.
struct ChainParams {
  double p_floor{1.0};
  int m{3};
  int n{3};
  double s{1.0};  // average contenders per A-BFT slot
};

ChainParams validate_chain(const ChainParams& params);

/// (j, i, k): prohibitions, backoff stage, backoff timer. k = -1 is the
/// P-phase gate state.
struct ChainState {
  int j{0};
  int i{0};
  int k{-1};

  friend auto operator<=>(const ChainState&, const ChainState&) = default;
};

/// Dense enumeration of the chain's states, stage by stage, k ascending
/// from -1.
class StateSpace {
 public:
  explicit StateSpace(int m);

  int m() const { return m_; }
  std::size_t size() const { return states_.size(); }
  std::span<const ChainState> states() const { return states_; }
  const ChainState& at(std::size_t index) const { return states_[index]; }

  bool contains(const ChainState& s) const;
  /// Throws RangeError if the state is outside the domain.
  std::size_t index_of(const ChainState& s) const;

  int window(int stage) const { return 1 << (m_ - stage); }

 private:
  int m_;
  std::vector<std::size_t> offsets_;
  std::vector<ChainState> states_;
};

/// P{to | from} from the one-step transition structure.
double transition_probability(const ChainState& from, const ChainState& to, double pe,
                              const ChainParams& params);

struct StationaryDistribution {
  double b000{0.0};
  std::vector<double> probs;  // indexed like StateSpace(m)
  double normalization_residual{0.0};
};

StationaryDistribution stationary_distribution(double pe, const ChainParams& params);

/// Closed-form series b000 * (1 + sum_i (1-pe)^i P^i / prod_{d<=i} P_d).
double p_tr_of(double b000, double pe, const ChainParams& params);

/// Sum over backoff-timer-zero states, b_{j,i,0}.
double transmit_probability(const StationaryDistribution& dist, const ChainParams& params);

/// Secondary-backoff success probability with c = ceil(s * p_tr) contenders.
double pe_of(double p_tr, double s, int m);

/// Same with an explicit contender count c: 1 if c <= 1, else
/// sum_{j=0}^{K-1} c (K-1-j)^(c-1) / K^c, K = 2^m.
double pe_of_count(std::int64_t c, int m);

struct ChainSolution {
  double b000{0.0};
  double p_tr{0.0};         // sum of b_{j,i,0}
  double p_tr_series{0.0};  // closed-form series at the same b000
  double p_e{1.0};
  std::int64_t contenders{1};  // ceil(s * p_tr)
  std::vector<ChainState> states;
  std::vector<double> state_probs;
  double residual{0.0};              // |sum state_probs - 1|
  double fixed_point_residual{0.0};  // |p_e - pe_of(p_tr)|
  int iterations{0};
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, ChainSolution last)
      : NumericalError(what), last_(std::move(last)) {}
  const ChainSolution& last_iterate() const { return last_; }

 private:
  ChainSolution last_;
};

struct SolverOptions {
  double tol{1e-10};
  int max_iter{10000};
  double damping{0.5};
};

/// Damped iteration pe <- (1-l) pe + l pe_of(p_tr(stationary(pe))) from
/// pe = 1, stopping once |pe - pe_of(p_tr(pe))| < tol.
ChainSolution solve_fixed_point(const ChainParams& params, SolverOptions options = {});

/// Step-by-step simulation of the chain with fixed pe, started at (0,0,-1).
/// Returns visit frequencies indexed like StateSpace(m).
std::vector<double> chain_monte_carlo(const ChainParams& params, double pe, std::int64_t steps,
                                      std::uint64_t seed);

}  // namespace abft::markov
