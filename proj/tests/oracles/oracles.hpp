#pragma once

// Independent reference computations used by the unit and acceptance suites.
// Nothing here calls into the library's contention or markov code paths.

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace abft::oracle {

/// Expected singletons when n balls fall uniformly into `bins` bins.
inline double expected_singletons(int n, int bins) {
  return n * std::pow(1.0 - 1.0 / bins, n - 1);
}

struct Count {
  std::uint64_t favourable{0};
  std::uint64_t total{0};
  double ratio() const { return static_cast<double>(favourable) / static_cast<double>(total); }
};

/// Enumerates every assignment of subslots (draw k from [0, windows[k]) for
/// contender k) and counts those whose minimum is held by exactly one contender.
inline Count enumerate_unique_minimum(const std::vector<int>& windows) {
  Count count;
  std::vector<int> draw(windows.size(), 0);
  while (true) {
    ++count.total;
    int best = 1 << 30;
    int holders = 0;
    for (int d : draw) {
      if (d < best) {
        best = d;
        holders = 1;
      } else if (d == best) {
        ++holders;
      }
    }
    if (!draw.empty() && holders == 1) ++count.favourable;
    std::size_t pos = 0;
    while (pos < draw.size() && ++draw[pos] == windows[pos]) draw[pos++] = 0;
    if (pos == draw.size()) break;
  }
  return count;
}

/// c contenders, all drawing from K = 2^m subslots.
inline Count enumerate_equal_stage(int c, int m) {
  return enumerate_unique_minimum(std::vector<int>(static_cast<std::size_t>(c), 1 << m));
}

inline double binomial_pmf(int n, int k, double p) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) *
         std::pow(p, k) * std::pow(1.0 - p, n - k);
}

/// Expected SBA-BFT successes: n stations at stage 0, uniform over `slots`,
/// with the per-slot success rate taken from brute-force enumeration
/// (tractable for n <= 6 at m <= 3).
inline double expected_backoff_successes(int n, int slots, int m) {
  double per_slot = 0.0;
  for (int c = 1; c <= n; ++c) {
    per_slot += binomial_pmf(n, c, 1.0 / slots) * enumerate_equal_stage(c, m).ratio();
  }
  return slots * per_slot;
}

// --- explicit one-step chain --------------------------------------------

struct ChainKey {
  int stage;
  int timer;
  friend auto operator<=>(const ChainKey&, const ChainKey&) = default;
};

struct ExplicitChain {
  std::vector<ChainKey> keys;
  std::map<ChainKey, int> index;
  Eigen::MatrixXd T;  // row-stochastic, T(from, to)
};

/// Builds the one-step transition matrix item by item: timer countdown,
/// success back to (0,0,-1), failure to the next P phase (self-loop at the
/// cap), admission spread (P/P_i)/W_i, re-prohibition 1 - P/P_i.
inline ExplicitChain build_chain(double P, int m, double pe) {
  ExplicitChain chain;
  for (int i = 0; i <= m; ++i) {
    for (int k = -1; k < (1 << (m - i)); ++k) {
      chain.index[{i, k}] = static_cast<int>(chain.keys.size());
      chain.keys.push_back({i, k});
    }
  }
  const int n = m;
  auto bound = [&](int j) { return 1.0 - j * (1.0 - P) / n; };
  const auto size = static_cast<Eigen::Index>(chain.keys.size());
  chain.T = Eigen::MatrixXd::Zero(size, size);
  auto add = [&](ChainKey from, ChainKey to, double p) { chain.T(chain.index[from], chain.index[to]) += p; };

  for (int i = 0; i <= m; ++i) {
    const int w = 1 << (m - i);
    for (int k = 1; k < w; ++k) add({i, k}, {i, k - 1}, 1.0);
    add({i, 0}, {0, -1}, pe);
    add({i, 0}, {std::min(i + 1, m), -1}, 1.0 - pe);
    const double admit = P / bound(i);
    for (int k = 0; k < w; ++k) add({i, -1}, {i, k}, admit / w);
    if (i < m) add({i, -1}, {i + 1, -1}, 1.0 - admit);
  }
  return chain;
}

/// pi T = pi, sum pi = 1, by a dense linear solve.
inline Eigen::VectorXd generic_stationary(const Eigen::MatrixXd& T) {
  const Eigen::Index n = T.rows();
  Eigen::MatrixXd A = T.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  return A.fullPivLu().solve(b);
}

}  // namespace abft::oracle
