#include <benchmark/benchmark.h>

#include "abft/abft.hpp"

using namespace abft;

namespace {

ScenarioConfig scenario(SchemeId scheme, int n) {
  ScenarioConfig cfg;
  cfg.scheme = scheme;
  cfg.layout = AbftLayout{8, scheme == SchemeId::Legacy80211ad ? 0 : 8, 16, {}};
  if (scheme == SchemeId::SbaBft) cfg.sba = SbaParams{1.0, 3, 3, Micros{5}};
  cfg.n_edmg = n;
  return validate_config(cfg);
}

void BM_RunBi(benchmark::State& state) {
  const auto scheme = static_cast<SchemeId>(state.range(0));
  const auto n = static_cast<int>(state.range(1));
  const ScenarioConfig cfg = scenario(scheme, n);
  const std::vector<StaState> initial = make_population(0, n);
  std::vector<StaState> population;
  Rng rng(1);
  BiResult bi;
  for (auto _ : state) {
    population = initial;
    run_bi_into(population, cfg, rng, bi);
    benchmark::DoNotOptimize(bi.successes);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RunBi)->ArgsProduct({{0, 1, 2}, {8, 30}});

void BM_SlotContest(benchmark::State& state) {
  const std::vector<int> stages(static_cast<std::size_t>(state.range(0)), 0);
  const SbaParams params{1.0, 3, 3, Micros{5}};
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(slot_contest(stages, params, rng).kind);
}
BENCHMARK(BM_SlotContest)->Arg(2)->Arg(8);

void BM_SolveFixedPoint(benchmark::State& state) {
  const markov::ChainParams params{0.8, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 20.0};
  for (auto _ : state) benchmark::DoNotOptimize(markov::solve_fixed_point(params).p_e);
}
BENCHMARK(BM_SolveFixedPoint)->DenseRange(1, 5);

void BM_PeOfCount(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(markov::pe_of_count(state.range(0), 5));
}
BENCHMARK(BM_PeOfCount)->Arg(3)->Arg(30);

void BM_OptimizeM(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(planner::optimize_m(12.0, 0.8).best_m);
}
BENCHMARK(BM_OptimizeM);

void BM_CodecRoundTrip(benchmark::State& state) {
  codec::BeaconIntervalControl bic{8, 16, true, 8, 0, 0};
  for (auto _ : state) {
    const codec::Element el = codec::encode_bic(bic);
    bic = codec::decode_bic(el);
    benchmark::DoNotOptimize(bic.fss);
  }
}
BENCHMARK(BM_CodecRoundTrip);

}  // namespace

BENCHMARK_MAIN();
