#include "abft/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "abft/errors.hpp"

namespace abft {

ScenarioConfig validate_config(const ScenarioConfig& config) {
  ScenarioConfig cfg = config;
  validate_layout(cfg.layout);
  if (cfg.n_dmg < 0) throw ConfigError("n_dmg must be >= 0");
  if (cfg.n_edmg < 0) throw ConfigError("n_edmg must be >= 0");
  if (cfg.n_dmg + cfg.n_edmg < 1) throw ConfigError("n_dmg + n_edmg must be >= 1");
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.n_bi < 1) throw ConfigError("n_bi must be >= 1");
  if (cfg.workers < 0) throw ConfigError("workers must be >= 0");
  if (cfg.scheme == SchemeId::SbaBft) {
    if (!cfg.sba) throw ConfigError("sba: parameters are required for scheme sba-bft");
    validate_sba(*cfg.sba);
    if (cfg.n_edmg > 0 && cfg.layout.e_abft_length < 1) {
      throw ConfigError("layout.e_abft_length: sba-bft with EDMG stations needs >= 1 extended slot");
    }
  }
  if (cfg.population_mode == PopulationMode::OneShot) cfg.n_bi = 1;
  return cfg;
}

int BiResult::collision_slots() const {
  return static_cast<int>(std::count_if(slots.begin(), slots.end(),
                                        [](const SlotContestOutcome& o) { return o.is_collision(); }));
}

std::vector<StaState> make_population(int n_dmg, int n_edmg) {
  std::vector<StaState> population;
  population.reserve(static_cast<std::size_t>(n_dmg + n_edmg));
  std::uint32_t next = 0;
  for (int k = 0; k < n_dmg; ++k) population.push_back({StationId{next++}, StaKind::Dmg});
  for (int k = 0; k < n_edmg; ++k) population.push_back({StationId{next++}, StaKind::Edmg});
  return population;
}

namespace {

void record_loss(StaState& sta, const SbaParams& sba) {
  sta.fail_count = std::min(sta.fail_count + 1, sba.m_max);
  sta.prohibit_count = std::min(sta.prohibit_count + 1, sba.n_max);
}

void record_win(StaState& sta, PopulationMode mode) {
  switch (mode) {
    case PopulationMode::OneShot:
      break;
    case PopulationMode::Drain:
      sta.trained = true;
      break;
    case PopulationMode::Saturated:
      sta.fail_count = 0;
      sta.prohibit_count = 0;
      break;
  }
}

}  // namespace

void run_bi_into(std::span<StaState> population, const ScenarioConfig& config, Rng& rng,
                 BiResult& out) {
  const AbftLayout& layout = config.layout;
  const int n_slots = layout.total_slots();
  const bool sba = config.scheme == SchemeId::SbaBft;

  thread_local std::vector<std::vector<Contender>> buckets;
  buckets.resize(static_cast<std::size_t>(n_slots));
  for (auto& b : buckets) b.clear();

  out.slots.resize(static_cast<std::size_t>(n_slots));
  out.successes = 0;
  out.ssw_frames_sent = 0;
  out.contenders = 0;
  out.admitted_edmg = 0;
  out.prohibited_edmg = 0;

  for (std::size_t idx = 0; idx < population.size(); ++idx) {
    StaState& sta = population[idx];
    if (sta.trained) continue;
    if (sba && sta.kind == StaKind::Edmg) {
      if (!p_phase_gate(sta, *config.sba, rng)) {
        sta.prohibit_count = std::min(sta.prohibit_count + 1, config.sba->n_max);
        ++out.prohibited_edmg;
        continue;
      }
      ++out.admitted_edmg;
    }
    const int slot = select_slot(sta, layout, config.scheme, rng);
    buckets[static_cast<std::size_t>(slot)].push_back(
        {StationId{static_cast<std::uint32_t>(idx)}, sta.fail_count});
    ++out.contenders;
  }

  auto to_station = [&](StationId& id) { id = population[id.value].id; };

  for (int slot = 0; slot < n_slots; ++slot) {
    const auto& bucket = buckets[static_cast<std::size_t>(slot)];
    SlotContestOutcome& outcome = out.slots[static_cast<std::size_t>(slot)];
    const bool backoff_region = sba && slot >= layout.abft_length;

    if (backoff_region) {
      slot_contest_into(bucket, *config.sba, rng, outcome);
      for (const StationId& id : outcome.deferred) record_loss(population[id.value], *config.sba);
      if (outcome.is_collision()) {
        for (const StationId& id : outcome.stations) record_loss(population[id.value], *config.sba);
      }
    } else {
      outcome.stations.clear();
      outcome.deferred.clear();
      outcome.subslot = 0;
      for (const Contender& c : bucket) outcome.stations.push_back(c.id);
      outcome.kind = bucket.empty()       ? SlotContestOutcome::Kind::Idle
                     : bucket.size() == 1 ? SlotContestOutcome::Kind::Success
                                          : SlotContestOutcome::Kind::Collision;
    }

    if (outcome.is_success()) {
      ++out.successes;
      record_win(population[outcome.winner().value], config.population_mode);
      if (!backoff_region) {
        out.ssw_frames_sent += layout.fss;
      } else if (config.waste == WasteAccounting::WorstCase) {
        out.ssw_frames_sent += frames_sendable(config.sba->m_max, layout.fss, layout.timing);
      } else {
        out.ssw_frames_sent +=
            std::max(0, layout.fss - frames_wasted_at(outcome.subslot, layout.timing));
      }
    }

    std::for_each(outcome.stations.begin(), outcome.stations.end(), to_station);
    std::for_each(outcome.deferred.begin(), outcome.deferred.end(), to_station);
  }
}

std::pair<BiResult, std::vector<StaState>> run_bi(std::vector<StaState> population,
                                                  const ScenarioConfig& config, Rng& rng) {
  const ScenarioConfig cfg = validate_config(config);
  for (const StaState& sta : population) {
    if (sta.fail_count < 0 || sta.prohibit_count < 0) throw RangeError("station counters must be >= 0");
    if (cfg.sba && (sta.fail_count > cfg.sba->m_max || sta.prohibit_count > cfg.sba->n_max)) {
      throw RangeError("station counters exceed m_max / n_max");
    }
  }
  BiResult result;
  run_bi_into(population, cfg, rng, result);
  return {std::move(result), std::move(population)};
}

// ---------------------------------------------------------------------------

const SweepRow* SweepResult::find(double x, std::string_view metric) const {
  for (const SweepRow& row : rows) {
    if (row.x == x && row.metric == metric) return &row;
  }
  return nullptr;
}

const SweepRow& SweepResult::at(double x, std::string_view metric) const {
  if (const SweepRow* row = find(x, metric)) return *row;
  throw std::out_of_range("no row x=" + std::to_string(x) + " metric=" + std::string(metric));
}

SweepRow summarize(double x, std::string metric, std::span<const double> samples, bool keep_samples) {
  SweepRow row;
  row.x = x;
  row.metric = std::move(metric);
  row.trials = static_cast<std::int64_t>(samples.size());
  if (samples.empty()) return row;

  double sum = 0.0;
  for (double v : samples) sum += v;
  const double n = static_cast<double>(samples.size());
  row.mean = sum / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - row.mean) * (v - row.mean);
    row.ci95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  if (keep_samples) row.samples.assign(samples.begin(), samples.end());
  return row;
}

namespace {

int resolve_workers(int requested, int trials) {
  int workers = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(workers, 1, std::max(1, trials));
}

// Runs body(trial) for trial in [0, trials) on `workers` threads, each owning a
// contiguous block of indices.
template <typename Body>
void parallel_trials(int trials, int workers, Body body) {
  if (workers <= 1) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const int block = (trials + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int begin = w * block;
    const int end = std::min(trials, begin + block);
    if (begin >= end) break;
    pool.emplace_back([=, &body] {
      for (int t = begin; t < end; ++t) body(t);
    });
  }
}

}  // namespace

SweepResult run_experiment(const ScenarioConfig& config, ExperimentOptions options) {
  const ScenarioConfig cfg = validate_config(config);
  const std::vector<StaState> initial = make_population(cfg.n_dmg, cfg.n_edmg);
  const auto trials = static_cast<std::size_t>(cfg.trials);

  std::vector<double> successes(trials), frames(trials), admitted(trials), prohibited(trials),
      trained(trials);

  parallel_trials(cfg.trials, resolve_workers(cfg.workers, cfg.trials), [&](int trial) {
    Rng rng = make_stream(cfg.master_seed, static_cast<std::uint64_t>(trial));
    std::vector<StaState> population = initial;
    BiResult bi;
    std::int64_t s = 0, f = 0, a = 0, p = 0;
    for (int round = 0; round < cfg.n_bi; ++round) {
      run_bi_into(population, cfg, rng, bi);
      s += bi.successes;
      f += bi.ssw_frames_sent;
      a += bi.admitted_edmg;
      p += bi.prohibited_edmg;
    }
    const auto t = static_cast<std::size_t>(trial);
    const double rounds = cfg.n_bi;
    successes[t] = static_cast<double>(s) / rounds;
    frames[t] = static_cast<double>(f) / rounds;
    admitted[t] = static_cast<double>(a) / rounds;
    prohibited[t] = static_cast<double>(p) / rounds;
    trained[t] = static_cast<double>(
        std::count_if(population.begin(), population.end(), [](const StaState& st) { return st.trained; }));
  });

  const double x = cfg.n_dmg + cfg.n_edmg;
  const bool keep = options.keep_samples;
  SweepResult result;
  result.name = std::string(to_string(cfg.scheme));
  result.rows.push_back(summarize(x, metric::kSuccesses, successes, keep));
  result.rows.push_back(summarize(x, metric::kSswFrames, frames, keep));
  result.rows.push_back(summarize(x, metric::kAdmitted, admitted, keep));
  result.rows.push_back(summarize(x, metric::kProhibited, prohibited, keep));
  result.rows.push_back(summarize(x, metric::kTrained, trained, keep));
  return result;
}

SweepResult run_population_sweep(const ScenarioConfig& base, const PopulationSweep& sweep,
                                 ExperimentOptions options) {
  if (sweep.from < 1 || sweep.to < sweep.from) throw ConfigError("sweep: need 1 <= from <= to");
  if (sweep.dmg_fraction < 0.0 || sweep.dmg_fraction > 1.0) {
    throw ConfigError("sweep.dmg_fraction outside [0, 1]");
  }
  SweepResult result;
  result.name = std::string(to_string(base.scheme));
  for (int total = sweep.from; total <= sweep.to; ++total) {
    ScenarioConfig cfg = base;
    cfg.n_dmg = static_cast<int>(std::lround(sweep.dmg_fraction * total));
    cfg.n_edmg = total - cfg.n_dmg;
    SweepResult point = run_experiment(cfg, options);
    for (SweepRow& row : point.rows) result.rows.push_back(std::move(row));
  }
  return result;
}

double single_slot_success(int s, int m, SchemeId scheme, int trials, std::uint64_t seed) {
  require_in_range("s", s, 1, std::numeric_limits<int>::max());
  if (scheme != SchemeId::SbaBft) return s == 1 ? 1.0 : 0.0;
  require_in_range("m", m, 1, kMaxBackoffStage);
  require_in_range("trials", trials, 1, std::numeric_limits<int>::max());

  const SbaParams params{1.0, m, m};
  std::vector<Contender> contenders;
  for (int k = 0; k < s; ++k) contenders.push_back({StationId{static_cast<std::uint32_t>(k)}, 0});

  Rng rng = make_stream(seed, 0);
  SlotContestOutcome outcome;
  std::int64_t hits = 0;
  for (int t = 0; t < trials; ++t) {
    slot_contest_into(contenders, params, rng, outcome);
    hits += outcome.is_success() ? 1 : 0;
  }
  return static_cast<double>(hits) / trials;
}

// ---------------------------------------------------------------------------

std::string_view to_string(FigureId id) {
  switch (id) {
    case FigureId::Fig5:
      return "fig5";
    case FigureId::Fig8:
      return "fig8";
    case FigureId::Fig15:
      return "fig15";
    case FigureId::Fig16:
      return "fig16";
    case FigureId::Fig17:
      return "fig17";
  }
  return "unknown";
}

FigureId parse_figure(std::string_view name) {
  for (FigureId id : {FigureId::Fig5, FigureId::Fig8, FigureId::Fig15, FigureId::Fig16, FigureId::Fig17}) {
    if (to_string(id) == name) return id;
  }
  throw ConfigError("preset: unknown figure '" + std::string(name) + "'");
}

namespace {

struct FigureContext {
  const FigureOverrides& overrides;
  std::uint64_t seed;
  int trials;
  SweepResult* out;

  // Runs one population point and appends the selected metrics as "<label>:<metric>".
  void point(ScenarioConfig cfg, const std::string& label, std::initializer_list<const char*> metrics) {
    cfg.trials = trials;
    cfg.master_seed = seed;
    cfg.workers = overrides.workers;
    SweepResult r = run_experiment(cfg);
    for (const char* name : metrics) {
      SweepRow row = r.at(cfg.n_dmg + cfg.n_edmg, name);
      row.metric = label + ":" + name;
      out->rows.push_back(std::move(row));
    }
  }
};

ScenarioConfig base_config(SchemeId scheme, int e_abft_length) {
  ScenarioConfig cfg;
  cfg.scheme = scheme;
  cfg.layout = AbftLayout{8, e_abft_length, 16, TimingParams{}};
  cfg.population_mode = PopulationMode::OneShot;
  return cfg;
}

void split_population(ScenarioConfig& cfg, int total, double dmg_fraction) {
  cfg.n_dmg = static_cast<int>(std::lround(dmg_fraction * total));
  cfg.n_edmg = total - cfg.n_dmg;
}

}  // namespace

SweepResult sweep_figure(FigureId id, const FigureOverrides& overrides, std::uint64_t seed) {
  SweepResult result;
  result.name = std::string(to_string(id));
  const int trials = overrides.trials.value_or(kDefaultTrials);
  if (trials < 1) throw ConfigError("trials must be >= 1");
  FigureContext ctx{overrides, seed, trials, &result};

  const double p_floor = overrides.p_floor.value_or(1.0);
  const int m = overrides.m.value_or(3);
  const double dmg_fraction = overrides.dmg_fraction.value_or(0.0);
  if (dmg_fraction < 0.0 || dmg_fraction > 1.0) throw RangeError("dmg_fraction outside [0, 1]");
  const SbaParams sba = validate_sba(SbaParams{p_floor, m, m});

  switch (id) {
    case FigureId::Fig5: {
      const int x_max = overrides.x_max.value_or(30);
      for (int n = 1; n <= x_max; ++n) {
        ScenarioConfig cfg = base_config(SchemeId::Legacy80211ad, 0);
        cfg.n_dmg = n;
        ctx.point(cfg, "legacy", {metric::kSuccesses});
      }
      break;
    }
    case FigureId::Fig8: {
      const int x_max = overrides.x_max.value_or(30);
      const std::vector<int> e_values = overrides.e_values.value_or(std::vector<int>{2, 4, 8});
      for (int n = 1; n <= x_max; ++n) {
        ScenarioConfig legacy = base_config(SchemeId::Legacy80211ad, 0);
        legacy.n_edmg = n;
        ctx.point(legacy, "legacy", {metric::kSuccesses});
        for (int e : e_values) {
          ScenarioConfig cfg = base_config(SchemeId::SaBft, e);
          cfg.n_edmg = n;
          ctx.point(cfg, "sa-bft[E=" + std::to_string(e) + "]", {metric::kSuccesses});
        }
      }
      break;
    }
    case FigureId::Fig15: {
      const int x_max = overrides.x_max.value_or(10);
      const std::vector<int> m_values = overrides.m_values.value_or(std::vector<int>{1, 3});
      constexpr const char* kMetric = ":success_probability";
      for (int s = 1; s <= x_max; ++s) {
        for (SchemeId scheme : {SchemeId::Legacy80211ad, SchemeId::SaBft}) {
          SweepRow row;
          row.x = s;
          row.metric = std::string(to_string(scheme)) + kMetric;
          row.mean = single_slot_success(s, 1, scheme, trials, seed);
          row.trials = trials;
          result.rows.push_back(std::move(row));
        }
        for (int mv : m_values) {
          SweepRow row;
          row.x = s;
          row.metric = "sba-bft[m=" + std::to_string(mv) + "]" + kMetric;
          row.mean = single_slot_success(s, mv, SchemeId::SbaBft, trials,
                                         derive_seed(seed, static_cast<std::uint64_t>(s * 16 + mv)));
          row.ci95 = 1.96 * std::sqrt(row.mean * (1.0 - row.mean) / trials);
          row.trials = trials;
          result.rows.push_back(std::move(row));
        }
      }
      break;
    }
    case FigureId::Fig16:
    case FigureId::Fig17: {
      const int x_max = overrides.x_max.value_or(30);
      const bool frames = id == FigureId::Fig17;
      const char* name = frames ? metric::kSswFrames : metric::kSuccesses;
      for (int n = 1; n <= x_max; ++n) {
        ScenarioConfig legacy = base_config(SchemeId::Legacy80211ad, 0);
        split_population(legacy, n, dmg_fraction);
        ctx.point(legacy, "legacy", {name});
        if (!frames) {
          ScenarioConfig sa = base_config(SchemeId::SaBft, 8);
          split_population(sa, n, dmg_fraction);
          ctx.point(sa, "sa-bft", {name});
        }
        ScenarioConfig sb = base_config(SchemeId::SbaBft, 8);
        sb.sba = sba;
        split_population(sb, n, dmg_fraction);
        ctx.point(sb, "sba-bft", {name});
      }
      break;
    }
  }
  return result;
}

}  // namespace abft
