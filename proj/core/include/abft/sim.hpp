#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "abft/contention.hpp"
#include "abft/core.hpp"
#include "abft/rng.hpp"

namespace abft {

enum class PopulationMode : std::uint8_t {
  OneShot,    // one A-BFT phase with fresh contenders
  Drain,      // winners leave; run until n_bi beacon intervals elapse
  Saturated,  // winners re-enter as newly joined stations
};

enum class WasteAccounting : std::uint8_t {
  WorstCase,  // every SBA-BFT winner loses frames_wasted(m) opportunities
  Actual,     // loss derived from the winner's drawn subslot
};

struct ScenarioConfig {
  SchemeId scheme{SchemeId::Legacy80211ad};
  AbftLayout layout{};
  std::optional<SbaParams> sba;
  int n_dmg{0};
  int n_edmg{0};
  PopulationMode population_mode{PopulationMode::OneShot};
  int n_bi{1};
  int trials{1};
  std::uint64_t master_seed{1};
  WasteAccounting waste{WasteAccounting::WorstCase};
  int workers{0};  // 0: hardware concurrency; never affects results
};

/// Returns a normalized copy (OneShot forces n_bi = 1) or throws
/// ConfigError / RangeError.
ScenarioConfig validate_config(const ScenarioConfig& config);

struct BiResult {
  std::vector<SlotContestOutcome> slots;  // one per A-BFT slot, in slot order
  int successes{0};
  int ssw_frames_sent{0};
  int contenders{0};  // stations that transmitted or deferred in a slot
  int admitted_edmg{0};
  int prohibited_edmg{0};

  int collision_slots() const;
};

std::vector<StaState> make_population(int n_dmg, int n_edmg);

/// One beacon interval over `population` (modified in place). `config` must
/// already be validated. `out` is overwritten.
void run_bi_into(std::span<StaState> population, const ScenarioConfig& config, Rng& rng,
                 BiResult& out);

std::pair<BiResult, std::vector<StaState>> run_bi(std::vector<StaState> population,
                                                  const ScenarioConfig& config, Rng& rng);

// Aggregated results -------------------------------------------------------

namespace metric {
inline constexpr const char* kSuccesses = "successes";
inline constexpr const char* kSswFrames = "ssw_frames";
inline constexpr const char* kAdmitted = "admitted_edmg";
inline constexpr const char* kProhibited = "prohibited_edmg";
inline constexpr const char* kTrained = "trained";
}  // namespace metric

struct SweepRow {
  double x{0.0};
  std::string metric;
  double mean{0.0};
  double ci95{0.0};
  std::int64_t trials{0};
  std::vector<double> samples;  // empty unless retained

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
  std::string name;
  std::vector<SweepRow> rows;

  const SweepRow* find(double x, std::string_view metric) const;
  const SweepRow& at(double x, std::string_view metric) const;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

/// Sample mean and 1.96 * s / sqrt(n) over `samples` (s = 0 when n < 2).
SweepRow summarize(double x, std::string metric, std::span<const double> samples,
                   bool keep_samples = false);

struct ExperimentOptions {
  bool keep_samples{false};
};

/// `trials` independent replications at one population size. Each trial
/// draws from make_stream(master_seed, trial) and runs n_bi beacon
/// intervals; per-trial samples are per-BI averages (trained: final count).
/// x is n_dmg + n_edmg.
SweepResult run_experiment(const ScenarioConfig& config, ExperimentOptions options = {});

/// Total population S in [from, to], split into round(dmg_fraction * S) DMG
/// and the rest EDMG; one run_experiment per S with the same master seed.
struct PopulationSweep {
  int from{1};
  int to{30};
  double dmg_fraction{0.0};

  friend bool operator==(const PopulationSweep&, const PopulationSweep&) = default;
};

SweepResult run_population_sweep(const ScenarioConfig& base, const PopulationSweep& sweep,
                                 ExperimentOptions options = {});

/// Probability that a single slot holding s contenders yields a success.
/// SbaBft: empirical slot_contest success rate with all stations at stage 0.
double single_slot_success(int s, int m, SchemeId scheme, int trials, std::uint64_t seed);

// Figure presets -----------------------------------------------------------

enum class FigureId : std::uint8_t { Fig5, Fig8, Fig15, Fig16, Fig17 };

std::string_view to_string(FigureId id);
FigureId parse_figure(std::string_view name);

struct FigureOverrides {
  std::optional<int> trials;
  std::optional<int> x_max;
  std::optional<std::vector<int>> e_values;  // Fig8 extension lengths
  std::optional<std::vector<int>> m_values;  // Fig15 backoff caps
  std::optional<int> m;                      // Fig16/17 backoff cap
  std::optional<double> p_floor;
  std::optional<double> dmg_fraction;        // mixed populations, Fig16/17
  int workers{0};
};

inline constexpr int kDefaultTrials = 100000;

/// Canonical scenario behind each figure, with metric names of the form
/// "<scheme>:<metric>" (plus a parameter tag where a figure has several
/// curves of one scheme, e.g. "sa-bft[E=4]:successes").
SweepResult sweep_figure(FigureId id, const FigureOverrides& overrides, std::uint64_t seed);

}  // namespace abft
