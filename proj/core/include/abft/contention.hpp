#pragma once

#include <span>
#include <vector>

#include "abft/core.hpp"
#include "abft/rng.hpp"

namespace abft {

/// Secondary-backoff A-BFT parameters.
struct SbaParams {
  double p_floor{1.0};  // P in (0, 1]
  int n_max{3};         // maximum prohibited times n
  int m_max{3};         // maximum failed times m, 1..5
  Micros w_min{5};      // W, one subslot (aSlotTime)

  friend bool operator==(const SbaParams&, const SbaParams&) = default;
};

inline constexpr int kMaxBackoffStage = 5;

SbaParams validate_sba(const SbaParams& params);

/// Result of one A-BFT slot. `stations` holds the winner (Success) or the
/// colliding set (Collision); `deferred` holds contenders that sensed the
/// channel busy and stayed silent.
struct SlotContestOutcome {
  enum class Kind : std::uint8_t { Idle, Success, Collision };

  Kind kind{Kind::Idle};
  int subslot{0};
  std::vector<StationId> stations;
  std::vector<StationId> deferred;

  bool is_success() const { return kind == Kind::Success; }
  bool is_collision() const { return kind == Kind::Collision; }
  StationId winner() const { return stations.front(); }
};

// P-phase ----------------------------------------------------------------

/// P_j = 1 - j (1 - P) / n.
double p_stage_bound(int j, const SbaParams& params);

/// Effective admission probability P / P_j after j prohibitions.
double entry_probability(int j, const SbaParams& params);

/// Draws p ~ U[0, P_j] and admits iff p <= P.
bool p_phase_gate(const StaState& sta, const SbaParams& params, Rng& rng);

// Slot selection ---------------------------------------------------------

struct SlotRegion {
  int first{0};
  int count{0};
};

/// Region of A-BFT slots a station of `kind` picks from under `scheme`.
/// Throws ConfigError for an EDMG station under SbaBft with no extended slots.
SlotRegion slot_region(StaKind kind, const AbftLayout& layout, SchemeId scheme);

int select_slot(const StaState& sta, const AbftLayout& layout, SchemeId scheme, Rng& rng);

// Secondary backoff ------------------------------------------------------

/// W_i = 2^(m - i) subslots.
int backoff_window_subslots(int stage, const SbaParams& params);

int draw_backoff(int stage, const SbaParams& params, Rng& rng);

/// Minimum-unique-subslot race among contenders at the given stages.
/// Contender k is reported as StationId{k}.
SlotContestOutcome slot_contest(std::span<const int> contender_stages, const SbaParams& params,
                                Rng& rng);

struct Contender {
  StationId id;
  int stage;
};

// Same race, reporting the caller's station ids. `out` is overwritten; its
// vectors keep their capacity.
void slot_contest_into(std::span<const Contender> contenders, const SbaParams& params, Rng& rng,
                       SlotContestOutcome& out);

// SSW frame budget -------------------------------------------------------

/// ceil(2^m * aSlotTime / (TXTIME(SSW) + SBIFS)); ceil(5 * 2^(m-4)) with defaults.
int frames_wasted(int m, const TimingParams& timing = {});

/// max(0, fss - frames_wasted(m)).
int frames_sendable(int m, int fss, const TimingParams& timing = {});

/// Frames lost when the winner started transmitting at `subslot`
/// (actual-waste accounting).
int frames_wasted_at(int subslot, const TimingParams& timing = {});

}  // namespace abft
