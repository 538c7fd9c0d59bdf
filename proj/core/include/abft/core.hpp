#pragma once

#include <chrono>
#include <cstdint>
#include <string_view>

namespace abft {

using Micros = std::chrono::microseconds;

/// 802.11ad DMG control-PHY timing used for A-BFT airtime accounting.
struct TimingParams {
  Micros a_slot_time{5};
  Micros txtime_ssw{15};
  Micros sbifs{1};

  friend bool operator==(const TimingParams&, const TimingParams&) = default;
};

/// Geometry of one A-BFT phase. Slots [0, abft_length) form the legacy
/// region; [abft_length, abft_length + e_abft_length) the extended region.
struct AbftLayout {
  int abft_length{8};
  int e_abft_length{0};
  int fss{16};
  TimingParams timing{};

  int total_slots() const { return abft_length + e_abft_length; }

  friend bool operator==(const AbftLayout&, const AbftLayout&) = default;
};

inline constexpr int kMaxAbftLength = 8;
inline constexpr int kMaxEAbftLength = 8;
inline constexpr int kMaxFss = 16;

enum class StaKind : std::uint8_t { Dmg, Edmg };

enum class SchemeId : std::uint8_t { Legacy80211ad, SaBft, SbaBft };

struct StationId {
  std::uint32_t value{0};

  friend auto operator<=>(const StationId&, const StationId&) = default;
};

/// Contention state of one station. Only EDMG stations running SBA-BFT ever
/// carry non-zero counters.
struct StaState {
  StationId id{};
  StaKind kind{StaKind::Dmg};
  int fail_count{0};      // backoff stage i
  int prohibit_count{0};  // P-phase prohibitions j
  bool trained{false};

  friend bool operator==(const StaState&, const StaState&) = default;
};

/// Throws RangeError naming the first field that violates its bound.
/// Returns the layout unchanged otherwise.
AbftLayout validate_layout(const AbftLayout& layout);

/// fss * (TXTIME(SSW) + SBIFS).
Micros slot_duration_us(const AbftLayout& layout);

std::string_view to_string(SchemeId scheme);
std::string_view to_string(StaKind kind);
SchemeId parse_scheme(std::string_view name);

}  // namespace abft
