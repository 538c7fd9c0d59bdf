#include "abft/core.hpp"

#include <string>

#include "abft/errors.hpp"

namespace abft {

namespace {

void require_positive(const char* field, Micros value) {
  if (value.count() <= 0) {
    throw RangeError(std::string(field) + " = " + std::to_string(value.count()) +
                     " us must be strictly positive");
  }
}

}  // namespace

AbftLayout validate_layout(const AbftLayout& layout) {
  require_in_range("abft_length", layout.abft_length, 1, kMaxAbftLength);
  require_in_range("e_abft_length", layout.e_abft_length, 0, kMaxEAbftLength);
  require_in_range("fss", layout.fss, 1, kMaxFss);
  require_positive("a_slot_time", layout.timing.a_slot_time);
  require_positive("txtime_ssw", layout.timing.txtime_ssw);
  require_positive("sbifs", layout.timing.sbifs);
  return layout;
}

Micros slot_duration_us(const AbftLayout& layout) {
  return layout.fss * (layout.timing.txtime_ssw + layout.timing.sbifs);
}

std::string_view to_string(SchemeId scheme) {
  switch (scheme) {
    case SchemeId::Legacy80211ad:
      return "legacy";
    case SchemeId::SaBft:
      return "sa-bft";
    case SchemeId::SbaBft:
      return "sba-bft";
  }
  return "unknown";
}

std::string_view to_string(StaKind kind) { return kind == StaKind::Dmg ? "dmg" : "edmg"; }

SchemeId parse_scheme(std::string_view name) {
  if (name == "legacy" || name == "802.11ad") return SchemeId::Legacy80211ad;
  if (name == "sa-bft") return SchemeId::SaBft;
  if (name == "sba-bft") return SchemeId::SbaBft;
  throw ConfigError("scheme: unknown value '" + std::string(name) +
                    "' (expected legacy, sa-bft or sba-bft)");
}

}  // namespace abft
