#include "abft/contention.hpp"

#include <algorithm>
#include <limits>

#include "abft/errors.hpp"

namespace abft {

SbaParams validate_sba(const SbaParams& params) {
  if (!(params.p_floor > 0.0 && params.p_floor <= 1.0)) {
    throw RangeError("p_floor = " + std::to_string(params.p_floor) + " outside (0, 1]");
  }
  require_in_range("m_max", params.m_max, 1, kMaxBackoffStage);
  require_in_range("n_max", params.n_max, 1, std::numeric_limits<int>::max());
  if (params.w_min.count() <= 0) throw RangeError("w_min must be strictly positive");
  return params;
}

double p_stage_bound(int j, const SbaParams& params) {
  require_in_range("j", j, 0, params.n_max);
  return 1.0 - j * (1.0 - params.p_floor) / params.n_max;
}

double entry_probability(int j, const SbaParams& params) {
  // At j = n the bound equals P exactly in real arithmetic; pin it.
  if (j == params.n_max) {
    require_in_range("j", j, 0, params.n_max);
    return 1.0;
  }
  return params.p_floor / p_stage_bound(j, params);
}

bool p_phase_gate(const StaState& sta, const SbaParams& params, Rng& rng) {
  if (sta.prohibit_count >= params.n_max || params.p_floor >= 1.0) return true;
  const double bound = p_stage_bound(sta.prohibit_count, params);
  std::uniform_real_distribution<double> draw(0.0, bound);
  return draw(rng) <= params.p_floor;
}

SlotRegion slot_region(StaKind kind, const AbftLayout& layout, SchemeId scheme) {
  if (kind == StaKind::Dmg || scheme == SchemeId::Legacy80211ad) {
    return {0, layout.abft_length};
  }
  if (scheme == SchemeId::SaBft) {
    return {0, layout.abft_length + layout.e_abft_length};
  }
  if (layout.e_abft_length < 1) {
    throw ConfigError("e_abft_length = 0: EDMG stations running SBA-BFT need an extended region");
  }
  return {layout.abft_length, layout.e_abft_length};
}

int select_slot(const StaState& sta, const AbftLayout& layout, SchemeId scheme, Rng& rng) {
  const SlotRegion region = slot_region(sta.kind, layout, scheme);
  std::uniform_int_distribution<int> draw(region.first, region.first + region.count - 1);
  return draw(rng);
}

int backoff_window_subslots(int stage, const SbaParams& params) {
  require_in_range("i", stage, 0, params.m_max);
  return 1 << (params.m_max - stage);
}

int draw_backoff(int stage, const SbaParams& params, Rng& rng) {
  const int window = backoff_window_subslots(stage, params);
  if (window == 1) return 0;
  std::uniform_int_distribution<int> draw(0, window - 1);
  return draw(rng);
}

void slot_contest_into(std::span<const Contender> contenders, const SbaParams& params, Rng& rng,
                       SlotContestOutcome& out) {
  out.stations.clear();
  out.deferred.clear();
  out.subslot = 0;
  if (contenders.empty()) {
    out.kind = SlotContestOutcome::Kind::Idle;
    return;
  }

  int best = std::numeric_limits<int>::max();
  for (const Contender& c : contenders) {
    const int drawn = draw_backoff(c.stage, params, rng);
    if (drawn < best) {
      // Everyone tied at the old minimum now hears the new earliest sender.
      out.deferred.insert(out.deferred.end(), out.stations.begin(), out.stations.end());
      out.stations.clear();
      best = drawn;
    }
    if (drawn == best) {
      out.stations.push_back(c.id);
    } else {
      out.deferred.push_back(c.id);
    }
  }
  out.subslot = best;
  out.kind = out.stations.size() == 1 ? SlotContestOutcome::Kind::Success
                                      : SlotContestOutcome::Kind::Collision;
}

SlotContestOutcome slot_contest(std::span<const int> contender_stages, const SbaParams& params,
                                Rng& rng) {
  std::vector<Contender> contenders;
  contenders.reserve(contender_stages.size());
  for (std::size_t k = 0; k < contender_stages.size(); ++k) {
    contenders.push_back({StationId{static_cast<std::uint32_t>(k)}, contender_stages[k]});
  }
  SlotContestOutcome out;
  slot_contest_into(contenders, params, rng, out);
  return out;
}

namespace {

std::int64_t ceil_div(std::int64_t num, std::int64_t den) { return (num + den - 1) / den; }

}  // namespace

int frames_wasted(int m, const TimingParams& timing) {
  require_in_range("m", m, 1, kMaxBackoffStage);
  const std::int64_t t_max = (std::int64_t{1} << m) * timing.a_slot_time.count();
  return static_cast<int>(ceil_div(t_max, (timing.txtime_ssw + timing.sbifs).count()));
}

int frames_sendable(int m, int fss, const TimingParams& timing) {
  return std::max(0, fss - frames_wasted(m, timing));
}

int frames_wasted_at(int subslot, const TimingParams& timing) {
  if (subslot <= 0) return 0;
  const std::int64_t waited = std::int64_t{subslot} * timing.a_slot_time.count();
  return static_cast<int>(ceil_div(waited, (timing.txtime_ssw + timing.sbifs).count()));
}

}  // namespace abft
