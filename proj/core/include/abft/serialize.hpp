#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "abft/codec.hpp"
#include "abft/markov.hpp"
#include "abft/planner.hpp"
#include "abft/sim.hpp"

namespace abft {

/// Header "x,metric,mean,ci95,trials", one line per row, fixed precision.
std::string to_csv(const SweepResult& result);
std::string to_json(const SweepResult& result);
std::string to_json(const markov::ChainSolution& solution, bool include_states = true);
std::string to_json(const planner::MPlan& plan);
std::string to_json(const codec::BeaconIntervalControl& bic);

SweepResult sweep_result_from_json(std::string_view text);
planner::MPlan mplan_from_json(std::string_view text);

struct SimulationDocument {
  ScenarioConfig scenario;
  std::optional<PopulationSweep> sweep;
};

/// Scenario keys plus an optional "sweep" object {"from", "to", "dmg_fraction"}.
SimulationDocument simulation_from_json(std::string_view text);

/// Parses a scenario document. Unknown keys are rejected with ConfigError
/// naming the key path.
ScenarioConfig scenario_from_json(std::string_view text);
std::string to_json(const ScenarioConfig& config);

/// Chain parameters document {"p_floor", "m", "n", "s"}; same strictness.
markov::ChainParams chain_params_from_json(std::string_view text);

}  // namespace abft
