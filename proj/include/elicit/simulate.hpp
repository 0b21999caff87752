#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "elicit/event_log.hpp"
#include "elicit/population.hpp"

namespace elicit {

/// Drives one agent through a full session on a manual clock: every
/// question, the belief report, finalization and (if given) the outcome.
/// All transitions go through LoggedSession, so `sink` receives the same log
/// a live session would produce.
Session run_agent(const AgentSpec& agent, const SessionConfig& cfg, const std::string& session_id,
                  std::uint64_t answer_seed, std::optional<EventState> outcome, bool expand_info, LineSink sink);

/// Session config of agent `index`: population settings plus a derived seed.
SessionConfig session_config_for(const PopulationConfig& pop, int index);

/// Outcome the simulated event takes for this population.
EventState simulated_outcome(const PopulationConfig& pop);

std::string session_id_for(int index);

struct SimulationResult {
  std::vector<std::filesystem::path> logs;
  nlohmann::json metadata;  // echoed config with defaults spelled out
};

/// Runs the whole population, writing `<session id>.jsonl` per agent plus
/// `population.json` into `out_dir`. Output is bit-identical for a fixed config.
SimulationResult simulate_population(const PopulationConfig& pop, const std::filesystem::path& out_dir);

/// Same sessions kept in memory, in agent order.
std::vector<Session> simulate_sessions(const PopulationConfig& pop);

/// Canned populations: "bewley-population", "seu-noise", "mixed", and
/// "trembling-eps-<e>" for e in {0, 0.05, 0.1}.
std::vector<std::string> scenario_names();
PopulationConfig scenario_config(const std::string& name, std::uint64_t seed);

}  // namespace elicit
