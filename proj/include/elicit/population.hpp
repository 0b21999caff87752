#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "elicit/agents.hpp"
#include "elicit/plan.hpp"

namespace elicit {

/// Closed interval a parameter is drawn from uniformly; lo == hi pins it.
/// JSON form is either a number or a two-element array.
struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;

  ParamRange() = default;
  ParamRange(double v) : lo(v), hi(v) {}
  ParamRange(double l, double h) : lo(l), hi(h) {}
  double draw(Rng& rng) const { return lo == hi ? lo : lo + (hi - lo) * rng.uniform(); }
};

enum class AgentKind { Deterministic, Logit };

/// `count` agents sharing parameter ranges. Deterministic agents use the
/// belief interval [center - half_width, center + half_width] (clipped to
/// [0,1]) and the CRRA interval [rho, rho + rho_spread]; logit agents use
/// belief_center and rho directly. A present `epsilon` wraps each agent in
/// a tremble.
struct AgentGroup {
  std::string name;
  AgentKind kind = AgentKind::Deterministic;
  int count = 0;
  ParamRange belief_center{0.5};
  ParamRange belief_half_width{0.0};
  ParamRange rho{0.0};
  ParamRange rho_spread{0.0};
  CompletionRule completion = CompletionRule::UniformRandom;
  ParamRange sigma{0.2};
  ParamRange indifference_band{0.25};
  std::optional<ParamRange> epsilon;
};

struct PopulationConfig {
  static constexpr int kSchemaVersion = 1;

  std::uint64_t seed = 1;
  Algorithm algorithm = Algorithm::SetConstruction;
  EventSpec event;
  std::string event_date = "2026-01-01";
  bool include_symbolic_block = false;
  /// Chance the simulated subjective event occurs; objective events use their stated odds.
  double verb_probability = 1.0 / 3.0;
  /// Chance a simulated subject opens the algorithm details.
  double info_expand_probability = 0.0;
  std::vector<AgentGroup> groups;

  int total_agents() const;
  /// Throws Error(InvalidArgument) on an unusable config.
  void validate() const;
};

/// Strict parse: unknown keys and malformed values throw Error(InvalidArgument).
PopulationConfig population_from_json(const nlohmann::json& j);
/// Full form with every default spelled out.
nlohmann::json to_json(const PopulationConfig& cfg);

/// Rescales group counts to total `n`, keeping proportions (largest remainder).
PopulationConfig with_agent_count(PopulationConfig cfg, int n);

struct SimAgent {
  std::string group;
  AgentSpec spec;
};

/// Agent `index` of the population; parameters come from the "agent" stream.
SimAgent instantiate_agent(const PopulationConfig& cfg, int index);

}  // namespace elicit
