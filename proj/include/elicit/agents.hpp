#pragma once

#include <memory>
#include <string>
#include <variant>

#include "elicit/model.hpp"
#include "elicit/plan.hpp"
#include "elicit/rng.hpp"
#include "elicit/session.hpp"

namespace elicit {

/// How a deterministic agent fills in a forced choice it cannot rank strictly.
enum class CompletionRule { UniformRandom, MaxMinEU, FirstOption };

std::string_view to_string(CompletionRule c);
CompletionRule parse_completion_rule(std::string_view text);

/// Answers with the model's relation verbatim; forced non-strict cases go
/// through the completion rule.
struct DeterministicAgent {
  PreferenceModel model;
  CompletionRule completion = CompletionRule::UniformRandom;
};

/// SEU chooser with logistic noise on the EU difference; reports indifference
/// inside the band |dEU| < indifference_band when allowed, never Incomparable.
struct LogitAgent {
  double belief = 0.5;
  UtilityFunction utility = UtilityFunction::linear();
  double sigma = 0.2;
  double indifference_band = 0.25;
};

struct TremblingAgent;

using AgentSpec = std::variant<DeterministicAgent, LogitAgent, std::shared_ptr<const TremblingAgent>>;

/// With probability epsilon the inner answer is replaced by a uniform draw
/// over the options the treatment allows.
struct TremblingAgent {
  AgentSpec inner;
  double epsilon = 0.0;
};

AgentSpec trembling(AgentSpec inner, double epsilon);

/// Preference model the agent's belief report derives from.
PreferenceModel agent_model(const AgentSpec& a);

/// Simulated response time in ms: a constant plus uniform noise.
std::int64_t simulated_response_time(Relation r, Rng& rng);

/// Chooses the agent's answer to `q`. Symbolic questions are judged by
/// symbolic_relation; a logit agent breaks the resulting incomparability at random.
Relation answer(const AgentSpec& a, const Question& q, Rng& rng);

/// Singleton prior: (pi, certain). Interval prior: (midpoint, uncertain, interval).
BeliefReport report_belief(const AgentSpec& a);

}  // namespace elicit
