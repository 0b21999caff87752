#pragma once

#include <json.hpp>

#include "elicit/plan.hpp"
#include "elicit/session.hpp"

namespace elicit {

using Json = nlohmann::json;

Json to_json(const Lottery& l);
Lottery lottery_from_json(const Json& j);

Json to_json(const SessionConfig& cfg);
/// Missing keys take their defaults; unknown keys and bad values throw Error(InvalidArgument).
SessionConfig session_config_from_json(const Json& j);

Json to_json(const Question& q);
Json to_json(const Response& r);
Response response_from_json(const Json& j);
Json to_json(const BeliefReport& b);
BeliefReport belief_from_json(const Json& j);

/// {"beliefs": pi | [lo, hi], "utilities": U} where U is "linear", "log",
/// {"crra": rho}, {"crra": [lo, hi]} or a list of single utilities.
Json to_json(const PreferenceModel& m);
PreferenceModel model_from_json(const Json& j);

}  // namespace elicit
