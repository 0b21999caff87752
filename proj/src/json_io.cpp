#include "elicit/json_io.hpp"

#include <set>

#include "elicit/error.hpp"
#include "elicit/protocol.hpp"

namespace elicit {

namespace {

[[noreturn]] void bad(const std::string& why) { throw Error(ErrorCode::InvalidArgument, why); }

void reject_unknown_keys(const Json& j, std::initializer_list<std::string_view> known, std::string_view what) {
  if (!j.is_object()) bad(std::string(what) + " must be a JSON object");
  std::set<std::string_view> k(known);
  for (const auto& [key, _] : j.items())
    if (!k.count(key)) bad("unknown key '" + key + "' in " + std::string(what));
}

Money money_from_json(const Json& j) {
  if (j.is_string()) return Money::parse(j.get<std::string>());
  if (j.is_number_integer()) return Money::dollars(j.get<std::int64_t>());
  if (j.is_number()) return Money::from_double(j.get<double>());
  bad("money must be a string or number");
}

int relation_index(Relation r) { return static_cast<int>(r); }

}  // namespace

Json to_json(const Lottery& l) { return Json{{"nv", l.nv.to_string()}, {"v", l.v.to_string()}}; }

Lottery lottery_from_json(const Json& j) {
  if (j.is_array() && j.size() == 2) return Lottery{money_from_json(j[0]), money_from_json(j[1])};
  if (!j.is_object() || !j.contains("nv") || !j.contains("v")) bad("lottery must be {nv, v} or [nv, v]");
  return Lottery{money_from_json(j.at("nv")), money_from_json(j.at("v"))};
}

Json to_json(const SessionConfig& cfg) {
  return Json{
      {"schema_version", SessionConfig::kSchemaVersion},
      {"event", cfg.event.to_string()},
      {"event_description", cfg.event.description},
      {"event_date", cfg.event_date},
      {"algorithm", to_string(cfg.algorithm)},
      {"include_symbolic_block", cfg.include_symbolic_block},
      {"rng_seed", cfg.rng_seed},
      {"payment_weights", cfg.payment_weights},
      {"mle_joint_belief", cfg.mle_joint_belief},
  };
}

SessionConfig session_config_from_json(const Json& j) {
  reject_unknown_keys(j,
                      {"schema_version", "event", "event_description", "event_date", "algorithm",
                       "include_symbolic_block", "rng_seed", "payment_weights", "mle_joint_belief"},
                      "session config");
  SessionConfig cfg;
  try {
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != SessionConfig::kSchemaVersion)
      bad("unsupported session config schema_version");
    if (j.contains("event")) cfg.event = EventSpec::parse(j.at("event").get<std::string>());
    if (j.contains("event_description")) cfg.event.description = j.at("event_description").get<std::string>();
    if (j.contains("event_date")) cfg.event_date = j.at("event_date").get<std::string>();
    if (j.contains("algorithm")) {
      try {
        cfg.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
      } catch (const Error& e) {
        bad(e.what());
      }
    }
    if (j.contains("include_symbolic_block")) cfg.include_symbolic_block = j.at("include_symbolic_block").get<bool>();
    if (j.contains("rng_seed")) cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    if (j.contains("payment_weights")) cfg.payment_weights = j.at("payment_weights").get<std::array<double, 3>>();
    if (j.contains("mle_joint_belief")) cfg.mle_joint_belief = j.at("mle_joint_belief").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("session config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

Json to_json(const Question& q) {
  Json j{
      {"id", q.id},
      {"treatment", to_string(q.treatment)},
      {"block_index", q.block_index},
      {"within_block_index", q.within_block_index},
      {"instructions", protocol::treatment_instructions(q.treatment == Treatment::Forced)},
      {"instruction_version", protocol::kInstructionVersion},
  };
  if (q.symbolic) {
    j["symbolic"] = true;
    j["gamble1"] = Json{{"nv", q.symbolic->first.nv.display_text()}, {"v", q.symbolic->first.v.display_text()}};
    j["gamble2"] = Json{{"nv", q.symbolic->second.nv.display_text()}, {"v", q.symbolic->second.v.display_text()}};
  } else {
    j["symbolic"] = false;
    j["gamble1"] = to_json(q.comparison);
    j["gamble2"] = to_json(q.reference);
  }
  Json opts = Json::array();
  for (Relation r : q.option_order)
    opts.push_back(Json{{"relation", to_string(r)}, {"label", protocol::option_label(relation_index(r))}});
  j["options"] = std::move(opts);
  return j;
}

Json to_json(const Response& r) {
  Json j{{"question_id", r.question_id},
         {"relation", to_string(r.relation)},
         {"submitted_at_ms", r.submitted_at_ms},
         {"response_time_ms", r.response_time_ms}};
  if (r.client_response_time_ms) j["client_response_time_ms"] = *r.client_response_time_ms;
  return j;
}

Response response_from_json(const Json& j) {
  try {
    Response r;
    r.question_id = j.at("question_id").get<std::uint32_t>();
    r.relation = parse_relation(j.at("relation").get<std::string>());
    r.submitted_at_ms = j.value("submitted_at_ms", std::int64_t{0});
    r.response_time_ms = j.value("response_time_ms", std::int64_t{0});
    if (j.contains("client_response_time_ms")) r.client_response_time_ms = j.at("client_response_time_ms").get<std::int64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("response: ") + e.what());
  } catch (const Error& e) {
    bad(e.what());
  }
}

Json to_json(const BeliefReport& b) {
  Json j{{"point_pct", b.point_pct}, {"certain", b.certain}};
  if (b.range_pct) j["range_pct"] = Json::array({b.range_pct->first, b.range_pct->second});
  return j;
}

BeliefReport belief_from_json(const Json& j) {
  reject_unknown_keys(j, {"point_pct", "certain", "range_pct"}, "belief report");
  BeliefReport b;
  try {
    b.point_pct = j.at("point_pct").get<int>();
    b.certain = j.at("certain").get<bool>();
    if (j.contains("range_pct") && !j.at("range_pct").is_null()) {
      const auto& r = j.at("range_pct");
      if (!r.is_array() || r.size() != 2) bad("range_pct must be [lo, hi]");
      b.range_pct = std::pair{r[0].get<int>(), r[1].get<int>()};
    }
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("belief report: ") + e.what());
  }
  b.validate();
  return b;
}

namespace {

Json utility_json(const UtilityFunction& u) {
  switch (u.kind()) {
    case UtilityKind::Linear: return "linear";
    case UtilityKind::Log: return "log";
    case UtilityKind::Crra: return Json{{"crra", u.rho()}};
  }
  return nullptr;
}

UtilityFunction single_utility(const Json& j) {
  if (j == "linear") return UtilityFunction::linear();
  if (j == "log") return UtilityFunction::log();
  if (j.is_object() && j.size() == 1 && j.contains("crra") && j["crra"].is_number())
    return UtilityFunction::crra(j["crra"].get<double>());
  bad("utility must be \"linear\", \"log\" or {\"crra\": rho}");
}

}  // namespace

Json to_json(const PreferenceModel& m) {
  Json j;
  j["beliefs"] = m.beliefs.is_singleton() ? Json(m.beliefs.lo()) : Json::array({m.beliefs.lo(), m.beliefs.hi()});
  if (m.utilities.is_interval()) {
    j["utilities"] = Json{{"crra", Json::array({m.utilities.interval().lo, m.utilities.interval().hi})}};
  } else {
    Json list = Json::array();
    for (const auto& u : m.utilities.members()) list.push_back(utility_json(u));
    j["utilities"] = list.size() == 1 ? list[0] : list;
  }
  return j;
}

PreferenceModel model_from_json(const Json& j) {
  reject_unknown_keys(j, {"beliefs", "utilities"}, "preference model");
  try {
    const Json& b = j.at("beliefs");
    BeliefSet beliefs = b.is_array() ? BeliefSet(b.at(0).get<double>(), b.at(1).get<double>())
                                     : BeliefSet::singleton(b.get<double>());
    if (b.is_array() && b.size() != 2) bad("beliefs must be pi or [lo, hi]");
    const Json& u = j.value("utilities", Json("linear"));
    if (u.is_object() && u.contains("crra") && u["crra"].is_array()) {
      const Json& r = u["crra"];
      if (r.size() != 2) bad("crra interval must be [lo, hi]");
      const double lo = r[0].get<double>(), hi = r[1].get<double>();
      if (!(lo <= hi)) bad("crra interval must satisfy lo <= hi");
      return PreferenceModel{beliefs, UtilitySet(CrraInterval{lo, hi})};
    }
    std::vector<UtilityFunction> members;
    if (u.is_array()) {
      for (const auto& e : u) members.push_back(single_utility(e));
    } else {
      members.push_back(single_utility(u));
    }
    return PreferenceModel{beliefs, UtilitySet(std::move(members))};
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("preference model: ") + e.what());
  }
}

}  // namespace elicit
