#include "elicit/elicit.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include "elicit/analysis.hpp"
#include "elicit/error.hpp"
#include "elicit/event_log.hpp"
#include "elicit/json_io.hpp"
#include "elicit/model.hpp"
#include "elicit/population.hpp"
#include "elicit/report_io.hpp"
#include "elicit/service.hpp"
#include "elicit/simulate.hpp"

struct elicit_store {
  elicit::SessionStore impl;
  explicit elicit_store(std::filesystem::path dir, std::string token) : impl(std::move(dir), std::move(token)) {}
};

struct elicit_model {
  elicit::PreferenceModel impl;
};

namespace {

using elicit::Json;

thread_local std::string g_last_error;

elicit_status to_status(elicit::ErrorCode c) {
  switch (c) {
    case elicit::ErrorCode::InvalidArgument: return ELICIT_INVALID_ARGUMENT;
    case elicit::ErrorCode::NotFound: return ELICIT_NOT_FOUND;
    case elicit::ErrorCode::Conflict: return ELICIT_CONFLICT;
    case elicit::ErrorCode::ForbiddenRelation: return ELICIT_FORBIDDEN_RELATION;
    case elicit::ErrorCode::InvalidState: return ELICIT_INVALID_STATE;
    case elicit::ErrorCode::Domain: return ELICIT_DOMAIN;
    case elicit::ErrorCode::Io: return ELICIT_IO;
    case elicit::ErrorCode::Parse: return ELICIT_PARSE;
    case elicit::ErrorCode::Unauthorized: return ELICIT_UNAUTHORIZED;
  }
  return ELICIT_INTERNAL;
}

template <class Fn>
elicit_status guard(Fn fn) {
  g_last_error.clear();
  try {
    fn();
    return ELICIT_OK;
  } catch (const elicit::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("invalid JSON: ") + e.what();
    return ELICIT_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ELICIT_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return ELICIT_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (!p) throw elicit::Error(elicit::ErrorCode::InvalidArgument, std::string(name) + " must not be NULL");
}

char* copy_out(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const Json& j) {
  require(out, "out");
  *out = copy_out(j.dump());
}

Json parse(const char* text, const char* name) {
  require(text, name);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw elicit::Error(elicit::ErrorCode::Parse, std::string(name) + " is not valid JSON: " + e.what());
  }
}

elicit::SessionStore::Key key(const char* k) {
  if (!k || !*k) return std::nullopt;
  return std::string(k);
}

}  // namespace

extern "C" {

const char* elicit_version(void) { return "0.1.0"; }

const char* elicit_last_error(void) { return g_last_error.c_str(); }

const char* elicit_status_name(elicit_status s) {
  switch (s) {
    case ELICIT_OK: return "ok";
    case ELICIT_INVALID_ARGUMENT: return "invalid_argument";
    case ELICIT_NOT_FOUND: return "not_found";
    case ELICIT_CONFLICT: return "conflict";
    case ELICIT_FORBIDDEN_RELATION: return "forbidden_relation";
    case ELICIT_INVALID_STATE: return "invalid_state";
    case ELICIT_DOMAIN: return "domain";
    case ELICIT_IO: return "io";
    case ELICIT_PARSE: return "parse";
    case ELICIT_UNAUTHORIZED: return "unauthorized";
    case ELICIT_INTERNAL: return "internal";
  }
  return "unknown";
}

void elicit_string_free(char* s) { std::free(s); }

elicit_status elicit_store_open(const char* dir, const char* admin_token, elicit_store** out) {
  return guard([&] {
    require(dir, "dir");
    require(out, "out");
    *out = new elicit_store(dir, admin_token ? admin_token : "");
  });
}

void elicit_store_close(elicit_store* store) { delete store; }

elicit_status elicit_create_session(elicit_store* store, const char* config_json, const char* idempotency_key,
                                    char** out_json) {
  return guard([&] {
    require(store, "store");
    const Json cfg = config_json && *config_json ? parse(config_json, "config_json") : Json::object();
    emit(out_json, store->impl.create_session(cfg, key(idempotency_key)));
  });
}

elicit_status elicit_next_question(elicit_store* store, const char* session_id, char** out_json) {
  return guard([&] {
    require(store, "store");
    require(session_id, "session_id");
    emit(out_json, store->impl.next_question(session_id));
  });
}

elicit_status elicit_submit_response(elicit_store* store, const char* session_id, const char* body_json,
                                     const char* idempotency_key, char** out_json) {
  return guard([&] {
    require(store, "store");
    require(session_id, "session_id");
    emit(out_json, store->impl.submit_response(session_id, parse(body_json, "body_json"), key(idempotency_key)));
  });
}

elicit_status elicit_submit_belief(elicit_store* store, const char* session_id, const char* body_json,
                                   const char* idempotency_key, char** out_json) {
  return guard([&] {
    require(store, "store");
    require(session_id, "session_id");
    emit(out_json, store->impl.submit_belief(session_id, parse(body_json, "body_json"), key(idempotency_key)));
  });
}

elicit_status elicit_mark_info_expanded(elicit_store* store, const char* session_id, const char* idempotency_key,
                                        char** out_json) {
  return guard([&] {
    require(store, "store");
    require(session_id, "session_id");
    emit(out_json, store->impl.mark_info_expanded(session_id, key(idempotency_key)));
  });
}

elicit_status elicit_finalize(elicit_store* store, const char* session_id, const char* idempotency_key,
                              char** out_json) {
  return guard([&] {
    require(store, "store");
    require(session_id, "session_id");
    emit(out_json, store->impl.finalize(session_id, key(idempotency_key)));
  });
}

elicit_status elicit_enter_event_outcome(elicit_store* store, const char* bearer_token, const char* body_json,
                                         const char* idempotency_key, char** out_json) {
  return guard([&] {
    require(store, "store");
    emit(out_json, store->impl.enter_event_outcome(bearer_token ? bearer_token : "", parse(body_json, "body_json"),
                                                   key(idempotency_key)));
  });
}

elicit_status elicit_session_log(elicit_store* store, const char* session_id, char** out_text) {
  return guard([&] {
    require(store, "store");
    require(session_id, "session_id");
    require(out_text, "out_text");
    *out_text = copy_out(store->impl.session_log(session_id));
  });
}

elicit_status elicit_replay_session(elicit_store* store, const char* session_id, char** out_json) {
  return guard([&] {
    require(store, "store");
    require(session_id, "session_id");
    emit(out_json, store->impl.replay(session_id));
  });
}

elicit_status elicit_replay_log(const char* log_path, char** out_json) {
  return guard([&] {
    require(log_path, "log_path");
    const elicit::ReplayReport r = elicit::replay_log(log_path);
    emit(out_json, Json{{"session_id", r.session_id},
                        {"status", r.status},
                        {"responses", r.responses},
                        {"matches_log", r.matches},
                        {"payment", r.has_payment ? r.payment : Json(nullptr)}});
  });
}

elicit_status elicit_scenario_config(const char* name, uint64_t seed, char** out_json) {
  return guard([&] {
    require(name, "name");
    emit(out_json, elicit::to_json(elicit::scenario_config(name, seed)));
  });
}

elicit_status elicit_population_override(const char* population_json, const char* overrides_json, char** out_json) {
  return guard([&] {
    elicit::PopulationConfig pop = elicit::population_from_json(parse(population_json, "population_json"));
    const Json o = overrides_json && *overrides_json ? parse(overrides_json, "overrides_json") : Json::object();
    if (!o.is_object()) throw elicit::Error(elicit::ErrorCode::InvalidArgument, "overrides must be an object");
    for (const auto& [k, v] : o.items()) {
      if (k == "seed") pop.seed = v.get<std::uint64_t>();
      else if (k == "agents") pop = elicit::with_agent_count(pop, v.get<int>());
      else if (k == "algorithm") pop.algorithm = elicit::parse_algorithm(v.get<std::string>());
      else if (k == "event") pop.event = elicit::EventSpec::parse(v.get<std::string>());
      else throw elicit::Error(elicit::ErrorCode::InvalidArgument, "unknown override '" + k + "'");
    }
    pop.validate();
    emit(out_json, elicit::to_json(pop));
  });
}

elicit_status elicit_simulate(const char* population_json, const char* out_dir, char** out_json) {
  return guard([&] {
    require(out_dir, "out_dir");
    const auto pop = elicit::population_from_json(parse(population_json, "population_json"));
    const auto result = elicit::simulate_population(pop, out_dir);
    emit(out_json, Json{{"sessions", result.logs.size()}, {"metadata", result.metadata}});
  });
}

elicit_status elicit_analyze(const char* log_dir, const char* out_dir, char** out_json) {
  return guard([&] {
    require(log_dir, "log_dir");
    require(out_dir, "out_dir");
    const auto sessions = elicit::load_sessions(log_dir);
    const auto report = elicit::analyze(sessions);
    Json metadata{{"sessions", sessions.size()}};
    std::ifstream pop_file(std::filesystem::path(log_dir) / "population.json");
    if (pop_file) metadata["population"] = Json::parse(pop_file);
    const auto files = elicit::write_report(report, metadata, out_dir);
    emit(out_json, Json{{"files", files}, {"report", elicit::to_json(report)}});
  });
}

elicit_status elicit_model_create(const char* model_json, elicit_model** out) {
  return guard([&] {
    require(out, "out");
    *out = new elicit_model{elicit::model_from_json(parse(model_json, "model_json"))};
  });
}

void elicit_model_free(elicit_model* model) { delete model; }

elicit_status elicit_model_compare(const elicit_model* model, const char* p_json, const char* q_json,
                                   char** out_relation) {
  return guard([&] {
    require(model, "model");
    require(out_relation, "out_relation");
    const auto p = elicit::lottery_from_json(parse(p_json, "p_json"));
    const auto q = elicit::lottery_from_json(parse(q_json, "q_json"));
    *out_relation = copy_out(std::string(elicit::to_string(elicit::compare(p, q, model->impl))));
  });
}

}  // extern "C"
