#include "elicit/service.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>
#include <vector>

#include "elicit/error.hpp"
#include "elicit/json_io.hpp"
#include "elicit/protocol.hpp"

namespace elicit {

using Json = nlohmann::json;

struct SessionStore::Entry {
  template <class... Args>
  explicit Entry(Args&&... args) : ls(std::forward<Args>(args)...) {}
  std::mutex mu;
  LoggedSession ls;
};

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); }

void check_schema(const Json& body) {
  if (!body.is_object()) bad("request body must be a JSON object");
  if (body.contains("schema_version") && body["schema_version"] != SessionStore::kSchemaVersion)
    bad("unsupported schema_version");
}

Json without_schema(Json body) {
  if (body.is_object()) body.erase("schema_version");
  return body;
}

// Reads a JSON-lines file, dropping a final line cut short by a crash.
std::vector<std::string> read_lines_repairing(const std::filesystem::path& path) {
  std::vector<std::string> lines;
  std::ifstream in(path, std::ios::binary);
  if (!in) return lines;
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) break;  // torn write
    if (nl > start) lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  if (start < text.size()) {
    in.close();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text.substr(0, start);
  }
  return lines;
}

void append_line(const std::filesystem::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  out << line << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "cannot append to " + path.string());
}

Json instructions_for(const SessionConfig& cfg) {
  return Json{{"version", protocol::kInstructionVersion},
              {"treatments",
               {{"non_forced", protocol::treatment_instructions(false)},
                {"forced", protocol::treatment_instructions(true)}}},
              {"algorithm",
               {{"summary", protocol::algorithm_summary()},
                {"details", protocol::algorithm_details(cfg.algorithm == Algorithm::Mle)}}},
              {"event", cfg.event.description}};
}

}  // namespace

SessionStore::SessionStore(std::filesystem::path dir, std::string admin_token, std::shared_ptr<Clock> clock)
    : dir_(std::move(dir)), admin_token_(std::move(admin_token)), clock_(std::move(clock)) {
  if (!clock_) clock_ = std::make_shared<SystemClock>();
  std::error_code ec;
  std::filesystem::create_directories(dir_ / "sessions", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create store at " + dir_.string() + ": " + ec.message());

  try {
    for (const auto& line : read_lines_repairing(dir_ / "events.jsonl")) {
      Json j = Json::parse(line);
      outcomes_[j.at("date").get<std::string>()] = parse_event_state(j.at("state").get<std::string>());
    }
    for (const auto& line : read_lines_repairing(dir_ / "idempotency.jsonl")) {
      Json j = Json::parse(line);
      idempotency_[{j.at("scope").get<std::string>(), j.at("key").get<std::string>()}] =
          Cached{j.at("body").get<std::string>(), j.at("reply")};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("corrupt store side file: ") + e.what());
  }

  std::vector<std::filesystem::path> logs;
  for (const auto& e : std::filesystem::directory_iterator(dir_ / "sessions"))
    if (e.path().extension() == ".jsonl") logs.push_back(e.path());
  std::sort(logs.begin(), logs.end());
  for (const auto& path : logs) {
    std::vector<LogEvent> events;
    for (const auto& line : read_lines_repairing(path)) events.push_back(LogEvent::from_line(line));
    if (events.empty()) continue;
    auto e = std::make_unique<Entry>(LoggedSession::replay(events, *clock_, FileSink(path)));
    // An outcome entered while this session was being written still applies.
    const auto it = outcomes_.find(e->ls.session().config().event_date);
    if (it != outcomes_.end() && !e->ls.outcome()) e->ls.enter_outcome(it->second);
    sessions_.emplace(e->ls.session().id(), std::move(e));
  }
}

SessionStore::~SessionStore() = default;

std::size_t SessionStore::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::filesystem::path SessionStore::log_path(const std::string& id) const { return dir_ / "sessions" / (id + ".jsonl"); }

std::string SessionStore::new_session_id() {
  static thread_local std::mt19937_64 gen{std::random_device{}()};
  for (;;) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "s%016llx", static_cast<unsigned long long>(gen()));
    if (!sessions_.count(buf)) return buf;
  }
}

SessionStore::Entry& SessionStore::entry(const std::string& id) {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "unknown session '" + id + "'");
  return *it->second;
}

template <class Fn>
Json SessionStore::idempotent(const std::string& scope, const Key& key, const Json& body, Fn fn) {
  if (!key) return fn();
  const std::string digest = body.dump();
  auto cached = [&]() -> std::optional<Json> {
    std::lock_guard lock(mu_);
    const auto it = idempotency_.find({scope, *key});
    if (it == idempotency_.end()) return std::nullopt;
    if (it->second.body_digest != digest)
      throw Error(ErrorCode::Conflict, "idempotency key reused with a different request");
    return it->second.reply;
  };
  if (auto hit = cached()) return *hit;
  Json reply;
  try {
    reply = fn();
  } catch (const Error&) {
    // A racing duplicate may have completed the same request first.
    if (auto hit = cached()) return *hit;
    throw;
  }
  std::lock_guard lock(mu_);
  const auto [it, inserted] = idempotency_.try_emplace({scope, *key}, Cached{digest, reply});
  if (inserted)
    append_line(dir_ / "idempotency.jsonl",
                Json{{"scope", scope}, {"key", *key}, {"body", digest}, {"reply", reply}}.dump());
  return it->second.reply;
}

Json SessionStore::create_session(const Json& cfg_json, const Key& key) {
  check_schema(cfg_json.is_null() ? Json::object() : cfg_json);
  return idempotent("create", key, cfg_json, [&] {
    Json j = cfg_json.is_null() ? Json::object() : cfg_json;
    if (!j.contains("rng_seed")) j["rng_seed"] = std::random_device{}() * 4294967296ull + std::random_device{}();
    SessionConfig cfg = session_config_from_json(j);
    std::lock_guard lock(mu_);
    const std::string id = new_session_id();
    auto e = std::make_unique<Entry>(id, cfg, *clock_, FileSink(log_path(id)), Json{{"source", "service"}});
    Json reply{{"schema_version", kSchemaVersion},
               {"session_id", id},
               {"status", to_string(e->ls.session().status())},
               {"questions", e->ls.session().plan().size()},
               {"instructions", instructions_for(cfg)}};
    sessions_.emplace(id, std::move(e));
    return reply;
  });
}

Json SessionStore::screen(Entry& e) {
  const Session& s = e.ls.session();
  if (s.status() == SessionStatus::Finalized) throw Error(ErrorCode::InvalidState, "session is finalized");
  Json out{{"schema_version", kSchemaVersion}, {"status", to_string(s.status())}};
  if (const Question* q = e.ls.serve()) {
    out["phase"] = "question";
    out["question"] = to_json(*q);
    out["progress"] = Json{{"answered", s.responses().size()}, {"total", s.plan().size()}};
  } else if (!s.belief()) {
    out["phase"] = "belief";
  } else {
    out["phase"] = "finalize";
  }
  out["status"] = to_string(s.status());
  return out;
}

Json SessionStore::next_question(const std::string& id) {
  Entry& e = entry(id);
  std::lock_guard lock(e.mu);
  return screen(e);
}

Json SessionStore::submit_response(const std::string& id, const Json& body, const Key& key) {
  check_schema(body);
  return idempotent(id + "/responses", key, body, [&] {
    const Json b = without_schema(body);
    for (const auto& [k, _] : b.items())
      if (k != "question_id" && k != "relation" && k != "client_response_time_ms")
        bad("unknown key '" + k + "' in response");
    std::uint32_t qid = 0;
    Relation rel{};
    std::optional<std::int64_t> client;
    try {
      qid = b.at("question_id").get<std::uint32_t>();
      rel = parse_relation(b.at("relation").get<std::string>());
      if (b.contains("client_response_time_ms") && !b["client_response_time_ms"].is_null())
        client = b["client_response_time_ms"].get<std::int64_t>();
    } catch (const nlohmann::json::exception& ex) {
      bad(std::string("response: ") + ex.what());
    }
    Entry& e = entry(id);
    std::lock_guard lock(e.mu);
    if (e.ls.session().status() == SessionStatus::Finalized) throw Error(ErrorCode::InvalidState, "session is finalized");
    const Response& r = e.ls.respond(qid, rel, client);
    return Json{{"schema_version", kSchemaVersion}, {"response", to_json(r)}, {"next", screen(e)}};
  });
}

Json SessionStore::submit_belief(const std::string& id, const Json& body, const Key& key) {
  check_schema(body);
  return idempotent(id + "/belief", key, body, [&] {
    const BeliefReport b = belief_from_json(without_schema(body));
    Entry& e = entry(id);
    std::lock_guard lock(e.mu);
    e.ls.record_belief(b);
    return Json{{"schema_version", kSchemaVersion}, {"belief", to_json(b)}, {"next", screen(e)}};
  });
}

Json SessionStore::mark_info_expanded(const std::string& id, const Key& key) {
  return idempotent(id + "/info-expanded", key, Json::object(), [&] {
    Entry& e = entry(id);
    std::lock_guard lock(e.mu);
    e.ls.mark_info_expanded();
    return Json{{"schema_version", kSchemaVersion}, {"info_expanded", true}};
  });
}

Json SessionStore::finalize(const std::string& id, const Key& key) {
  return idempotent(id + "/finalize", key, Json::object(), [&] {
    Entry& e = entry(id);
    std::optional<EventState> known;
    {
      std::lock_guard lock(mu_);
      const auto it = outcomes_.find(e.ls.session().config().event_date);
      if (it != outcomes_.end()) known = it->second;
    }
    std::lock_guard lock(e.mu);
    e.ls.finalize();
    if (known && !e.ls.outcome()) e.ls.enter_outcome(*known);
    return Json{{"schema_version", kSchemaVersion},
                {"status", to_string(e.ls.session().status())},
                {"payment", to_json(*e.ls.payment())}};
  });
}

Json SessionStore::enter_event_outcome(const std::string& bearer_token, const Json& body, const Key& key) {
  if (admin_token_.empty() || bearer_token != admin_token_)
    throw Error(ErrorCode::Unauthorized, "admin route requires a valid bearer token");
  check_schema(body);
  return idempotent("admin/event-outcome", key, body, [&] {
    std::string date;
    EventState state{};
    try {
      date = body.at("date").get<std::string>();
      state = parse_event_state(body.at("state").get<std::string>());
    } catch (const nlohmann::json::exception& ex) {
      bad(std::string("event outcome: ") + ex.what());
    }
    static const std::regex iso(R"(\d{4}-\d{2}-\d{2})");
    if (!std::regex_match(date, iso)) bad("date must be YYYY-MM-DD");

    std::vector<Entry*> affected;
    {
      std::lock_guard lock(mu_);
      if (outcomes_.count(date)) throw Error(ErrorCode::Conflict, "outcome for " + date + " already entered");
      for (auto& [_, e] : sessions_)
        if (e->ls.session().config().event_date == date) affected.push_back(e.get());
      if (affected.empty()) throw Error(ErrorCode::NotFound, "no session resolves on " + date);
      append_line(dir_ / "events.jsonl",
                  Json{{"date", date}, {"state", to_string(state)}, {"entered_at", clock_->wall_ms()}}.dump());
      outcomes_[date] = state;
    }
    std::size_t settled = 0;
    for (Entry* e : affected) {
      std::lock_guard lock(e->mu);
      e->ls.enter_outcome(state);
      settled += e->ls.payment().has_value();
    }
    return Json{{"schema_version", kSchemaVersion},
                {"date", date},
                {"state", to_string(state)},
                {"sessions", affected.size()},
                {"settled_payments", settled}};
  });
}

std::string SessionStore::session_log(const std::string& id) {
  Entry& e = entry(id);
  std::lock_guard lock(e.mu);
  std::ifstream in(log_path(id), std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read log for " + id);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json SessionStore::replay(const std::string& id) {
  Entry& e = entry(id);
  std::lock_guard lock(e.mu);
  const ReplayReport r = replay_log(log_path(id));
  Json j{{"schema_version", kSchemaVersion},
         {"session_id", r.session_id},
         {"status", r.status},
         {"responses", r.responses},
         {"matches_log", r.matches},
         {"payment", r.has_payment ? r.payment : Json(nullptr)}};
  if (e.ls.payment()) j["matches_live"] = to_json(*e.ls.payment()) == r.payment;
  return j;
}

}  // namespace elicit
