#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "elicit/event_log.hpp"

namespace elicit {

/// Durable session host behind the HTTP API. Sessions live in
/// `<dir>/sessions/<id>.jsonl`; operator outcomes in `<dir>/events.jsonl`;
/// cached idempotent replies in `<dir>/idempotency.jsonl`. Opening a store
/// replays everything, so a restart reproduces every session exactly.
///
/// Every method takes and returns JSON documents and throws elicit::Error.
/// Calls on one session are serialized; distinct sessions proceed in parallel.
class SessionStore {
 public:
  static constexpr int kSchemaVersion = 1;

  explicit SessionStore(std::filesystem::path dir, std::string admin_token = {},
                        std::shared_ptr<Clock> clock = nullptr);
  ~SessionStore();
  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  using Key = std::optional<std::string>;

  /// {"session_id", "status", "instructions"}.
  nlohmann::json create_session(const nlohmann::json& cfg, const Key& idempotency_key = {});
  /// Current screen: {"phase": "question" | "belief" | "finalize" | "done", ...}.
  nlohmann::json next_question(const std::string& id);
  /// Body {"question_id", "relation", "client_response_time_ms"?}.
  nlohmann::json submit_response(const std::string& id, const nlohmann::json& body, const Key& idempotency_key = {});
  nlohmann::json submit_belief(const std::string& id, const nlohmann::json& body, const Key& idempotency_key = {});
  nlohmann::json mark_info_expanded(const std::string& id, const Key& idempotency_key = {});
  /// Selects the paid decision; pending until the operator enters the outcome.
  nlohmann::json finalize(const std::string& id, const Key& idempotency_key = {});
  /// Body {"date": "YYYY-MM-DD", "state": "verb" | "not_verb"}; needs the admin token.
  nlohmann::json enter_event_outcome(const std::string& bearer_token, const nlohmann::json& body,
                                     const Key& idempotency_key = {});
  /// The raw JSON-lines log.
  std::string session_log(const std::string& id);
  /// Rebuilds the session from its log file and compares payments.
  nlohmann::json replay(const std::string& id);

  std::size_t session_count() const;

 private:
  struct Entry;

  Entry& entry(const std::string& id);
  std::filesystem::path log_path(const std::string& id) const;
  std::string new_session_id();
  nlohmann::json screen(Entry& e);

  // Runs `fn` once per (scope, key): later calls with the same key return
  // the first reply, and a different body under the same key is a conflict.
  template <class Fn>
  nlohmann::json idempotent(const std::string& scope, const Key& key, const nlohmann::json& body, Fn fn);

  std::filesystem::path dir_;
  std::string admin_token_;
  std::shared_ptr<Clock> clock_;

  mutable std::mutex mu_;  // guards the maps below and both side files
  std::map<std::string, std::unique_ptr<Entry>> sessions_;
  std::map<std::string, EventState> outcomes_;  // by event date
  struct Cached {
    std::string body_digest;
    nlohmann::json reply;
  };
  std::map<std::pair<std::string, std::string>, Cached> idempotency_;
};

}  // namespace elicit
