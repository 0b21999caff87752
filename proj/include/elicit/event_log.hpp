#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "elicit/payment.hpp"
#include "elicit/session.hpp"

namespace elicit {

/// One line of a session's append-only JSON-lines log.
struct LogEvent {
  std::string session_id;
  std::uint64_t seq = 0;
  std::string kind;
  nlohmann::json payload = nlohmann::json::object();
  std::int64_t wall_time = 0;  // ms since the Unix epoch
  std::int64_t mono_time = 0;  // ms on the engine's monotonic clock

  std::string to_line() const;
  static LogEvent from_line(const std::string& line);
};

namespace event_kind {
inline constexpr const char* kCreated = "session_created";
inline constexpr const char* kServed = "question_served";
inline constexpr const char* kResponse = "response";
inline constexpr const char* kInfoExpanded = "info_expanded";
inline constexpr const char* kBelief = "belief";
inline constexpr const char* kFinalized = "finalized";
inline constexpr const char* kPaymentSelected = "payment_selected";
inline constexpr const char* kEventOutcome = "event_outcome";
inline constexpr const char* kPaymentSettled = "payment_settled";
}  // namespace event_kind

std::vector<LogEvent> read_event_log(const std::filesystem::path& path);
std::vector<LogEvent> parse_event_log(std::istream& in);

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t wall_ms() = 0;
  virtual std::int64_t mono_ms() = 0;
};

class SystemClock : public Clock {
 public:
  std::int64_t wall_ms() override;
  std::int64_t mono_ms() override;
};

/// Deterministic clock for simulations: time only moves through `advance`.
class ManualClock : public Clock {
 public:
  explicit ManualClock(std::int64_t wall_start_ms = 1767225600000 /* 2026-01-01 */) : wall0_(wall_start_ms) {}
  std::int64_t wall_ms() override { return wall0_ + mono_; }
  std::int64_t mono_ms() override { return mono_; }
  void advance(std::int64_t ms) { mono_ += ms; }

 private:
  std::int64_t wall0_;
  std::int64_t mono_ = 0;
};

using LineSink = std::function<void(const std::string&)>;

/// Appends lines to a file, flushing each one.
class FileSink {
 public:
  explicit FileSink(const std::filesystem::path& path);
  void operator()(const std::string& line);

 private:
  std::shared_ptr<std::ofstream> out_;
};

/// Session state machine bound to its event log: every accepted transition
/// is appended before the call returns, and rejected calls log nothing.
class LoggedSession {
 public:
  LoggedSession(std::string id, SessionConfig cfg, Clock& clock, LineSink sink, nlohmann::json created_extra = {});

  const Session& session() const { return session_; }
  const std::optional<PaymentOutcome>& payment() const { return payment_; }
  const std::optional<EventState>& outcome() const { return outcome_; }

  /// In-flight question, logging the serve time on first display.
  const Question* serve();
  const Response& respond(std::uint32_t question_id, Relation rel, std::optional<std::int64_t> client_ms = std::nullopt);
  void mark_info_expanded();
  void record_belief(const BeliefReport& b);
  /// Finalizes and selects the paid decision; resolves it if the outcome is known.
  const PaymentOutcome& finalize();
  /// Enters the event outcome and settles a finalized session.
  void enter_outcome(EventState s);

  /// Rebuilds a session from its log, re-deriving the payment from seeds.
  /// Throws Error(Parse) on a malformed log.
  static LoggedSession replay(const std::vector<LogEvent>& events, Clock& clock, LineSink sink = nullptr);

  /// Payment events as logged, for comparison with a replayed outcome.
  const std::optional<nlohmann::json>& logged_payment() const { return logged_payment_; }

 private:
  struct ReplayTag {};
  LoggedSession(ReplayTag, std::string id, SessionConfig cfg, Clock& clock, LineSink sink);
  void log(const char* kind, nlohmann::json payload);

  Session session_;
  Clock* clock_;
  LineSink sink_;
  std::uint64_t seq_ = 0;
  std::optional<PaymentOutcome> payment_;
  std::optional<EventState> outcome_;
  std::optional<nlohmann::json> logged_payment_;
  bool replaying_ = false;
};

struct ReplayReport {
  std::string session_id;
  std::string status;
  std::size_t responses = 0;
  bool has_payment = false;
  bool matches = true;  // recomputed payment equals the logged one
  nlohmann::json payment;
};

/// Replays a log file and checks the recomputed payment against the logged one.
ReplayReport replay_log(const std::filesystem::path& path);

}  // namespace elicit
