#include "elicit/event_log.hpp"

#include <chrono>
#include <sstream>

#include "elicit/error.hpp"
#include "elicit/json_io.hpp"

namespace elicit {

std::string LogEvent::to_line() const {
  Json j{{"session_id", session_id}, {"seq", seq},          {"kind", kind},
         {"payload", payload},       {"wall_time", wall_time}, {"mono_time", mono_time}};
  return j.dump();
}

LogEvent LogEvent::from_line(const std::string& line) {
  try {
    Json j = Json::parse(line);
    LogEvent e;
    e.session_id = j.at("session_id").get<std::string>();
    e.seq = j.at("seq").get<std::uint64_t>();
    e.kind = j.at("kind").get<std::string>();
    e.payload = j.at("payload");
    e.wall_time = j.at("wall_time").get<std::int64_t>();
    e.mono_time = j.at("mono_time").get<std::int64_t>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::Parse, std::string("malformed log line: ") + ex.what());
  }
}

std::vector<LogEvent> parse_event_log(std::istream& in) {
  std::vector<LogEvent> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(LogEvent::from_line(line));
    if (out.back().seq != out.size() - 1) throw Error(ErrorCode::Parse, "log sequence numbers are not contiguous");
  }
  return out;
}

std::vector<LogEvent> read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open log " + path.string());
  return parse_event_log(in);
}

std::int64_t SystemClock::wall_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::int64_t SystemClock::mono_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

FileSink::FileSink(const std::filesystem::path& path)
    : out_(std::make_shared<std::ofstream>(path, std::ios::app | std::ios::binary)) {
  if (!*out_) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for appending");
}

void FileSink::operator()(const std::string& line) {
  *out_ << line << '\n';
  out_->flush();
  if (!*out_) throw Error(ErrorCode::Io, "write to event log failed");
}

LoggedSession::LoggedSession(std::string id, SessionConfig cfg, Clock& clock, LineSink sink, Json created_extra)
    : session_(std::move(id), std::move(cfg)), clock_(&clock), sink_(std::move(sink)) {
  Json payload = created_extra.is_object() ? std::move(created_extra) : Json::object();
  payload["config"] = to_json(session_.config());
  log(event_kind::kCreated, std::move(payload));
}

LoggedSession::LoggedSession(ReplayTag, std::string id, SessionConfig cfg, Clock& clock, LineSink sink)
    : session_(std::move(id), std::move(cfg)), clock_(&clock), sink_(std::move(sink)), replaying_(true) {}

void LoggedSession::log(const char* kind, Json payload) {
  if (replaying_) return;
  LogEvent e;
  e.session_id = session_.id();
  e.seq = seq_++;
  e.kind = kind;
  e.payload = std::move(payload);
  e.wall_time = clock_->wall_ms();
  e.mono_time = clock_->mono_ms();
  if (sink_) sink_(e.to_line());
}

const Question* LoggedSession::serve() {
  const Question* q = session_.in_flight();
  if (session_.status() == SessionStatus::Finalized) throw Error(ErrorCode::InvalidState, "session is finalized");
  if (!q) return nullptr;
  if (!session_.served_at()) {
    session_.mark_served(clock_->mono_ms());
    log(event_kind::kServed, Json{{"question_id", q->id}});
  }
  return q;
}

const Response& LoggedSession::respond(std::uint32_t question_id, Relation rel, std::optional<std::int64_t> client_ms) {
  const Response& r = session_.record_response(question_id, rel, clock_->mono_ms(), client_ms);
  log(event_kind::kResponse, to_json(r));
  return r;
}

void LoggedSession::mark_info_expanded() {
  if (session_.info_expanded()) return;
  session_.set_info_expanded();
  log(event_kind::kInfoExpanded, Json::object());
}

void LoggedSession::record_belief(const BeliefReport& b) {
  session_.record_belief(b);
  log(event_kind::kBelief, to_json(b));
}

const PaymentOutcome& LoggedSession::finalize() {
  if (payment_) return *payment_;
  session_.finalize();
  log(event_kind::kFinalized, Json::object());
  payment_ = select_paid_decision(session_, run_algorithms(session_));
  log(event_kind::kPaymentSelected, to_json(*payment_));
  if (outcome_) {
    resolve_payment(*payment_, *outcome_);
    log(event_kind::kPaymentSettled, to_json(*payment_));
  }
  return *payment_;
}

void LoggedSession::enter_outcome(EventState s) {
  if (outcome_) {
    if (*outcome_ != s) throw Error(ErrorCode::Conflict, "event outcome already entered");
    return;
  }
  outcome_ = s;
  log(event_kind::kEventOutcome, Json{{"state", to_string(s)}});
  if (payment_ && payment_->pending()) {
    resolve_payment(*payment_, s);
    log(event_kind::kPaymentSettled, to_json(*payment_));
  }
}

LoggedSession LoggedSession::replay(const std::vector<LogEvent>& events, Clock& clock, LineSink sink) {
  if (events.empty() || events.front().kind != event_kind::kCreated)
    throw Error(ErrorCode::Parse, "log must start with a session_created event");
  const auto& first = events.front();
  LoggedSession ls(ReplayTag{}, first.session_id, session_config_from_json(first.payload.at("config")), clock,
                   std::move(sink));
  try {
    for (std::size_t i = 1; i < events.size(); ++i) {
      const auto& e = events[i];
      if (e.session_id != first.session_id) throw Error(ErrorCode::Parse, "log mixes sessions");
      if (e.kind == event_kind::kServed) {
        ls.session_.mark_served(e.mono_time);
      } else if (e.kind == event_kind::kResponse) {
        ls.session_.append_response(response_from_json(e.payload));
      } else if (e.kind == event_kind::kInfoExpanded) {
        ls.session_.set_info_expanded();
      } else if (e.kind == event_kind::kBelief) {
        ls.session_.record_belief(belief_from_json(e.payload));
      } else if (e.kind == event_kind::kFinalized) {
        ls.session_.finalize();
        ls.payment_ = select_paid_decision(ls.session_, run_algorithms(ls.session_));
        if (ls.outcome_) resolve_payment(*ls.payment_, *ls.outcome_);
      } else if (e.kind == event_kind::kEventOutcome) {
        ls.outcome_ = parse_event_state(e.payload.at("state").get<std::string>());
        if (ls.payment_ && ls.payment_->pending()) resolve_payment(*ls.payment_, *ls.outcome_);
      } else if (e.kind == event_kind::kPaymentSelected || e.kind == event_kind::kPaymentSettled) {
        ls.logged_payment_ = e.payload;
      } else {
        throw Error(ErrorCode::Parse, "unknown log event kind '" + e.kind + "'");
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::Parse, std::string("malformed log payload: ") + ex.what());
  }
  ls.seq_ = events.size();
  ls.replaying_ = false;
  return ls;
}

ReplayReport replay_log(const std::filesystem::path& path) {
  ManualClock clock;
  auto events = read_event_log(path);
  LoggedSession ls = LoggedSession::replay(events, clock);
  ReplayReport r;
  r.session_id = ls.session().id();
  r.status = std::string(to_string(ls.session().status()));
  r.responses = ls.session().responses().size();
  r.has_payment = ls.payment().has_value();
  if (ls.payment()) r.payment = to_json(*ls.payment());
  if (ls.logged_payment()) r.matches = ls.payment() && *ls.logged_payment() == r.payment;
  else r.matches = !ls.payment();
  return r;
}

}  // namespace elicit
