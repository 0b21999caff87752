#include "elicit/session.hpp"

#include <string>

#include "elicit/error.hpp"

namespace elicit {

void BeliefReport::validate() const {
  auto pct_ok = [](int v) { return v >= 0 && v <= 100; };
  if (!pct_ok(point_pct)) throw Error(ErrorCode::InvalidArgument, "belief point must be an integer percent in [0, 100]");
  if (certain) {
    if (range_pct) throw Error(ErrorCode::InvalidArgument, "a certain belief carries no range");
    return;
  }
  if (!range_pct) throw Error(ErrorCode::InvalidArgument, "an uncertain belief requires a range");
  auto [lo, hi] = *range_pct;
  if (!pct_ok(lo) || !pct_ok(hi) || lo > hi) throw Error(ErrorCode::InvalidArgument, "belief range must satisfy 0 <= lo <= hi <= 100");
  if (point_pct < lo || point_pct > hi) throw Error(ErrorCode::InvalidArgument, "belief range must contain the point");
}

Belief BeliefReport::estimation_belief() const {
  if (!certain && range_pct) return Belief{(range_pct->first + range_pct->second) / 200.0};
  return point();
}

std::string_view to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::Created: return "created";
    case SessionStatus::InProgress: return "in_progress";
    case SessionStatus::AwaitingBelief: return "awaiting_belief";
    case SessionStatus::Finalized: return "finalized";
  }
  return "?";
}

Session::Session(std::string id, SessionConfig cfg) : id_(std::move(id)), cfg_(std::move(cfg)), plan_(build_plan(cfg_)) {}

const Question* Session::in_flight() const {
  if (responses_.size() >= plan_.size()) return nullptr;
  return &plan_[responses_.size()];
}

std::optional<Relation> Session::response_for(std::uint32_t question_id) const {
  if (question_id < responses_.size()) return responses_[question_id].relation;
  return std::nullopt;
}

void Session::mark_served(std::int64_t mono_ms) {
  if (status_ == SessionStatus::Finalized) throw Error(ErrorCode::InvalidState, "session is finalized");
  if (!in_flight()) return;
  if (!served_at_ms_) served_at_ms_ = mono_ms;
  if (status_ == SessionStatus::Created) status_ = SessionStatus::InProgress;
}

const Response& Session::record_response(std::uint32_t question_id, Relation relation, std::int64_t mono_ms,
                                         std::optional<std::int64_t> client_ms) {
  Response r;
  r.question_id = question_id;
  r.relation = relation;
  r.submitted_at_ms = mono_ms;
  const std::int64_t served = served_at_ms_.value_or(responses_.empty() ? 0 : responses_.back().submitted_at_ms);
  r.response_time_ms = mono_ms > served ? mono_ms - served : 0;
  if (client_ms && *client_ms < 0) throw Error(ErrorCode::InvalidArgument, "client response time must be >= 0");
  r.client_response_time_ms = client_ms;
  append_response(r);
  return responses_.back();
}

void Session::append_response(const Response& r) {
  if (status_ == SessionStatus::Finalized || status_ == SessionStatus::AwaitingBelief)
    throw Error(ErrorCode::Conflict, "all questions already answered");
  const Question* q = in_flight();
  if (r.question_id < responses_.size())
    throw Error(ErrorCode::Conflict, "question " + std::to_string(r.question_id) + " already answered");
  if (!q || r.question_id != q->id)
    throw Error(ErrorCode::Conflict, "question " + std::to_string(r.question_id) + " is not the in-flight question");
  if (!is_allowed(q->treatment, r.relation))
    throw Error(ErrorCode::ForbiddenRelation,
                "forced treatment: only a ranking of one gamble above the other is accepted");
  if (r.response_time_ms < 0) throw Error(ErrorCode::InvalidArgument, "response time must be >= 0");
  if (!responses_.empty() && r.submitted_at_ms < responses_.back().submitted_at_ms)
    throw Error(ErrorCode::InvalidArgument, "response timestamps must be nondecreasing");
  responses_.push_back(r);
  served_at_ms_.reset();
  status_ = responses_.size() == plan_.size() ? SessionStatus::AwaitingBelief : SessionStatus::InProgress;
}

void Session::record_belief(const BeliefReport& b) {
  if (status_ != SessionStatus::AwaitingBelief) {
    if (belief_) throw Error(ErrorCode::Conflict, "belief already recorded");
    throw Error(ErrorCode::InvalidState, "belief is elicited after every question is answered");
  }
  if (belief_) throw Error(ErrorCode::Conflict, "belief already recorded");
  b.validate();
  belief_ = b;
}

void Session::finalize() {
  if (status_ == SessionStatus::Finalized) return;
  if (status_ != SessionStatus::AwaitingBelief || !belief_)
    throw Error(ErrorCode::InvalidState, "session cannot be finalized before the belief report");
  status_ = SessionStatus::Finalized;
}

}  // namespace elicit
