#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "elicit/model.hpp"
#include "elicit/plan.hpp"

namespace elicit {

struct Response {
  std::uint32_t question_id = 0;
  Relation relation = Relation::FirstPreferred;
  /// Engine monotonic clock at receipt, in ms since session start.
  std::int64_t submitted_at_ms = 0;
  /// Engine-measured time from serving the question to receipt.
  std::int64_t response_time_ms = 0;
  /// Optional render-to-submit duration reported by the client.
  std::optional<std::int64_t> client_response_time_ms;
};

/// Self-reported belief in integer percent.
struct BeliefReport {
  int point_pct = 50;
  bool certain = true;
  std::optional<std::pair<int, int>> range_pct;

  /// Throws Error(InvalidArgument) on any violated invariant.
  void validate() const;
  Belief point() const { return Belief{point_pct / 100.0}; }
  /// Prior the MLE rule conditions on: the point, or the range midpoint when uncertain.
  Belief estimation_belief() const;
};

enum class SessionStatus { Created, InProgress, AwaitingBelief, Finalized };

std::string_view to_string(SessionStatus s);

/// Single-writer elicitation state machine: exactly one in-flight question,
/// then the belief report, then finalization.
class Session {
 public:
  Session(std::string id, SessionConfig cfg);

  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return cfg_; }
  const std::vector<Question>& plan() const { return plan_; }
  const std::vector<Response>& responses() const { return responses_; }
  const std::optional<BeliefReport>& belief() const { return belief_; }
  SessionStatus status() const { return status_; }

  /// Question awaiting an answer; nullopt once every question is answered.
  const Question* in_flight() const;
  std::optional<Relation> response_for(std::uint32_t question_id) const;

  /// Records when the in-flight question was shown, for response timing.
  void mark_served(std::int64_t mono_ms);
  std::optional<std::int64_t> served_at() const { return served_at_ms_; }

  /// Appends `r`, computing its response time from the serve mark.
  /// Throws Error(Conflict) for duplicate or out-of-order ids and
  /// Error(ForbiddenRelation) when the treatment does not offer `r.relation`.
  const Response& record_response(std::uint32_t question_id, Relation relation, std::int64_t mono_ms,
                                  std::optional<std::int64_t> client_ms = std::nullopt);
  /// Lower-level form used by replay: the response is taken verbatim.
  void append_response(const Response& r);

  void record_belief(const BeliefReport& b);
  void finalize();

  bool info_expanded() const { return info_expanded_; }
  void set_info_expanded() { info_expanded_ = true; }

 private:
  std::string id_;
  SessionConfig cfg_;
  std::vector<Question> plan_;
  std::vector<Response> responses_;
  std::optional<BeliefReport> belief_;
  std::optional<std::int64_t> served_at_ms_;
  SessionStatus status_ = SessionStatus::Created;
  bool info_expanded_ = false;
};

}  // namespace elicit
