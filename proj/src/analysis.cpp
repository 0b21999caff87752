#include "elicit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "elicit/error.hpp"
#include "elicit/event_log.hpp"
#include "elicit/protocol.hpp"

namespace elicit {

namespace {

constexpr std::size_t kN = 25;
constexpr int kNF = 0;
constexpr int kF = 1;

std::size_t lottery_index(const Lottery& l) {
  const auto lots = protocol::lotteries();
  const auto it = std::find(lots.begin(), lots.end(), l);
  if (it == lots.end()) throw Error(ErrorCode::Parse, "answer refers to a lottery outside the protocol: " + l.to_string());
  return static_cast<std::size_t>(it - lots.begin());
}

const std::array<std::size_t, 2>& reference_index() {
  static const std::array<std::size_t, 2> idx{lottery_index(protocol::kReferences[0]),
                                              lottery_index(protocol::kReferences[1])};
  return idx;
}

Lottery lot(std::size_t i) { return protocol::lotteries()[i]; }

/// One subject's lottery answers as [treatment][reference][comparison].
struct Answers {
  std::array<std::array<std::array<std::optional<Relation>, kN>, 2>, 2> rel{};
  std::array<std::array<std::array<std::int64_t, kN>, 2>, 2> rt{};

  const std::optional<Relation>& at(int t, int r, std::size_t p) const { return rel[t][r][p]; }
};

Answers answers_of(const Session& s) {
  Answers a;
  for (const auto& resp : s.responses()) {
    const Question& q = s.plan().at(resp.question_id);
    if (q.symbolic) continue;
    const int t = q.treatment == Treatment::NonForced ? kNF : kF;
    const int r = q.reference == protocol::kReferences[0] ? 0 : 1;
    const std::size_t p = lottery_index(q.comparison);
    a.rel[t][r][p] = resp.relation;
    a.rt[t][r][p] = resp.response_time_ms;
  }
  return a;
}

std::vector<Answers> answers_of(const std::vector<Session>& sessions) {
  std::vector<Answers> out;
  out.reserve(sessions.size());
  for (const auto& s : sessions) out.push_back(answers_of(s));
  return out;
}

std::size_t incomparable_count(const Answers& a) {
  std::size_t n = 0;
  for (int r = 0; r < 2; ++r)
    for (std::size_t p = 0; p < kN; ++p) n += a.at(kNF, r, p) == Relation::Incomparable;
  return n;
}

std::size_t relation_slot(Relation r) { return static_cast<std::size_t>(r); }

constexpr std::array<Relation, 4> kAllRelations{Relation::FirstPreferred, Relation::SecondPreferred,
                                                Relation::Indifferent, Relation::Incomparable};

// Orientation of the first item against the second.
enum class Ord { Over, Under, Equal, None };

Ord from_block(const std::optional<Relation>& r) {
  if (!r) return Ord::None;
  switch (*r) {
    case Relation::FirstPreferred: return Ord::Over;
    case Relation::SecondPreferred: return Ord::Under;
    case Relation::Indifferent: return Ord::Equal;
    case Relation::Incomparable: return Ord::None;
  }
  return Ord::None;
}

Ord flip(Ord o) { return o == Ord::Over ? Ord::Under : o == Ord::Under ? Ord::Over : o; }

// Leg strength when read in the direction "first >= second".
enum class Leg { No, Weak, Strict };

Leg forward(Ord o) { return o == Ord::Over ? Leg::Strict : o == Ord::Equal ? Leg::Weak : Leg::No; }
Leg backward(Ord o) { return forward(flip(o)); }

struct CycleCheck {
  bool strict = false;
  bool weak = false;  // allows indifferent legs, at least one strict
};

CycleCheck check_cycle(Leg a, Leg b, Leg c) {
  CycleCheck out;
  if (a == Leg::No || b == Leg::No || c == Leg::No) return out;
  out.strict = a == Leg::Strict && b == Leg::Strict && c == Leg::Strict;
  out.weak = a == Leg::Strict || b == Leg::Strict || c == Leg::Strict;
  return out;
}

struct Triple {
  Ord p1;                     // p vs r1
  Ord p2;                     // p vs r2
  std::array<Ord, 2> r12;     // r1 vs r2, one per block
};

Triple triple(const Answers& a, int t, std::size_t p) {
  const auto& ref = reference_index();
  return Triple{from_block(a.at(t, 0, p)), from_block(a.at(t, 1, p)),
                {flip(from_block(a.at(t, 0, ref[1]))), from_block(a.at(t, 1, ref[0]))}};
}

CycleCheck violation(const Triple& tr) {
  CycleCheck any;
  for (Ord r12 : tr.r12) {
    // p >= r1 >= r2 >= p, then p >= r2 >= r1 >= p.
    for (const CycleCheck c : {check_cycle(forward(tr.p1), forward(r12), backward(tr.p2)),
                               check_cycle(forward(tr.p2), backward(r12), backward(tr.p1))}) {
      any.strict |= c.strict;
      any.weak |= c.weak;
    }
  }
  return any;
}

bool is_strict_ord(Ord o) { return o == Ord::Over || o == Ord::Under; }

void tally(ConsistencyCell& cell, bool ok) {
  ++cell.total;
  cell.consistent += ok;
}

}  // namespace

std::optional<double> TransitivityStats::strict_rate() const {
  if (!strict_opportunities) return std::nullopt;
  return static_cast<double>(strict_violations) / strict_opportunities;
}

std::optional<double> TransitivityStats::weak_rate() const {
  if (!weak_opportunities) return std::nullopt;
  return static_cast<double>(weak_violations) / weak_opportunities;
}

std::vector<AggregateRow> aggregate_choices(const std::vector<Session>& sessions) {
  if (sessions.empty()) throw Error(ErrorCode::InvalidArgument, "no sessions to aggregate");
  const auto answers = answers_of(sessions);
  std::vector<AggregateRow> rows;
  for (int r = 0; r < 2; ++r) {
    std::array<std::size_t, 4> counts{};
    for (const auto& a : answers)
      for (std::size_t p = 0; p < kN; ++p)
        if (p != reference_index()[r] && a.at(kNF, r, p)) ++counts[relation_slot(*a.at(kNF, r, p))];
    AggregateRow row;
    row.reference = protocol::kReferences[r];
    row.cells = counts[0] + counts[1] + counts[2] + counts[3];
    if (row.cells) {
      const double n = static_cast<double>(row.cells);
      row.prefer_comparison = counts[relation_slot(Relation::FirstPreferred)] / n;
      row.prefer_reference = counts[relation_slot(Relation::SecondPreferred)] / n;
      row.indifferent = counts[relation_slot(Relation::Indifferent)] / n;
      row.incomplete = counts[relation_slot(Relation::Incomparable)] / n;
    }
    rows.push_back(row);
  }
  if (rows[0].cells + rows[1].cells == 0)
    throw Error(ErrorCode::InvalidArgument, "no NonForced lottery answers to aggregate");
  return rows;
}

std::vector<std::size_t> incompleteness_histogram(const std::vector<Session>& sessions) {
  std::vector<std::size_t> h(2 * kN + 1, 0);
  for (const auto& s : sessions) ++h[incomparable_count(answers_of(s))];
  return h;
}

DominanceReport dominance_consistency(const std::vector<Session>& sessions) {
  DominanceReport out;
  for (const auto& s : sessions) {
    const Answers a = answers_of(s);
    for (int r = 0; r < 2; ++r) {
      const std::size_t ri = reference_index()[r];
      for (std::size_t p = 0; p < kN; ++p) {
        if (p == ri || !a.at(kNF, r, p)) continue;
        const Relation rp = *a.at(kNF, r, p);
        if (is_strict(rp)) continue;
        const bool incomplete = rp == Relation::Incomparable;
        for (std::size_t q = 0; q < kN; ++q) {
          if (q == p || q == ri || !a.at(kNF, r, q) || !is_strict(*a.at(kNF, r, q))) continue;
          const Relation rq = *a.at(kNF, r, q);
          const Dominance up = dominates(lot(q), lot(p));
          const Dominance down = dominates(lot(p), lot(q));
          for (auto* variant : {&out.weak, &out.strict}) {
            const bool strict_only = variant == &out.strict;
            auto counts = [&](Dominance d) { return strict_only ? d == Dominance::StrictBoth : d != Dominance::None; };
            if (counts(up))
              tally(incomplete ? variant->incomplete_dominating : variant->indifferent_dominating,
                    rq == Relation::FirstPreferred);
            if (counts(down))
              tally(incomplete ? variant->incomplete_dominated : variant->indifferent_dominated,
                    rq == Relation::SecondPreferred);
          }
        }
      }
    }
  }
  return out;
}

std::vector<DistanceRow> distance_stats(const std::vector<Session>& sessions) {
  // Integer counts per cell keep the means independent of subject order.
  std::array<std::array<std::array<std::size_t, kN>, 4>, 2> counts{};
  for (const auto& s : sessions) {
    const Answers a = answers_of(s);
    for (int r = 0; r < 2; ++r)
      for (std::size_t p = 0; p < kN; ++p)
        if (p != reference_index()[r] && a.at(kNF, r, p)) ++counts[r][relation_slot(*a.at(kNF, r, p))][p];
  }
  std::vector<DistanceRow> rows;
  for (int r = 0; r < 2; ++r) {
    for (Relation kind : kAllRelations) {
      DistanceRow row{protocol::kReferences[r], kind, 0, std::nullopt};
      double sum = 0;
      for (std::size_t p = 0; p < kN; ++p) {
        const std::size_t c = counts[r][relation_slot(kind)][p];
        row.n += c;
        sum += static_cast<double>(c) * euclidean_distance(lot(p), protocol::kReferences[r]);
      }
      if (row.n) row.mean = sum / static_cast<double>(row.n);
      rows.push_back(row);
    }
  }
  return rows;
}

TransitivityStats transitivity_violations(const std::vector<Session>& sessions, Treatment treatment) {
  TransitivityStats st;
  st.treatment = treatment;
  const int t = treatment == Treatment::NonForced ? kNF : kF;
  const auto& ref = reference_index();
  for (const auto& s : sessions) {
    const Answers a = answers_of(s);
    for (std::size_t p = 0; p < kN; ++p) {
      if (p == ref[0] || p == ref[1]) continue;
      const Triple tr = triple(a, t, p);
      const bool any_report = tr.r12[0] != Ord::None || tr.r12[1] != Ord::None;
      const bool any_strict_report = is_strict_ord(tr.r12[0]) || is_strict_ord(tr.r12[1]);
      const CycleCheck v = violation(tr);
      if (is_strict_ord(tr.p1) && is_strict_ord(tr.p2) && any_strict_report) {
        ++st.strict_opportunities;
        st.strict_violations += v.strict;
      }
      if (treatment == Treatment::NonForced) {
        if (tr.p1 != Ord::None && tr.p2 != Ord::None && any_report) {
          ++st.weak_opportunities;
          st.weak_violations += v.weak;
        }
        continue;
      }
      if (!(is_strict_ord(tr.p1) && is_strict_ord(tr.p2) && any_strict_report)) continue;
      const Triple nf = triple(a, kNF, p);
      if (!a.at(kNF, 0, p) || !a.at(kNF, 1, p)) continue;
      const bool p_legs = !is_strict_ord(nf.p1) || !is_strict_ord(nf.p2);
      const bool with_ref = p_legs || !is_strict_ord(nf.r12[0]) || !is_strict_ord(nf.r12[1]);
      if (v.strict) {
        tally(st.violations_nonstrict_p_legs, p_legs);
        tally(st.violations_nonstrict_with_reference_leg, with_ref);
      } else {
        tally(st.transitive_nonstrict_p_legs, p_legs);
        tally(st.transitive_nonstrict_with_reference_leg, with_ref);
      }
    }
  }
  return st;
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

ReversalReport reversal_analysis(const std::vector<Session>& sessions) {
  const auto answers = answers_of(sessions);
  ReversalReport out;
  for (int r = 0; r < 2; ++r) {
    std::vector<double> inc, rev;
    for (std::size_t p = 0; p < kN; ++p) {
      if (p == reference_index()[r]) continue;
      ReversalRow row;
      row.reference = protocol::kReferences[r];
      row.comparison = lot(p);
      std::size_t n_inc = 0, n_rev = 0;
      for (const auto& a : answers) {
        const auto& nf = a.at(kNF, r, p);
        const auto& f = a.at(kF, r, p);
        if (!nf || !f) continue;
        ++row.subjects;
        n_inc += *nf == Relation::Incomparable;
        if (is_strict(*nf)) {
          n_rev += *f != *nf;
          tally(out.consistency, *f == *nf);
        }
      }
      if (row.subjects) {
        row.incompleteness_rate = static_cast<double>(n_inc) / row.subjects;
        row.reversal_rate = static_cast<double>(n_rev) / row.subjects;
      }
      inc.push_back(row.incompleteness_rate);
      rev.push_back(row.reversal_rate);
      out.rows.push_back(row);
    }
    out.pearson[r] = pearson(inc, rev);
  }
  return out;
}

BeliefCrosstab belief_crosstab(const std::vector<Session>& sessions) {
  BeliefCrosstab ct;
  std::array<std::size_t, 4> cells{};
  for (const auto& s : sessions) {
    if (!s.belief()) continue;
    const bool incomplete = incomparable_count(answers_of(s)) > 0;
    ++cells[(s.belief()->certain ? 0 : 2) + (incomplete ? 1 : 0)];
    ++ct.subjects;
  }
  if (ct.subjects) {
    const double n = static_cast<double>(ct.subjects);
    ct.certain_complete = cells[0] / n;
    ct.certain_incomplete = cells[1] / n;
    ct.uncertain_complete = cells[2] / n;
    ct.uncertain_incomplete = cells[3] / n;
  }
  return ct;
}

std::vector<ResponseTimeRow> response_time_means(const std::vector<Session>& sessions) {
  std::array<std::array<std::int64_t, 4>, 2> sum{};
  std::array<std::array<std::size_t, 4>, 2> n{};
  for (const auto& s : sessions) {
    for (const auto& resp : s.responses()) {
      const Question& q = s.plan().at(resp.question_id);
      if (q.symbolic || q.is_identity()) continue;
      const int t = q.treatment == Treatment::NonForced ? kNF : kF;
      sum[t][relation_slot(resp.relation)] += resp.response_time_ms;
      ++n[t][relation_slot(resp.relation)];
    }
  }
  std::vector<ResponseTimeRow> rows;
  for (int t = 0; t < 2; ++t) {
    const Treatment tr = t == kNF ? Treatment::NonForced : Treatment::Forced;
    for (Relation kind : allowed_relations(tr)) {
      const std::size_t k = relation_slot(kind);
      ResponseTimeRow row{tr, kind, n[t][k], std::nullopt};
      if (row.n) row.mean_ms = static_cast<double>(sum[t][k]) / static_cast<double>(row.n);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<SymbolicRow> symbolic_table(const std::vector<Session>& sessions) {
  const auto& comps = protocol::symbolic_comparisons();
  std::vector<std::array<std::size_t, 4>> counts(comps.size());
  for (const auto& s : sessions) {
    for (const auto& resp : s.responses()) {
      const Question& q = s.plan().at(resp.question_id);
      if (q.symbolic) ++counts.at(static_cast<std::size_t>(q.symbolic->index))[relation_slot(resp.relation)];
    }
  }
  std::vector<SymbolicRow> rows;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    SymbolicRow row;
    row.index = static_cast<int>(i);
    row.label = std::string(comps[i].label);
    for (auto c : counts[i]) row.n += c;
    if (row.n)
      for (std::size_t k = 0; k < 4; ++k) row.fractions[k] = static_cast<double>(counts[i][k]) / row.n;
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::vector<EventRow> event_rows(const std::vector<Session>& sessions) {
  struct Acc {
    std::size_t n = 0, incomplete = 0, uncertain = 0, beliefs = 0;
    long long belief_sum = 0;
  };
  std::map<std::string, Acc> by_event;
  for (const auto& s : sessions) {
    Acc& acc = by_event[s.config().event.to_string()];
    ++acc.n;
    acc.incomplete += incomparable_count(answers_of(s)) > 0;
    if (s.belief()) {
      ++acc.beliefs;
      acc.uncertain += !s.belief()->certain;
      acc.belief_sum += s.belief()->point_pct;
    }
  }
  std::vector<EventRow> rows;
  for (const auto& [event, acc] : by_event) {
    EventRow row{event, acc.n, static_cast<double>(acc.incomplete) / acc.n, 0, std::nullopt};
    if (acc.beliefs) {
      row.uncertain_belief = static_cast<double>(acc.uncertain) / acc.beliefs;
      row.mean_belief_pct = static_cast<double>(acc.belief_sum) / acc.beliefs;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

AnalysisReport analyze(const std::vector<Session>& sessions) {
  if (sessions.empty()) throw Error(ErrorCode::InvalidArgument, "no sessions to analyze");
  AnalysisReport rep;
  rep.subjects = sessions.size();
  rep.aggregate = aggregate_choices(sessions);
  rep.incompleteness_histogram = incompleteness_histogram(sessions);
  rep.dominance = dominance_consistency(sessions);
  rep.distance = distance_stats(sessions);
  rep.transitivity = {transitivity_violations(sessions, Treatment::NonForced),
                      transitivity_violations(sessions, Treatment::Forced)};
  rep.reversal = reversal_analysis(sessions);
  rep.beliefs = belief_crosstab(sessions);
  rep.response_times = response_time_means(sessions);
  rep.symbolic = symbolic_table(sessions);
  rep.events = event_rows(sessions);
  std::size_t expanded = 0;
  for (const auto& s : sessions) expanded += s.info_expanded();
  rep.info_expanded_fraction = static_cast<double>(expanded) / sessions.size();
  return rep;
}

std::vector<Session> load_sessions(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorCode::NotFound, "no such log directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  if (files.empty()) throw Error(ErrorCode::NotFound, "no session logs in " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<Session> out;
  out.reserve(files.size());
  for (const auto& f : files) {
    ManualClock clock;
    try {
      out.push_back(LoggedSession::replay(read_event_log(f), clock).session());
    } catch (const Error& e) {
      throw Error(e.code(), f.filename().string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace elicit
