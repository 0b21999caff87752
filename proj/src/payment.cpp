#include "elicit/payment.hpp"

#include "elicit/error.hpp"
#include "elicit/json_io.hpp"
#include "elicit/protocol.hpp"

namespace elicit {

std::string_view to_string(PaymentSource s) {
  switch (s) {
    case PaymentSource::NonForcedAlgorithm: return "non_forced_algorithm";
    case PaymentSource::ForcedDirect: return "forced_direct";
    case PaymentSource::BeliefBDM: return "belief_bdm";
  }
  return "?";
}

PaymentSource parse_payment_source(std::string_view text) {
  if (text == "non_forced_algorithm") return PaymentSource::NonForcedAlgorithm;
  if (text == "forced_direct") return PaymentSource::ForcedDirect;
  if (text == "belief_bdm") return PaymentSource::BeliefBDM;
  throw Error(ErrorCode::Parse, "unknown payment source '" + std::string(text) + "'");
}

nlohmann::json to_json(const PaymentOutcome& p) {
  Json j{{"source", to_string(p.source)}, {"pending", p.pending()}, {"audit", p.audit_trail}};
  j["paid_lottery"] = p.paid_lottery ? to_json(*p.paid_lottery) : Json(nullptr);
  j["paid_amount"] = p.paid_amount ? Json(p.paid_amount->to_string()) : Json(nullptr);
  j["resolution"] = p.resolution ? Json(to_string(*p.resolution)) : Json(nullptr);
  return j;
}

PaymentOutcome payment_from_json(const nlohmann::json& j) {
  PaymentOutcome p;
  p.source = parse_payment_source(j.at("source").get<std::string>());
  if (!j.at("paid_lottery").is_null()) p.paid_lottery = lottery_from_json(j.at("paid_lottery"));
  if (!j.at("paid_amount").is_null()) p.paid_amount = Money::parse(j.at("paid_amount").get<std::string>());
  if (!j.at("resolution").is_null()) p.resolution = parse_event_state(j.at("resolution").get<std::string>());
  p.audit_trail = j.at("audit");
  return p;
}

BdmDraw draw_bdm(const BeliefReport& report, Rng& rng) {
  BdmDraw d;
  d.k = static_cast<int>(rng.uniform_int(0, 100));
  d.lottery_branch = d.k > report.point_pct;
  if (d.lottery_branch) d.lottery_draw = static_cast<int>(rng.uniform_int(0, 99));
  return d;
}

Money resolve_bdm(const BdmDraw& d, EventState outcome) {
  const bool win = d.lottery_branch ? d.lottery_draw < d.k : outcome == EventState::Verb;
  return win ? protocol::kBdmPrize : Money{};
}

namespace {

Json bdm_audit(const BdmDraw& d, const BeliefReport& report) {
  Json j{{"k", d.k}, {"report_pct", report.point_pct}, {"branch", d.lottery_branch ? "lottery" : "event"}};
  if (d.lottery_branch) j["lottery_draw"] = d.lottery_draw;
  return j;
}

}  // namespace

PaymentOutcome settle_bdm(const BeliefReport& report, Rng& rng, EventState outcome) {
  PaymentOutcome p;
  p.source = PaymentSource::BeliefBDM;
  BdmDraw d = draw_bdm(report, rng);
  p.audit_trail = Json{{"bdm", bdm_audit(d, report)}};
  p.paid_amount = resolve_bdm(d, outcome);
  p.resolution = outcome;
  return p;
}

AlgorithmStates run_algorithms(const Session& s) {
  const auto seed = s.config().rng_seed;
  AlgorithmStates st;
  for (std::size_t i = 0; i < protocol::kReferences.size(); ++i) {
    Rng init(derive_seed(seed, "set-init", i));
    st.sets[i] = init_sets(protocol::kReferences[i], init);
  }
  Rng updates(derive_seed(seed, "set-updates"));
  for (const auto& r : s.responses()) {
    const Question& q = s.plan().at(r.question_id);
    if (q.treatment != Treatment::NonForced || q.symbolic) continue;
    const std::size_t ref = q.reference == protocol::kReferences[0] ? 0 : 1;
    apply_response(st.sets[ref], q.comparison, r.relation, updates);
    st.mle.add(Observation{q.comparison, q.reference, r.relation});
  }
  return st;
}

PaymentOutcome select_paid_decision(const Session& s, const AlgorithmStates& states) {
  if (!s.belief()) throw Error(ErrorCode::InvalidState, "payment selection requires a recorded belief");
  const auto& cfg = s.config();
  Rng rng(derive_seed(cfg.rng_seed, "payment"));

  const auto& w = cfg.payment_weights;
  const double total = w[0] + w[1] + w[2];
  const double u = rng.uniform() * total;
  PaymentSource source = u < w[0] ? PaymentSource::NonForcedAlgorithm
                         : u < w[0] + w[1] ? PaymentSource::ForcedDirect
                                           : PaymentSource::BeliefBDM;
  // Degenerate weights must never pick a zero-weight source through rounding.
  if (source == PaymentSource::BeliefBDM && w[2] == 0) source = w[1] > 0 ? PaymentSource::ForcedDirect : PaymentSource::NonForcedAlgorithm;
  if (source == PaymentSource::ForcedDirect && w[1] == 0) source = PaymentSource::NonForcedAlgorithm;

  PaymentOutcome p;
  p.source = source;
  Json audit{{"selection_draw", u}, {"weights", w}};

  switch (source) {
    case PaymentSource::NonForcedAlgorithm: {
      if (cfg.algorithm == Algorithm::SetConstruction) {
        const std::size_t ref = rng.index(states.sets.size());
        const auto& set = states.sets[ref];
        SetSettlement settle = settle_sets(set, rng);
        p.paid_lottery = settle.paid;
        std::size_t clamped = 0;
        for (const auto& rep : set.replacement_log) clamped += rep.clamped;
        Json better = Json::array();
        for (const auto& l : set.better) better.push_back(to_json(l));
        audit["set_construction"] = Json{{"reference", to_json(set.reference)},
                                         {"branch", settle.better_branch ? "better" : "worse"},
                                         {"slot", settle.slot},
                                         {"better_set", std::move(better)},
                                         {"replacements", set.replacement_log.size()},
                                         {"clamped_replacements", clamped}};
      } else {
        const Belief belief = s.belief()->estimation_belief();
        MleOptions opts;
        opts.joint_belief = cfg.mle_joint_belief;
        Json m;
        double rho = 0.0;
        double pi = belief.pi;
        try {
          MleFit fit = fit_crra(states.mle.observations(), belief, opts);
          rho = fit.rho;
          pi = fit.belief;
          m = Json{{"rho", fit.rho}, {"sigma", fit.sigma}, {"log_likelihood", fit.log_likelihood},
                   {"sigma_fixed", fit.sigma_fixed}};
        } catch (const Error&) {
          // No ranked answers to fit: predict with risk neutrality.
          m = Json{{"fit_failed", true}, {"rho", rho}};
        }
        m["belief"] = pi;
        m["observations"] = states.mle.observations().size();
        p.paid_lottery = settle_mle(rho, Belief{pi});
        audit["mle"] = std::move(m);
      }
      break;
    }
    case PaymentSource::ForcedDirect: {
      std::vector<const Response*> forced;
      for (const auto& r : s.responses())
        if (s.plan().at(r.question_id).treatment == Treatment::Forced) forced.push_back(&r);
      if (forced.empty()) throw Error(ErrorCode::InvalidState, "no forced answers to pay");
      const Response& r = *forced[rng.index(forced.size())];
      const Question& q = s.plan().at(r.question_id);
      p.paid_lottery = r.relation == Relation::FirstPreferred ? q.comparison : q.reference;
      audit["forced"] = Json{{"question_id", q.id}, {"relation", to_string(r.relation)}};
      break;
    }
    case PaymentSource::BeliefBDM: {
      BdmDraw d = draw_bdm(*s.belief(), rng);
      audit["bdm"] = bdm_audit(d, *s.belief());
      break;
    }
  }
  p.audit_trail = std::move(audit);
  return p;
}

void resolve_payment(PaymentOutcome& p, EventState outcome) {
  if (p.resolution && *p.resolution != outcome) throw Error(ErrorCode::Conflict, "payment already resolved differently");
  p.resolution = outcome;
  if (p.source == PaymentSource::BeliefBDM) {
    const auto& a = p.audit_trail.at("bdm");
    BdmDraw d{a.at("k").get<int>(), a.at("branch").get<std::string>() == "lottery", a.value("lottery_draw", 0)};
    p.paid_amount = resolve_bdm(d, outcome);
  } else {
    p.paid_amount = p.paid_lottery->payoff(outcome);
  }
}

PaymentOutcome settle_session(const Session& s, std::optional<EventState> outcome) {
  PaymentOutcome p = select_paid_decision(s, run_algorithms(s));
  if (outcome) resolve_payment(p, *outcome);
  return p;
}

}  // namespace elicit
