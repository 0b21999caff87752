#include "elicit/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "elicit/error.hpp"

namespace elicit {

using Json = nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); }

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) bad(where + " must be an object");
  for (const auto& [k, _] : j.items())
    if (!known.count(k)) bad("unknown key '" + k + "' in " + where);
}

ParamRange range_from_json(const Json& j, const std::string& key) {
  if (j.is_number()) return ParamRange(j.get<double>());
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    ParamRange r(j[0].get<double>(), j[1].get<double>());
    if (!(r.lo <= r.hi)) bad(key + " range must satisfy lo <= hi");
    return r;
  }
  bad(key + " must be a number or a [lo, hi] pair");
}

Json to_json(const ParamRange& r) { return r.lo == r.hi ? Json(r.lo) : Json::array({r.lo, r.hi}); }

std::string_view kind_name(AgentKind k) { return k == AgentKind::Deterministic ? "deterministic" : "logit"; }

AgentGroup group_from_json(const Json& j, std::size_t i) {
  const std::string where = "groups[" + std::to_string(i) + "]";
  reject_unknown(j,
                 {"name", "kind", "count", "belief_center", "belief_half_width", "rho", "rho_spread", "completion",
                  "sigma", "indifference_band", "epsilon"},
                 where);
  AgentGroup g;
  g.name = j.value("name", "group-" + std::to_string(i));
  const std::string kind = j.value("kind", std::string("deterministic"));
  if (kind == "deterministic") g.kind = AgentKind::Deterministic;
  else if (kind == "logit") g.kind = AgentKind::Logit;
  else bad(where + ".kind must be 'deterministic' or 'logit'");
  if (!j.contains("count") || !j["count"].is_number_integer()) bad(where + ".count must be an integer");
  g.count = j["count"].get<int>();
  auto opt = [&](const char* key, ParamRange& out) {
    if (j.contains(key)) out = range_from_json(j[key], where + "." + key);
  };
  opt("belief_center", g.belief_center);
  opt("belief_half_width", g.belief_half_width);
  opt("rho", g.rho);
  opt("rho_spread", g.rho_spread);
  opt("sigma", g.sigma);
  opt("indifference_band", g.indifference_band);
  if (j.contains("completion")) g.completion = parse_completion_rule(j["completion"].get<std::string>());
  if (j.contains("epsilon")) g.epsilon = range_from_json(j["epsilon"], where + ".epsilon");
  return g;
}

}  // namespace

int PopulationConfig::total_agents() const {
  return std::accumulate(groups.begin(), groups.end(), 0, [](int s, const AgentGroup& g) { return s + g.count; });
}

void PopulationConfig::validate() const {
  if (groups.empty()) bad("population needs at least one group");
  for (const auto& g : groups) {
    if (g.count < 0) bad("group '" + g.name + "' has a negative count");
    auto within = [&](const ParamRange& r, double lo, double hi, const char* what) {
      if (r.lo < lo || r.hi > hi) bad("group '" + g.name + "': " + what + " out of range");
    };
    within(g.belief_center, 0.0, 1.0, "belief_center");
    within(g.belief_half_width, 0.0, 0.5, "belief_half_width");
    within(g.rho, -5.0, 5.0, "rho");
    within(g.rho_spread, 0.0, 10.0, "rho_spread");
    within(g.indifference_band, 0.0, 1e9, "indifference_band");
    if (g.sigma.lo <= 0.0) bad("group '" + g.name + "': sigma must be positive");
    if (g.epsilon) within(*g.epsilon, 0.0, 1.0, "epsilon");
  }
  if (total_agents() <= 0) bad("population has no agents");
  if (verb_probability < 0.0 || verb_probability > 1.0) bad("verb_probability must lie in [0, 1]");
  if (info_expand_probability < 0.0 || info_expand_probability > 1.0)
    bad("info_expand_probability must lie in [0, 1]");
}

PopulationConfig population_from_json(const Json& j) {
  reject_unknown(j,
                 {"schema_version", "seed", "algorithm", "event", "event_date", "include_symbolic_block",
                  "verb_probability", "info_expand_probability", "groups"},
                 "population config");
  PopulationConfig c;
  try {
    if (j.value("schema_version", PopulationConfig::kSchemaVersion) != PopulationConfig::kSchemaVersion)
      bad("unsupported population schema_version");
    c.seed = j.value("seed", c.seed);
    if (j.contains("algorithm")) c.algorithm = parse_algorithm(j["algorithm"].get<std::string>());
    if (j.contains("event")) c.event = EventSpec::parse(j["event"].get<std::string>());
    c.event_date = j.value("event_date", c.event_date);
    c.include_symbolic_block = j.value("include_symbolic_block", c.include_symbolic_block);
    c.verb_probability = j.value("verb_probability", c.verb_probability);
    c.info_expand_probability = j.value("info_expand_probability", c.info_expand_probability);
    if (!j.contains("groups") || !j["groups"].is_array()) bad("population config needs a 'groups' array");
    for (std::size_t i = 0; i < j["groups"].size(); ++i) c.groups.push_back(group_from_json(j["groups"][i], i));
  } catch (const nlohmann::json::exception& ex) {
    bad(std::string("malformed population config: ") + ex.what());
  }
  c.validate();
  return c;
}

Json to_json(const PopulationConfig& c) {
  Json groups = Json::array();
  for (const auto& g : c.groups) {
    Json gj{{"name", g.name},
            {"kind", kind_name(g.kind)},
            {"count", g.count},
            {"belief_center", to_json(g.belief_center)},
            {"belief_half_width", to_json(g.belief_half_width)},
            {"rho", to_json(g.rho)},
            {"rho_spread", to_json(g.rho_spread)},
            {"completion", to_string(g.completion)},
            {"sigma", to_json(g.sigma)},
            {"indifference_band", to_json(g.indifference_band)}};
    if (g.epsilon) gj["epsilon"] = to_json(*g.epsilon);
    groups.push_back(std::move(gj));
  }
  return Json{{"schema_version", PopulationConfig::kSchemaVersion},
              {"seed", c.seed},
              {"algorithm", to_string(c.algorithm)},
              {"event", c.event.to_string()},
              {"event_date", c.event_date},
              {"include_symbolic_block", c.include_symbolic_block},
              {"verb_probability", c.verb_probability},
              {"info_expand_probability", c.info_expand_probability},
              {"groups", std::move(groups)}};
}

PopulationConfig with_agent_count(PopulationConfig cfg, int n) {
  if (n <= 0) bad("agent count must be positive");
  const int total = cfg.total_agents();
  if (total <= 0) bad("population has no agents");
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < cfg.groups.size(); ++i) {
    const double exact = static_cast<double>(n) * cfg.groups[i].count / total;
    cfg.groups[i].count = static_cast<int>(std::floor(exact));
    assigned += cfg.groups[i].count;
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](auto a, auto b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) cfg.groups[remainders[k % remainders.size()].second].count++;
  return cfg;
}

SimAgent instantiate_agent(const PopulationConfig& cfg, int index) {
  int offset = index;
  const AgentGroup* g = nullptr;
  for (const auto& grp : cfg.groups) {
    if (offset < grp.count) {
      g = &grp;
      break;
    }
    offset -= grp.count;
  }
  if (!g) bad("agent index out of range");

  Rng rng(derive_seed(cfg.seed, "agent", static_cast<std::uint64_t>(index)));
  // Draw every parameter in a fixed order so groups differing in one range share the rest.
  const double center = g->belief_center.draw(rng);
  const double half = g->belief_half_width.draw(rng);
  const double rho = g->rho.draw(rng);
  const double spread = g->rho_spread.draw(rng);
  const double sigma = g->sigma.draw(rng);
  const double band = g->indifference_band.draw(rng);
  const double eps = g->epsilon ? g->epsilon->draw(rng) : 0.0;

  AgentSpec spec = LogitAgent{center, UtilityFunction::crra(rho), sigma, band};
  if (g->kind == AgentKind::Deterministic) {
    BeliefSet beliefs(std::clamp(center - half, 0.0, 1.0), std::clamp(center + half, 0.0, 1.0));
    UtilitySet utils = spread > 0.0 ? UtilitySet(CrraInterval{rho, rho + spread})
                                    : UtilitySet::singleton(UtilityFunction::crra(rho));
    spec = DeterministicAgent{PreferenceModel{beliefs, utils}, g->completion};
  }
  if (g->epsilon) spec = trembling(std::move(spec), eps);
  return SimAgent{g->name, std::move(spec)};
}

}  // namespace elicit
