#include "elicit/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "elicit/error.hpp"
#include "elicit/json_io.hpp"

namespace elicit {

namespace {

constexpr std::int64_t kBeliefScreenMs = 20000;
constexpr std::int64_t kInstructionsMs = 60000;

// Runs fn(i) for i in [0, n) on a small worker pool. Each index owns its
// output, so the result does not depend on scheduling.
template <class Fn>
void parallel_for(int n, Fn fn) {
  const int workers = std::max(1, std::min<int>(n, static_cast<int>(std::thread::hardware_concurrency())));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

Session run_agent(const AgentSpec& agent, const SessionConfig& cfg, const std::string& session_id,
                  std::uint64_t answer_seed, std::optional<EventState> outcome, bool expand_info, LineSink sink) {
  ManualClock clock;
  LoggedSession ls(session_id, cfg, clock, std::move(sink), nlohmann::json{{"source", "simulation"}});
  clock.advance(kInstructionsMs);
  if (expand_info) ls.mark_info_expanded();
  while (const Question* q = ls.serve()) {
    // Per-question streams keep answers independent of plan order and of
    // how many draws earlier answers consumed.
    Rng choice(derive_seed(answer_seed, "choice", q->id));
    Rng timing(derive_seed(answer_seed, "timing", q->id));
    const Relation rel = answer(agent, *q, choice);
    const std::int64_t rt = simulated_response_time(rel, timing);
    clock.advance(rt);
    ls.respond(q->id, rel, rt);
  }
  clock.advance(kBeliefScreenMs);
  ls.record_belief(report_belief(agent));
  ls.finalize();
  if (outcome) ls.enter_outcome(*outcome);
  return ls.session();
}

SessionConfig session_config_for(const PopulationConfig& pop, int index) {
  SessionConfig cfg;
  cfg.event = pop.event;
  cfg.algorithm = pop.algorithm;
  cfg.include_symbolic_block = pop.include_symbolic_block;
  cfg.event_date = pop.event_date;
  cfg.rng_seed = derive_seed(pop.seed, "session", static_cast<std::uint64_t>(index));
  cfg.validate();
  return cfg;
}

EventState simulated_outcome(const PopulationConfig& pop) {
  const double p = pop.event.kind == EventSpec::Kind::Objective ? pop.event.objective_probability() : pop.verb_probability;
  Rng rng(derive_seed(pop.seed, "event"));
  return rng.bernoulli(p) ? EventState::Verb : EventState::NotVerb;
}

std::string session_id_for(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sim-%05d", index);
  return buf;
}

namespace {

Session simulate_one(const PopulationConfig& pop, int i, EventState outcome, LineSink sink) {
  const SimAgent agent = instantiate_agent(pop, i);
  Rng info(derive_seed(pop.seed, "info", static_cast<std::uint64_t>(i)));
  const bool expand = info.bernoulli(pop.info_expand_probability);
  return run_agent(agent.spec, session_config_for(pop, i), session_id_for(i),
                   derive_seed(pop.seed, "answers", static_cast<std::uint64_t>(i)), outcome, expand, std::move(sink));
}

}  // namespace

SimulationResult simulate_population(const PopulationConfig& pop, const std::filesystem::path& out_dir) {
  pop.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());

  // Stale logs from an earlier, larger run would otherwise leak into analysis.
  for (const auto& e : std::filesystem::directory_iterator(out_dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("sim-", 0) == 0 && e.path().extension() == ".jsonl") std::filesystem::remove(e.path());
  }

  SimulationResult result;
  result.metadata = to_json(pop);
  {
    std::ofstream meta(out_dir / "population.json", std::ios::trunc);
    if (!meta) throw Error(ErrorCode::Io, "cannot write population.json");
    meta << result.metadata.dump(2) << '\n';
  }

  const int n = pop.total_agents();
  const EventState outcome = simulated_outcome(pop);
  result.logs.resize(static_cast<std::size_t>(n));
  parallel_for(n, [&](int i) {
    const auto path = out_dir / (session_id_for(i) + ".jsonl");
    simulate_one(pop, i, outcome, FileSink(path));
    result.logs[static_cast<std::size_t>(i)] = path;
  });
  return result;
}

std::vector<Session> simulate_sessions(const PopulationConfig& pop) {
  pop.validate();
  const int n = pop.total_agents();
  const EventState outcome = simulated_outcome(pop);
  std::vector<std::optional<Session>> slots(static_cast<std::size_t>(n));
  parallel_for(n, [&](int i) { slots[static_cast<std::size_t>(i)] = simulate_one(pop, i, outcome, nullptr); });
  std::vector<Session> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<std::string> scenario_names() {
  return {"bewley-population", "seu-noise", "mixed", "trembling-eps-0", "trembling-eps-0.05", "trembling-eps-0.1"};
}

PopulationConfig scenario_config(const std::string& name, std::uint64_t seed) {
  PopulationConfig pop;
  pop.seed = seed;

  AgentGroup bewley;
  bewley.name = "bewley";
  bewley.kind = AgentKind::Deterministic;
  bewley.belief_center = ParamRange(0.2, 0.6);
  bewley.belief_half_width = ParamRange(0.05, 0.25);
  bewley.completion = CompletionRule::UniformRandom;

  AgentGroup seu;
  seu.name = "seu";
  seu.kind = AgentKind::Logit;
  seu.belief_center = ParamRange(0.3, 0.6);
  seu.rho = ParamRange(-0.3, 0.8);
  seu.sigma = ParamRange(0.2);
  seu.indifference_band = ParamRange(0.25);

  if (name == "bewley-population") {
    // Trembles supply the indifference answers a pure interval-prior agent never gives.
    bewley.count = 200;
    bewley.epsilon = ParamRange(0.05);
    pop.groups = {bewley};
  } else if (name == "seu-noise") {
    seu.count = 200;
    pop.groups = {seu};
  } else if (name == "mixed") {
    bewley.count = 100;
    bewley.belief_center = ParamRange(0.2, 0.5);
    bewley.belief_half_width = ParamRange(0.05, 0.15);
    seu.count = 100;
    seu.belief_center = ParamRange(0.2, 0.5);
    seu.rho = ParamRange(0.0);
    pop.groups = {bewley, seu};
  } else if (name.rfind("trembling-eps-", 0) == 0) {
    const std::string eps = name.substr(std::string("trembling-eps-").size());
    if (eps != "0" && eps != "0.05" && eps != "0.1") throw Error(ErrorCode::InvalidArgument, "unknown scenario '" + name + "'");
    bewley.count = 200;
    bewley.epsilon = ParamRange(std::stod(eps));
    pop.groups = {bewley};
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown scenario '" + name + "'");
  }
  pop.validate();
  return pop;
}

}  // namespace elicit
