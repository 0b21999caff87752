// Batch driver and HTTP front end over the C API.

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "elicit/elicit.h"

namespace {

using Json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

struct Failure {
  elicit_status status;
  std::string message;
};

// Owns a string returned by the library.
struct Owned {
  char* p = nullptr;
  ~Owned() { elicit_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

template <class Fn>
std::string call(Fn fn) {
  Owned out;
  const elicit_status st = fn(&out.p);
  if (st != ELICIT_OK) throw Failure{st, elicit_last_error()};
  return out.str();
}

struct UsageError {
  std::string message;
};

std::string scenario(const std::string& name, std::uint64_t seed) {
  try {
    return call([&](char** o) { return elicit_scenario_config(name.c_str(), seed, o); });
  } catch (const Failure& f) {
    throw UsageError{f.message};
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{ELICIT_IO, "cannot read " + path};
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct PopulationFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> agents;
  std::optional<std::string> algorithm;
  std::optional<std::string> event;

  void add(CLI::App* app) {
    app->add_option("--seed", seed, "Master seed");
    app->add_option("--agents", agents, "Number of agents (group proportions kept)")->check(CLI::PositiveNumber);
    app->add_option("--algorithm", algorithm, "Payment algorithm")->check(CLI::IsMember({"set-construction", "mle"}));
    app->add_option("--event", event, "Event treatment")
        ->check(CLI::IsMember({"subjective", "objective:1/3", "objective:1/2"}));
  }

  std::string apply(const std::string& population) const {
    Json o = Json::object();
    if (seed) o["seed"] = *seed;
    if (agents) o["agents"] = *agents;
    if (algorithm) o["algorithm"] = *algorithm;
    if (event) o["event"] = *event;
    const std::string overrides = o.dump();
    return call([&](char** out) { return elicit_population_override(population.c_str(), overrides.c_str(), out); });
  }
};

std::string fmt(const Json& v) {
  if (v.is_null()) return "absent";
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v.get<double>());
    return buf;
  }
  return v.dump();
}

void print_summary(const std::string& scenario, const Json& report) {
  std::cout << "scenario " << scenario << ": " << report["subjects"] << " subjects\n";
  for (const auto& row : report["aggregate"])
    std::cout << "  aggregate " << row["reference"]["nv"].get<std::string>() << "," << row["reference"]["v"].get<std::string>()
              << ": prefer_reference=" << fmt(row["prefer_reference"])
              << " prefer_comparison=" << fmt(row["prefer_comparison"]) << " indifferent=" << fmt(row["indifferent"])
              << " incomplete=" << fmt(row["incomplete"]) << "\n";
  const auto& dw = report["dominance_consistency"]["weak"];
  std::cout << "  dominance(weak): incomplete " << fmt(dw["incomplete_dominating"]["rate"]) << "/"
            << fmt(dw["incomplete_dominated"]["rate"]) << ", indifferent " << fmt(dw["indifferent_dominating"]["rate"])
            << "/" << fmt(dw["indifferent_dominated"]["rate"]) << "\n";
  for (const auto& d : report["distance"])
    if (d["reference"]["nv"] == "14")
      std::cout << "  distance from (14,2) " << d["response"].get<std::string>() << ": " << fmt(d["mean"]) << " (n=" << d["n"]
                << ")\n";
  for (const auto& t : report["transitivity"])
    std::cout << "  transitivity " << t["treatment"].get<std::string>() << ": strict_rate=" << fmt(t["strict_rate"])
              << (t.contains("weak_rate") ? " weak_rate=" + fmt(t["weak_rate"]) : std::string()) << "\n";
  std::cout << "  reversal pearson: " << fmt(report["reversal"]["pearson"][0]) << " / "
            << fmt(report["reversal"]["pearson"][1]) << "\n";
}

int serve(const std::string& store_dir, const std::string& host, int port, const std::string& admin_token) {
  elicit_store* raw = nullptr;
  if (elicit_store_open(store_dir.c_str(), admin_token.c_str(), &raw) != ELICIT_OK)
    throw Failure{ELICIT_IO, elicit_last_error()};
  std::unique_ptr<elicit_store, decltype(&elicit_store_close)> store(raw, elicit_store_close);

  httplib::Server srv;
  auto http_status = [](elicit_status st) {
    switch (st) {
      case ELICIT_OK: return 200;
      case ELICIT_INVALID_ARGUMENT:
      case ELICIT_PARSE:
      case ELICIT_DOMAIN: return 400;
      case ELICIT_UNAUTHORIZED: return 401;
      case ELICIT_NOT_FOUND: return 404;
      case ELICIT_CONFLICT:
      case ELICIT_INVALID_STATE: return 409;
      case ELICIT_FORBIDDEN_RELATION: return 422;
      default: return 500;
    }
  };
  // Runs one library call and writes its JSON reply or error document.
  auto reply = [&](httplib::Response& res, auto fn, const char* content_type = "application/json") {
    Owned out;
    const elicit_status st = fn(&out.p);
    res.status = http_status(st);
    if (st == ELICIT_OK) {
      res.set_content(out.str(), content_type);
    } else {
      Json err{{"error", {{"code", elicit_status_name(st)}, {"message", elicit_last_error()}}}};
      res.set_content(err.dump(), "application/json");
    }
  };
  auto idem = [](const httplib::Request& req) { return req.get_header_value("Idempotency-Key"); };
  auto key_ptr = [](const std::string& k) { return k.empty() ? nullptr : k.c_str(); };
  elicit_store* s = store.get();

  srv.Post("/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    const std::string k = idem(req);
    reply(res, [&](char** o) { return elicit_create_session(s, req.body.c_str(), key_ptr(k), o); });
    if (res.status == 200) res.status = 201;
  });
  srv.Get(R"(/sessions/([^/]+)/next)", [&](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    reply(res, [&](char** o) { return elicit_next_question(s, id.c_str(), o); });
  });
  srv.Post(R"(/sessions/([^/]+)/responses)", [&](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1], k = idem(req);
    reply(res, [&](char** o) { return elicit_submit_response(s, id.c_str(), req.body.c_str(), key_ptr(k), o); });
  });
  srv.Post(R"(/sessions/([^/]+)/belief)", [&](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1], k = idem(req);
    reply(res, [&](char** o) { return elicit_submit_belief(s, id.c_str(), req.body.c_str(), key_ptr(k), o); });
  });
  srv.Post(R"(/sessions/([^/]+)/info-expanded)", [&](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1], k = idem(req);
    reply(res, [&](char** o) { return elicit_mark_info_expanded(s, id.c_str(), key_ptr(k), o); });
  });
  srv.Post(R"(/sessions/([^/]+)/finalize)", [&](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1], k = idem(req);
    reply(res, [&](char** o) { return elicit_finalize(s, id.c_str(), key_ptr(k), o); });
  });
  srv.Get(R"(/sessions/([^/]+)/log)", [&](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    reply(res, [&](char** o) { return elicit_session_log(s, id.c_str(), o); }, "application/x-ndjson");
  });
  srv.Get(R"(/sessions/([^/]+)/replay)", [&](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    reply(res, [&](char** o) { return elicit_replay_session(s, id.c_str(), o); });
  });
  srv.Post("/admin/event-outcome", [&](const httplib::Request& req, httplib::Response& res) {
    std::string auth = req.get_header_value("Authorization");
    const std::string prefix = "Bearer ";
    const std::string token = auth.rfind(prefix, 0) == 0 ? auth.substr(prefix.size()) : std::string();
    const std::string k = idem(req);
    reply(res, [&](char** o) { return elicit_enter_event_outcome(s, token.c_str(), req.body.c_str(), key_ptr(k), o); });
  });

  std::cerr << "serving " << store_dir << " on http://" << host << ":" << port << std::endl;
  if (!srv.listen(host, port)) throw Failure{ELICIT_IO, "cannot listen on " + host + ":" + std::to_string(port)};
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incomplete-preference elicitation engine: simulation, analysis and session service"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Run an agent population through full sessions and write logs");
  std::string sim_config, sim_scenario, sim_out;
  PopulationFlags sim_flags;
  auto* cfg_opt = sim->add_option("--config", sim_config, "Population config (JSON)")->check(CLI::ExistingFile);
  sim->add_option("--scenario", sim_scenario, "Canned population instead of --config")->excludes(cfg_opt);
  sim->add_option("--out", sim_out, "Output directory for session logs")->required();
  sim_flags.add(sim);

  auto* ana = app.add_subcommand("analyze", "Compute the analysis report from a directory of logs");
  std::string ana_logs, ana_out;
  ana->add_option("logs", ana_logs, "Directory of *.jsonl session logs")->required();
  ana->add_option("--out", ana_out, "Output directory for report.json and CSVs")->required();

  auto* rep = app.add_subcommand("replicate-tables", "Simulate and analyze canned scenarios with pinned seeds");
  std::string rep_scenario = "all", rep_out;
  PopulationFlags rep_flags;
  rep->add_option("scenario", rep_scenario, "Scenario name or 'all'");
  rep->add_option("--out", rep_out, "Output directory")->required();
  rep_flags.add(rep);

  auto* rpl = app.add_subcommand("replay", "Rebuild a session log and verify its payment");
  std::string rpl_log;
  rpl->add_option("log", rpl_log, "Session log file")->required()->check(CLI::ExistingFile);

  auto* srv = app.add_subcommand("serve", "Host sessions over HTTP");
  std::string srv_store, srv_host = "127.0.0.1";
  int srv_port = 8080;
  std::string srv_token;
  srv->add_option("--store", srv_store, "Store directory")->required();
  srv->add_option("--host", srv_host, "Bind address");
  srv->add_option("--port", srv_port, "Port")->check(CLI::Range(1, 65535));
  srv->add_option("--admin-token", srv_token, "Bearer token for admin routes")->envname("ELICIT_ADMIN_TOKEN");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sim) {
      if (sim_config.empty() == sim_scenario.empty()) {
        std::cerr << "simulate: give exactly one of --config or --scenario\n";
        return kExitUsage;
      }
      std::string pop = sim_config.empty()
                            ? scenario(sim_scenario, 1)
                            : read_file(sim_config);
      pop = sim_flags.apply(pop);
      const Json out = Json::parse(call([&](char** o) { return elicit_simulate(pop.c_str(), sim_out.c_str(), o); }));
      std::cout << "wrote " << out["sessions"] << " session logs to " << sim_out << "\n";
    } else if (*ana) {
      const Json out = Json::parse(call([&](char** o) { return elicit_analyze(ana_logs.c_str(), ana_out.c_str(), o); }));
      for (const auto& f : out["files"]) std::cout << (std::filesystem::path(ana_out) / f.get<std::string>()).string() << "\n";
    } else if (*rep) {
      std::vector<std::string> names;
      if (rep_scenario == "all") names = {"bewley-population", "seu-noise", "mixed", "trembling-eps-0",
                                          "trembling-eps-0.05", "trembling-eps-0.1"};
      else names = {rep_scenario};
      for (const auto& name : names) {
        const std::uint64_t seed = rep_flags.seed.value_or(20240601);
        std::string pop = scenario(name, seed);
        pop = rep_flags.apply(pop);
        const auto base = std::filesystem::path(rep_out) / name;
        const std::string logs = (base / "logs").string(), report = (base / "report").string();
        call([&](char** o) { return elicit_simulate(pop.c_str(), logs.c_str(), o); });
        const Json out = Json::parse(call([&](char** o) { return elicit_analyze(logs.c_str(), report.c_str(), o); }));
        print_summary(name, out["report"]);
      }
    } else if (*rpl) {
      const Json out = Json::parse(call([&](char** o) { return elicit_replay_log(rpl_log.c_str(), o); }));
      std::cout << out.dump(2) << "\n";
      return out["matches_log"].get<bool>() ? kExitOk : kExitData;
    } else if (*srv) {
      return serve(srv_store, srv_host, srv_port, srv_token);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.message << "\n";
    return kExitUsage;
  } catch (const Failure& f) {
    std::cerr << "error (" << elicit_status_name(f.status) << "): " << f.message << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
