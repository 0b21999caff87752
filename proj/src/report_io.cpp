#include "elicit/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "elicit/error.hpp"
#include "elicit/json_io.hpp"

namespace elicit {

namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json cell_json(const ConsistencyCell& c) {
  return Json{{"consistent", c.consistent}, {"total", c.total}, {"rate", opt(c.rate())}};
}

Json consistency_json(const DominanceConsistency& d) {
  return Json{{"incomplete_dominating", cell_json(d.incomplete_dominating)},
              {"incomplete_dominated", cell_json(d.incomplete_dominated)},
              {"indifferent_dominating", cell_json(d.indifferent_dominating)},
              {"indifferent_dominated", cell_json(d.indifferent_dominated)}};
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string> header) { row(std::vector<std::string>(header)); }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << field(cells[i]);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

}  // namespace

nlohmann::json to_json(const AnalysisReport& r) {
  Json j;
  j["subjects"] = r.subjects;

  Json agg = Json::array();
  for (const auto& a : r.aggregate)
    agg.push_back(Json{{"reference", to_json(a.reference)},
                       {"cells", a.cells},
                       {"prefer_reference", a.prefer_reference},
                       {"prefer_comparison", a.prefer_comparison},
                       {"indifferent", a.indifferent},
                       {"incomplete", a.incomplete}});
  j["aggregate"] = std::move(agg);
  j["incompleteness_histogram"] = r.incompleteness_histogram;
  j["dominance_consistency"] = Json{{"weak", consistency_json(r.dominance.weak)},
                                    {"strict", consistency_json(r.dominance.strict)}};

  Json dist = Json::array();
  for (const auto& d : r.distance)
    dist.push_back(
        Json{{"reference", to_json(d.reference)}, {"response", to_string(d.kind)}, {"n", d.n}, {"mean", opt(d.mean)}});
  j["distance"] = std::move(dist);

  Json tr = Json::array();
  for (const auto& t : r.transitivity) {
    Json tj{{"treatment", to_string(t.treatment)},
            {"strict_violations", t.strict_violations},
            {"strict_opportunities", t.strict_opportunities},
            {"strict_rate", opt(t.strict_rate())}};
    if (t.treatment == Treatment::NonForced) {
      tj["weak_violations"] = t.weak_violations;
      tj["weak_opportunities"] = t.weak_opportunities;
      tj["weak_rate"] = opt(t.weak_rate());
    } else {
      tj["violations_with_nonstrict_nonforced"] = Json{{"p_legs", cell_json(t.violations_nonstrict_p_legs)},
                                                       {"with_reference_leg", cell_json(t.violations_nonstrict_with_reference_leg)}};
      tj["transitive_with_nonstrict_nonforced"] = Json{{"p_legs", cell_json(t.transitive_nonstrict_p_legs)},
                                                       {"with_reference_leg", cell_json(t.transitive_nonstrict_with_reference_leg)}};
    }
    tr.push_back(std::move(tj));
  }
  j["transitivity"] = std::move(tr);

  Json rev = Json::array();
  for (const auto& row : r.reversal.rows)
    rev.push_back(Json{{"reference", to_json(row.reference)},
                       {"comparison", to_json(row.comparison)},
                       {"subjects", row.subjects},
                       {"incompleteness_rate", row.incompleteness_rate},
                       {"reversal_rate", row.reversal_rate}});
  j["reversal"] = Json{{"rows", std::move(rev)},
                       {"pearson", Json::array({opt(r.reversal.pearson[0]), opt(r.reversal.pearson[1])})},
                       {"consistency", cell_json(r.reversal.consistency)}};

  j["belief_crosstab"] = Json{{"subjects", r.beliefs.subjects},
                              {"certain_complete", r.beliefs.certain_complete},
                              {"certain_incomplete", r.beliefs.certain_incomplete},
                              {"uncertain_complete", r.beliefs.uncertain_complete},
                              {"uncertain_incomplete", r.beliefs.uncertain_incomplete}};

  Json rt = Json::array();
  for (const auto& row : r.response_times)
    rt.push_back(Json{{"treatment", to_string(row.treatment)},
                      {"response", to_string(row.kind)},
                      {"n", row.n},
                      {"mean_ms", opt(row.mean_ms)}});
  j["response_times"] = std::move(rt);

  Json sym = Json::array();
  for (const auto& row : r.symbolic) {
    Json fr;
    for (std::size_t k = 0; k < 4; ++k) fr[std::string(to_string(static_cast<Relation>(k)))] = row.fractions[k];
    sym.push_back(Json{{"index", row.index}, {"label", row.label}, {"n", row.n}, {"fractions", std::move(fr)}});
  }
  j["symbolic"] = std::move(sym);

  Json ev = Json::array();
  for (const auto& row : r.events)
    ev.push_back(Json{{"event", row.event},
                      {"subjects", row.subjects},
                      {"incomplete_ever", row.incomplete_ever},
                      {"uncertain_belief", row.uncertain_belief},
                      {"mean_belief_pct", opt(row.mean_belief_pct)}});
  j["events"] = std::move(ev);
  j["info_expanded_fraction"] = opt(r.info_expanded_fraction);
  return j;
}

std::vector<std::string> write_report(const AnalysisReport& r, const nlohmann::json& metadata,
                                      const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::pair<std::string, std::string>> files;

  Json doc{{"schema_version", 1}, {"metadata", metadata}, {"report", to_json(r)}};
  files.emplace_back("report.json", doc.dump(2) + "\n");

  {
    Csv c{"reference", "prefer_reference", "prefer_comparison", "indifferent", "incomplete"};
    for (const auto& a : r.aggregate)
      c.row({a.reference.to_string(), num(a.prefer_reference), num(a.prefer_comparison), num(a.indifferent),
             num(a.incomplete)});
    files.emplace_back("aggregate.csv", c.str());
  }
  {
    Csv c{"incomparable_count", "subjects"};
    for (std::size_t k = 0; k < r.incompleteness_histogram.size(); ++k)
      c.row({std::to_string(k), std::to_string(r.incompleteness_histogram[k])});
    files.emplace_back("incompleteness_histogram.csv", c.str());
  }
  {
    Csv c{"dominance", "response", "direction", "consistent", "total", "rate"};
    for (const auto& [name, d] : {std::pair{"weak", &r.dominance.weak}, std::pair{"strict", &r.dominance.strict}}) {
      auto add = [&](const char* resp, const char* dir, const ConsistencyCell& cell) {
        c.row({name, resp, dir, std::to_string(cell.consistent), std::to_string(cell.total), num(cell.rate())});
      };
      add("incomparable", "dominating", d->incomplete_dominating);
      add("incomparable", "dominated", d->incomplete_dominated);
      add("indifferent", "dominating", d->indifferent_dominating);
      add("indifferent", "dominated", d->indifferent_dominated);
    }
    files.emplace_back("dominance_consistency.csv", c.str());
  }
  {
    Csv c{"reference", "response", "n", "mean_distance"};
    for (const auto& d : r.distance)
      c.row({d.reference.to_string(), std::string(to_string(d.kind)), std::to_string(d.n), num(d.mean)});
    files.emplace_back("distance.csv", c.str());
  }
  {
    Csv c{"treatment", "strict_violations", "strict_opportunities", "strict_rate", "weak_violations",
          "weak_opportunities", "weak_rate"};
    for (const auto& t : r.transitivity) {
      const bool nf = t.treatment == Treatment::NonForced;
      c.row({std::string(to_string(t.treatment)), std::to_string(t.strict_violations),
             std::to_string(t.strict_opportunities), num(t.strict_rate()), nf ? std::to_string(t.weak_violations) : "",
             nf ? std::to_string(t.weak_opportunities) : "", nf ? num(t.weak_rate()) : ""});
    }
    files.emplace_back("transitivity.csv", c.str());
  }
  {
    Csv c{"reference", "comparison", "subjects", "incompleteness_rate", "reversal_rate"};
    for (const auto& row : r.reversal.rows)
      c.row({row.reference.to_string(), row.comparison.to_string(), std::to_string(row.subjects),
             num(row.incompleteness_rate), num(row.reversal_rate)});
    files.emplace_back("reversal.csv", c.str());
  }
  {
    Csv c{"belief", "complete", "incomplete"};
    c.row({"certain", num(r.beliefs.certain_complete), num(r.beliefs.certain_incomplete)});
    c.row({"uncertain", num(r.beliefs.uncertain_complete), num(r.beliefs.uncertain_incomplete)});
    files.emplace_back("belief_crosstab.csv", c.str());
  }
  {
    Csv c{"treatment", "response", "n", "mean_ms"};
    for (const auto& row : r.response_times)
      c.row({std::string(to_string(row.treatment)), std::string(to_string(row.kind)), std::to_string(row.n),
             num(row.mean_ms)});
    files.emplace_back("response_times.csv", c.str());
  }
  {
    Csv c{"index", "label", "n", "first", "second", "indifferent", "incomparable"};
    for (const auto& row : r.symbolic)
      c.row({std::to_string(row.index), row.label, std::to_string(row.n), num(row.fractions[0]), num(row.fractions[1]),
             num(row.fractions[2]), num(row.fractions[3])});
    files.emplace_back("symbolic.csv", c.str());
  }
  {
    Csv c{"event", "subjects", "incomplete_ever", "uncertain_belief", "mean_belief_pct"};
    for (const auto& row : r.events)
      c.row({row.event, std::to_string(row.subjects), num(row.incomplete_ever), num(row.uncertain_belief),
             num(row.mean_belief_pct)});
    files.emplace_back("events.csv", c.str());
  }

  std::vector<std::string> names;
  for (const auto& [name, text] : files) {
    write_file(out_dir / name, text);
    names.push_back(name);
  }
  return names;
}

}  // namespace elicit
