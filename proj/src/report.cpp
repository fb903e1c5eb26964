#include "qrec/report.hpp"

#include "qrec/dsl.hpp"
#include "qrec/format.hpp"
#include "qrec/library.hpp"
#include "qrec/oracle.hpp"
#include "qrec/scenario_json.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qrec {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

bool is_builtin(const std::string& name) {
  const auto& all = builtins();
  return std::any_of(all.begin(), all.end(), [&](const Builtin& b) { return b.name == name; });
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

OutcomeRef resolve(const std::string& side, const Scenario& s) {
  const std::string term = trim(side);
  if (term.empty()) throw std::invalid_argument("empty side in query");
  std::string agent;
  std::string label = term;
  if (const auto colon = term.find(':'); colon != std::string::npos) {
    agent = trim(term.substr(0, colon));
    label = trim(term.substr(colon + 1));
  }
  std::vector<const MeasurementEvent*> hits;
  std::vector<std::string> labels;
  for (std::size_t e : s.measurement_events()) {
    const auto* m = s.measurement(e);
    if (!agent.empty() && lower(m->agent) != lower(agent)) continue;
    for (const auto& l : m->basis.labels) {
      if (lower(l) == lower(label)) {
        hits.push_back(m);
        labels.push_back(l);
      }
    }
  }
  if (hits.empty()) throw std::invalid_argument("query term '" + term + "' matches no outcome");
  if (hits.size() > 1)
    throw std::invalid_argument("query term '" + term + "' is ambiguous; write agent:label");
  if (hits.front()->record == RecordPolicy::Erased) throw ErasedRecordError(hits.front()->agent);
  return {hits.front()->agent, labels.front()};
}

std::string regime_of(const Scenario& s, const std::string& variant) {
  if (auto r = parse_regime(variant)) return to_string(*r);
  for (Regime r : kAllRegimes)
    if (s.name == "2w2f_" + slug(r)) return to_string(r);
  return variant.empty() ? record_summary(s) : lower(variant);
}

std::string exact(double p) {
  if (auto r = nearest_rational(p, 144, kProbabilityTol)) return to_string(*r);
  return "";
}

std::string dot_id(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

const char* to_string(Engine e) {
  switch (e) {
    case Engine::Paths: return "paths";
    case Engine::Oracle: return "oracle";
    case Engine::Both: return "both";
  }
  return "?";
}

std::optional<Engine> parse_engine(std::string_view text) {
  const std::string t = lower(text);
  if (t == "paths") return Engine::Paths;
  if (t == "oracle") return Engine::Oracle;
  if (t == "both") return Engine::Both;
  return std::nullopt;
}

std::optional<Format> parse_format(std::string_view text) {
  const std::string t = lower(text);
  if (t == "table") return Format::Table;
  if (t == "json") return Format::Json;
  if (t == "dot") return Format::Dot;
  return std::nullopt;
}

Scenario load_scenario(const std::string& source, const std::string& variant) {
  if (is_builtin(source)) return builtin(source, variant);
  if (source.find_first_of("./") == std::string::npos && !std::filesystem::exists(source)) {
    std::string names;
    for (const auto& b : builtins()) names += (names.empty() ? "" : ", ") + b.name;
    throw std::invalid_argument("unknown builtin '" + source + "' (known: " + names + ")");
  }
  const std::string text = read_file(source);
  if (source.size() >= 5 && lower(source.substr(source.size() - 5)) == ".json") {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
    }
    return scenario_from_json(doc);
  }
  return parse_scenario(text);
}

Query parse_query(const std::string& text, const Scenario& s) {
  const auto arrow = text.find("=>");
  if (arrow == std::string::npos) throw std::invalid_argument("query must look like 'A=>B'");
  return {text, resolve(text.substr(0, arrow), s), resolve(text.substr(arrow + 2), s)};
}

RunReport run(const Scenario& s, Engine engine, const std::vector<std::string>& queries) {
  RunReport r;
  r.scenario = s;
  r.source = s.name;
  r.engine = engine;
  if (engine != Engine::Oracle) r.paths = path_distribution(s);
  if (engine != Engine::Paths) r.oracle = oracle_distribution(s);
  if (r.paths && r.oracle) r.delta = max_abs_difference(*r.paths, *r.oracle);
  r.regime = regime_of(s, "");
  for (const auto& text : queries) {
    Query q = parse_query(text, s);
    const auto result = implication(r.distribution(), q.given, q.then);
    r.queries.push_back({std::move(q), result});
  }
  return r;
}

RunReport run(const RunOptions& options) {
  const Scenario s = load_scenario(options.source, options.variant);
  RunReport r = run(s, options.engine, options.queries);
  r.source = options.source;
  r.regime = regime_of(s, options.variant);
  return r;
}

std::string render_table(const RunReport& r) {
  const OutcomeDistribution& d = r.distribution();
  std::ostringstream out;
  out << "scenario: " << r.scenario.name << "\n";
  out << "regime:   " << r.regime << "\n";
  out << "records:  " << record_summary(r.scenario) << "\n";
  out << "engine:   " << to_string(r.engine);
  if (r.delta) out << " (max |paths - oracle| = " << std::setprecision(3) << *r.delta << ")";
  out << "\n\n";

  std::vector<std::size_t> width;
  for (const auto& axis : d.axes()) {
    std::size_t w = axis.agent.size();
    for (const auto& l : axis.labels) w = std::max(w, l.size());
    width.push_back(w + 2);
  }
  for (std::size_t k = 0; k < d.axes().size(); ++k)
    out << std::left << std::setw(static_cast<int>(width[k])) << d.axes()[k].agent;
  out << std::left << std::setw(14) << "p" << "exact\n";
  for (std::size_t flat = 0; flat < d.size(); ++flat) {
    const auto digits = d.digits(flat);
    for (std::size_t k = 0; k < digits.size(); ++k)
      out << std::left << std::setw(static_cast<int>(width[k])) << d.axes()[k].labels[digits[k]];
    out << std::left << std::setw(14) << format_probability(d.weight(flat)) << exact(d.weight(flat))
        << "\n";
  }
  if (!r.queries.empty()) out << "\n";
  for (const auto& q : r.queries) {
    out << q.query.given.agent << ":" << q.query.given.label << " => " << q.query.then.agent
        << ":" << q.query.then.label << "  ";
    if (std::holds_alternative<ImplicationHolds>(q.result)) {
      out << "HOLDS\n";
    } else {
      const double p = std::get<ImplicationFails>(q.result).counter_probability;
      out << "FAILS (counterexample probability " << format_probability(p) << ")\n";
    }
  }
  return out.str();
}

json report_json(const RunReport& r) {
  const OutcomeDistribution& d = r.distribution();
  json doc;
  doc["scenario"] = r.scenario.name;
  doc["regime"] = r.regime;
  doc["engine"] = to_string(r.engine);
  doc["erased"] = d.erased_agents();
  doc["outcomes"] = json::array();
  for (std::size_t flat = 0; flat < d.size(); ++flat) {
    json tuple = json::array();
    for (const auto& [agent, label] : d.tuple(flat)) tuple.push_back({agent, label});
    doc["outcomes"].push_back({{"tuple", tuple}, {"p", d.weight(flat)}});
  }
  doc["delta"] = r.delta ? json(*r.delta) : json(nullptr);
  if (!r.queries.empty()) {
    doc["queries"] = json::array();
    for (const auto& q : r.queries) {
      json item = {{"query", q.query.text},
                   {"given", {q.query.given.agent, q.query.given.label}},
                   {"then", {q.query.then.agent, q.query.then.label}},
                   {"holds", std::holds_alternative<ImplicationHolds>(q.result)}};
      if (const auto* f = std::get_if<ImplicationFails>(&q.result))
        item["counter_probability"] = f->counter_probability;
      doc["queries"].push_back(item);
    }
  }
  return doc;
}

std::string render_json(const RunReport& r) { return report_json(r).dump(2) + "\n"; }

OutcomeDistribution distribution_from_json(const json& doc) {
  std::vector<OutcomeDistribution::Axis> axes;
  const auto& outcomes = doc.at("outcomes");
  for (const auto& o : outcomes) {
    const auto& tuple = o.at("tuple");
    if (axes.empty())
      for (const auto& pair : tuple) axes.push_back({pair.at(0).get<std::string>(), {}});
    if (tuple.size() != axes.size()) throw std::invalid_argument("outcome tuples differ in length");
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const auto label = tuple[k].at(1).get<std::string>();
      auto& labels = axes[k].labels;
      if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
    }
  }
  OutcomeDistribution d(axes, doc.value("erased", std::vector<std::string>{}),
                        doc.value("regime", std::string{}));
  for (const auto& o : outcomes) {
    OutcomeTuple t;
    for (const auto& pair : o.at("tuple")) t.emplace_back(pair.at(0), pair.at(1));
    std::vector<std::size_t> digits;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const auto& labels = axes[k].labels;
      digits.push_back(static_cast<std::size_t>(
          std::find(labels.begin(), labels.end(), t[k].second) - labels.begin()));
    }
    d.set_weight(d.flat_index(digits), o.at("p").get<double>());
  }
  return d;
}

std::string render_dot(const RealPathGraph& g, const std::string& title) {
  std::ostringstream out;
  out << "digraph " << dot_id(title) << " {\n";
  out << "  rankdir=LR;\n  node [shape=box];\n";
  for (std::size_t k = 0; k < g.layers.size(); ++k) {
    const auto& layer = g.layers[k];
    out << "  subgraph layer" << k << " {\n    rank=same;\n";
    for (std::size_t i = 0; i < layer.labels.size(); ++i) {
      out << "    n" << k << "_" << i << " [label="
          << dot_id(layer.agent + ": " + layer.labels[i] + "\\n" +
                    format_probability(layer.weights[i]))
          << "];\n";
    }
    out << "  }\n";
  }
  for (const auto& e : g.edges) {
    out << "  n" << e.layer << "_" << e.from << " -> n" << e.layer + 1 << "_" << e.to
        << " [label=" << dot_id(format_probability(e.weight));
    if (e.vanishing) out << ", style=dashed";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

std::string render_paths(const Scenario& s) {
  std::ostringstream out;
  const auto paths = enumerate_paths(s);
  out << "virtual paths: " << paths.size() << "\n";
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const auto& p = paths[k];
    out << std::right << std::setw(4) << k + 1 << "  " << std::left << std::setw(28)
        << format_constant(p.amplitude) << describe(p, s) << "\n";
  }
  return out.str();
}

void export_graph(const OutcomeDistribution& d, const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << render_dot(real_path_graph(d), s.name);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace qrec
