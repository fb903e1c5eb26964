// Running a scenario through the engines and rendering the results.

#pragma once

#include "qrec/distribution.hpp"
#include "qrec/paths.hpp"
#include "qrec/scenario.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace qrec {

enum class Engine { Paths, Oracle, Both };
enum class Format { Table, Json, Dot };

const char* to_string(Engine e);
std::optional<Engine> parse_engine(std::string_view text);
std::optional<Format> parse_format(std::string_view text);

/// Builtin name (with optional variant) or a path to a .scn or .json file.
/// Throws ParseError for malformed files, std::invalid_argument otherwise.
Scenario load_scenario(const std::string& source, const std::string& variant = "");

struct Query {
  std::string text;
  OutcomeRef given;
  OutcomeRef then;
};

/// "A=>B" where each side is "label" or "agent:label", matched without
/// regard to case against every measurement in `s`. Throws
/// ErasedRecordError when a side names an erased record and
/// std::invalid_argument when it matches nothing or more than one agent.
Query parse_query(const std::string& text, const Scenario& s);

struct QueryOutcome {
  Query query;
  ImplicationResult result;
};

struct RunOptions {
  std::string source;
  std::string variant;
  Engine engine = Engine::Both;
  std::vector<std::string> queries;
};

struct RunReport {
  Scenario scenario;
  std::string source;
  std::string regime;
  Engine engine = Engine::Both;
  std::optional<OutcomeDistribution> paths;
  std::optional<OutcomeDistribution> oracle;
  std::optional<double> delta;  // max |paths - oracle|, when both ran
  std::vector<QueryOutcome> queries;

  const OutcomeDistribution& distribution() const { return paths ? *paths : *oracle; }
  bool engines_agree(double tol = kProbabilityTol) const { return !delta || *delta <= tol; }
};

RunReport run(const RunOptions& options);
RunReport run(const Scenario& s, Engine engine, const std::vector<std::string>& queries = {});

std::string render_table(const RunReport& r);
nlohmann::json report_json(const RunReport& r);
std::string render_json(const RunReport& r);
std::string render_dot(const RealPathGraph& g, const std::string& title);
std::string render_paths(const Scenario& s);

/// Writes the DOT graph of `d` to `path`; throws std::runtime_error on I/O
/// failure.
void export_graph(const OutcomeDistribution& d, const Scenario& s, const std::string& path);

/// Inverse of report_json's outcome list, for round-trip checks.
OutcomeDistribution distribution_from_json(const nlohmann::json& doc);

}  // namespace qrec
