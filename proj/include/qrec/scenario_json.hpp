// Canonical JSON form of a Scenario. Complex numbers are [re, im] pairs.

#pragma once

#include "qrec/scenario.hpp"

#include <json.hpp>

namespace qrec {

nlohmann::json to_json(const Scenario& s);

/// Throws std::invalid_argument on malformed documents or invalid scenarios.
Scenario scenario_from_json(const nlohmann::json& doc);

}  // namespace qrec
