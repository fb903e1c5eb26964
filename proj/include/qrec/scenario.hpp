// Declarative model of a measurement experiment: subsystems, an initial
// state, and a time-ordered list of unitaries and measurements whose material
// records are either retained to the end or erased by a later measurement.

#pragma once

#include "qrec/hilbert.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qrec {

using Ordinal = std::int64_t;

enum class RecordPolicy { Retained, Erased };

const char* to_string(RecordPolicy policy);

struct SubsystemSpec {
  std::string name;
  Index dim = 0;
  std::vector<std::string> basis_labels;
};

struct UnitaryEvent {
  Ordinal time_index = 0;
  std::vector<std::string> targets;
  Operator op;
};

struct MeasurementEvent {
  Ordinal time_index = 0;
  std::string agent;
  std::vector<std::string> targets;
  Basis basis;
  RecordPolicy record = RecordPolicy::Retained;
};

using Event = std::variant<UnitaryEvent, MeasurementEvent>;

Ordinal time_of(const Event& e);
const std::vector<std::string>& targets_of(const Event& e);

struct Scenario {
  std::string name;
  std::vector<SubsystemSpec> subsystems;
  State initial;
  std::vector<Event> events;
  Ordinal final_time = 0;

  Dims dims() const;
  std::optional<std::size_t> slot_of(const std::string& subsystem) const;
  /// Slots of `names` in the order given; throws on an unknown name.
  std::vector<std::size_t> slots_of(const std::vector<std::string>& names) const;
  const MeasurementEvent* measurement(std::size_t event) const;
  /// Event indices of all measurements, in event order.
  std::vector<std::size_t> measurement_events() const;
  std::optional<std::size_t> event_of_agent(const std::string& agent) const;
};

struct Violation {
  std::string message;
  std::optional<std::size_t> event;
};

/// Puts events in canonical order: by time, simultaneous events by the
/// declaration order of their first target. Returns the previous index of
/// each event in its new position.
std::vector<std::size_t> sort_events(Scenario& s);

/// Checks every structural invariant of a scenario; returns the first one
/// violated.
///
/// Beyond the per-type invariants this enforces that every subsystem's last
/// event is a retained measurement and that those terminal measurements are
/// the last events on all of their targets. Every virtual path then ends in a
/// single product basis state, and every erased record has a later
/// measurement that erases it.
std::optional<Violation> validate(const Scenario& s);

/// The first later measurement whose targets overlap those of `event`.
std::optional<std::size_t> eraser_of(const Scenario& s, std::size_t event);

/// Index of the measurement that ends each subsystem's history.
std::vector<std::size_t> terminal_measurements(const Scenario& s);

bool structurally_equal(const Scenario& a, const Scenario& b, double tol = kStructuralTol);

/// "retained: A, B; erased: C"
std::string record_summary(const Scenario& s);

}  // namespace qrec
