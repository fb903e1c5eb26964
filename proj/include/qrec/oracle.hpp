// Measurement by explicit devices: every measurement becomes a unitary
// coupling of its targets to a pointer ancilla, and probabilities are read
// off pointer projectors at the end.
//
// The pointer of a measurement with n outcomes has n + 1 states: index 0 is
// the ready state D(0), index k + 1 is D(label k). Ancillas are appended
// after the base subsystems in measurement order.
//
// An erased record is destroyed by the measurement that erases it: that
// measurement is taken in a composite basis of targets and pointer, which is
// realized by first rotating the composite basis onto D(0) (undoing the
// coupling) and then coupling the eraser's own pointer.

#pragma once

#include "qrec/distribution.hpp"
#include "qrec/scenario.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qrec {

struct Ancilla {
  std::size_t event;  // the measurement it records
  std::size_t slot;   // position in the dilated space
  std::vector<std::string> pointer_labels;  // "0", then the outcome labels
};

struct Coupling {
  std::size_t event;
  std::vector<std::size_t> slots;  // targets then ancilla
  CMatrix<double> op;
};

struct Erasure {
  std::size_t erased;  // the erased measurement
  std::size_t eraser;  // the measurement that destroys its record
  /// Whether the composite measurement leaves the pointer re-entangled with
  /// its targets (non-demolition reading). Only done when nothing acts on
  /// those targets in between or afterwards.
  bool leaves_record_pattern = false;
};

struct Instruction {
  enum class Kind { Unitary, Couple, Uncouple, Recouple };
  Kind kind;
  std::size_t at;       // the scenario event this step belongs to
  std::size_t subject;  // unitary or coupled event; the erased event otherwise
};

struct DilatedScenario {
  Scenario base;
  Dims dims;  // base dims followed by ancilla dims
  std::vector<Ancilla> ancillas;
  std::vector<Coupling> couplings;  // parallel to ancillas
  std::vector<Erasure> erasures;
  std::vector<Instruction> program;

  const Ancilla& ancilla_of(const std::string& agent) const;
  std::size_t ancilla_index(std::size_t event) const;
  State initial() const;
};

DilatedScenario dilate(const Scenario& s);

/// C = sum_k P_k (x) Pi_k on (targets, pointer), where P_k projects on basis
/// vector k and Pi_k swaps D(0) with D(k). Unitary and its own inverse.
CMatrix<double> coupling_operator(const Basis& basis);

/// Composite basis |J> = C (|D(0)> (x) |j>) over (targets, pointer of
/// `erased`), one vector per outcome of the eraser. Only defined when both
/// measurements act on the same targets.
std::optional<Basis> erasure_basis(const DilatedScenario& d, std::size_t erased);

struct DilatedState {
  CVector<double> psi;
  Ordinal time_index = 0;
};

/// Runs the program up to and including every event with time <= `until`
/// (all of it by default).
DilatedState evolve(const DilatedScenario& d, std::optional<Ordinal> until = std::nullopt);

/// State after each event, starting with the initial state.
std::vector<DilatedState> trajectory(const DilatedScenario& d);

using Selection = std::map<std::string, std::string>;  // agent -> outcome label

/// Probability that each selected retained pointer shows the selected label.
/// Throws ErasedRecordError for an erased agent.
double joint_probability(const DilatedScenario& d, const DilatedState& st, const Selection& sel);

/// Reads an erased measurement's pointer after the erasure, jointly with a
/// selection of retained pointers. `pointer_label` may be "0". A reading of
/// D(label) here is not evidence that the erased measurement saw `label`.
double inspect_record(const DilatedScenario& d, const DilatedState& st, const std::string& agent,
                      const std::string& pointer_label, const Selection& final_selection = {});

/// Joint distribution of all retained pointers at the end.
OutcomeDistribution oracle_distribution(const DilatedScenario& d, const DilatedState& st);

inline OutcomeDistribution oracle_distribution(const Scenario& s) {
  const auto d = dilate(s);
  return oracle_distribution(d, evolve(d));
}

/// Population of D(0) on the retained pointers once the run is over; these
/// states are never reached, so this stays at rounding level.
double unrecorded_population(const DilatedScenario& d, const DilatedState& st);

}  // namespace qrec
