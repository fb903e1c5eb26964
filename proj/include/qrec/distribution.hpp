// Probabilities over the joint readings of all records that survive to the
// end of an experiment.

#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qrec {

/// (agent, outcome label) for every retained measurement, in time order.
using OutcomeTuple = std::vector<std::pair<std::string, std::string>>;

/// Raised when a query names an outcome whose record did not survive.
class ErasedRecordError : public std::runtime_error {
 public:
  explicit ErasedRecordError(const std::string& agent)
      : std::runtime_error("record erased; outcome undefined at end of experiment (agent '" +
                           agent + "')"),
        agent_(agent) {}
  const std::string& agent() const { return agent_; }

 private:
  std::string agent_;
};

class OutcomeDistribution {
 public:
  struct Axis {
    std::string agent;
    std::vector<std::string> labels;
  };

  OutcomeDistribution() = default;
  OutcomeDistribution(std::vector<Axis> axes, std::vector<std::string> erased_agents,
                      std::string regime_tag);

  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<std::string>& erased_agents() const { return erased_; }
  const std::string& regime_tag() const { return regime_tag_; }

  /// Number of tuples (product of the label counts).
  std::size_t size() const { return weights_.size(); }
  double weight(std::size_t flat) const { return weights_.at(flat); }
  void set_weight(std::size_t flat, double w) { weights_.at(flat) = w; }
  void add_weight(std::size_t flat, double w) { weights_.at(flat) += w; }

  /// Label index per axis of the flat tuple index (row-major, last axis fastest).
  std::vector<std::size_t> digits(std::size_t flat) const;
  std::size_t flat_index(const std::vector<std::size_t>& digits) const;
  OutcomeTuple tuple(std::size_t flat) const;

  /// Probability of a fully specified tuple; throws std::out_of_range for an
  /// unknown agent or label.
  double probability(const OutcomeTuple& t) const;

  std::optional<std::size_t> axis_of(const std::string& agent) const;
  bool is_erased(const std::string& agent) const;

  double total() const;
  /// Maps weights in [-tol, tol] to exactly 0.
  void clamp(double tol);

 private:
  std::vector<Axis> axes_;
  std::vector<std::string> erased_;
  std::string regime_tag_;
  std::vector<double> weights_;
};

/// Distribution of the kept agents' outcomes. Throws std::out_of_range for
/// an agent not in `d`, ErasedRecordError for one whose record was erased.
OutcomeDistribution marginal(const OutcomeDistribution& d, const std::set<std::string>& keep);

struct ImplicationHolds {};
struct ImplicationFails {
  double counter_probability;
};
using ImplicationResult = std::variant<ImplicationHolds, ImplicationFails>;

struct OutcomeRef {
  std::string agent;
  std::string label;
};

/// "given implies then": holds iff P(given and not then) <= tol.
ImplicationResult implication(const OutcomeDistribution& d, const OutcomeRef& given,
                              const OutcomeRef& then, double tol = 1e-9);

/// max |a - b| over tuples; throws std::invalid_argument when the axes differ.
double max_abs_difference(const OutcomeDistribution& a, const OutcomeDistribution& b);

}  // namespace qrec
