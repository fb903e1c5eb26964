// Line-oriented scenario files (.scn).
//
//   # comment
//   scenario <name>
//   subsystem <name> <dim> <label>...
//   final_time <n>
//   state
//     <label per subsystem> <amplitude>
//   end
//   unitary <time> <target>...
//     <row of amplitudes>
//   end
//   measure <time> <agent> retained|erased <target>...
//     <label> <components>
//   end
//
// Amplitudes are constant expressions without spaces: decimal numbers,
// the imaginary unit `i` (alone or as a number suffix), sqrt(...), + - * /
// and parentheses, e.g. `1/sqrt(12)`, `-sqrt(2/3)`, `0.5+0.5i`.

#pragma once

#include "qrec/scenario.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace qrec {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

/// Parses and validates a scenario. Throws ParseError (only) on failure.
Scenario parse_scenario(std::string_view text);

std::string serialize_scenario(const Scenario& s);

/// Evaluates one amplitude literal. Throws ParseError with column relative to
/// the start of `text` (line 0).
Amplitude parse_constant(std::string_view text);

std::string format_constant(Amplitude z);

}  // namespace qrec
