#include "qrec/dsl.hpp"

#include "qrec/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

namespace qrec {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

namespace {

constexpr Index kMaxSubsystemDim = 64;
constexpr Index kMaxSpaceDim = 1024;
constexpr int kMaxExprDepth = 64;

// Recursive-descent evaluator for amplitude literals.
class ConstantParser {
 public:
  ConstantParser(std::string_view text, int line, int column)
      : text_(text), line_(line), column_(column) {}

  Amplitude parse() {
    if (text_.empty()) fail("empty amplitude");
    const Amplitude z = expr(0);
    if (pos_ != text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail("amplitude is not finite");
    return z;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(line_, column_ + static_cast<int>(pos_), message);
  }

  bool eat(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Amplitude expr(int depth) {
    if (depth > kMaxExprDepth) fail("expression nested too deeply");
    Amplitude value = term(depth);
    while (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const char op = text_[pos_++];
      const Amplitude rhs = term(depth);
      value = op == '+' ? value + rhs : value - rhs;
    }
    return value;
  }

  Amplitude term(int depth) {
    Amplitude value = unary(depth);
    while (pos_ < text_.size() && (text_[pos_] == '*' || text_[pos_] == '/')) {
      const char op = text_[pos_++];
      const Amplitude rhs = unary(depth);
      if (op == '*') {
        value *= rhs;
      } else {
        if (std::abs(rhs) == 0.0) fail("division by zero");
        value /= rhs;
      }
    }
    return value;
  }

  Amplitude unary(int depth) {
    if (depth > kMaxExprDepth) fail("expression nested too deeply");
    if (eat('-')) return -unary(depth + 1);
    if (eat('+')) return unary(depth + 1);
    return primary(depth);
  }

  Amplitude primary(int depth) {
    if (pos_ >= text_.size()) fail("expected a number");
    if (eat('(')) {
      const Amplitude inner = expr(depth + 1);
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (text_.substr(pos_).starts_with("sqrt")) {
      pos_ += 4;
      if (!eat('(')) fail("expected '(' after sqrt");
      const std::size_t arg_pos = pos_;
      const Amplitude arg = expr(depth + 1);
      if (!eat(')')) fail("expected ')'");
      if (arg.imag() != 0.0 || arg.real() < 0.0) {
        pos_ = arg_pos;
        fail("sqrt of a negative or complex value");
      }
      return {std::sqrt(arg.real()), 0.0};
    }
    if (eat('i')) return {0.0, 1.0};
    const char c = text_[pos_];
    if ((c >= '0' && c <= '9') || c == '.') {
      const double x = number();
      if (eat('i')) return {0.0, x};
      return {x, 0.0};
    }
    fail(std::string("unexpected '") + c + "'");
  }

  double number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t from = pos_;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
      return pos_ > from;
    };
    bool any = digits();
    if (eat('.')) any = digits() || any;
    if (!any) fail("malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (!eat('+')) eat('-');
      if (!digits()) fail("malformed exponent");
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(value)) {
      pos_ = start;
      fail("number out of range");
    }
    return value;
  }

  std::string_view text_;
  int line_;
  int column_;
  std::size_t pos_ = 0;
};

struct Token {
  std::string text;
  int column;
};

struct Line {
  int number;
  std::vector<Token> tokens;
};

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return s.front() != '-' && s.front() != '.';
}

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view raw = text.substr(start, end - start);
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      const char c = raw[i];
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
        continue;
      }
      if (static_cast<unsigned char>(c) < 0x21 || static_cast<unsigned char>(c) > 0x7e)
        throw ParseError(number, static_cast<int>(i) + 1,
                         "unexpected character (byte " +
                             std::to_string(static_cast<unsigned char>(c)) + ")");
      const std::size_t from = i;
      while (i < raw.size()) {
        const auto b = static_cast<unsigned char>(raw[i]);
        if (b == ' ' || b == '\t' || b == '\r') break;
        if (b < 0x21 || b > 0x7e)
          throw ParseError(number, static_cast<int>(i) + 1,
                           "unexpected character (byte " + std::to_string(b) + ")");
        ++i;
      }
      line.tokens.push_back({std::string(raw.substr(from, i - from)), static_cast<int>(from) + 1});
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

class ScenarioParser {
 public:
  explicit ScenarioParser(std::vector<Line> lines) : lines_(std::move(lines)) {}

  Scenario run() {
    while (next_ < lines_.size()) {
      const Line& line = lines_[next_++];
      const std::string& keyword = line.tokens[0].text;
      if (keyword == "scenario") {
        header_name(line);
      } else if (keyword == "subsystem") {
        subsystem(line);
      } else if (keyword == "final_time") {
        expect_count(line, 2, 2);
        final_time_ = integer_at(line, line.tokens[1]);
        final_time_line_ = line.number;
      } else if (keyword == "state") {
        state(line);
      } else if (keyword == "unitary") {
        unitary(line);
      } else if (keyword == "measure") {
        measure(line);
      } else {
        throw ParseError(line.number, line.tokens[0].column, "unknown keyword '" + keyword + "'");
      }
    }
    return finish();
  }

 private:
  static void expect_count(const Line& line, std::size_t min, std::size_t max) {
    if (line.tokens.size() < min)
      throw ParseError(line.number, line.tokens.back().column, "too few fields");
    if (line.tokens.size() > max)
      throw ParseError(line.number, line.tokens[max].column, "unexpected field");
  }

  static Ordinal integer(const Token& tok) {
    Ordinal value = 0;
    const auto* first = tok.text.data();
    const auto* last = first + tok.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
      throw ParseError(0, tok.column, "expected an integer, found '" + tok.text + "'");
    return value;
  }

  static Ordinal integer_at(const Line& line, const Token& tok) {
    try {
      return integer(tok);
    } catch (const ParseError& e) {
      throw ParseError(line.number, e.column(), e.message());
    }
  }

  static std::string identifier(const Line& line, const Token& tok, const char* what) {
    if (!is_identifier(tok.text))
      throw ParseError(line.number, tok.column,
                       std::string("invalid ") + what + " '" + tok.text + "'");
    return tok.text;
  }

  static Amplitude amplitude(const Line& line, const Token& tok) {
    return ConstantParser(tok.text, line.number, tok.column).parse();
  }

  void header_name(const Line& line) {
    expect_count(line, 2, 2);
    if (!name_.empty()) throw ParseError(line.number, 1, "scenario name declared twice");
    name_ = identifier(line, line.tokens[1], "scenario name");
  }

  void subsystem(const Line& line) {
    if (state_line_ || !events_.empty())
      throw ParseError(line.number, 1, "subsystems must be declared before state and events");
    expect_count(line, 3, 3 + kMaxSubsystemDim);
    SubsystemSpec sub;
    sub.name = identifier(line, line.tokens[1], "subsystem name");
    for (const auto& existing : subsystems_)
      if (existing.name == sub.name)
        throw ParseError(line.number, line.tokens[1].column,
                         "duplicate subsystem '" + sub.name + "'");
    const Ordinal dim = integer_at(line, line.tokens[2]);
    if (dim < 1 || dim > kMaxSubsystemDim)
      throw ParseError(line.number, line.tokens[2].column,
                       "dimension must be between 1 and " + std::to_string(kMaxSubsystemDim));
    sub.dim = static_cast<Index>(dim);
    if (static_cast<Ordinal>(line.tokens.size()) != 3 + dim)
      throw ParseError(line.number, line.tokens.back().column,
                       "expected " + std::to_string(dim) + " basis labels");
    for (std::size_t k = 3; k < line.tokens.size(); ++k) {
      std::string label = identifier(line, line.tokens[k], "label");
      if (std::find(sub.basis_labels.begin(), sub.basis_labels.end(), label) !=
          sub.basis_labels.end())
        throw ParseError(line.number, line.tokens[k].column, "duplicate label '" + label + "'");
      sub.basis_labels.push_back(std::move(label));
    }
    space_ *= sub.dim;
    if (space_ > kMaxSpaceDim)
      throw ParseError(line.number, line.tokens[2].column,
                       "composite dimension exceeds " + std::to_string(kMaxSpaceDim));
    subsystems_.push_back(std::move(sub));
  }

  const Line& block_line(const Line& header) {
    if (next_ >= lines_.size())
      throw ParseError(header.number, 1, "block is missing its 'end'");
    return lines_[next_++];
  }

  static bool is_end(const Line& line) {
    return line.tokens.size() == 1 && line.tokens[0].text == "end";
  }

  void require_subsystems(const Line& line) const {
    if (subsystems_.empty()) throw ParseError(line.number, 1, "no subsystems declared");
  }

  void state(const Line& header) {
    require_subsystems(header);
    expect_count(header, 1, 1);
    if (state_line_) throw ParseError(header.number, 1, "state declared twice");
    state_line_ = header.number;
    Dims dims;
    for (const auto& sub : subsystems_) dims.push_back(sub.dim);
    initial_ = State{dims, CVector<double>::Zero(space_)};
    std::vector<bool> seen(static_cast<std::size_t>(space_), false);
    for (;;) {
      const Line& line = block_line(header);
      if (is_end(line)) break;
      const std::size_t want = subsystems_.size() + 1;
      if (line.tokens.size() != want)
        throw ParseError(line.number, line.tokens.back().column,
                         "expected " + std::to_string(subsystems_.size()) +
                             " labels and an amplitude");
      Index index = 0;
      for (std::size_t k = 0; k < subsystems_.size(); ++k) {
        const auto& labels = subsystems_[k].basis_labels;
        const auto it = std::find(labels.begin(), labels.end(), line.tokens[k].text);
        if (it == labels.end())
          throw ParseError(line.number, line.tokens[k].column,
                           "unknown label '" + line.tokens[k].text + "' for subsystem '" +
                               subsystems_[k].name + "'");
        index = index * subsystems_[k].dim + static_cast<Index>(it - labels.begin());
      }
      if (seen[static_cast<std::size_t>(index)])
        throw ParseError(line.number, 1, "amplitude given twice");
      seen[static_cast<std::size_t>(index)] = true;
      initial_.amps(index) = amplitude(line, line.tokens.back());
    }
  }

  std::vector<std::string> targets(const Line& line, std::size_t from, Dims& dims) const {
    std::vector<std::string> out;
    for (std::size_t k = from; k < line.tokens.size(); ++k) {
      const std::string& name = line.tokens[k].text;
      const auto it = std::find_if(subsystems_.begin(), subsystems_.end(),
                                   [&](const SubsystemSpec& s) { return s.name == name; });
      if (it == subsystems_.end())
        throw ParseError(line.number, line.tokens[k].column, "unknown subsystem '" + name + "'");
      if (std::find(out.begin(), out.end(), name) != out.end())
        throw ParseError(line.number, line.tokens[k].column,
                         "subsystem '" + name + "' targeted twice");
      out.push_back(name);
      dims.push_back(it->dim);
    }
    return out;
  }

  void unitary(const Line& header) {
    require_subsystems(header);
    expect_count(header, 3, 2 + subsystems_.size());
    UnitaryEvent ev;
    ev.time_index = integer_at(header, header.tokens[1]);
    ev.targets = targets(header, 2, ev.op.dims);
    const Index n = total_dim(ev.op.dims);
    ev.op.entries = CMatrix<double>::Zero(n, n);
    Index row = 0;
    for (;;) {
      const Line& line = block_line(header);
      if (is_end(line)) break;
      if (row >= n) throw ParseError(line.number, 1, "too many rows (expected " +
                                                         std::to_string(n) + ")");
      if (static_cast<Index>(line.tokens.size()) != n)
        throw ParseError(line.number, line.tokens.back().column,
                         "expected " + std::to_string(n) + " entries per row");
      for (Index c = 0; c < n; ++c)
        ev.op.entries(row, c) = amplitude(line, line.tokens[static_cast<std::size_t>(c)]);
      ++row;
    }
    if (row != n)
      throw ParseError(header.number, 1,
                       "expected " + std::to_string(n) + " rows, found " + std::to_string(row));
    events_.emplace_back(std::move(ev));
    event_lines_.push_back(header.number);
  }

  void measure(const Line& header) {
    require_subsystems(header);
    expect_count(header, 5, 4 + subsystems_.size());
    MeasurementEvent ev;
    ev.time_index = integer_at(header, header.tokens[1]);
    ev.agent = identifier(header, header.tokens[2], "agent");
    const std::string& policy = header.tokens[3].text;
    if (policy == "retained") {
      ev.record = RecordPolicy::Retained;
    } else if (policy == "erased") {
      ev.record = RecordPolicy::Erased;
    } else {
      throw ParseError(header.number, header.tokens[3].column,
                       "record policy must be 'retained' or 'erased'");
    }
    ev.targets = targets(header, 4, ev.basis.dims);
    const Index n = total_dim(ev.basis.dims);
    ev.basis.vectors = CMatrix<double>::Zero(n, n);
    for (;;) {
      const Line& line = block_line(header);
      if (is_end(line)) break;
      const Index col = ev.basis.size();
      if (col >= n)
        throw ParseError(line.number, 1,
                         "too many basis vectors (expected " + std::to_string(n) + ")");
      if (static_cast<Index>(line.tokens.size()) != n + 1)
        throw ParseError(line.number, line.tokens.back().column,
                         "expected a label and " + std::to_string(n) + " components");
      std::string label = identifier(line, line.tokens[0], "label");
      if (ev.basis.index_of(label))
        throw ParseError(line.number, line.tokens[0].column, "duplicate label '" + label + "'");
      for (Index r = 0; r < n; ++r)
        ev.basis.vectors(r, col) = amplitude(line, line.tokens[static_cast<std::size_t>(r) + 1]);
      ev.basis.labels.push_back(std::move(label));
    }
    if (ev.basis.size() != n)
      throw ParseError(header.number, 1,
                       "expected " + std::to_string(n) + " basis vectors, found " +
                           std::to_string(ev.basis.size()));
    if (auto bad = validate_basis(ev.basis)) throw ParseError(header.number, 1, bad->message);
    events_.emplace_back(std::move(ev));
    event_lines_.push_back(header.number);
  }

  Scenario finish() {
    if (subsystems_.empty()) throw ParseError(1, 1, "no subsystems declared");
    if (!state_line_) throw ParseError(lines_.back().number, 1, "no state declared");
    Scenario s;
    s.name = name_;
    s.subsystems = subsystems_;
    s.initial = initial_;
    s.events = std::move(events_);
    Ordinal last = 0;
    for (const Event& e : s.events) last = std::max(last, time_of(e));
    s.final_time = final_time_ ? *final_time_ : last;
    const auto order = sort_events(s);
    if (auto bad = validate(s)) {
      int line = *state_line_;
      if (bad->event) {
        line = event_lines_[order[*bad->event]];
      } else if (bad->message.find("final time") != std::string::npos && final_time_line_) {
        line = final_time_line_;
      }
      std::string message = bad->message;
      if (bad->event) message = message.substr(message.find(": ") + 2);
      throw ParseError(line, 1, message);
    }
    return s;
  }

  std::vector<Line> lines_;
  std::size_t next_ = 0;
  std::string name_;
  std::vector<SubsystemSpec> subsystems_;
  Index space_ = 1;
  std::optional<int> state_line_;
  State initial_;
  std::vector<Event> events_;
  std::vector<int> event_lines_;
  std::optional<Ordinal> final_time_;
  int final_time_line_ = 0;
};

}  // namespace

Amplitude parse_constant(std::string_view text) { return ConstantParser(text, 0, 1).parse(); }

std::string format_constant(Amplitude z) {
  if (z.imag() == 0.0) return format_real_constant(z.real());
  std::string imag = format_real_constant(std::abs(z.imag()));
  imag = imag == "1" ? "i" : imag + "*i";
  if (z.real() == 0.0) return (z.imag() < 0 ? "-" : "") + imag;
  return format_real_constant(z.real()) + (z.imag() < 0 ? "-" : "+") + imag;
}

Scenario parse_scenario(std::string_view text) {
  try {
    return ScenarioParser(tokenize(text)).run();
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(0, 0, std::string("internal error: ") + e.what());
  }
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  if (!s.name.empty()) out << "scenario " << s.name << "\n";
  for (const auto& sub : s.subsystems) {
    out << "subsystem " << sub.name << " " << sub.dim;
    for (const auto& label : sub.basis_labels) out << " " << label;
    out << "\n";
  }
  out << "final_time " << s.final_time << "\n\nstate\n";
  const Dims dims = s.dims();
  for (Index i = 0; i < s.initial.amps.size(); ++i) {
    if (s.initial.amps(i) == Amplitude(0.0, 0.0)) continue;
    std::vector<std::string> labels(s.subsystems.size());
    Index rest = i;
    for (std::size_t k = s.subsystems.size(); k-- > 0;) {
      labels[k] = s.subsystems[k].basis_labels[static_cast<std::size_t>(rest % dims[k])];
      rest /= dims[k];
    }
    out << " ";
    for (const auto& label : labels) out << " " << label;
    out << " " << format_constant(s.initial.amps(i)) << "\n";
  }
  out << "end\n";

  for (const Event& e : s.events) {
    out << "\n";
    if (const auto* u = std::get_if<UnitaryEvent>(&e)) {
      out << "unitary " << u->time_index;
      for (const auto& t : u->targets) out << " " << t;
      out << "\n";
      for (Index r = 0; r < u->op.entries.rows(); ++r) {
        out << " ";
        for (Index c = 0; c < u->op.entries.cols(); ++c)
          out << " " << format_constant(u->op.entries(r, c));
        out << "\n";
      }
    } else {
      const auto& m = std::get<MeasurementEvent>(e);
      out << "measure " << m.time_index << " " << m.agent << " "
          << (m.record == RecordPolicy::Retained ? "retained" : "erased");
      for (const auto& t : m.targets) out << " " << t;
      out << "\n";
      for (Index k = 0; k < m.basis.size(); ++k) {
        out << "  " << m.basis.labels[static_cast<std::size_t>(k)];
        for (Index r = 0; r < m.basis.vectors.rows(); ++r)
          out << " " << format_constant(m.basis.vectors(r, k));
        out << "\n";
      }
    }
    out << "end\n";
  }
  return out.str();
}

}  // namespace qrec
