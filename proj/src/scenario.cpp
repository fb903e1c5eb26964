#include "qrec/scenario.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qrec {

const char* to_string(RecordPolicy policy) {
  return policy == RecordPolicy::Retained ? "RETAINED" : "ERASED";
}

Ordinal time_of(const Event& e) {
  return std::visit([](const auto& ev) { return ev.time_index; }, e);
}

const std::vector<std::string>& targets_of(const Event& e) {
  return std::visit([](const auto& ev) -> const std::vector<std::string>& { return ev.targets; },
                    e);
}

Dims Scenario::dims() const {
  Dims out;
  out.reserve(subsystems.size());
  for (const auto& sub : subsystems) out.push_back(sub.dim);
  return out;
}

std::optional<std::size_t> Scenario::slot_of(const std::string& subsystem) const {
  for (std::size_t k = 0; k < subsystems.size(); ++k)
    if (subsystems[k].name == subsystem) return k;
  return std::nullopt;
}

std::vector<std::size_t> Scenario::slots_of(const std::vector<std::string>& names) const {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const auto& name : names) {
    const auto slot = slot_of(name);
    if (!slot) throw std::invalid_argument("unknown subsystem '" + name + "'");
    out.push_back(*slot);
  }
  return out;
}

const MeasurementEvent* Scenario::measurement(std::size_t event) const {
  return std::get_if<MeasurementEvent>(&events.at(event));
}

std::vector<std::size_t> Scenario::measurement_events() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < events.size(); ++k)
    if (measurement(k)) out.push_back(k);
  return out;
}

std::optional<std::size_t> Scenario::event_of_agent(const std::string& agent) const {
  for (std::size_t k = 0; k < events.size(); ++k)
    if (const auto* m = measurement(k); m && m->agent == agent) return k;
  return std::nullopt;
}

namespace {

std::size_t first_slot(const Scenario& s, const Event& e) {
  std::size_t best = s.subsystems.size();
  for (const auto& name : targets_of(e))
    if (const auto slot = s.slot_of(name)) best = std::min(best, *slot);
  return best;
}

bool overlap(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  for (const auto& x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) return true;
  return false;
}

Violation at(std::size_t event, std::string message) {
  return Violation{"event " + std::to_string(event) + ": " + std::move(message), event};
}

}  // namespace

std::vector<std::size_t> sort_events(Scenario& s) {
  std::vector<std::size_t> order(s.events.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Event& x = s.events[a];
    const Event& y = s.events[b];
    if (time_of(x) != time_of(y)) return time_of(x) < time_of(y);
    return first_slot(s, x) < first_slot(s, y);
  });
  std::vector<Event> sorted;
  sorted.reserve(order.size());
  for (std::size_t k : order) sorted.push_back(std::move(s.events[k]));
  s.events = std::move(sorted);
  return order;
}

std::optional<std::size_t> eraser_of(const Scenario& s, std::size_t event) {
  const auto& targets = targets_of(s.events.at(event));
  for (std::size_t k = event + 1; k < s.events.size(); ++k)
    if (s.measurement(k) && overlap(targets, targets_of(s.events[k]))) return k;
  return std::nullopt;
}

std::vector<std::size_t> terminal_measurements(const Scenario& s) {
  std::vector<std::size_t> out;
  for (std::size_t slot = 0; slot < s.subsystems.size(); ++slot) {
    for (std::size_t k = s.events.size(); k-- > 0;) {
      const auto& targets = targets_of(s.events[k]);
      if (std::find(targets.begin(), targets.end(), s.subsystems[slot].name) == targets.end())
        continue;
      if (s.measurement(k) && std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<Violation> validate(const Scenario& s) {
  if (s.subsystems.empty()) return Violation{"no subsystems declared", std::nullopt};

  std::set<std::string> names;
  Index space = 1;
  for (const auto& sub : s.subsystems) {
    if (sub.name.empty()) return Violation{"subsystem with empty name", std::nullopt};
    if (!names.insert(sub.name).second)
      return Violation{"duplicate subsystem '" + sub.name + "'", std::nullopt};
    if (sub.dim <= 0)
      return Violation{"subsystem '" + sub.name + "' has non-positive dimension", std::nullopt};
    if (static_cast<Index>(sub.basis_labels.size()) != sub.dim)
      return Violation{"subsystem '" + sub.name + "' declares " +
                           std::to_string(sub.basis_labels.size()) + " labels for dimension " +
                           std::to_string(sub.dim),
                       std::nullopt};
    std::set<std::string> labels(sub.basis_labels.begin(), sub.basis_labels.end());
    if (labels.size() != sub.basis_labels.size())
      return Violation{"duplicate basis label in subsystem '" + sub.name + "'", std::nullopt};
    space *= sub.dim;
  }

  if (s.initial.dims != s.dims() || s.initial.amps.size() != space)
    return Violation{"initial state does not match the declared subsystems", std::nullopt};
  if (!all_finite(s.initial.amps))
    return Violation{"initial state has non-finite amplitudes", std::nullopt};
  if (!s.initial.is_normalized())
    return Violation{"initial state norm != 1 (<psi|psi> = " +
                         std::to_string(s.initial.amps.squaredNorm()) + ")",
                     std::nullopt};

  std::set<std::string> agents;
  for (std::size_t k = 0; k < s.events.size(); ++k) {
    const Event& e = s.events[k];
    const auto& targets = targets_of(e);
    if (targets.empty()) return at(k, "no targets");
    std::set<std::string> seen;
    Dims target_dims;
    for (const auto& t : targets) {
      const auto slot = s.slot_of(t);
      if (!slot) return at(k, "unknown subsystem '" + t + "'");
      if (!seen.insert(t).second) return at(k, "subsystem '" + t + "' targeted twice");
      target_dims.push_back(s.subsystems[*slot].dim);
    }
    if (time_of(e) > s.final_time)
      return at(k, "time index " + std::to_string(time_of(e)) + " exceeds final time " +
                       std::to_string(s.final_time));
    if (k > 0 && time_of(s.events[k - 1]) > time_of(e)) return at(k, "events not in time order");
    for (std::size_t j = 0; j < k; ++j) {
      if (time_of(s.events[j]) == time_of(e) && overlap(targets_of(s.events[j]), targets))
        return at(k, "shares time index " + std::to_string(time_of(e)) + " with event " +
                         std::to_string(j) + " on overlapping targets");
    }

    if (const auto* u = std::get_if<UnitaryEvent>(&e)) {
      if (u->op.dims != target_dims ||
          u->op.entries.rows() != total_dim(target_dims) ||
          u->op.entries.cols() != total_dim(target_dims))
        return at(k, "unitary does not match its targets' dimensions");
      if (!all_finite(u->op.entries)) return at(k, "unitary has non-finite entries");
      if (!is_unitary(u->op)) return at(k, "matrix is not unitary");
    } else {
      const auto& m = std::get<MeasurementEvent>(e);
      if (m.agent.empty()) return at(k, "measurement without agent");
      if (!agents.insert(m.agent).second) return at(k, "agent '" + m.agent + "' measures twice");
      if (m.basis.dims != target_dims)
        return at(k, "basis does not match its targets' dimensions");
      std::set<std::string> labels(m.basis.labels.begin(), m.basis.labels.end());
      if (labels.size() != m.basis.labels.size()) return at(k, "duplicate outcome label");
      if (auto bad = validate_basis(m.basis)) return at(k, bad->message);
    }
  }

  if (s.measurement_events().empty()) return Violation{"no measurements", std::nullopt};

  for (std::size_t slot = 0; slot < s.subsystems.size(); ++slot) {
    const auto& name = s.subsystems[slot].name;
    std::optional<std::size_t> last;
    for (std::size_t k = 0; k < s.events.size(); ++k) {
      const auto& t = targets_of(s.events[k]);
      if (std::find(t.begin(), t.end(), name) != t.end()) last = k;
    }
    if (!last) return Violation{"subsystem '" + name + "' is never measured", std::nullopt};
    const auto* m = s.measurement(*last);
    if (!m) return at(*last, "subsystem '" + name + "' evolves after its last measurement");
    if (m->record != RecordPolicy::Retained)
      return at(*last, "no surviving final record: last measurement of '" + name +
                           "' is erased");
  }
  for (std::size_t k : terminal_measurements(s)) {
    if (eraser_of(s, k))
      return at(k, "final measurement on '" + targets_of(s.events[k]).front() +
                       "' is partly overwritten by a later measurement");
  }
  return std::nullopt;
}

namespace {

bool close(const auto& a, const auto& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return a.size() == 0 || (a - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

bool structurally_equal(const Scenario& a, const Scenario& b, double tol) {
  if (a.name != b.name || a.final_time != b.final_time) return false;
  if (a.subsystems.size() != b.subsystems.size() || a.events.size() != b.events.size())
    return false;
  for (std::size_t k = 0; k < a.subsystems.size(); ++k) {
    const auto& x = a.subsystems[k];
    const auto& y = b.subsystems[k];
    if (x.name != y.name || x.dim != y.dim || x.basis_labels != y.basis_labels) return false;
  }
  if (a.initial.dims != b.initial.dims || !close(a.initial.amps, b.initial.amps, tol))
    return false;
  for (std::size_t k = 0; k < a.events.size(); ++k) {
    const Event& x = a.events[k];
    const Event& y = b.events[k];
    if (x.index() != y.index() || time_of(x) != time_of(y) || targets_of(x) != targets_of(y))
      return false;
    if (const auto* u = std::get_if<UnitaryEvent>(&x)) {
      const auto& v = std::get<UnitaryEvent>(y);
      if (u->op.dims != v.op.dims || !close(u->op.entries, v.op.entries, tol)) return false;
    } else {
      const auto& m = std::get<MeasurementEvent>(x);
      const auto& n = std::get<MeasurementEvent>(y);
      if (m.agent != n.agent || m.record != n.record || m.basis.labels != n.basis.labels ||
          m.basis.dims != n.basis.dims || !close(m.basis.vectors, n.basis.vectors, tol))
        return false;
    }
  }
  return true;
}

std::string record_summary(const Scenario& s) {
  std::string retained, erased;
  for (std::size_t k : s.measurement_events()) {
    const auto* m = s.measurement(k);
    std::string& list = m->record == RecordPolicy::Retained ? retained : erased;
    if (!list.empty()) list += ", ";
    list += m->agent;
  }
  std::string out = "retained: " + retained;
  if (!erased.empty()) out += "; erased: " + erased;
  return out;
}

}  // namespace qrec
