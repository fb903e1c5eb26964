#include "qrec/paths.hpp"

#include <functional>
#include <stdexcept>

namespace qrec {

namespace {

struct Step {
  SlotMap map;
  std::optional<CMatrix<double>> unitary;
  std::vector<CMatrix<double>> projectors;  // one per outcome, for measurements
  const MeasurementEvent* measurement = nullptr;
};

std::vector<Step> compile(const Scenario& s) {
  const Dims dims = s.dims();
  std::vector<Step> steps;
  steps.reserve(s.events.size());
  for (const Event& e : s.events) {
    const auto slots = s.slots_of(targets_of(e));
    Step step{SlotMap(dims, slots), std::nullopt, {}, nullptr};
    if (const auto* u = std::get_if<UnitaryEvent>(&e)) {
      step.unitary = u->op.entries;
    } else {
      const auto& m = std::get<MeasurementEvent>(e);
      step.measurement = &m;
      for (Index k = 0; k < m.basis.size(); ++k)
        step.projectors.emplace_back(m.basis.vector(k) * m.basis.vector(k).adjoint());
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

// The product state that the terminal measurements' outcomes leave behind.
CVector<double> terminal_state(const Scenario& s, const std::vector<Step>& steps,
                               const std::vector<std::size_t>& terminals,
                               const std::vector<std::size_t>& outcome_of_event) {
  CVector<double> v = CVector<double>::Ones(total_dim(s.dims()));
  for (std::size_t event : terminals) {
    const Step& step = steps[event];
    const auto column = step.measurement->basis.vector(
        static_cast<Index>(outcome_of_event[event]));
    const auto& offsets = step.map.target_offsets();
    for (Index base : step.map.rest_bases())
      for (std::size_t t = 0; t < offsets.size(); ++t)
        v(base + offsets[t]) *= column(static_cast<Index>(t));
  }
  return v;
}

void require_valid(const Scenario& s) {
  if (auto bad = validate(s)) throw std::invalid_argument("invalid scenario: " + bad->message);
}

}  // namespace

Amplitude path_amplitude(const std::vector<std::size_t>& outcomes, const Scenario& s) {
  const auto steps = compile(s);
  const auto measurements = s.measurement_events();
  if (outcomes.size() != measurements.size())
    throw std::invalid_argument("path must choose one outcome per measurement");
  std::vector<std::size_t> outcome_of_event(s.events.size(), 0);
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    const auto* m = s.measurement(measurements[k]);
    if (outcomes[k] >= static_cast<std::size_t>(m->basis.size()))
      throw std::out_of_range("outcome index out of range");
    outcome_of_event[measurements[k]] = outcomes[k];
  }
  CVector<double> v = s.initial.amps;
  for (std::size_t e = 0; e < steps.size(); ++e) {
    const Step& step = steps[e];
    v = step.unitary ? apply_on(*step.unitary, step.map, v)
                     : apply_on(step.projectors[outcome_of_event[e]], step.map, v);
  }
  return terminal_state(s, steps, terminal_measurements(s), outcome_of_event).dot(v);
}

std::vector<VirtualPath> enumerate_paths(const Scenario& s) {
  require_valid(s);
  const auto steps = compile(s);
  const auto terminals = terminal_measurements(s);
  std::vector<VirtualPath> out;
  std::vector<std::size_t> outcome_of_event(s.events.size(), 0);
  std::vector<Branch> branches;

  std::function<void(std::size_t, const CVector<double>&)> walk =
      [&](std::size_t e, const CVector<double>& v) {
        if (e == steps.size()) {
          const Amplitude a = terminal_state(s, steps, terminals, outcome_of_event).dot(v);
          out.push_back({branches, a});
          return;
        }
        const Step& step = steps[e];
        if (step.unitary) {
          walk(e + 1, apply_on(*step.unitary, step.map, v));
          return;
        }
        for (std::size_t k = 0; k < step.projectors.size(); ++k) {
          outcome_of_event[e] = k;
          branches.push_back({e, k});
          walk(e + 1, apply_on(step.projectors[k], step.map, v));
          branches.pop_back();
        }
      };
  walk(0, s.initial.amps);
  return out;
}

OutcomeDistribution reduce(const std::vector<VirtualPath>& paths, const Scenario& s) {
  std::vector<OutcomeDistribution::Axis> axes;
  std::vector<std::string> erased;
  std::vector<bool> retained_event(s.events.size(), false);
  for (std::size_t e : s.measurement_events()) {
    const auto* m = s.measurement(e);
    if (m->record == RecordPolicy::Retained) {
      axes.push_back({m->agent, m->basis.labels});
      retained_event[e] = true;
    } else {
      erased.push_back(m->agent);
    }
  }
  OutcomeDistribution d(std::move(axes), std::move(erased), record_summary(s));

  std::vector<Amplitude> sums(d.size(), Amplitude(0.0, 0.0));
  std::vector<std::size_t> digits;
  for (const VirtualPath& p : paths) {
    digits.clear();
    for (const Branch& b : p.branches)
      if (retained_event.at(b.event)) digits.push_back(b.outcome);
    if (digits.size() != d.axes().size())
      throw std::invalid_argument("path does not match the scenario's measurements");
    sums[d.flat_index(digits)] += p.amplitude;
  }
  for (std::size_t flat = 0; flat < sums.size(); ++flat) d.set_weight(flat, std::norm(sums[flat]));
  d.clamp(kStructuralTol);
  return d;
}

std::string describe(const VirtualPath& p, const Scenario& s) {
  std::string out;
  for (auto it = p.branches.rbegin(); it != p.branches.rend(); ++it) {
    const auto* m = s.measurement(it->event);
    out += m->basis.labels[it->outcome];
    out += " <- ";
  }
  return out + "initial";
}

const RealPathGraph::Edge* RealPathGraph::find_edge(const std::string& from_label,
                                                    const std::string& to_label) const {
  for (const Edge& e : edges)
    if (layers[e.layer].labels[e.from] == from_label &&
        layers[e.layer + 1].labels[e.to] == to_label)
      return &e;
  return nullptr;
}

RealPathGraph real_path_graph(const OutcomeDistribution& d) {
  RealPathGraph g;
  const auto& axes = d.axes();
  for (const auto& axis : axes)
    g.layers.push_back({axis.agent, axis.labels, std::vector<double>(axis.labels.size(), 0.0)});
  std::vector<std::vector<double>> pair(axes.size() > 0 ? axes.size() - 1 : 0);
  for (std::size_t k = 0; k + 1 < axes.size(); ++k)
    pair[k].assign(axes[k].labels.size() * axes[k + 1].labels.size(), 0.0);

  for (std::size_t flat = 0; flat < d.size(); ++flat) {
    const auto digits = d.digits(flat);
    const double w = d.weight(flat);
    for (std::size_t k = 0; k < axes.size(); ++k) g.layers[k].weights[digits[k]] += w;
    for (std::size_t k = 0; k + 1 < axes.size(); ++k)
      pair[k][digits[k] * axes[k + 1].labels.size() + digits[k + 1]] += w;
  }
  for (std::size_t k = 0; k + 1 < axes.size(); ++k) {
    for (std::size_t a = 0; a < axes[k].labels.size(); ++a) {
      for (std::size_t b = 0; b < axes[k + 1].labels.size(); ++b) {
        double w = pair[k][a * axes[k + 1].labels.size() + b];
        const bool vanishing = w <= kStructuralTol;
        if (vanishing) w = 0.0;
        g.edges.push_back({k, a, b, w, vanishing});
      }
    }
  }
  return g;
}

}  // namespace qrec
