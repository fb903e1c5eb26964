#include "qrec/oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace qrec {

namespace {

bool touches(const Event& e, const std::vector<std::string>& names) {
  for (const auto& t : targets_of(e))
    if (std::find(names.begin(), names.end(), t) != names.end()) return true;
  return false;
}

// The composite reading may keep the pointer entangled only when no other
// event ever acts on the erased measurement's targets: then re-coupling is
// the exact inverse of the rotation it undid and commutes with the rest.
bool record_pattern_is_safe(const Scenario& s, std::size_t erased, std::size_t eraser) {
  const auto& targets = targets_of(s.events[erased]);
  for (std::size_t k = erased + 1; k < s.events.size(); ++k)
    if (k != eraser && touches(s.events[k], targets)) return false;
  return true;
}

// Ops applied so far, in order, so an earlier coupling can be undone by
// replaying everything after it.
struct Applied {
  const CMatrix<double>* op;
  const SlotMap* map;
  std::optional<std::size_t> coupling;  // ancilla index for couplings
};

class Runner {
 public:
  explicit Runner(const DilatedScenario& d) : d_(d) {
    for (const Event& e : d.base.events)
      unitary_maps_.push_back(SlotMap(d.dims, d.base.slots_of(targets_of(e))));
    for (const Coupling& c : d.couplings) coupling_maps_.push_back(SlotMap(d.dims, c.slots));
    psi_ = d.initial().amps;
  }

  const CVector<double>& psi() const { return psi_; }

  void run(const Instruction& in) {
    switch (in.kind) {
      case Instruction::Kind::Unitary: {
        const auto& u = std::get<UnitaryEvent>(d_.base.events[in.subject]);
        push({&u.op.entries, &unitary_maps_[in.subject], std::nullopt});
        break;
      }
      case Instruction::Kind::Couple:
      case Instruction::Kind::Recouple: {
        const std::size_t a = d_.ancilla_index(in.subject);
        push({&d_.couplings[a].op, &coupling_maps_[a], a});
        break;
      }
      case Instruction::Kind::Uncouple:
        uncouple(d_.ancilla_index(in.subject));
        break;
    }
  }

 private:
  void push(const Applied& op) {
    psi_ = apply_on(*op.op, *op.map, psi_);
    history_.push_back(op);
  }

  // X = G C G^dagger with G the ops after C; the couplings are involutions.
  void uncouple(std::size_t ancilla) {
    auto it = std::find_if(history_.rbegin(), history_.rend(),
                           [&](const Applied& a) { return a.coupling == ancilla; });
    if (it == history_.rend()) throw std::logic_error("uncoupling a pointer that was never coupled");
    const auto pos = static_cast<std::size_t>(std::distance(it, history_.rend()) - 1);
    for (std::size_t k = history_.size(); k-- > pos + 1;)
      psi_ = apply_on(CMatrix<double>(history_[k].op->adjoint()), *history_[k].map, psi_);
    psi_ = apply_on(*history_[pos].op, *history_[pos].map, psi_);
    for (std::size_t k = pos + 1; k < history_.size(); ++k)
      psi_ = apply_on(*history_[k].op, *history_[k].map, psi_);
    history_.erase(history_.begin() + static_cast<std::ptrdiff_t>(pos));
  }

  const DilatedScenario& d_;
  std::vector<SlotMap> unitary_maps_;
  std::vector<SlotMap> coupling_maps_;
  std::vector<Applied> history_;
  CVector<double> psi_;
};

std::size_t pointer_index(const Ancilla& a, const std::string& label) {
  const auto it = std::find(a.pointer_labels.begin(), a.pointer_labels.end(), label);
  if (it == a.pointer_labels.end()) throw std::out_of_range("pointer has no state '" + label + "'");
  return static_cast<std::size_t>(it - a.pointer_labels.begin());
}

struct Constraint {
  std::size_t slot;
  Index value;
};

std::vector<Constraint> constraints_for(const DilatedScenario& d, const Selection& sel) {
  std::vector<Constraint> out;
  for (const auto& [agent, label] : sel) {
    const Ancilla& a = d.ancilla_of(agent);
    if (d.base.measurement(a.event)->record == RecordPolicy::Erased) throw ErasedRecordError(agent);
    const std::size_t k = pointer_index(a, label);
    if (k == 0) throw std::out_of_range("'0' is not an outcome of agent '" + agent + "'");
    out.push_back({a.slot, static_cast<Index>(k)});
  }
  return out;
}

std::vector<Index> strides_of(const Dims& dims) {
  std::vector<Index> strides(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) strides[k - 1] = strides[k] * dims[k];
  return strides;
}

double project(const DilatedScenario& d, const DilatedState& st,
               const std::vector<Constraint>& constraints) {
  const auto strides = strides_of(d.dims);
  double p = 0.0;
  for (Index i = 0; i < st.psi.size(); ++i) {
    bool match = true;
    for (const auto& c : constraints) {
      if ((i / strides[c.slot]) % d.dims[c.slot] != c.value) {
        match = false;
        break;
      }
    }
    if (match) p += std::norm(st.psi(i));
  }
  return p;
}

}  // namespace

const Ancilla& DilatedScenario::ancilla_of(const std::string& agent) const {
  for (const Ancilla& a : ancillas)
    if (base.measurement(a.event)->agent == agent) return a;
  throw std::out_of_range("unknown agent '" + agent + "'");
}

std::size_t DilatedScenario::ancilla_index(std::size_t event) const {
  for (std::size_t k = 0; k < ancillas.size(); ++k)
    if (ancillas[k].event == event) return k;
  throw std::out_of_range("event has no pointer");
}

State DilatedScenario::initial() const {
  CVector<double> psi = base.initial.amps;
  for (const Ancilla& a : ancillas) {
    const Index n = static_cast<Index>(a.pointer_labels.size());
    CVector<double> ready = CVector<double>::Zero(n);
    ready(0) = 1.0;
    CVector<double> next(psi.size() * n);
    for (Index i = 0; i < psi.size(); ++i) next.segment(i * n, n) = psi(i) * ready;
    psi = std::move(next);
  }
  return {dims, std::move(psi)};
}

CMatrix<double> coupling_operator(const Basis& basis) {
  const Index t = total_dim(basis.dims);
  const Index n = basis.size() + 1;
  CMatrix<double> c = CMatrix<double>::Zero(t * n, t * n);
  for (Index k = 0; k < basis.size(); ++k) {
    const CMatrix<double> proj = basis.vector(k) * basis.vector(k).adjoint();
    for (Index a = 0; a < n; ++a) {
      // Pi_k: D(0) <-> D(k + 1), every other pointer state fixed
      const Index b = a == 0 ? k + 1 : (a == k + 1 ? 0 : a);
      for (Index r = 0; r < t; ++r)
        for (Index col = 0; col < t; ++col) c(r * n + b, col * n + a) += proj(r, col);
    }
  }
  return c;
}

DilatedScenario dilate(const Scenario& s) {
  if (auto bad = validate(s)) throw std::invalid_argument("invalid scenario: " + bad->message);
  DilatedScenario d;
  d.base = s;
  d.dims = s.dims();

  for (std::size_t e : s.measurement_events()) {
    const auto* m = s.measurement(e);
    Ancilla a{e, d.dims.size(), {"0"}};
    a.pointer_labels.insert(a.pointer_labels.end(), m->basis.labels.begin(), m->basis.labels.end());
    d.dims.push_back(static_cast<Index>(a.pointer_labels.size()));
    Coupling c{e, s.slots_of(m->targets), coupling_operator(m->basis)};
    c.slots.push_back(a.slot);
    d.ancillas.push_back(std::move(a));
    d.couplings.push_back(std::move(c));
    if (m->record == RecordPolicy::Erased) {
      const auto eraser = eraser_of(s, e);
      if (!eraser) throw std::logic_error("erased record without a later measurement");
      d.erasures.push_back({e, *eraser, record_pattern_is_safe(s, e, *eraser)});
    }
  }

  for (std::size_t e = 0; e < s.events.size(); ++e) {
    if (!s.measurement(e)) {
      d.program.push_back({Instruction::Kind::Unitary, e, e});
      continue;
    }
    std::vector<const Erasure*> here;
    for (const Erasure& x : d.erasures)
      if (x.eraser == e) here.push_back(&x);
    // latest coupling first, so each undo sees its own coupling on top
    std::sort(here.begin(), here.end(),
              [](const Erasure* a, const Erasure* b) { return a->erased > b->erased; });
    for (const Erasure* x : here) d.program.push_back({Instruction::Kind::Uncouple, e, x->erased});
    d.program.push_back({Instruction::Kind::Couple, e, e});
    for (const Erasure* x : here)
      if (x->leaves_record_pattern) d.program.push_back({Instruction::Kind::Recouple, e, x->erased});
  }
  return d;
}

std::optional<Basis> erasure_basis(const DilatedScenario& d, std::size_t erased) {
  const auto x = std::find_if(d.erasures.begin(), d.erasures.end(),
                              [&](const Erasure& e) { return e.erased == erased; });
  if (x == d.erasures.end()) throw std::invalid_argument("event is not an erased measurement");
  const auto* m = d.base.measurement(erased);
  const auto* r = d.base.measurement(x->eraser);
  if (m->targets != r->targets) return std::nullopt;

  const Ancilla& a = d.ancillas[d.ancilla_index(erased)];
  const Index n = static_cast<Index>(a.pointer_labels.size());
  const CMatrix<double>& c = d.couplings[d.ancilla_index(erased)].op;
  Basis out;
  out.dims = m->basis.dims;
  out.dims.push_back(n);
  out.labels = r->basis.labels;
  out.vectors = CMatrix<double>::Zero(c.rows(), r->basis.size());
  for (Index j = 0; j < r->basis.size(); ++j) {
    CVector<double> ready = CVector<double>::Zero(c.rows());
    for (Index t = 0; t < r->basis.vectors.rows(); ++t) ready(t * n) = r->basis.vectors(t, j);
    out.vectors.col(j) = c * ready;
  }
  return out;
}

DilatedState evolve(const DilatedScenario& d, std::optional<Ordinal> until) {
  Runner runner(d);
  Ordinal reached = 0;
  for (const Instruction& in : d.program) {
    const Ordinal t = time_of(d.base.events[in.at]);
    if (until && t > *until) break;
    runner.run(in);
    reached = t;
  }
  return {runner.psi(), until ? *until : std::max(reached, d.base.final_time)};
}

std::vector<DilatedState> trajectory(const DilatedScenario& d) {
  Runner runner(d);
  std::vector<DilatedState> out{{runner.psi(), 0}};
  for (std::size_t k = 0; k < d.program.size(); ++k) {
    runner.run(d.program[k]);
    const bool last_of_event = k + 1 == d.program.size() || d.program[k + 1].at != d.program[k].at;
    if (last_of_event) out.push_back({runner.psi(), time_of(d.base.events[d.program[k].at])});
  }
  return out;
}

double joint_probability(const DilatedScenario& d, const DilatedState& st, const Selection& sel) {
  return project(d, st, constraints_for(d, sel));
}

double inspect_record(const DilatedScenario& d, const DilatedState& st, const std::string& agent,
                      const std::string& pointer_label, const Selection& final_selection) {
  const Ancilla& a = d.ancilla_of(agent);
  if (d.base.measurement(a.event)->record != RecordPolicy::Erased)
    throw std::invalid_argument("record of agent '" + agent +
                                "' is retained; read it with joint_probability");
  auto constraints = constraints_for(d, final_selection);
  constraints.push_back({a.slot, static_cast<Index>(pointer_index(a, pointer_label))});
  return project(d, st, constraints);
}

OutcomeDistribution oracle_distribution(const DilatedScenario& d, const DilatedState& st) {
  std::vector<OutcomeDistribution::Axis> axes;
  std::vector<std::string> erased;
  std::vector<std::size_t> slots;
  for (const Ancilla& a : d.ancillas) {
    const auto* m = d.base.measurement(a.event);
    if (m->record == RecordPolicy::Retained) {
      axes.push_back({m->agent, m->basis.labels});
      slots.push_back(a.slot);
    } else {
      erased.push_back(m->agent);
    }
  }
  OutcomeDistribution out(std::move(axes), std::move(erased), record_summary(d.base));
  const auto strides = strides_of(d.dims);
  std::vector<std::size_t> digits(slots.size());
  for (Index i = 0; i < st.psi.size(); ++i) {
    const double w = std::norm(st.psi(i));
    if (w == 0.0) continue;
    bool recorded = true;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const Index v = (i / strides[slots[k]]) % d.dims[slots[k]];
      if (v == 0) {
        recorded = false;
        break;
      }
      digits[k] = static_cast<std::size_t>(v - 1);
    }
    if (recorded) out.add_weight(out.flat_index(digits), w);
  }
  out.clamp(kStructuralTol);
  return out;
}

double unrecorded_population(const DilatedScenario& d, const DilatedState& st) {
  const auto strides = strides_of(d.dims);
  double p = 0.0;
  for (Index i = 0; i < st.psi.size(); ++i) {
    for (const Ancilla& a : d.ancillas) {
      if (d.base.measurement(a.event)->record != RecordPolicy::Retained) continue;
      if ((i / strides[a.slot]) % d.dims[a.slot] == 0) {
        p += std::norm(st.psi(i));
        break;
      }
    }
  }
  return p;
}

}  // namespace qrec
