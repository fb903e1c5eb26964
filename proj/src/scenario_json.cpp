#include "qrec/scenario_json.hpp"

#include <stdexcept>

namespace qrec {

using nlohmann::json;

namespace {

json complex_json(Amplitude z) { return json::array({z.real(), z.imag()}); }

Amplitude complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument("complex numbers must be [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

json vector_json(const auto& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

Dims dims_from(const json& j) {
  Dims out;
  for (const auto& d : j.at("dims")) out.push_back(d.get<Index>());
  return out;
}

CVector<double> vector_from(const json& j, Index expected) {
  if (!j.is_array() || static_cast<Index>(j.size()) != expected)
    throw std::invalid_argument("vector has the wrong length");
  CVector<double> v(expected);
  for (Index i = 0; i < expected; ++i) v(i) = complex_from(j[static_cast<std::size_t>(i)]);
  return v;
}

}  // namespace

json to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["subsystems"] = json::array();
  for (const auto& sub : s.subsystems)
    doc["subsystems"].push_back(
        {{"name", sub.name}, {"dim", sub.dim}, {"basis_labels", sub.basis_labels}});
  doc["initial"] = {{"dims", s.initial.dims}, {"amps", vector_json(s.initial.amps)}};
  doc["events"] = json::array();
  for (const Event& e : s.events) {
    if (const auto* u = std::get_if<UnitaryEvent>(&e)) {
      json rows = json::array();
      for (Index r = 0; r < u->op.entries.rows(); ++r)
        rows.push_back(vector_json(u->op.entries.row(r).transpose()));
      doc["events"].push_back({{"type", "unitary"},
                               {"time_index", u->time_index},
                               {"targets", u->targets},
                               {"op", {{"dims", u->op.dims}, {"entries", rows}}}});
    } else {
      const auto& m = std::get<MeasurementEvent>(e);
      json vectors = json::array();
      for (Index k = 0; k < m.basis.size(); ++k) vectors.push_back(vector_json(m.basis.vector(k)));
      doc["events"].push_back(
          {{"type", "measurement"},
           {"time_index", m.time_index},
           {"agent", m.agent},
           {"targets", m.targets},
           {"basis", {{"dims", m.basis.dims}, {"labels", m.basis.labels}, {"vectors", vectors}}},
           {"record", to_string(m.record)}});
    }
  }
  doc["final_time"] = s.final_time;
  return doc;
}

Scenario scenario_from_json(const json& doc) {
  Scenario s;
  try {
    s.name = doc.value("name", "");
    for (const auto& sub : doc.at("subsystems"))
      s.subsystems.push_back({sub.at("name").get<std::string>(), sub.at("dim").get<Index>(),
                              sub.at("basis_labels").get<std::vector<std::string>>()});
    const auto& initial = doc.at("initial");
    s.initial.dims = dims_from(initial);
    s.initial.amps = vector_from(initial.at("amps"), total_dim(s.initial.dims));
    for (const auto& ev : doc.at("events")) {
      const std::string type = ev.at("type").get<std::string>();
      if (type == "unitary") {
        UnitaryEvent u;
        u.time_index = ev.at("time_index").get<Ordinal>();
        u.targets = ev.at("targets").get<std::vector<std::string>>();
        u.op.dims = dims_from(ev.at("op"));
        const Index n = total_dim(u.op.dims);
        const auto& rows = ev.at("op").at("entries");
        if (static_cast<Index>(rows.size()) != n)
          throw std::invalid_argument("operator has the wrong number of rows");
        u.op.entries.resize(n, n);
        for (Index r = 0; r < n; ++r)
          u.op.entries.row(r) = vector_from(rows[static_cast<std::size_t>(r)], n).transpose();
        s.events.emplace_back(std::move(u));
      } else if (type == "measurement") {
        MeasurementEvent m;
        m.time_index = ev.at("time_index").get<Ordinal>();
        m.agent = ev.at("agent").get<std::string>();
        m.targets = ev.at("targets").get<std::vector<std::string>>();
        const auto& basis = ev.at("basis");
        m.basis.dims = dims_from(basis);
        m.basis.labels = basis.at("labels").get<std::vector<std::string>>();
        const Index n = total_dim(m.basis.dims);
        const auto& vectors = basis.at("vectors");
        if (vectors.size() != m.basis.labels.size())
          throw std::invalid_argument("basis needs one vector per label");
        m.basis.vectors.resize(n, m.basis.size());
        for (Index k = 0; k < m.basis.size(); ++k)
          m.basis.vectors.col(k) = vector_from(vectors[static_cast<std::size_t>(k)], n);
        const std::string record = ev.at("record").get<std::string>();
        if (record == "RETAINED") {
          m.record = RecordPolicy::Retained;
        } else if (record == "ERASED") {
          m.record = RecordPolicy::Erased;
        } else {
          throw std::invalid_argument("record must be RETAINED or ERASED");
        }
        s.events.emplace_back(std::move(m));
      } else {
        throw std::invalid_argument("unknown event type '" + type + "'");
      }
    }
    s.final_time = doc.at("final_time").get<Ordinal>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed scenario JSON: ") + e.what());
  }
  sort_events(s);
  if (auto bad = validate(s)) throw std::invalid_argument(bad->message);
  return s;
}

}  // namespace qrec
