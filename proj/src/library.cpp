#include "qrec/library.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace qrec {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

const std::vector<std::string> kSpin = {"up", "down"};
const std::vector<std::string> kCoin = {"heads", "tails"};

MeasurementEvent measure(Ordinal t, std::string agent, std::string target,
                         std::vector<std::string> labels, CMatrix<double> vectors,
                         RecordPolicy record) {
  MeasurementEvent m;
  m.time_index = t;
  m.agent = std::move(agent);
  m.targets = {std::move(target)};
  m.basis.dims = {vectors.rows()};
  m.basis.labels = std::move(labels);
  m.basis.vectors = std::move(vectors);
  m.record = record;
  return m;
}

CMatrix<double> second_basis_vectors(const SecondBasis& c) {
  CMatrix<double> v(2, 2);
  v << c.alpha, c.gamma, c.beta, c.delta;
  if (unitarity_defect(v) > kStructuralTol)
    throw std::invalid_argument("second-basis coefficients do not form a unitary matrix");
  return v;
}

CMatrix<double> hadamard() {
  const double h = 1.0 / std::sqrt(2.0);
  CMatrix<double> v(2, 2);
  v << h, h, h, -h;
  return v;
}

Scenario spin_scenario(std::string name, const CVector<double>& s0) {
  if (s0.size() != 2 || std::abs(s0.norm() - 1.0) > kStructuralTol)
    throw std::invalid_argument("s0 must be a normalized two-component state");
  Scenario s;
  s.name = std::move(name);
  s.subsystems = {{"S", 2, kSpin}};
  s.initial = make_state<double>({2}, s0);
  return s;
}

void check(const Scenario& s) {
  if (auto bad = validate(s)) throw std::logic_error("builtin '" + s.name + "': " + bad->message);
}

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::BothErased: return "BOTH_ERASED";
    case Regime::FbarPreserved: return "FBAR_PRESERVED";
    case Regime::FPreserved: return "F_PRESERVED";
    case Regime::BothPreserved: return "BOTH_PRESERVED";
  }
  return "?";
}

std::string slug(Regime r) { return lower(to_string(r)); }

std::optional<Regime> parse_regime(std::string_view text) {
  const std::string key = lower(text);
  for (Regime r : kAllRegimes)
    if (key == slug(r)) return r;
  return std::nullopt;
}

SecondBasis default_second_basis() {
  const double h = 1.0 / std::sqrt(2.0);
  return {h, h, h, -h};
}

CVector<double> default_s0() {
  CVector<double> v(2);
  v << 0.6, 0.8;
  return v;
}

Scenario double_slit(const SecondBasis& c, const CVector<double>& s0, bool engage_first_probe) {
  Scenario s = spin_scenario(engage_first_probe ? "double_slit" : "double_slit_free", s0);
  const auto second = second_basis_vectors(c);
  if (engage_first_probe)
    s.events.emplace_back(measure(1, "F", "S", kSpin, CMatrix<double>::Identity(2, 2),
                                  RecordPolicy::Retained));
  s.events.emplace_back(measure(2, "W", "S", {"fail", "ok"}, second, RecordPolicy::Retained));
  s.final_time = 2;
  check(s);
  return s;
}

Scenario wigner_friend(WfsCase which, const SecondBasis& c, const CVector<double>& s0) {
  const bool erased = which == WfsCase::II;
  Scenario s = spin_scenario(erased ? "wfs_case2" : "wfs_case1", s0);
  s.events.emplace_back(measure(1, "F", "S", kSpin, CMatrix<double>::Identity(2, 2),
                                erased ? RecordPolicy::Erased : RecordPolicy::Retained));
  s.events.emplace_back(
      measure(2, "W", "S", {"fail", "ok"}, second_basis_vectors(c), RecordPolicy::Retained));
  s.final_time = 2;
  check(s);
  return s;
}

Scenario two_wigners(Regime r) {
  const double h = 1.0 / std::sqrt(2.0);
  Scenario s;
  s.name = "2w2f_" + slug(r);
  s.subsystems = {{"coin", 2, kCoin}, {"spin", 2, kSpin}};
  CVector<double> psi = CVector<double>::Zero(4);
  psi(1) = 1.0 / std::sqrt(3.0);              // heads, down
  psi(3) = std::sqrt(2.0) / std::sqrt(3.0);   // tails, down
  s.initial = make_state<double>({2, 2}, psi);

  const bool fbar_kept = r == Regime::FbarPreserved || r == Regime::BothPreserved;
  const bool f_kept = r == Regime::FPreserved || r == Regime::BothPreserved;
  const auto policy = [](bool kept) { return kept ? RecordPolicy::Retained : RecordPolicy::Erased; };

  s.events.emplace_back(measure(1, "Fbar", "coin", kCoin, CMatrix<double>::Identity(2, 2),
                                policy(fbar_kept)));

  // heads: spin untouched; tails: [1 + |up><down| - |down><up|]/sqrt2
  CMatrix<double> u = CMatrix<double>::Zero(4, 4);
  u(0, 0) = u(1, 1) = 1.0;
  u(2, 2) = h;
  u(2, 3) = h;
  u(3, 2) = -h;
  u(3, 3) = h;
  s.events.emplace_back(UnitaryEvent{2, {"coin", "spin"}, make_operator<double>({2, 2}, u)});

  s.events.emplace_back(
      measure(3, "F", "spin", kSpin, CMatrix<double>::Identity(2, 2), policy(f_kept)));
  s.events.emplace_back(
      measure(4, "Wbar", "coin", {"fail_bar", "ok_bar"}, hadamard(), RecordPolicy::Retained));
  s.events.emplace_back(measure(5, "W", "spin", {"fail", "ok"}, hadamard(), RecordPolicy::Retained));
  s.final_time = 5;
  check(s);
  return s;
}

const std::vector<Builtin>& builtins() {
  static const std::vector<Builtin> list = {
      {"2w2f", {"both_erased", "fbar_preserved", "f_preserved", "both_preserved"}},
      {"wfs", {"case1", "case2"}},
      {"wfs_case1", {}},
      {"wfs_case2", {}},
      {"double_slit", {"engaged", "not_engaged"}},
  };
  return list;
}

Scenario builtin(const std::string& name, const std::string& variant) {
  const std::string v = lower(variant);
  const auto bad_variant = [&] {
    return std::invalid_argument("builtin '" + name + "' has no variant '" + variant + "'");
  };
  if (name == "2w2f") {
    if (v.empty()) return two_wigners(Regime::BothErased);
    if (auto r = parse_regime(v)) return two_wigners(*r);
    throw bad_variant();
  }
  if (name == "wfs" || name == "wfs_case1" || name == "wfs_case2") {
    std::string which = name == "wfs" ? (v.empty() ? "case1" : v) : name.substr(4);
    if (name != "wfs" && !v.empty() && v != which) throw bad_variant();
    if (which == "case1" || which == "i")
      return wigner_friend(WfsCase::I, default_second_basis(), default_s0());
    if (which == "case2" || which == "ii")
      return wigner_friend(WfsCase::II, default_second_basis(), default_s0());
    throw bad_variant();
  }
  if (name == "double_slit") {
    if (v.empty() || v == "engaged") return double_slit(default_second_basis(), default_s0(), true);
    if (v == "not_engaged") return double_slit(default_second_basis(), default_s0(), false);
    throw bad_variant();
  }
  throw std::invalid_argument("unknown builtin '" + name + "'");
}

std::vector<ShippedScenario> shipped_scenarios() {
  std::vector<ShippedScenario> out;
  out.push_back({"double_slit.scn", double_slit(default_second_basis(), default_s0(), true)});
  out.push_back({"wfs_case1.scn", wigner_friend(WfsCase::I, default_second_basis(), default_s0())});
  out.push_back({"wfs_case2.scn", wigner_friend(WfsCase::II, default_second_basis(), default_s0())});
  for (Regime r : kAllRegimes) out.push_back({"2w2f_" + slug(r) + ".scn", two_wigners(r)});
  return out;
}

}  // namespace qrec
