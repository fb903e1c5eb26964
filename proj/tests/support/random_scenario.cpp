#include "random_scenario.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <numeric>

namespace qrec::testing {

namespace {

constexpr std::size_t kMaxPaths = 4000;
constexpr Index kMaxDilatedDim = 40000;

std::vector<std::string> labels_for(const std::string& prefix, Index n) {
  std::vector<std::string> out;
  for (Index k = 0; k < n; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

std::vector<std::string> random_subset(const Scenario& s, std::size_t max_size,
                                       std::mt19937_64& rng) {
  std::vector<std::string> names;
  for (const auto& sub : s.subsystems) names.push_back(sub.name);
  std::shuffle(names.begin(), names.end(), rng);
  const std::size_t n =
      std::uniform_int_distribution<std::size_t>(1, std::min(max_size, names.size()))(rng);
  names.resize(n);
  return names;
}

Dims dims_of(const Scenario& s, const std::vector<std::string>& names) {
  Dims out;
  for (std::size_t slot : s.slots_of(names)) out.push_back(s.subsystems[slot].dim);
  return out;
}

MeasurementEvent random_measurement(const Scenario& s, Ordinal t, std::vector<std::string> targets,
                                    RecordPolicy record, std::mt19937_64& rng) {
  MeasurementEvent m;
  m.time_index = t;
  m.agent = "A" + std::to_string(t);
  m.targets = std::move(targets);
  m.basis.dims = dims_of(s, m.targets);
  const Index n = total_dim(m.basis.dims);
  m.basis.labels = labels_for(m.agent + "_", n);
  // sometimes the plain product basis, so interference-free cases show up
  m.basis.vectors = std::bernoulli_distribution(0.25)(rng) ? CMatrix<double>::Identity(n, n)
                                                           : random_unitary(n, rng);
  m.record = record;
  return m;
}

bool within_caps(const Scenario& s) {
  std::size_t paths = 1;
  Index dilated = total_dim(s.dims());
  for (std::size_t e : s.measurement_events()) {
    const Index b = s.measurement(e)->basis.size();
    paths *= static_cast<std::size_t>(b);
    dilated *= b + 1;
  }
  return paths <= kMaxPaths && dilated <= kMaxDilatedDim;
}

}  // namespace

CMatrix<double> random_unitary(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix<double> z(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) z(r, c) = {g(rng), g(rng)};
  Eigen::HouseholderQR<CMatrix<double>> qr(z);
  CMatrix<double> q = qr.householderQ() * CMatrix<double>::Identity(n, n);
  const CMatrix<double> r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index c = 0; c < n; ++c) q.col(c) *= r(c, c) / std::abs(r(c, c));
  return q;
}

CVector<double> random_state(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector<double> v(n);
  for (Index k = 0; k < n; ++k) v(k) = {g(rng), g(rng)};
  return v / v.norm();
}

Scenario random_scenario(std::mt19937_64& rng) {
  for (;;) {
    Scenario s;
    s.name = "random";
    const int subsystems = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int k = 0; k < subsystems; ++k) {
      const Index dim = std::uniform_int_distribution<Index>(2, 3)(rng);
      const std::string name = "q" + std::to_string(k);
      s.subsystems.push_back({name, dim, labels_for(name + "_", dim)});
    }
    s.initial = make_state<double>(s.dims(), random_state(total_dim(s.dims()), rng));

    // split the subsystems into groups, each closed by one terminal measurement
    std::vector<std::string> names;
    for (const auto& sub : s.subsystems) names.push_back(sub.name);
    std::shuffle(names.begin(), names.end(), rng);
    std::vector<std::vector<std::string>> groups;
    for (const auto& n : names) {
      if (groups.empty() || std::bernoulli_distribution(0.5)(rng))
        groups.push_back({n});
      else
        groups.back().push_back(n);
    }

    const int earlier =
        std::uniform_int_distribution<int>(0, 4 - static_cast<int>(groups.size()))(rng);
    Ordinal t = 0;
    for (int k = 0; k < earlier; ++k) {
      ++t;
      auto targets = random_subset(s, 2, rng);
      if (std::bernoulli_distribution(0.4)(rng)) {
        const auto dims = dims_of(s, targets);
        s.events.emplace_back(
            UnitaryEvent{t, targets, make_operator<double>(dims, random_unitary(total_dim(dims), rng))});
      } else {
        const auto record = std::bernoulli_distribution(0.5)(rng) ? RecordPolicy::Erased
                                                                  : RecordPolicy::Retained;
        s.events.emplace_back(random_measurement(s, t, targets, record, rng));
      }
    }
    for (auto& group : groups) {
      ++t;
      s.events.emplace_back(random_measurement(s, t, group, RecordPolicy::Retained, rng));
    }
    s.final_time = t;
    if (!within_caps(s) || validate(s)) continue;
    return s;
  }
}

}  // namespace qrec::testing
