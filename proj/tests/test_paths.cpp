#include "qrec/library.hpp"
#include "qrec/paths.hpp"
#include "random_scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace qrec;

namespace {

const double kA = 1.0 / std::sqrt(12.0);

// Squared norm of the state after applying every event as a full-space
// matrix, with the chosen projector for each measurement listed in
// `choice` and the identity for the others.
double brute_weight(const Scenario& s, const std::map<std::size_t, std::size_t>& choice) {
  const Dims dims = s.dims();
  CVector<double> v = s.initial.amps;
  for (std::size_t e = 0; e < s.events.size(); ++e) {
    const auto slots = s.slots_of(targets_of(s.events[e]));
    if (const auto* u = std::get_if<UnitaryEvent>(&s.events[e])) {
      v = embed(u->op, slots, dims).entries * v;
    } else if (const auto it = choice.find(e); it != choice.end()) {
      const auto* m = s.measurement(e);
      const CVector<double> col = m->basis.vector(static_cast<Index>(it->second));
      v = embed(make_operator<double>(m->basis.dims, col * col.adjoint()), slots, dims).entries * v;
    }
  }
  return v.squaredNorm();
}

std::vector<std::size_t> retained_events(const Scenario& s) {
  std::vector<std::size_t> out;
  for (std::size_t e : s.measurement_events())
    if (s.measurement(e)->record == RecordPolicy::Retained) out.push_back(e);
  return out;
}

double p(const OutcomeDistribution& d, const OutcomeTuple& t) { return d.probability(t); }

}  // namespace

TEST_CASE("two-Wigner virtual paths: sixteen enumerated, twelve nonzero, each +-1/sqrt12") {
  const auto s = two_wigners(Regime::BothErased);
  const auto paths = enumerate_paths(s);
  REQUIRE(paths.size() == 16);
  int nonzero = 0;
  for (const auto& path : paths) {
    if (path.is_zero()) continue;
    ++nonzero;
    CHECK(std::abs(std::abs(path.amplitude.real()) - kA) < 1e-12);
    CHECK(std::abs(path.amplitude.imag()) < 1e-12);
  }
  CHECK(nonzero == 12);
}

TEST_CASE("path amplitudes by outcome (Fbar, F, Wbar, W)") {
  const auto s = two_wigners(Regime::BothErased);
  // heads=0 tails=1, up=0 down=1, fail=0 ok=1
  struct Row {
    std::vector<std::size_t> outcomes;
    double amplitude;
  };
  const Row rows[] = {
      {{0, 1, 0, 0}, kA},  {{1, 1, 0, 0}, kA},  {{1, 0, 0, 0}, kA},  {{0, 1, 0, 1}, -kA},
      {{1, 1, 0, 1}, -kA}, {{1, 0, 0, 1}, kA},  {{0, 1, 1, 0}, kA},  {{1, 1, 1, 0}, -kA},
      {{1, 0, 1, 0}, -kA}, {{0, 1, 1, 1}, -kA}, {{1, 1, 1, 1}, kA},  {{1, 0, 1, 1}, -kA},
  };
  for (const auto& r : rows) {
    CAPTURE(r.amplitude);
    CHECK(std::abs(path_amplitude(r.outcomes, s) - Amplitude(r.amplitude, 0)) < 1e-12);
  }
  CHECK(std::abs(path_amplitude({0, 0, 0, 0}, s)) < 1e-12);
  CHECK_THROWS_AS(path_amplitude({0, 0, 0}, s), std::invalid_argument);
  CHECK_THROWS_AS(path_amplitude({0, 0, 0, 2}, s), std::out_of_range);
}

TEST_CASE("paths come out in lexicographic order with the first measurement slowest") {
  const auto paths = enumerate_paths(two_wigners(Regime::BothPreserved));
  CHECK(paths[1].branches.back().outcome == 1);
  CHECK(paths[8].branches.front().outcome == 1);
  CHECK(describe(paths[4], two_wigners(Regime::BothPreserved)) ==
        "fail <- fail_bar <- down <- heads <- initial");
}

TEST_CASE("both records erased") {
  const auto d = path_distribution(two_wigners(Regime::BothErased));
  CHECK(d.erased_agents() == std::vector<std::string>{"Fbar", "F"});
  CHECK(p(d, {{"Wbar", "fail_bar"}, {"W", "fail"}}) == doctest::Approx(9.0 / 12).epsilon(1e-12));
  CHECK(p(d, {{"Wbar", "fail_bar"}, {"W", "ok"}}) == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(p(d, {{"Wbar", "ok_bar"}, {"W", "fail"}}) == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(p(d, {{"Wbar", "ok_bar"}, {"W", "ok"}}) == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK_THROWS_AS(implication(d, {"W", "ok"}, {"Fbar", "heads"}), ErasedRecordError);
  CHECK_THROWS_AS(marginal(d, {"F"}), ErasedRecordError);
}

TEST_CASE("only Fbar's record kept") {
  const auto d = path_distribution(two_wigners(Regime::FbarPreserved));
  CHECK(p(d, {{"Fbar", "tails"}, {"Wbar", "fail_bar"}, {"W", "fail"}}) ==
        doctest::Approx(1.0 / 3));
  CHECK(p(d, {{"Fbar", "tails"}, {"Wbar", "fail_bar"}, {"W", "ok"}}) == 0.0);
  CHECK(p(d, {{"Fbar", "tails"}, {"Wbar", "ok_bar"}, {"W", "ok"}}) == 0.0);
  CHECK(p(d, {{"Fbar", "heads"}, {"Wbar", "ok_bar"}, {"W", "ok"}}) == doctest::Approx(1.0 / 12));
  CHECK(std::holds_alternative<ImplicationHolds>(implication(d, {"W", "ok"}, {"Fbar", "heads"})));
}

TEST_CASE("only F's record kept") {
  const auto d = path_distribution(two_wigners(Regime::FPreserved));
  CHECK(p(d, {{"F", "down"}, {"Wbar", "fail_bar"}, {"W", "ok"}}) == doctest::Approx(1.0 / 3));
  CHECK(p(d, {{"F", "down"}, {"Wbar", "ok_bar"}, {"W", "fail"}}) == 0.0);
  CHECK(p(d, {{"F", "down"}, {"Wbar", "ok_bar"}, {"W", "ok"}}) == 0.0);
  CHECK(std::holds_alternative<ImplicationHolds>(implication(d, {"Wbar", "ok_bar"}, {"F", "up"})));
}

TEST_CASE("both records kept") {
  const auto d = path_distribution(two_wigners(Regime::BothPreserved));
  int twelfths = 0;
  int zeros = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (std::abs(d.weight(k) - 1.0 / 12) < 1e-12) ++twelfths;
    if (d.weight(k) == 0.0) ++zeros;
  }
  CHECK(twelfths == 12);
  CHECK(zeros == 4);
  const auto friends = marginal(d, {"Fbar", "F"});
  CHECK(p(friends, {{"Fbar", "heads"}, {"F", "up"}}) == 0.0);
  CHECK(p(friends, {{"Fbar", "heads"}, {"F", "down"}}) == doctest::Approx(1.0 / 3));
  CHECK(p(friends, {{"Fbar", "tails"}, {"F", "up"}}) == doctest::Approx(1.0 / 3));
  CHECK(p(friends, {{"Fbar", "tails"}, {"F", "down"}}) == doctest::Approx(1.0 / 3));
  CHECK(std::holds_alternative<ImplicationHolds>(implication(d, {"F", "up"}, {"Fbar", "tails"})));
  const auto fails = implication(d, {"Fbar", "tails"}, {"F", "up"});
  REQUIRE(std::holds_alternative<ImplicationFails>(fails));
  CHECK(std::get<ImplicationFails>(fails).counter_probability == doctest::Approx(1.0 / 3));
}

TEST_CASE("marginals of the partly erased ensembles") {
  const auto only_fbar = path_distribution(two_wigners(Regime::FbarPreserved));
  const auto erased = path_distribution(two_wigners(Regime::BothErased));
  // W's marginal happens to coincide; Wbar's does not
  const auto w1 = marginal(only_fbar, {"W"});
  const auto w2 = marginal(erased, {"W"});
  CHECK(p(w1, {{"W", "ok"}}) == doctest::Approx(2.0 / 12));
  CHECK(max_abs_difference(w1, w2) < 1e-12);
  const auto wbar1 = marginal(only_fbar, {"Wbar"});
  const auto wbar2 = marginal(erased, {"Wbar"});
  CHECK(p(wbar1, {{"Wbar", "fail_bar"}}) == doctest::Approx(6.0 / 12));
  CHECK(p(wbar2, {{"Wbar", "fail_bar"}}) == doctest::Approx(10.0 / 12));
  CHECK_THROWS_AS(marginal(erased, {"nobody"}), std::out_of_range);
}

TEST_CASE("swapping the order of Wbar and W changes nothing") {
  for (Regime r : kAllRegimes) {
    auto s = two_wigners(r);
    auto& wbar = std::get<MeasurementEvent>(s.events[3]);
    auto& w = std::get<MeasurementEvent>(s.events[4]);
    std::swap(wbar.time_index, w.time_index);
    sort_events(s);
    REQUIRE_FALSE(validate(s));
    const auto swapped = path_distribution(s);
    const auto original = path_distribution(two_wigners(r));
    for (std::size_t k = 0; k < original.size(); ++k)
      CHECK(swapped.probability(original.tuple(k)) == doctest::Approx(original.weight(k)).epsilon(1e-12));
  }
}

TEST_CASE("reduce matches projected-state norms on random scenarios") {
  std::mt19937_64 rng(17);
  for (int n = 0; n < 150; ++n) {
    const auto s = testing::random_scenario(rng);
    const auto d = path_distribution(s);
    CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-12));
    const auto retained = retained_events(s);
    for (std::size_t k = 0; k < d.size(); ++k) {
      const auto digits = d.digits(k);
      std::map<std::size_t, std::size_t> choice;
      for (std::size_t j = 0; j < retained.size(); ++j) choice[retained[j]] = digits[j];
      CHECK(std::abs(d.weight(k) - brute_weight(s, choice)) < 1e-12);
    }
  }
}

TEST_CASE("single-path squared amplitudes are projected-state norms") {
  std::mt19937_64 rng(23);
  for (int n = 0; n < 50; ++n) {
    const auto s = testing::random_scenario(rng);
    for (const auto& path : enumerate_paths(s)) {
      std::map<std::size_t, std::size_t> choice;
      for (const auto& b : path.branches) choice[b.event] = b.outcome;
      CHECK(std::abs(std::norm(path.amplitude) - brute_weight(s, choice)) < 1e-12);
    }
  }
}

TEST_CASE("identical bases make the first probe irrelevant") {
  const SecondBasis same{1.0, 0.0, 0.0, 1.0};
  const auto engaged = path_distribution(double_slit(same, default_s0(), true));
  const auto free = path_distribution(double_slit(same, default_s0(), false));
  CHECK(max_abs_difference(marginal(engaged, {"W"}), free) < 1e-12);
}

TEST_CASE("real-path graph") {
  SUBCASE("both erased: four edges, none vanishing") {
    const auto g = real_path_graph(path_distribution(two_wigners(Regime::BothErased)));
    CHECK(g.layers.size() == 2);
    CHECK(g.edges.size() == 4);
    for (const auto& e : g.edges) CHECK_FALSE(e.vanishing);
  }
  SUBCASE("both preserved: no heads-up edge") {
    const auto g = real_path_graph(path_distribution(two_wigners(Regime::BothPreserved)));
    CHECK(g.layers.size() == 4);
    CHECK(g.layers[0].agent == "Fbar");
    const auto* e = g.find_edge("heads", "up");
    REQUIRE(e);
    CHECK(e->vanishing);
    CHECK(e->weight == 0.0);
    const auto* kept = g.find_edge("tails", "up");
    REQUIRE(kept);
    CHECK(kept->weight == doctest::Approx(1.0 / 3));
  }
  SUBCASE("single measurement: one layer") {
    const auto g = real_path_graph(path_distribution(double_slit(default_second_basis(), default_s0(), false)));
    CHECK(g.layers.size() == 1);
    CHECK(g.edges.empty());
  }
}

TEST_CASE("invalid scenarios are refused") {
  auto s = two_wigners(Regime::BothErased);
  s.initial.amps *= 2.0;
  CHECK_THROWS_AS(enumerate_paths(s), std::invalid_argument);
}
