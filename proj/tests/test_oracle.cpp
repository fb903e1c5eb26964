#include "qrec/library.hpp"
#include "qrec/oracle.hpp"
#include "qrec/paths.hpp"
#include "random_scenario.hpp"

#include <doctest.h>

#include <cmath>

using namespace qrec;

namespace {

const double kH = 1.0 / std::sqrt(2.0);

CVector<double> unit(Index n, Index k) {
  CVector<double> v = CVector<double>::Zero(n);
  v(k) = 1.0;
  return v;
}

// |a> (x) |b> (x) |c>, last factor fastest
CVector<double> product(const CVector<double>& a, const CVector<double>& b) {
  CVector<double> out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

CVector<double> spin(double up, double down) {
  CVector<double> v(2);
  v << up, down;
  return v;
}

// A(j <- i <- s0) with no free evolution between the probes
Amplitude path(const CVector<double>& j, const CVector<double>& i, const CVector<double>& s0) {
  return j.dot(i) * i.dot(s0);
}

}  // namespace

TEST_CASE("coupling moves the pointer and is its own inverse") {
  std::mt19937_64 rng(4);
  const Basis b{{3}, {"a", "b", "c"}, testing::random_unitary(3, rng)};
  const CMatrix<double> c = coupling_operator(b);
  CHECK(unitarity_defect(c) < 1e-12);
  CHECK((c * c - CMatrix<double>::Identity(12, 12)).norm() < 1e-12);
  for (Index k = 0; k < 3; ++k) {
    const CVector<double> in = product(b.vector(k), unit(4, 0));
    const CVector<double> out = product(b.vector(k), unit(4, k + 1));
    CHECK((c * in - out).norm() < 1e-12);
  }
}

TEST_CASE("dilation adds one pointer per measurement") {
  const auto d = dilate(double_slit(default_second_basis(), default_s0(), false));
  CHECK(d.ancillas.size() == 1);
  CHECK(d.dims == Dims{2, 3});
  CHECK(d.ancillas[0].pointer_labels == std::vector<std::string>{"0", "fail", "ok"});
  CHECK(dilate(two_wigners(Regime::BothErased)).dims == Dims{2, 2, 3, 3, 3, 3});
}

TEST_CASE("nothing happens before the first event") {
  Scenario s = double_slit(default_second_basis(), default_s0(), false);
  s.events.insert(s.events.begin(),
                  UnitaryEvent{1, {"S"}, make_operator<double>({2}, CMatrix<double>::Identity(2, 2))});
  const auto d = dilate(s);
  const auto st = evolve(d, 1);
  CHECK((st.psi - product(default_s0(), unit(3, 0))).norm() < 1e-15);
}

TEST_CASE("both probes engaged: sum over i, j of A(j<-i<-s0) |j> |D(i)> |Dbar(j)>") {
  const auto c = default_second_basis();
  const auto s0 = default_s0();
  const auto d = dilate(double_slit(c, s0, true));
  const auto st = evolve(d);
  const CVector<double> ups[] = {spin(1, 0), spin(0, 1)};
  const CVector<double> js[] = {spin(c.alpha.real(), c.beta.real()), spin(c.gamma.real(), c.delta.real())};
  CVector<double> expected = CVector<double>::Zero(18);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j)
      expected += path(js[j], ups[i], s0) * product(product(js[j], unit(3, i + 1)), unit(3, j + 1));
  CHECK((st.psi - expected).norm() < 1e-12);

  const double p_ok = joint_probability(d, st, {{"W", "ok"}});
  CHECK(p_ok == doctest::Approx(std::norm(path(js[1], ups[0], s0)) + std::norm(path(js[1], ups[1], s0))));
  CHECK(joint_probability(d, st, {{"F", "up"}, {"W", "ok"}}) ==
        doctest::Approx(std::norm(path(js[1], ups[0], s0))));
}

TEST_CASE("first probe idle: amplitudes through up and down add") {
  const auto c = default_second_basis();
  const auto s0 = default_s0();
  const auto d = dilate(double_slit(c, s0, false));
  const auto st = evolve(d);
  const CVector<double> js[] = {spin(kH, kH), spin(kH, -kH)};
  CVector<double> expected = CVector<double>::Zero(6);
  for (Index j = 0; j < 2; ++j)
    expected += (path(js[j], spin(1, 0), s0) + path(js[j], spin(0, 1), s0)) *
                product(js[j], unit(3, j + 1));
  CHECK((st.psi - expected).norm() < 1e-12);
}

TEST_CASE("whole-laboratory measurement: composite basis and summed amplitudes") {
  const auto c = default_second_basis();
  const auto s0 = default_s0();
  const auto d = dilate(wigner_friend(WfsCase::II, c, s0));
  REQUIRE(d.erasures.size() == 1);
  CHECK(d.erasures[0].eraser == 1);
  CHECK(d.erasures[0].leaves_record_pattern);

  // |Fail> = alpha |up>|D(up)> + beta |down>|D(down)>, likewise |Ok>
  const auto composite = erasure_basis(d, 0);
  REQUIRE(composite);
  const CVector<double> fail = c.alpha * product(spin(1, 0), unit(3, 1)) +
                               c.beta * product(spin(0, 1), unit(3, 2));
  const CVector<double> ok = c.gamma * product(spin(1, 0), unit(3, 1)) +
                             c.delta * product(spin(0, 1), unit(3, 2));
  CHECK((composite->vector(0) - fail).norm() < 1e-12);
  CHECK((composite->vector(1) - ok).norm() < 1e-12);

  const auto st = evolve(d);
  const CVector<double> js[] = {spin(kH, kH), spin(kH, -kH)};
  const CVector<double> big[] = {fail, ok};
  // ordering is S, D, Dbar
  CVector<double> expected = CVector<double>::Zero(18);
  for (Index j = 0; j < 2; ++j)
    expected += (path(js[j], spin(1, 0), s0) + path(js[j], spin(0, 1), s0)) *
                product(big[j], unit(3, j + 1));
  CHECK((st.psi - expected).norm() < 1e-12);
}

TEST_CASE("reading the erased pointer afterwards") {
  const auto c = default_second_basis();
  const auto s0 = default_s0();
  const auto d = dilate(wigner_friend(WfsCase::II, c, s0));
  const auto st = evolve(d);
  const Amplitude a_ok = path(spin(kH, -kH), spin(1, 0), s0) + path(spin(kH, -kH), spin(0, 1), s0);
  const Amplitude a_fail = path(spin(kH, kH), spin(1, 0), s0) + path(spin(kH, kH), spin(0, 1), s0);

  CHECK(inspect_record(d, st, "F", "up", {{"W", "ok"}}) ==
        doctest::Approx(std::norm(c.gamma) * std::norm(a_ok)));
  CHECK(inspect_record(d, st, "F", "up", {{"W", "fail"}}) ==
        doctest::Approx(std::norm(c.alpha) * std::norm(a_fail)));
  const double total = inspect_record(d, st, "F", "up");
  CHECK(total == doctest::Approx(inspect_record(d, st, "F", "up", {{"W", "ok"}}) +
                                 inspect_record(d, st, "F", "up", {{"W", "fail"}})));
  CHECK(inspect_record(d, st, "F", "0") < 1e-12);
  CHECK_THROWS_AS(inspect_record(d, st, "W", "ok"), std::invalid_argument);
  CHECK_THROWS_AS(joint_probability(d, st, {{"F", "up"}}), ErasedRecordError);
  CHECK_THROWS_AS(inspect_record(d, st, "F", "sideways"), std::out_of_range);
}

TEST_CASE("retained and erased friend give different W statistics for generic s0") {
  const auto c = default_second_basis();
  const auto s0 = default_s0();
  const auto one = oracle_distribution(wigner_friend(WfsCase::I, c, s0));
  const auto two = oracle_distribution(wigner_friend(WfsCase::II, c, s0));
  const double p1 = marginal(one, {"W"}).probability({{"W", "ok"}});
  const double p2 = two.probability({{"W", "ok"}});
  CHECK(p1 == doctest::Approx(0.5));
  CHECK(p2 == doctest::Approx(0.02));
}

TEST_CASE("single-branch preparation shows no difference between the cases") {
  const auto c = default_second_basis();
  const auto up = spin(1, 0);
  const auto one = oracle_distribution(wigner_friend(WfsCase::I, c, up));
  const auto two = oracle_distribution(wigner_friend(WfsCase::II, c, up));
  CHECK(marginal(one, {"W"}).probability({{"W", "ok"}}) == doctest::Approx(0.5));
  CHECK(two.probability({{"W", "ok"}}) == doctest::Approx(0.5));
}

TEST_CASE("two Wigners: the laboratories before Wbar and W act") {
  const auto d = dilate(two_wigners(Regime::BothPreserved));
  const auto st = evolve(d, 3);
  CHECK(joint_probability(d, st, {{"Fbar", "heads"}, {"F", "up"}}) < 1e-12);
  CHECK(joint_probability(d, st, {{"Fbar", "heads"}, {"F", "down"}}) == doctest::Approx(1.0 / 3));
  CHECK(joint_probability(d, st, {{"Fbar", "tails"}, {"F", "up"}}) == doctest::Approx(1.0 / 3));
  CHECK(joint_probability(d, st, {{"Fbar", "tails"}, {"F", "down"}}) == doctest::Approx(1.0 / 3));
}

TEST_CASE("two Wigners, both erased: P(ok_bar, ok) from pointer projectors") {
  const auto d = dilate(two_wigners(Regime::BothErased));
  const auto st = evolve(d);
  CHECK(joint_probability(d, st, {{"Wbar", "ok_bar"}, {"W", "ok"}}) ==
        doctest::Approx(1.0 / 12).epsilon(1e-12));
  double sum = 0;
  for (const auto* label : {"fail", "ok"}) sum += joint_probability(d, st, {{"W", label}});
  CHECK(sum == doctest::Approx(1.0));
  CHECK_THROWS_AS(joint_probability(d, st, {{"Fbar", "heads"}}), ErasedRecordError);
  CHECK_THROWS_AS(joint_probability(d, st, {{"W", "0"}}), std::out_of_range);
}

TEST_CASE("norm is conserved at every event boundary") {
  std::vector<Scenario> all;
  for (const auto& s : shipped_scenarios()) all.push_back(s.scenario);
  std::mt19937_64 rng(31);
  for (int k = 0; k < 100; ++k) all.push_back(testing::random_scenario(rng));
  for (const auto& s : all) {
    for (const auto& st : trajectory(dilate(s))) CHECK(std::abs(st.psi.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("the unused pointer block stays empty") {
  std::mt19937_64 rng(37);
  for (int k = 0; k < 100; ++k) {
    const auto d = dilate(testing::random_scenario(rng));
    CHECK(unrecorded_population(d, evolve(d)) <= 1e-12);
  }
  for (const auto& s : shipped_scenarios()) {
    const auto d = dilate(s.scenario);
    CHECK(unrecorded_population(d, evolve(d)) <= 1e-12);
  }
}

TEST_CASE("oracle and path engine agree") {
  for (const auto& s : shipped_scenarios())
    CHECK(max_abs_difference(path_distribution(s.scenario), oracle_distribution(s.scenario)) <= 1e-12);
  std::mt19937_64 rng(41);
  for (int k = 0; k < 100; ++k) {
    const auto s = testing::random_scenario(rng);
    CHECK(max_abs_difference(path_distribution(s), oracle_distribution(s)) <= 1e-12);
  }
}
