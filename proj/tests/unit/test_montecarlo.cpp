#include <doctest.h>

#include <cmath>

#include "qrg/montecarlo.hpp"

using namespace qrg;

namespace {

CoherentGameParams k2(double alpha, double eta = 1.0, double nu = 1.0) {
  return make_coherent_params(canonical_family(2), alpha, eta, nu);
}

bool same(const EstimateReport& a, const EstimateReport& b) {
  return a.trials == b.trials && a.wins == b.wins && a.estimate == b.estimate &&
         a.std_error == b.std_error && a.no_click_trials == b.no_click_trials;
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("seeded runs are reproducible and schedule independent") {
  const CoherentGameParams p = k2(1.0, 0.8, 0.9);
  const EstimateReport a = run_trials(p, 0, 50000, 7);
  CHECK(same(a, run_trials(p, 0, 50000, 7)));
  CHECK(same(a, run_trials_serial(p, 0, 50000, 7)));
  CHECK_FALSE(same(a, run_trials(p, 0, 50000, 8)));
  const TrialOutcome t1 = simulate_trial(p, 1, 7, 123);
  const TrialOutcome t2 = simulate_trial(p, 1, 7, 123);
  CHECK(t1.x.mask() == t2.x.mask());
  CHECK(t1.answer == t2.answer);
}

TEST_CASE("ideal protocol matches the closed form") {
  const EstimateReport r = run_trials(k2(1.0), 0, 200000, 1);
  CHECK(sigma_distance(r, 1.0 - std::exp(-1.0) / 2) <= kPassSigmas);
  CHECK(r.n == 4);
  CHECK(r.k == 2);
}

TEST_CASE("no light means guessing") {
  const EstimateReport r = run_trials(k2(1.0, 0.0), 0, 100000, 2);
  CHECK(r.no_click_trials == r.trials);
  CHECK(sigma_distance(r, 0.5) <= kPassSigmas);
}

TEST_CASE("no-click fraction tracks p_0") {
  for (double eta : {1.0, 0.5}) {
    const CoherentGameParams p = k2(1.0, eta, 0.9);
    const std::uint64_t n = 100000;
    const EstimateReport r = run_trials(p, 1, n, 3);
    const double p0 = std::exp(-eta);
    const double frac = static_cast<double>(r.no_click_trials) / static_cast<double>(n);
    CHECK(std::abs(frac - p0) <= kPassSigmas * std::sqrt(p0 * (1 - p0) / static_cast<double>(n)));
  }
}

TEST_CASE("replay audit") {
  const CoherentGameParams p = k2(1.2, 0.8, 0.85);
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const TrialOutcome o = simulate_trial(p, static_cast<int>(t % 2), 11, t);
    const Matching& m = p.family[o.matching_index];
    CHECK(o.slots.size() == m.size());
    for (const SlotClicks& s : o.slots) CHECK(s.correct_detector == (o.x[s.i] ^ o.x[s.j]));
    if (!o.chosen_slot) {
      for (const SlotClicks& s : o.slots) CHECK_FALSE(s.clicked());
      CHECK(o.coin_flip);
      CHECK(m.contains(o.answer.i, o.answer.j));
    } else {
      const SlotClicks& s = o.slots[*o.chosen_slot];
      CHECK(s.clicked());
      CHECK(o.answer.i == s.i);
      CHECK(o.answer.j == s.j);
      if (s.d0 && s.d1) {
        CHECK(o.coin_flip);
      } else {
        CHECK_FALSE(o.coin_flip);
        CHECK(o.answer.b == (s.d1 ? 1 : 0));
      }
    }
    CHECK(o.correct == in_relation(o.x, o.answer, m));
  }
}

TEST_CASE("adjudication") {
  const P1Adjudication ideal = adjudicate_p1(k2(1.0), 100000, 4);
  CHECK(ideal.paper_formula == ideal.conditional_formula);
  CHECK(ideal.verdict == P1Verdict::both);

  const P1Adjudication few = adjudicate_p1(k2(1.0, 1.0, 0.9), 10, 4);
  CHECK(few.verdict == P1Verdict::insufficient);

  const P1Adjudication lossy = adjudicate_p1(k2(1.0, 1.0, 0.9), 200000, 5);
  CHECK(lossy.sigmas_conditional <= kPassSigmas);
  CHECK(lossy.verdict == P1Verdict::conditional);
  CHECK(std::string(to_string(lossy.verdict)) == "conditional");
}

TEST_CASE("sigma distance floor") {
  EstimateReport r;
  r.trials = 100;
  r.wins = 100;
  r.estimate = 1.0;
  r.std_error = 0.0;
  CHECK(sigma_distance(r, 0.99) == doctest::Approx(1.0));
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(run_trials(k2(1.0), 2, 10, 1), GameError);
  CHECK_THROWS_AS(run_trials(k2(1.0), -1, 10, 1), GameError);
  CHECK_THROWS_AS(run_trials(k2(1.0), 0, 0, 1), GameError);
  CHECK_THROWS_AS(simulate_trial(k2(1.0), 5, 1, 0), GameError);
}

}
