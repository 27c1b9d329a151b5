#include <doctest.h>

#include <cmath>

#include "qrg/coherent.hpp"

using namespace qrg;

namespace {

// <beta|gamma> for single-mode coherent states.
Complex mode_overlap(Complex beta, Complex gamma) {
  return std::exp(-0.5 * std::norm(beta) - 0.5 * std::norm(gamma) + std::conj(beta) * gamma);
}

CoherentGameParams k2(double alpha, double eta = 1.0, double nu = 1.0) {
  return make_coherent_params(canonical_family(2), alpha, eta, nu);
}

}  // namespace

TEST_SUITE("coherent") {

TEST_CASE("overlap is the product of per-mode overlaps") {
  for (int n : {2, 4, 6}) {
    for (double alpha : {0.0, 0.3, 1.0, 2.2}) {
      const auto family = n == 6 ? Family{Matching(6, {{1, 2}, {3, 4}, {5, 6}})} : canonical_family(n / 2);
      const CoherentGameParams p = make_coherent_params(family, alpha);
      for (std::uint64_t a = 0; a < (1u << n); ++a) {
        for (std::uint64_t b = 0; b < (1u << n); b += 3) {
          const BitString x(n, a), y(n, b);
          const auto ax = signal_amplitudes(x, p);
          const auto ay = signal_amplitudes(y, p);
          Complex prod = 1.0;
          for (int i = 0; i < n; ++i) prod *= mode_overlap(ax[i], ay[i]);
          CHECK(std::abs(prod - overlap(x, y, alpha, n)) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("gram embedding reproduces overlaps") {
  const double alpha = 0.8;
  const HermitianOperator g = gram_matrix(alpha, 4);
  for (std::uint64_t a = 0; a < 16; ++a)
    for (std::uint64_t b = 0; b < 16; ++b)
      CHECK(std::abs(g(a, b).real() - overlap(BitString(4, a), BitString(4, b), alpha, 4)) < 1e-15);
  const Ensemble e = coherent_ensemble(k2(alpha));
  CHECK((e.states.adjoint() * e.states - g.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(e.states.rows() <= 16);
}

TEST_CASE("no-click probability factorizes over slots") {
  for (int ia = 0; ia < 10; ++ia) {
    for (int ie = 0; ie < 10; ++ie) {
      for (int in = 0; in < 10; ++in) {
        const double alpha = 0.3 * ia, eta = ie / 9.0, nu = in / 9.0;
        const ClickModel m = click_model(k2(alpha, eta, nu), P1Variant::paper_exact);
        const double lhs = std::pow(1 - m.p_c, 2) * std::pow(1 - m.p_w, 2);
        CHECK(std::abs(lhs - m.p_0) < 1e-12);
      }
    }
  }
}

TEST_CASE("click model limits") {
  const ClickModel ideal = click_model(k2(1.0), P1Variant::paper_exact);
  CHECK(ideal.p_c == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-15));
  CHECK(ideal.p_w == 0.0);
  CHECK(ideal.p_1 == 0.0);
  for (P1Variant v : {P1Variant::paper_exact, P1Variant::conditional}) {
    const ClickModel dark = click_model(k2(1.3, 0.0, 0.7), v);
    CHECK(dark.p_0 == 1.0);
    CHECK(dark.p_c == 0.0);
    CHECK(dark.p_w == 0.0);
    CHECK(dark.p_1 == 0.0);
    CHECK(imperfect_winning(k2(1.3, 0.0, 0.7), v) == 0.5);
    CHECK(click_model(k2(1.0, 0.6, 1.0), v).p_1 == 0.0);
  }
  const ClickModel exact = click_model(k2(1.0, 1.0, 0.9), P1Variant::paper_exact);
  const ClickModel cond = click_model(k2(1.0, 1.0, 0.9), P1Variant::conditional);
  CHECK(cond.p_1 == doctest::Approx(exact.p_1 / (exact.p_c + exact.p_w - exact.p_c * exact.p_w)));
}

TEST_CASE("ideal reduction is exact") {
  for (double alpha : {0.0, 0.1, 0.77, 1.0, 2.5, 5.0}) {
    for (P1Variant v : {P1Variant::paper_exact, P1Variant::conditional}) {
      CHECK(imperfect_winning(k2(alpha), v) - ideal_winning(alpha) == 0.0);
    }
  }
  CHECK(ideal_winning(1.0) == doctest::Approx(1.0 - std::exp(-1.0) / 2));
}

TEST_CASE("winning monotonicity") {
  for (int i = 1; i < 50; ++i) CHECK(ideal_winning(0.1 * i) > ideal_winning(0.1 * (i - 1)));
  for (P1Variant v : {P1Variant::paper_exact, P1Variant::conditional}) {
    for (double alpha : {0.5, 1.0, 1.5, 2.5}) {
      for (int i = 1; i <= 10; ++i) {
        CHECK(imperfect_winning(k2(alpha, 0.8, 0.1 * i), v) >= imperfect_winning(k2(alpha, 0.8, 0.1 * (i - 1)), v) - 1e-15);
        CHECK(imperfect_winning(k2(alpha, 0.1 * i, 1.0), v) >= imperfect_winning(k2(alpha, 0.1 * (i - 1), 1.0), v));
      }
    }
    for (double alpha : {0.5, 1.0, 1.5}) {
      for (int i = 1; i <= 10; ++i) {
        CHECK(imperfect_winning(k2(alpha, 0.1 * i, 0.9), v) >= imperfect_winning(k2(alpha, 0.1 * (i - 1), 0.9), v));
      }
    }
    // With imperfect interference and bright pulses, more light means more
    // wrong-detector clicks picked by the uniform slot rule.
    CHECK(imperfect_winning(k2(2.5, 1.0, 0.9), v) < imperfect_winning(k2(2.5, 0.5, 0.9), v));
  }
}

TEST_CASE("beam splitter conserves energy") {
  const CoherentGameParams p = k2(1.4, 0.7, 0.85);
  for (int xi : {0, 1}) {
    for (int xj : {0, 1}) {
      const BeamSplitterOutput o = beam_splitter_pair(xi, xj, p);
      CHECK(o.correct_detector == (xi ^ xj));
      CHECK(o.amp_correct * o.amp_correct + o.amp_wrong * o.amp_wrong ==
            doctest::Approx(2 * 0.7 * 1.4 * 1.4 / 4));
    }
  }
}

TEST_CASE("cheating limits") {
  const SDPSolution low = cheating_value(k2(1e-3));
  CHECK(low.converged);
  CHECK(std::abs(low.primal_value - 0.25) < 1e-3);
  const SDPSolution high = cheating_value(k2(6.0));
  CHECK(high.converged);
  CHECK(std::abs(high.primal_value - 1.0) < 1e-2);
}

TEST_CASE("cheating curve is monotone and matches pointwise solves") {
  const std::vector<double> grid = alpha_grid(0.0, 3.0, 7);
  const auto c = cheating_curve(k2(0.0), grid);
  REQUIRE(c.size() == 7);
  for (std::size_t i = 0; i < c.size(); ++i) {
    REQUIRE(c[i].has_value());
    CHECK(*c[i] == cheating_value(k2(grid[i])).primal_value);
    if (i) CHECK(*c[i] >= *c[i - 1] - 1e-4);
  }
}

TEST_CASE("alpha zero row") {
  const std::vector<double> grid{0.0};
  const auto rows = curve(k2(0.0), grid, true);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].winning_paper == 0.5);
  CHECK(rows[0].winning_conditional == 0.5);
  REQUIRE(rows[0].cheating);
  CHECK(std::abs(*rows[0].cheating - 0.25) < 1e-5);
  CHECK(std::abs(*rows[0].threshold - 0.625) < 1e-5);
}

TEST_CASE("coherent pv is sandwiched by sv") {
  const ValueComparison c = coherent_selective_vs_physical(k2(1.0));
  CHECK(c.pv <= c.sv + 1e-6);
  CHECK(c.pv > 0.25);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(k2(-0.1), GameError);
  CHECK_THROWS_AS(k2(1.0, 1.2), GameError);
  CHECK_THROWS_AS(k2(1.0, 0.5, -0.1), GameError);
  CHECK_THROWS_AS(make_coherent_params(enumerate_matchings(4), 1.0), GameError);
  CHECK_THROWS_AS(make_coherent_params({}, 1.0), GameError);
  CHECK_THROWS_AS(cheating_problem(make_coherent_params(canonical_family(3), 1.0)), GameError);
  CHECK_THROWS_AS(alpha_grid(0.0, 1.0, 513), GameError);
  CHECK_THROWS_AS(alpha_grid(1.0, 0.0, 5), GameError);
  CHECK_THROWS_AS(alpha_grid(0.0, 1.0, 0), GameError);
  const std::vector<double> descending{1.0, 0.5};
  CHECK_THROWS_AS(curve(k2(0.0), descending, false), GameError);
  const std::vector<double> g = alpha_grid(0.0, 3.0, 61);
  CHECK(g.size() == 61);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 3.0);
  CHECK(g[20] == doctest::Approx(1.0));
}

}
