#include "qrg/coherent.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace qrg {

namespace {

void check_scalars(double alpha, double eta, double nu) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw GameError("coherent params: alpha must be finite and >= 0");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) throw GameError("coherent params: eta must lie in [0, 1]");
  if (!(nu >= 0.0 && nu <= 1.0)) throw GameError("coherent params: nu must lie in [0, 1]");
}

}  // namespace

CoherentGameParams make_coherent_params(Family family, double alpha, double eta, double nu) {
  check_scalars(alpha, eta, nu);
  if (family.empty()) throw GameError("coherent params: empty family");
  if (!is_independent(family).independent) {
    throw GameError("coherent params: family is not independent");
  }
  CoherentGameParams p;
  p.n = family.front().n();
  p.family = std::move(family);
  p.alpha = alpha;
  p.eta = eta;
  p.nu = nu;
  return p;
}

CoherentGameParams with_values(const CoherentGameParams& base, double alpha, double eta,
                               double nu) {
  check_scalars(alpha, eta, nu);
  CoherentGameParams p = base;
  p.alpha = alpha;
  p.eta = eta;
  p.nu = nu;
  return p;
}

std::vector<double> signal_amplitudes(const BitString& x, const CoherentGameParams& params) {
  if (x.size() != params.n) throw GameError("signal_amplitudes: length mismatch");
  const double amp = params.alpha / std::sqrt(static_cast<double>(params.n));
  std::vector<double> out(static_cast<std::size_t>(params.n));
  for (int i = 1; i <= params.n; ++i) out[static_cast<std::size_t>(i - 1)] = x[i] ? -amp : amp;
  return out;
}

double overlap(const BitString& x, const BitString& y, double alpha, int n) {
  return std::exp(-2.0 * alpha * alpha * hamming_distance(x, y) / n);
}

HermitianOperator gram_matrix(double alpha, int n) {
  if (n < 1 || n > kMaxExhaustiveN) throw GameError("gram_matrix: n out of range");
  const std::uint64_t size = std::uint64_t{1} << n;
  // Entries depend only on the Hamming distance.
  std::vector<double> by_distance(static_cast<std::size_t>(n + 1));
  for (int dist = 0; dist <= n; ++dist) {
    by_distance[static_cast<std::size_t>(dist)] = std::exp(-2.0 * alpha * alpha * dist / n);
  }
  RealMatrix g(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  for (std::uint64_t x = 0; x < size; ++x) {
    for (std::uint64_t y = 0; y < size; ++y) {
      g(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) =
          by_distance[static_cast<std::size_t>(std::popcount(x ^ y))];
    }
  }
  return HermitianOperator(g);
}

Ensemble coherent_ensemble(const CoherentGameParams& params) {
  Ensemble e;
  e.states = gram_embed(gram_matrix(params.alpha, params.n));
  e.prior.assign(static_cast<std::size_t>(e.states.cols()), std::ldexp(1.0, -params.n));
  return e;
}

DiscriminationProblem cheating_problem(const CoherentGameParams& params) {
  if (params.n > kMaxCheatingN) {
    throw GameError("cheating_problem: n=" + std::to_string(params.n) + " exceeds " +
                    std::to_string(kMaxCheatingN));
  }
  const HiddenMatchingGame game = make_game(params.family);
  return make_problem(coherent_ensemble(params), consistency_table(game));
}

SDPSolution cheating_value(const CoherentGameParams& params, const SolverOptions& options) {
  return physical_value(cheating_problem(params), options);
}

ValueComparison coherent_selective_vs_physical(const CoherentGameParams& params,
                                               const SolverOptions& options) {
  if (params.n > kMaxCheatingN) throw GameError("coherent_selective_vs_physical: n too large");
  const HiddenMatchingGame game = make_game(params.family);
  return selective_vs_physical(coherent_ensemble(params), consistency_table(game), options);
}

BeamSplitterOutput beam_splitter_pair(int x_i, int x_j, const CoherentGameParams& params) {
  const double scale = 2.0 * params.eta / params.n;
  return {std::sqrt(scale * params.nu) * params.alpha,
          std::sqrt(scale * (1.0 - params.nu)) * params.alpha, (x_i ^ x_j) & 1};
}

double ideal_winning(double alpha) {
  if (!(alpha >= 0.0)) throw GameError("ideal_winning: alpha must be >= 0");
  return 1.0 - 0.5 * std::exp(-alpha * alpha);
}

const char* to_string(P1Variant v) {
  return v == P1Variant::paper_exact ? "paper_exact" : "conditional";
}

ClickModel click_model(const CoherentGameParams& params, P1Variant variant) {
  const double a2 = params.alpha * params.alpha;
  ClickModel c;
  c.variant = variant;
  c.p_c = 1.0 - std::exp(-2.0 * params.eta * params.nu * a2 / params.n);
  c.p_w = 1.0 - std::exp(-2.0 * params.eta * (1.0 - params.nu) * a2 / params.n);
  c.p_0 = std::exp(-params.eta * a2);
  const double wrong = c.p_w * (1.0 - c.p_c) + 0.5 * c.p_w * c.p_c;
  if (variant == P1Variant::paper_exact) {
    c.p_1 = wrong;
  } else {
    const double clicked = c.p_c + c.p_w - c.p_c * c.p_w;
    c.p_1 = clicked > 0.0 ? wrong / clicked : 0.0;
  }
  return c;
}

double imperfect_winning(const CoherentGameParams& params, P1Variant variant) {
  const ClickModel c = click_model(params, variant);
  return 1.0 - 0.5 * c.p_0 - (1.0 - c.p_0) * c.p_1;
}

std::vector<double> alpha_grid(double lo, double hi, int steps) {
  if (steps < 1) throw GameError("alpha_grid: steps must be >= 1");
  if (static_cast<std::size_t>(steps) > kMaxCurvePoints) {
    throw GameError("alpha_grid: more than " + std::to_string(kMaxCurvePoints) + " points");
  }
  if (!(lo >= 0.0) || !(hi >= lo)) throw GameError("alpha_grid: need 0 <= min <= max");
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int s = 0; s < steps; ++s) {
    out[static_cast<std::size_t>(s)] = steps == 1 ? lo : lo + (hi - lo) * s / (steps - 1);
  }
  return out;
}

std::vector<std::optional<double>> cheating_curve(const CoherentGameParams& base,
                                                  std::span<const double> alphas,
                                                  const SolverOptions& options) {
  if (base.n > kMaxCheatingN) throw GameError("cheating_curve: n too large for the cheating SDP");
  const HiddenMatchingGame game = make_game(base.family);
  const ConsistencyTable table = consistency_table(game);
  std::vector<std::optional<double>> out(alphas.size());
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(alphas.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      const CoherentGameParams p = with_values(base, alphas[static_cast<std::size_t>(i)], 1.0, 1.0);
      const SDPSolution s = physical_value(make_problem(coherent_ensemble(p), table), options);
      if (s.converged) out[static_cast<std::size_t>(i)] = s.primal_value;
    } catch (const std::exception&) {
      // reported as a missing value
    }
  }
  return out;
}

std::vector<CurveRow> curve_with_cheating(const CoherentGameParams& base,
                                          std::span<const double> alphas,
                                          std::span<const std::optional<double>> cheating) {
  if (!cheating.empty() && cheating.size() != alphas.size()) {
    throw GameError("curve: cheating column length mismatch");
  }
  std::vector<CurveRow> rows;
  rows.reserve(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const CoherentGameParams p = with_values(base, alphas[i], base.eta, base.nu);
    CurveRow r;
    r.alpha = alphas[i];
    r.winning_paper = imperfect_winning(p, P1Variant::paper_exact);
    r.winning_conditional = imperfect_winning(p, P1Variant::conditional);
    if (!cheating.empty() && cheating[i]) {
      r.cheating = cheating[i];
      r.threshold = (1.0 + *cheating[i]) / 2.0;
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<CurveRow> curve(const CoherentGameParams& base, std::span<const double> alphas,
                            bool include_cheating, const SolverOptions& options) {
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    if (alphas[i] < alphas[i - 1]) throw GameError("curve: alpha grid must be ascending");
  }
  if (alphas.size() > kMaxCurvePoints) throw GameError("curve: too many grid points");
  std::vector<std::optional<double>> cheating;
  if (include_cheating) cheating = cheating_curve(base, alphas, options);
  return curve_with_cheating(base, alphas, cheating);
}

std::vector<double> alphas_beating_threshold(std::span<const CurveRow> rows, P1Variant variant) {
  std::vector<double> out;
  for (const CurveRow& r : rows) {
    if (!r.cheating) continue;
    const double w = variant == P1Variant::paper_exact ? r.winning_paper : r.winning_conditional;
    if (usefulness_condition(w, *r.cheating)) out.push_back(r.alpha);
  }
  return out;
}

}  // namespace qrg
