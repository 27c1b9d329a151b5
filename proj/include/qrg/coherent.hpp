#pragma once

// Coherent-state hidden-matching games: signal states, their Gram matrix,
// the cheating SDP, and the honest winning probability with loss (eta) and
// limited interference quality (nu).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrg/game.hpp"
#include "qrg/matchings.hpp"
#include "qrg/sdp.hpp"

namespace qrg {

struct CoherentGameParams {
  int n = 0;
  Family family;
  double alpha = 0.0;  // sqrt of the total mean photon number
  double eta = 1.0;    // transmission times detector efficiency
  double nu = 1.0;     // interference quality; visibility is 2 nu - 1

  int k() const { return static_cast<int>(family.size()); }
};

/// Validates ranges and independence of the family.
CoherentGameParams make_coherent_params(Family family, double alpha, double eta = 1.0,
                                        double nu = 1.0);
/// Same family, different alpha / eta / nu; re-validates the scalars only.
CoherentGameParams with_values(const CoherentGameParams& base, double alpha, double eta,
                               double nu);

/// (-1)^{x_i} alpha / sqrt(n), i = 1..n
std::vector<double> signal_amplitudes(const BitString& x, const CoherentGameParams& params);

/// <alpha,x|alpha,y> = exp(-2 alpha^2 d_H(x,y) / n)
double overlap(const BitString& x, const BitString& y, double alpha, int n);

/// 2^n x 2^n Gram matrix of the signal states, indexed by the bit mask of x.
HermitianOperator gram_matrix(double alpha, int n);

/// Signal states in the span they generate (Gram embedding), uniform prior.
Ensemble coherent_ensemble(const CoherentGameParams& params);

inline constexpr int kMaxCheatingN = 6;

/// Discrimination problem whose optimum is the cheating probability.
/// Loss and visibility do not enter: the adversary is not bound by them.
DiscriminationProblem cheating_problem(const CoherentGameParams& params);

SDPSolution cheating_value(const CoherentGameParams& params, const SolverOptions& options = {});

ValueComparison coherent_selective_vs_physical(const CoherentGameParams& params,
                                               const SolverOptions& options = {});

struct BeamSplitterOutput {
  double amp_correct;
  double amp_wrong;
  int correct_detector;  // 0 if x_i ^ x_j == 0, else 1
};

/// Output amplitudes of one interfering pair: sqrt(2 eta nu / n) alpha on
/// the detector matching the parity, sqrt(2 eta (1 - nu) / n) alpha on the
/// other.
BeamSplitterOutput beam_splitter_pair(int x_i, int x_j, const CoherentGameParams& params);

/// 1 - exp(-alpha^2) / 2
double ideal_winning(double alpha);

enum class P1Variant { paper_exact, conditional };

const char* to_string(P1Variant v);

struct ClickModel {
  double p_c = 0.0;  // click in the correct detector of a slot
  double p_w = 0.0;  // click in the wrong detector of a slot
  double p_0 = 1.0;  // no click in any slot
  double p_1 = 0.0;  // error probability attached to a clicked slot
  P1Variant variant = P1Variant::paper_exact;
};

/// paper_exact: p_1 = p_w (1 - p_c) + p_w p_c / 2.
/// conditional: the same divided by the per-slot click probability
/// p_c + p_w - p_c p_w (zero when that vanishes).
ClickModel click_model(const CoherentGameParams& params, P1Variant variant);

/// 1 - p_0 / 2 - (1 - p_0) p_1
double imperfect_winning(const CoherentGameParams& params, P1Variant variant);

// --- curves ------------------------------------------------------------------

inline constexpr std::size_t kMaxCurvePoints = 512;

/// steps evenly spaced values from lo to hi inclusive; steps == 1 gives {lo}.
std::vector<double> alpha_grid(double lo, double hi, int steps);

struct CurveRow {
  double alpha = 0.0;
  double winning_paper = 0.0;
  double winning_conditional = 0.0;
  std::optional<double> cheating;   // nullopt when the solve failed or was skipped
  std::optional<double> threshold;  // (1 + cheating) / 2
};

/// Cheating probability at each alpha (eta, nu of `base` ignored). Points
/// are independent solves evaluated in parallel; a failed solve yields
/// nullopt for that point only.
std::vector<std::optional<double>> cheating_curve(const CoherentGameParams& base,
                                                  std::span<const double> alphas,
                                                  const SolverOptions& options = {});

std::vector<CurveRow> curve(const CoherentGameParams& base, std::span<const double> alphas,
                            bool include_cheating, const SolverOptions& options = {});

/// Winning columns from `base` combined with a precomputed cheating column.
std::vector<CurveRow> curve_with_cheating(const CoherentGameParams& base,
                                          std::span<const double> alphas,
                                          std::span<const std::optional<double>> cheating);

/// Alphas whose winning probability (chosen p_1 variant) exceeds the threshold.
std::vector<double> alphas_beating_threshold(std::span<const CurveRow> rows,
                                             P1Variant variant = P1Variant::paper_exact);

}  // namespace qrg
