#pragma once

// Seeded simulation of the honest coherent-state protocol. Each trial draws
// x uniformly, samples threshold-detector clicks for every interfering pair
// of the chosen matching and applies Bob's answer rule:
//
//   - pick uniformly among slots with at least one click (double clicks
//     included);
//   - a single click on D_b answers b, a double click answers a fair coin;
//   - with no clicked slot, answer a fair coin on a uniformly chosen edge.
//
// Trial t draws from SplitMix64::substream(seed, t), so the result does not
// depend on how trials are scheduled.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrg/coherent.hpp"
#include "qrg/game.hpp"

namespace qrg {

struct SlotClicks {
  Node i;
  Node j;
  bool d0 = false;
  bool d1 = false;
  int correct_detector = 0;  // x_i ^ x_j

  bool clicked() const { return d0 || d1; }
};

struct TrialOutcome {
  BitString x{0, 0};
  int matching_index = 0;
  std::vector<SlotClicks> slots;
  std::optional<std::size_t> chosen_slot;  // nullopt when nothing clicked
  AnswerTuple answer{0, 0, 0};
  bool coin_flip = false;  // the answer bit came from a fair coin
  bool correct = false;
};

struct EstimateReport {
  std::uint64_t trials = 0;
  std::uint64_t wins = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
  double eta = 0.0;
  double nu = 0.0;
  double alpha = 0.0;
  int n = 0;
  int k = 0;
  std::uint64_t no_click_trials = 0;
};

TrialOutcome simulate_trial(const CoherentGameParams& params, int matching_index,
                            std::uint64_t seed, std::uint64_t trial);

EstimateReport run_trials(const CoherentGameParams& params, int matching_index,
                          std::uint64_t trials, std::uint64_t seed);
EstimateReport run_trials_serial(const CoherentGameParams& params, int matching_index,
                                 std::uint64_t trials, std::uint64_t seed);

enum class P1Verdict { paper_exact, conditional, both, neither, insufficient };

const char* to_string(P1Verdict v);

struct P1Adjudication {
  EstimateReport mc;
  double paper_formula = 0.0;
  double conditional_formula = 0.0;
  double sigmas_paper = 0.0;
  double sigmas_conditional = 0.0;
  P1Verdict verdict = P1Verdict::insufficient;
};

inline constexpr double kPassSigmas = 3.0;
inline constexpr double kFlagSigmas = 3.5;
inline constexpr std::uint64_t kMinAdjudicationTrials = 10'000;

/// Distance, in standard errors, between the estimate and a prediction.
/// The standard error is floored at 1/trials so that degenerate estimates
/// (0 or 1) do not divide by zero.
double sigma_distance(const EstimateReport& r, double prediction);

P1Adjudication adjudicate_p1(const CoherentGameParams& params, std::uint64_t trials,
                             std::uint64_t seed, int matching_index = 0);

}  // namespace qrg
