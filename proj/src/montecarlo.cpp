#include "qrg/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "qrg/rng.hpp"

namespace qrg {

namespace {

struct SlotProbabilities {
  double correct;
  double wrong;
};

SlotProbabilities slot_probabilities(const CoherentGameParams& params) {
  // Threshold detector on a coherent state of amplitude a clicks with
  // probability 1 - exp(-|a|^2).
  const BeamSplitterOutput out = beam_splitter_pair(0, 0, params);
  return {1.0 - std::exp(-out.amp_correct * out.amp_correct),
          1.0 - std::exp(-out.amp_wrong * out.amp_wrong)};
}

void check_matching_index(const CoherentGameParams& params, int matching_index) {
  if (matching_index < 0 || matching_index >= params.k()) {
    throw GameError("montecarlo: matching index " + std::to_string(matching_index) +
                    " out of range for k=" + std::to_string(params.k()));
  }
}

TrialOutcome trial_impl(const CoherentGameParams& params, const SlotProbabilities& probs,
                        int matching_index, std::uint64_t seed, std::uint64_t trial) {
  SplitMix64 rng = SplitMix64::substream(seed, trial);
  const Matching& m = params.family[static_cast<std::size_t>(matching_index)];
  const int n = params.n;

  TrialOutcome out;
  const std::uint64_t mask = n == 64 ? rng.next() : rng.next() & ((std::uint64_t{1} << n) - 1);
  out.x = BitString(n, mask);
  out.matching_index = matching_index;
  out.slots.reserve(m.size());

  std::vector<std::size_t> clicked;
  for (const auto& [i, j] : m.pairs()) {
    SlotClicks s{i, j};
    s.correct_detector = out.x[i] ^ out.x[j];
    const bool hit_correct = rng.bernoulli(probs.correct);
    const bool hit_wrong = rng.bernoulli(probs.wrong);
    (s.correct_detector == 0 ? s.d0 : s.d1) = hit_correct;
    (s.correct_detector == 0 ? s.d1 : s.d0) = hit_wrong;
    if (s.clicked()) clicked.push_back(out.slots.size());
    out.slots.push_back(s);
  }

  if (clicked.empty()) {
    const std::size_t edge = static_cast<std::size_t>(rng.below(m.size()));
    out.answer = {m.pairs()[edge].first, m.pairs()[edge].second, rng.bernoulli(0.5) ? 1 : 0};
    out.coin_flip = true;
  } else {
    const std::size_t pick = clicked[static_cast<std::size_t>(rng.below(clicked.size()))];
    out.chosen_slot = pick;
    const SlotClicks& s = out.slots[pick];
    int b;
    if (s.d0 && s.d1) {
      b = rng.bernoulli(0.5) ? 1 : 0;
      out.coin_flip = true;
    } else {
      b = s.d1 ? 1 : 0;
    }
    out.answer = {s.i, s.j, b};
  }
  out.correct = in_relation(out.x, out.answer, m);
  return out;
}

EstimateReport make_report(const CoherentGameParams& params, std::uint64_t trials,
                           std::uint64_t wins, std::uint64_t no_click, std::uint64_t seed) {
  EstimateReport r;
  r.trials = trials;
  r.wins = wins;
  r.no_click_trials = no_click;
  r.estimate = static_cast<double>(wins) / static_cast<double>(trials);
  r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(trials));
  r.seed = seed;
  r.eta = params.eta;
  r.nu = params.nu;
  r.alpha = params.alpha;
  r.n = params.n;
  r.k = params.k();
  return r;
}

EstimateReport run_impl(const CoherentGameParams& params, int matching_index,
                        std::uint64_t trials, std::uint64_t seed, bool parallel) {
  if (trials < 1) throw GameError("run_trials: need at least one trial");
  check_matching_index(params, matching_index);
  const SlotProbabilities probs = slot_probabilities(params);
  std::uint64_t wins = 0;
  std::uint64_t no_click = 0;
  const std::int64_t count = static_cast<std::int64_t>(trials);
  if (parallel) {
#pragma omp parallel for schedule(static) reduction(+ : wins, no_click)
    for (std::int64_t t = 0; t < count; ++t) {
      const TrialOutcome o = trial_impl(params, probs, matching_index, seed, static_cast<std::uint64_t>(t));
      wins += o.correct ? 1 : 0;
      no_click += o.chosen_slot ? 0 : 1;
    }
  } else {
    for (std::int64_t t = 0; t < count; ++t) {
      const TrialOutcome o = trial_impl(params, probs, matching_index, seed, static_cast<std::uint64_t>(t));
      wins += o.correct ? 1 : 0;
      no_click += o.chosen_slot ? 0 : 1;
    }
  }
  return make_report(params, trials, wins, no_click, seed);
}

}  // namespace

TrialOutcome simulate_trial(const CoherentGameParams& params, int matching_index,
                            std::uint64_t seed, std::uint64_t trial) {
  check_matching_index(params, matching_index);
  return trial_impl(params, slot_probabilities(params), matching_index, seed, trial);
}

EstimateReport run_trials(const CoherentGameParams& params, int matching_index,
                          std::uint64_t trials, std::uint64_t seed) {
  return run_impl(params, matching_index, trials, seed, true);
}

EstimateReport run_trials_serial(const CoherentGameParams& params, int matching_index,
                                 std::uint64_t trials, std::uint64_t seed) {
  return run_impl(params, matching_index, trials, seed, false);
}

const char* to_string(P1Verdict v) {
  switch (v) {
    case P1Verdict::paper_exact: return "paper_exact";
    case P1Verdict::conditional: return "conditional";
    case P1Verdict::both: return "both";
    case P1Verdict::neither: return "neither";
    case P1Verdict::insufficient: return "insufficient";
  }
  return "unknown";
}

double sigma_distance(const EstimateReport& r, double prediction) {
  const double floor = 1.0 / static_cast<double>(r.trials);
  return std::abs(r.estimate - prediction) / std::max(r.std_error, floor);
}

P1Adjudication adjudicate_p1(const CoherentGameParams& params, std::uint64_t trials,
                             std::uint64_t seed, int matching_index) {
  P1Adjudication a;
  a.mc = run_trials(params, matching_index, trials, seed);
  a.paper_formula = imperfect_winning(params, P1Variant::paper_exact);
  a.conditional_formula = imperfect_winning(params, P1Variant::conditional);
  a.sigmas_paper = sigma_distance(a.mc, a.paper_formula);
  a.sigmas_conditional = sigma_distance(a.mc, a.conditional_formula);
  if (trials < kMinAdjudicationTrials) {
    a.verdict = P1Verdict::insufficient;
  } else {
    const bool paper_ok = a.sigmas_paper <= kPassSigmas;
    const bool cond_ok = a.sigmas_conditional <= kPassSigmas;
    a.verdict = paper_ok && cond_ok ? P1Verdict::both
              : paper_ok            ? P1Verdict::paper_exact
              : cond_ok             ? P1Verdict::conditional
                                    : P1Verdict::neither;
  }
  return a;
}

}  // namespace qrg
