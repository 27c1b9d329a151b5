#pragma once

// Hidden-matching quantum retrieval games: states, relations, the honest
// measurement, the O_a operators and the selective value.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrg/matchings.hpp"
#include "qrg/numerics.hpp"

namespace qrg {

class GameError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// n-bit string x_1..x_n; x_i is bit (i-1) of `mask`.
class BitString {
 public:
  BitString(int n, std::uint64_t mask);
  /// "0101" -> x_1 = 0, x_2 = 1, ...
  static BitString parse(std::string_view text);

  int size() const { return n_; }
  std::uint64_t mask() const { return mask_; }
  int operator[](int i) const { return static_cast<int>((mask_ >> (i - 1)) & 1u); }
  std::string str() const;

 private:
  int n_;
  std::uint64_t mask_;
};

int hamming_distance(const BitString& x, const BitString& y);

/// One relation's answer (i, j, b): "x_i xor x_j = b", with i < j.
struct AnswerTuple {
  Node i;
  Node j;
  int b;
  friend bool operator==(const AnswerTuple&, const AnswerTuple&) = default;
};

/// Joint answer: one tuple per matching, in family order.
using Answer = std::vector<AnswerTuple>;

std::string format_answer(const Answer& a);

struct HiddenMatchingGame {
  int n = 0;
  Family family;
  /// Probability of each x indexed by mask; empty means uniform 1/2^n.
  std::vector<double> prior;
  bool independent = true;

  int k() const { return static_cast<int>(family.size()); }
  bool uniform() const { return prior.empty(); }
  double probability(std::uint64_t x) const;
};

/// Validates the family and prior. Dependent families are accepted; the
/// closed-form paths reject them later.
HiddenMatchingGame make_game(Family family, std::vector<double> prior = {});

/// Game with no relations on n nodes (k = 0).
HiddenMatchingGame make_empty_game(int n);

ComplexVector hm_state(const BitString& x);

bool in_relation(const BitString& x, const AnswerTuple& ans, const Matching& m);
bool in_joint_relation(const BitString& x, const Answer& ans, const Family& family);

struct HonestMeasurement {
  ComplexMatrix basis;                // orthonormal columns
  std::vector<AnswerTuple> outcomes;  // answer reported for each column
};

/// Basis {(e_i + e_j)/sqrt2 -> b=0, (e_i - e_j)/sqrt2 -> b=1} over the pairs of m.
HonestMeasurement honest_basis(const Matching& m);

/// Sum over x of p(x) * Born probability of a correct honest answer.
double honest_winning_probability(const Matching& m);

struct SignedEdge {
  Node i;
  Node j;
  int sign;  // +1 or -1
};

struct ParityClosure {
  std::vector<SignedEdge> answered;  // S
  std::vector<SignedEdge> implied;   // P
  /// component[v-1] is the connected-component id of node v under S.
  std::vector<int> component;
  /// False when S contains a cycle whose b-values disagree (only possible
  /// for dependent families).
  bool consistent = true;
};

ParityClosure parity_closure(int n, const Answer& ans);

enum class OaMode { closed_form, numeric };

HermitianOperator build_Oa(const HiddenMatchingGame& game, const Answer& ans, OaMode mode);

/// Exhaustive over {0,1}^n, n <= 20.
std::uint64_t count_consistent(const HiddenMatchingGame& game, const Answer& ans);

// --- answer space ---------------------------------------------------------

inline constexpr std::size_t kMaxJointAnswers = 1'000'000;
inline constexpr int kMaxExhaustiveN = 20;

/// n^k (n/2 edges times 2 bit values per matching); nullopt on overflow
/// of the guard.
std::optional<std::size_t> answer_count(const HiddenMatchingGame& game);

/// Answers are ordered lexicographically by (matching, edge index, b) with
/// the first matching most significant.
Answer answer_at(const HiddenMatchingGame& game, std::size_t index);

// --- generic ensembles ----------------------------------------------------

/// Pure-state ensemble: column x of `states` is the state prepared with
/// probability prior[x].
struct Ensemble {
  ComplexMatrix states;
  std::vector<double> prior;
};

/// consistent[a] lists the x indices with (x, a) in the relation.
using ConsistencyTable = std::vector<std::vector<std::size_t>>;

Ensemble hm_ensemble(const HiddenMatchingGame& game);
ConsistencyTable consistency_table(const HiddenMatchingGame& game);

/// rho = sum_x p(x) |psi_x><psi_x|
HermitianOperator ensemble_average(const Ensemble& e);
/// R_a = sum over listed x of p(x) |psi_x><psi_x|
HermitianOperator weighted_target(const Ensemble& e, std::span<const std::size_t> xs);

struct SelectiveResult {
  double value = 0.0;
  std::size_t argmax = 0;
};

/// max_a ||rho^-1/2 R_a rho^-1/2||, serial and OpenMP variants.
SelectiveResult selective_value_numeric(const Ensemble& e, const ConsistencyTable& table);
SelectiveResult selective_value_numeric_serial(const Ensemble& e, const ConsistencyTable& table);

// --- values ----------------------------------------------------------------

struct GameValues {
  double sv = 0.0;
  double bound = 0.0;  // (k+1)/2^k
  std::optional<double> pv;
  Answer argmax;
  std::size_t answers_examined = 0;
};

double theorem_bound(int k);

/// Exhaustive max over joint answers of ||O_a||. Closed-form O_a is used
/// for independent families with uniform prior, numeric O_a otherwise.
GameValues selective_value(const HiddenMatchingGame& game);
GameValues selective_value_serial(const HiddenMatchingGame& game);

/// Max of ||O_a|| over `samples` uniformly drawn answers (closed form only).
GameValues selective_value_sampled(const HiddenMatchingGame& game, std::size_t samples,
                                   std::uint64_t seed);

/// p > (1 + eps) / 2
bool usefulness_condition(double p, double eps);

}  // namespace qrg
