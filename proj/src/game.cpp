#include "qrg/game.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qrg/rng.hpp"

namespace qrg {

// --- bit strings -----------------------------------------------------------

BitString::BitString(int n, std::uint64_t mask) : n_(n), mask_(mask) {
  if (n < 0 || n > 64) throw GameError("BitString: length must be in [0, 64]");
  if (n < 64 && (mask >> n) != 0) throw GameError("BitString: mask has bits beyond length");
}

BitString BitString::parse(std::string_view text) {
  if (text.size() > 64) throw GameError("BitString: more than 64 bits");
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1') {
      mask |= std::uint64_t{1} << i;
    } else if (text[i] != '0') {
      throw GameError("BitString: invalid character in '" + std::string(text) + "'");
    }
  }
  return BitString(static_cast<int>(text.size()), mask);
}

std::string BitString::str() const {
  std::string s(static_cast<std::size_t>(n_), '0');
  for (int i = 1; i <= n_; ++i) s[static_cast<std::size_t>(i - 1)] = (*this)[i] ? '1' : '0';
  return s;
}

int hamming_distance(const BitString& x, const BitString& y) {
  if (x.size() != y.size()) throw GameError("hamming_distance: length mismatch");
  return std::popcount(x.mask() ^ y.mask());
}

std::string format_answer(const Answer& a) {
  std::ostringstream os;
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (l) os << ' ';
    os << '(' << a[l].i << ',' << a[l].j << ',' << a[l].b << ')';
  }
  return os.str();
}

// --- game ------------------------------------------------------------------

double HiddenMatchingGame::probability(std::uint64_t x) const {
  if (prior.empty()) return std::ldexp(1.0, -n);
  return prior[static_cast<std::size_t>(x)];
}

HiddenMatchingGame make_game(Family family, std::vector<double> prior) {
  if (family.empty()) throw GameError("make_game: empty family (use make_empty_game)");
  HiddenMatchingGame g;
  g.n = family.front().n();
  g.independent = is_independent(family).independent;
  g.family = std::move(family);
  if (!prior.empty()) {
    if (g.n > kMaxExhaustiveN || prior.size() != (std::size_t{1} << g.n)) {
      throw GameError("make_game: prior must list 2^n probabilities");
    }
    double total = 0.0;
    for (double p : prior) {
      if (!(p >= 0.0)) throw GameError("make_game: prior has a negative or NaN entry");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw GameError("make_game: prior does not sum to 1");
  }
  g.prior = std::move(prior);
  return g;
}

HiddenMatchingGame make_empty_game(int n) {
  if (n < 2 || n % 2 != 0) throw GameError("make_empty_game: n must be even and >= 2");
  HiddenMatchingGame g;
  g.n = n;
  return g;
}

ComplexVector hm_state(const BitString& x) {
  const int n = x.size();
  if (n < 1) throw GameError("hm_state: empty string");
  ComplexVector v(n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 1; i <= n; ++i) v(i - 1) = x[i] ? -amp : amp;
  return v;
}

bool in_relation(const BitString& x, const AnswerTuple& ans, const Matching& m) {
  if (x.size() != m.n()) return false;
  if (!m.contains(ans.i, ans.j)) return false;
  return (x[ans.i] ^ x[ans.j]) == ans.b;
}

bool in_joint_relation(const BitString& x, const Answer& ans, const Family& family) {
  if (ans.size() != family.size()) return false;
  for (std::size_t l = 0; l < family.size(); ++l) {
    if (!in_relation(x, ans[l], family[l])) return false;
  }
  return true;
}

HonestMeasurement honest_basis(const Matching& m) {
  const int n = m.n();
  HonestMeasurement out;
  out.basis = ComplexMatrix::Zero(n, n);
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Index col = 0;
  for (const auto& [i, j] : m.pairs()) {
    out.basis(i - 1, col) = s;
    out.basis(j - 1, col) = s;
    out.outcomes.push_back({i, j, 0});
    ++col;
    out.basis(i - 1, col) = s;
    out.basis(j - 1, col) = -s;
    out.outcomes.push_back({i, j, 1});
    ++col;
  }
  return out;
}

double honest_winning_probability(const Matching& m) {
  const int n = m.n();
  if (n > kMaxExhaustiveN) throw GameError("honest_winning_probability: n too large");
  const HonestMeasurement meas = honest_basis(m);
  const std::uint64_t strings = std::uint64_t{1} << n;
  const double px = std::ldexp(1.0, -n);
  double total = 0.0;
  for (std::uint64_t xm = 0; xm < strings; ++xm) {
    const BitString x(n, xm);
    const ComplexVector amps = meas.basis.adjoint() * hm_state(x);
    for (Eigen::Index c = 0; c < amps.size(); ++c) {
      if (in_relation(x, meas.outcomes[static_cast<std::size_t>(c)], m)) {
        total += px * std::norm(amps(c));
      }
    }
  }
  return total;
}

// --- parity closure ---------------------------------------------------------

ParityClosure parity_closure(int n, const Answer& ans) {
  ParityClosure pc;
  pc.component.assign(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<std::pair<Node, int>>> adj(static_cast<std::size_t>(n));
  for (const AnswerTuple& t : ans) {
    if (t.i < 1 || t.j > n || t.i == t.j) throw GameError("parity_closure: edge outside [n]");
    pc.answered.push_back({std::min(t.i, t.j), std::max(t.i, t.j), t.b ? -1 : 1});
    adj[static_cast<std::size_t>(t.i - 1)].emplace_back(t.j, t.b);
    adj[static_cast<std::size_t>(t.j - 1)].emplace_back(t.i, t.b);
  }

  // parity[v] = xor of b along the BFS-tree path from the component root.
  std::vector<int> parity(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<Node>> members;
  for (Node root = 1; root <= n; ++root) {
    if (pc.component[static_cast<std::size_t>(root - 1)] >= 0) continue;
    const int id = static_cast<int>(members.size());
    members.emplace_back();
    std::vector<Node> queue{root};
    pc.component[static_cast<std::size_t>(root - 1)] = id;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Node v = queue[head];
      members.back().push_back(v);
      for (const auto& [u, b] : adj[static_cast<std::size_t>(v - 1)]) {
        const int expect = parity[static_cast<std::size_t>(v - 1)] ^ b;
        if (pc.component[static_cast<std::size_t>(u - 1)] < 0) {
          pc.component[static_cast<std::size_t>(u - 1)] = id;
          parity[static_cast<std::size_t>(u - 1)] = expect;
          queue.push_back(u);
        } else if (parity[static_cast<std::size_t>(u - 1)] != expect) {
          pc.consistent = false;
        }
      }
    }
  }

  for (const auto& comp : members) {
    std::vector<Node> sorted = comp;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t a = 0; a < sorted.size(); ++a) {
      for (std::size_t b = a + 1; b < sorted.size(); ++b) {
        const Node i = sorted[a];
        const Node j = sorted[b];
        const bool in_s = std::any_of(pc.answered.begin(), pc.answered.end(),
                                      [&](const SignedEdge& e) { return e.i == i && e.j == j; });
        if (in_s) continue;
        const int p = parity[static_cast<std::size_t>(i - 1)] ^ parity[static_cast<std::size_t>(j - 1)];
        pc.implied.push_back({i, j, p ? -1 : 1});
      }
    }
  }
  return pc;
}

// --- answer space -------------------------------------------------------------

std::optional<std::size_t> answer_count(const HiddenMatchingGame& game) {
  std::size_t total = 1;
  for (int l = 0; l < game.k(); ++l) {
    total *= static_cast<std::size_t>(game.n);
    if (total > kMaxJointAnswers) return std::nullopt;
  }
  return total;
}

Answer answer_at(const HiddenMatchingGame& game, std::size_t index) {
  const std::size_t base = static_cast<std::size_t>(game.n);
  Answer ans(static_cast<std::size_t>(game.k()));
  for (int l = game.k() - 1; l >= 0; --l) {
    const std::size_t digit = index % base;
    index /= base;
    const Edge& e = game.family[static_cast<std::size_t>(l)].pairs()[digit / 2];
    ans[static_cast<std::size_t>(l)] = {e.first, e.second, static_cast<int>(digit % 2)};
  }
  if (index != 0) throw GameError("answer_at: index out of range");
  return ans;
}

namespace {

void require_answer(const HiddenMatchingGame& game, const Answer& ans) {
  if (ans.size() != game.family.size()) {
    throw GameError("answer has " + std::to_string(ans.size()) + " tuples, game has k=" +
                    std::to_string(game.k()));
  }
  for (std::size_t l = 0; l < ans.size(); ++l) {
    if (!game.family[l].contains(ans[l].i, ans[l].j) || (ans[l].b != 0 && ans[l].b != 1)) {
      throw GameError("answer tuple " + std::to_string(l + 1) + " is not an edge of its matching");
    }
  }
}

// Bit masks of the two endpoints and the required parity, per tuple.
struct ParityCheck {
  std::uint64_t mask;
  int b;
};

std::vector<ParityCheck> parity_checks(const Answer& ans) {
  std::vector<ParityCheck> out;
  for (const AnswerTuple& t : ans) {
    out.push_back({(std::uint64_t{1} << (t.i - 1)) | (std::uint64_t{1} << (t.j - 1)), t.b});
  }
  return out;
}

bool satisfies(std::uint64_t x, const std::vector<ParityCheck>& checks) {
  for (const ParityCheck& c : checks) {
    if ((std::popcount(x & c.mask) & 1) != c.b) return false;
  }
  return true;
}

HermitianOperator closed_form_Oa(const HiddenMatchingGame& game, const Answer& ans) {
  const int n = game.n;
  const double w = std::ldexp(1.0, -game.k());
  const ParityClosure pc = parity_closure(n, ans);
  RealMatrix o = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) o(i, i) = w;
  for (const auto* set : {&pc.answered, &pc.implied}) {
    for (const SignedEdge& e : *set) {
      o(e.i - 1, e.j - 1) = e.sign * w;
      o(e.j - 1, e.i - 1) = e.sign * w;
    }
  }
  return HermitianOperator(o);
}

}  // namespace

std::uint64_t count_consistent(const HiddenMatchingGame& game, const Answer& ans) {
  if (game.n > kMaxExhaustiveN) throw GameError("count_consistent: n exceeds exhaustive cap");
  require_answer(game, ans);
  const auto checks = parity_checks(ans);
  const std::uint64_t strings = std::uint64_t{1} << game.n;
  std::uint64_t count = 0;
  for (std::uint64_t x = 0; x < strings; ++x) count += satisfies(x, checks) ? 1 : 0;
  return count;
}

// --- generic ensembles ------------------------------------------------------------

Ensemble hm_ensemble(const HiddenMatchingGame& game) {
  if (game.n > kMaxExhaustiveN) throw GameError("hm_ensemble: n exceeds exhaustive cap");
  const std::uint64_t strings = std::uint64_t{1} << game.n;
  Ensemble e;
  e.states.resize(game.n, static_cast<Eigen::Index>(strings));
  e.prior.resize(static_cast<std::size_t>(strings));
  for (std::uint64_t x = 0; x < strings; ++x) {
    e.states.col(static_cast<Eigen::Index>(x)) = hm_state(BitString(game.n, x));
    e.prior[static_cast<std::size_t>(x)] = game.probability(x);
  }
  return e;
}

ConsistencyTable consistency_table(const HiddenMatchingGame& game) {
  if (game.n > kMaxExhaustiveN) throw GameError("consistency_table: n exceeds exhaustive cap");
  const auto count = answer_count(game);
  if (!count) throw GameError("consistency_table: answer space exceeds guard");
  const std::uint64_t strings = std::uint64_t{1} << game.n;
  ConsistencyTable table(*count);
  for (std::size_t a = 0; a < *count; ++a) {
    const auto checks = parity_checks(answer_at(game, a));
    for (std::uint64_t x = 0; x < strings; ++x) {
      if (satisfies(x, checks)) table[a].push_back(static_cast<std::size_t>(x));
    }
  }
  return table;
}

HermitianOperator ensemble_average(const Ensemble& e) {
  const RealVector p = Eigen::Map<const RealVector>(e.prior.data(), static_cast<Eigen::Index>(e.prior.size()));
  return HermitianOperator(ComplexMatrix(e.states * p.cast<Complex>().asDiagonal() * e.states.adjoint()));
}

HermitianOperator weighted_target(const Ensemble& e, std::span<const std::size_t> xs) {
  const Eigen::Index d = e.states.rows();
  ComplexMatrix cols(d, static_cast<Eigen::Index>(xs.size()));
  for (std::size_t c = 0; c < xs.size(); ++c) {
    cols.col(static_cast<Eigen::Index>(c)) = std::sqrt(e.prior[xs[c]]) * e.states.col(static_cast<Eigen::Index>(xs[c]));
  }
  return HermitianOperator(ComplexMatrix(cols * cols.adjoint()));
}

namespace {

// Values within kTieTol of the running maximum count as ties and the
// earliest answer is kept, so rounding noise in the eigensolver cannot move
// the reported argmax.
constexpr double kTieTol = 1e-12;

SelectiveResult first_max(const std::vector<double>& values) {
  SelectiveResult best{-1.0, 0};
  for (std::size_t a = 0; a < values.size(); ++a) {
    if (values[a] > best.value + kTieTol) best = {values[a], a};
  }
  if (!values.empty()) {
    for (double v : values) best.value = std::max(best.value, v);
  }
  return best;
}

template <typename F>
SelectiveResult reduce_max(std::size_t count, F&& value_of, bool parallel) {
  std::vector<double> values(count);
  const auto n = static_cast<std::int64_t>(count);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t a = 0; a < n; ++a) values[static_cast<std::size_t>(a)] = value_of(static_cast<std::size_t>(a));
  } else {
    for (std::int64_t a = 0; a < n; ++a) values[static_cast<std::size_t>(a)] = value_of(static_cast<std::size_t>(a));
  }
  return first_max(values);
}

SelectiveResult selective_numeric_impl(const Ensemble& e, const ConsistencyTable& table,
                                       bool parallel) {
  const HermitianOperator w = pinv_sqrt(ensemble_average(e));
  const Ensemble whitened{w.matrix() * e.states, e.prior};
  return reduce_max(
      table.size(),
      [&](std::size_t a) { return spectral_norm(weighted_target(whitened, table[a])); },
      parallel);
}

}  // namespace

SelectiveResult selective_value_numeric(const Ensemble& e, const ConsistencyTable& table) {
  return selective_numeric_impl(e, table, true);
}

SelectiveResult selective_value_numeric_serial(const Ensemble& e, const ConsistencyTable& table) {
  return selective_numeric_impl(e, table, false);
}

HermitianOperator build_Oa(const HiddenMatchingGame& game, const Answer& ans, OaMode mode) {
  require_answer(game, ans);
  if (mode == OaMode::closed_form) {
    if (!game.independent) throw GameError("build_Oa: closed form requires an independent family");
    if (!game.uniform()) throw GameError("build_Oa: closed form requires the uniform prior");
    return closed_form_Oa(game, ans);
  }
  if (game.n > kMaxExhaustiveN) throw GameError("build_Oa: n exceeds exhaustive cap");
  const Ensemble e = hm_ensemble(game);
  const HermitianOperator w = pinv_sqrt(ensemble_average(e));
  const auto checks = parity_checks(ans);
  std::vector<std::size_t> xs;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << game.n); ++x) {
    if (satisfies(x, checks)) xs.push_back(static_cast<std::size_t>(x));
  }
  const HermitianOperator r = weighted_target(e, xs);
  return HermitianOperator(ComplexMatrix(w.matrix() * r.matrix() * w.matrix()));
}

// --- values -----------------------------------------------------------------------

double theorem_bound(int k) { return (k + 1) * std::ldexp(1.0, -k); }

namespace {

GameValues selective_value_impl(const HiddenMatchingGame& game, bool parallel) {
  const auto count = answer_count(game);
  if (!count) {
    throw GameError("selective_value: joint answer space exceeds " +
                    std::to_string(kMaxJointAnswers) + " (use selective_value_sampled)");
  }
  GameValues out;
  out.bound = theorem_bound(game.k());
  out.answers_examined = *count;
  SelectiveResult best;
  if (game.independent && game.uniform()) {
    best = reduce_max(
        *count,
        [&](std::size_t a) { return spectral_norm(closed_form_Oa(game, answer_at(game, a))); },
        parallel);
  } else {
    const Ensemble e = hm_ensemble(game);
    const ConsistencyTable table = consistency_table(game);
    best = selective_numeric_impl(e, table, parallel);
  }
  out.sv = best.value;
  out.argmax = answer_at(game, best.argmax);
  return out;
}

}  // namespace

GameValues selective_value(const HiddenMatchingGame& game) {
  return selective_value_impl(game, true);
}

GameValues selective_value_serial(const HiddenMatchingGame& game) {
  return selective_value_impl(game, false);
}

GameValues selective_value_sampled(const HiddenMatchingGame& game, std::size_t samples,
                                   std::uint64_t seed) {
  if (!game.independent || !game.uniform()) {
    throw GameError("selective_value_sampled: requires an independent family and uniform prior");
  }
  if (samples == 0) throw GameError("selective_value_sampled: need at least one sample");
  const std::size_t per = static_cast<std::size_t>(game.n);
  auto draw = [&](std::size_t s) {
    SplitMix64 rng = SplitMix64::substream(seed, s);
    Answer ans;
    for (const Matching& m : game.family) {
      const std::size_t digit = static_cast<std::size_t>(rng.below(per));
      const Edge& e = m.pairs()[digit / 2];
      ans.push_back({e.first, e.second, static_cast<int>(digit % 2)});
    }
    return ans;
  };
  const SelectiveResult best = reduce_max(
      samples, [&](std::size_t s) { return spectral_norm(closed_form_Oa(game, draw(s))); }, true);
  GameValues out;
  out.sv = best.value;
  out.bound = theorem_bound(game.k());
  out.argmax = draw(best.argmax);
  out.answers_examined = samples;
  return out;
}

bool usefulness_condition(double p, double eps) { return p > (1.0 + eps) / 2.0; }

}  // namespace qrg
