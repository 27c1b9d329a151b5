#include "qrg/matchings.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace qrg {

Matching::Matching(int n, std::vector<Edge> pairs) : n_(n), pairs_(std::move(pairs)) {
  if (n < 2 || n % 2 != 0) {
    throw MatchingError("matching: n must be even and >= 2, got " + std::to_string(n));
  }
  if (pairs_.size() != static_cast<std::size_t>(n / 2)) {
    throw MatchingError("matching: expected " + std::to_string(n / 2) + " pairs, got " +
                        std::to_string(pairs_.size()));
  }
  partner_.assign(static_cast<std::size_t>(n), 0);
  for (auto& [i, j] : pairs_) {
    if (i > j) std::swap(i, j);
    if (i < 1 || j > n) {
      throw MatchingError("matching: pair " + std::to_string(i) + "-" + std::to_string(j) +
                          " outside 1.." + std::to_string(n));
    }
    if (i == j) throw MatchingError("matching: self-pair on node " + std::to_string(i));
    for (Node v : {i, j}) {
      if (partner_[static_cast<std::size_t>(v - 1)] != 0) {
        throw MatchingError("matching: node " + std::to_string(v) +
                            " appears in more than one pair");
      }
    }
    partner_[static_cast<std::size_t>(i - 1)] = j;
    partner_[static_cast<std::size_t>(j - 1)] = i;
  }
  std::sort(pairs_.begin(), pairs_.end());
}

bool Matching::contains(Node i, Node j) const {
  if (i < 1 || i > n_ || j < 1 || j > n_) return false;
  return partner(i) == j;
}

std::optional<std::size_t> Matching::edge_index(Node i, Node j) const {
  if (!contains(i, j)) return std::nullopt;
  const Edge e{std::min(i, j), std::max(i, j)};
  auto it = std::lower_bound(pairs_.begin(), pairs_.end(), e);
  return static_cast<std::size_t>(it - pairs_.begin());
}

std::vector<Matching> enumerate_matchings(int n) {
  if (n < 2 || n > 10 || n % 2 != 0) {
    throw MatchingError("enumerate_matchings: n must be even in [2, 10], got " +
                        std::to_string(n));
  }
  std::vector<Matching> out;
  std::vector<bool> used(static_cast<std::size_t>(n + 1), false);
  std::vector<Edge> current;

  // Pairing the smallest free node with each larger free node in increasing
  // order yields the sorted pair lists in lexicographic order.
  std::function<void()> recurse = [&]() {
    Node first = 1;
    while (first <= n && used[static_cast<std::size_t>(first)]) ++first;
    if (first > n) {
      out.emplace_back(n, current);
      return;
    }
    used[static_cast<std::size_t>(first)] = true;
    for (Node second = first + 1; second <= n; ++second) {
      if (used[static_cast<std::size_t>(second)]) continue;
      used[static_cast<std::size_t>(second)] = true;
      current.emplace_back(first, second);
      recurse();
      current.pop_back();
      used[static_cast<std::size_t>(second)] = false;
    }
    used[static_cast<std::size_t>(first)] = false;
  };
  recurse();
  return out;
}

JointGraph join(const Family& family) {
  if (family.empty()) throw MatchingError("join: empty family");
  JointGraph g;
  g.n = family.front().n();
  g.k = static_cast<int>(family.size());
  for (int label = 0; label < g.k; ++label) {
    const Matching& m = family[static_cast<std::size_t>(label)];
    if (m.n() != g.n) {
      throw MatchingError("join: matching " + std::to_string(label) + " has n=" +
                          std::to_string(m.n()) + ", expected " + std::to_string(g.n));
    }
    std::vector<Node> nb(static_cast<std::size_t>(g.n));
    for (const auto& [i, j] : m.pairs()) {
      g.edges.push_back({i, j, label});
      nb[static_cast<std::size_t>(i - 1)] = j;
      nb[static_cast<std::size_t>(j - 1)] = i;
    }
    g.neighbor.push_back(std::move(nb));
  }
  return g;
}

namespace {

class CycleSearch {
 public:
  explicit CycleSearch(const JointGraph& g) : g_(g), on_stack_(static_cast<std::size_t>(g.n) + 1, -1) {}

  std::optional<CycleWitness> run() {
    if (g_.k < 2) return std::nullopt;
    for (Node s = 1; s <= g_.n; ++s) {
      start_ = s;
      failed_.clear();
      nodes_.assign(1, s);
      labels_.clear();
      on_stack_[static_cast<std::size_t>(s)] = 0;
      bool found = dfs(s, 0);
      on_stack_[static_cast<std::size_t>(s)] = -1;
      if (found) return result_;
    }
    return std::nullopt;
  }

 private:
  // Cycles are reported from their smallest node, so the walk never enters
  // nodes below start_. A walk with distinct labels that revisits one of its
  // own nodes already contains a distinct-label cycle.
  bool dfs(Node v, std::uint32_t mask) {
    const std::uint64_t key = (static_cast<std::uint64_t>(v) << 32) | mask;
    if (failed_.count(key)) return false;
    for (int label = 0; label < g_.k; ++label) {
      const std::uint32_t bit = 1u << label;
      if (mask & bit) continue;
      const Node u = g_.neighbor[static_cast<std::size_t>(label)][static_cast<std::size_t>(v - 1)];
      if (u < start_) continue;
      const int pos = on_stack_[static_cast<std::size_t>(u)];
      if (pos >= 0) {
        result_.nodes.assign(nodes_.begin() + pos, nodes_.end());
        result_.nodes.push_back(u);
        result_.labels.assign(labels_.begin() + pos, labels_.end());
        result_.labels.push_back(label);
        return true;
      }
      on_stack_[static_cast<std::size_t>(u)] = static_cast<int>(nodes_.size());
      nodes_.push_back(u);
      labels_.push_back(label);
      const bool found = dfs(u, mask | bit);
      nodes_.pop_back();
      labels_.pop_back();
      on_stack_[static_cast<std::size_t>(u)] = -1;
      if (found) return true;
    }
    failed_.insert(key);
    return false;
  }

  const JointGraph& g_;
  Node start_ = 1;
  std::vector<int> on_stack_;
  std::vector<Node> nodes_;
  std::vector<int> labels_;
  std::unordered_set<std::uint64_t> failed_;
  CycleWitness result_;
};

}  // namespace

std::optional<CycleWitness> find_distinct_label_cycle(const JointGraph& g) {
  if (g.k > 32) throw MatchingError("find_distinct_label_cycle: more than 32 labels");
  return CycleSearch(g).run();
}

bool verify_witness(const JointGraph& g, const CycleWitness& w) {
  if (w.nodes.size() < 3 || w.labels.size() + 1 != w.nodes.size()) return false;
  if (w.nodes.front() != w.nodes.back()) return false;
  std::vector<int> seen = w.labels;
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) return false;
  for (std::size_t step = 0; step < w.labels.size(); ++step) {
    const int label = w.labels[step];
    if (label < 0 || label >= g.k) return false;
    const Node a = w.nodes[step];
    const Node b = w.nodes[step + 1];
    if (a < 1 || a > g.n) return false;
    if (g.neighbor[static_cast<std::size_t>(label)][static_cast<std::size_t>(a - 1)] != b) {
      return false;
    }
  }
  return true;
}

int gf2_rank(int n, const std::vector<Edge>& edges) {
  const std::size_t words = static_cast<std::size_t>(n + 63) / 64;
  std::vector<std::vector<std::uint64_t>> rows;
  rows.reserve(edges.size());
  for (const auto& [i, j] : edges) {
    std::vector<std::uint64_t> row(words, 0);
    row[static_cast<std::size_t>(i - 1) / 64] ^= 1ull << ((i - 1) % 64);
    row[static_cast<std::size_t>(j - 1) / 64] ^= 1ull << ((j - 1) % 64);
    rows.push_back(std::move(row));
  }
  int rank = 0;
  for (int col = 0; col < n && rank < static_cast<int>(rows.size()); ++col) {
    const std::size_t w = static_cast<std::size_t>(col) / 64;
    const std::uint64_t bit = 1ull << (col % 64);
    auto pivot = std::find_if(rows.begin() + rank, rows.end(),
                              [&](const auto& r) { return (r[w] & bit) != 0; });
    if (pivot == rows.end()) continue;
    std::iter_swap(rows.begin() + rank, pivot);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != static_cast<std::size_t>(rank) && (rows[r][w] & bit)) {
        for (std::size_t x = 0; x < words; ++x) rows[r][x] ^= rows[static_cast<std::size_t>(rank)][x];
      }
    }
    ++rank;
  }
  return rank;
}

IndependenceReport is_independent(const Family& family) {
  IndependenceReport report;
  if (family.size() <= 1) {
    if (family.size() == 1) (void)join(family);
    return report;
  }
  const JointGraph g = join(family);
  report.witness = find_distinct_label_cycle(g);
  report.independent = !report.witness.has_value();

  if (g.n <= 8 && g.k <= 3) {
    // Cross-check: independence holds iff every choice of one edge per
    // matching gives k linearly independent parity constraints.
    report.rank_checked = true;
    const std::size_t per = static_cast<std::size_t>(g.n / 2);
    std::size_t combos = 1;
    for (int l = 0; l < g.k; ++l) combos *= per;
    bool all_full = true;
    for (std::size_t c = 0; c < combos && all_full; ++c) {
      std::vector<Edge> edges;
      std::size_t rest = c;
      for (int l = g.k - 1; l >= 0; --l) {
        edges.push_back(family[static_cast<std::size_t>(l)].pairs()[rest % per]);
        rest /= per;
      }
      all_full = gf2_rank(g.n, edges) == g.k;
    }
    if (all_full != report.independent) {
      throw std::logic_error("is_independent: cycle search and GF(2) rank check disagree");
    }
  }
  return report;
}

Family double_family(const Family& family) {
  if (family.empty()) throw MatchingError("double: empty family");
  if (!is_independent(family).independent) {
    throw MatchingError("double: input family is not independent");
  }
  const int n = family.front().n();
  Family out;
  out.reserve(family.size() + 1);
  for (const Matching& m : family) {
    std::vector<Edge> pairs = m.pairs();
    for (const auto& [i, j] : m.pairs()) pairs.emplace_back(i + n, j + n);
    out.emplace_back(2 * n, std::move(pairs));
  }
  std::vector<Edge> bridge;
  for (Node i = 1; i <= n; ++i) bridge.emplace_back(i, i + n);
  out.emplace_back(2 * n, std::move(bridge));
  return out;
}

Family canonical_family(int k) {
  if (k < 1 || k > 12) throw MatchingError("canonical_family: k must be in [1, 12]");
  const int n = 1 << k;
  Family out;
  for (int j = 1; j <= k; ++j) {
    const int stride = 1 << (j - 1);
    std::vector<Edge> pairs;
    for (int v = 0; v < n; ++v) {
      const int w = v ^ stride;
      if (v < w) pairs.emplace_back(v + 1, w + 1);
    }
    out.emplace_back(n, std::move(pairs));
  }
  return out;
}

Family sextet_family(int k) {
  if (k < 3 || k > 12) throw MatchingError("sextet_family: k must be in [3, 12]");
  Family family{
      Matching(6, {{1, 2}, {3, 4}, {5, 6}}),
      Matching(6, {{1, 6}, {2, 3}, {4, 5}}),
      Matching(6, {{1, 4}, {2, 5}, {3, 6}}),
  };
  for (int step = 3; step < k; ++step) family = double_family(family);
  return family;
}

void write_family(std::ostream& os, const Family& family) {
  const int n = family.empty() ? 0 : family.front().n();
  os << n << ' ' << family.size() << '\n';
  for (const Matching& m : family) {
    bool first = true;
    for (const auto& [i, j] : m.pairs()) {
      if (!first) os << ' ';
      os << i << '-' << j;
      first = false;
    }
    os << '\n';
  }
}

Family read_family(std::istream& is) {
  std::string line;
  auto next_content_line = [&](std::string& out) {
    while (std::getline(is, out)) {
      if (out.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_content_line(line)) throw MatchingError("family file: missing header line 'n k'");
  int n = 0;
  int k = 0;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> n >> k) || (header >> extra)) {
      throw MatchingError("family file: malformed header '" + line + "'");
    }
  }
  if (k < 0) throw MatchingError("family file: negative matching count");
  Family family;
  for (int l = 0; l < k; ++l) {
    if (!next_content_line(line)) {
      throw MatchingError("family file: expected " + std::to_string(k) + " matchings, found " +
                          std::to_string(l));
    }
    std::istringstream row(line);
    std::string token;
    std::vector<Edge> pairs;
    while (row >> token) {
      const auto dash = token.find('-');
      std::size_t used_i = 0;
      std::size_t used_j = 0;
      int i = 0;
      int j = 0;
      try {
        if (dash == std::string::npos) throw std::invalid_argument("no dash");
        const std::string lhs = token.substr(0, dash);
        const std::string rhs = token.substr(dash + 1);
        i = std::stoi(lhs, &used_i);
        j = std::stoi(rhs, &used_j);
        if (used_i != lhs.size() || used_j != rhs.size()) throw std::invalid_argument("junk");
      } catch (const std::exception&) {
        throw MatchingError("family file: bad pair token '" + token + "' on matching " +
                            std::to_string(l + 1));
      }
      pairs.emplace_back(i, j);
    }
    try {
      family.emplace_back(n, std::move(pairs));
    } catch (const MatchingError& e) {
      throw MatchingError("family file, matching " + std::to_string(l + 1) + ": " + e.what());
    }
  }
  if (next_content_line(line)) throw MatchingError("family file: trailing content '" + line + "'");
  return family;
}

std::string format_family(const Family& family) {
  std::ostringstream os;
  write_family(os, family);
  return os.str();
}

Family parse_family(const std::string& text) {
  std::istringstream is(text);
  return read_family(is);
}

std::string format_witness(const CycleWitness& w) {
  std::ostringstream os;
  for (std::size_t step = 0; step < w.labels.size(); ++step) {
    if (step) os << ' ';
    os << '(' << w.nodes[step] << ',' << w.nodes[step + 1] << ")@M" << (w.labels[step] + 1);
  }
  return os.str();
}

}  // namespace qrg
