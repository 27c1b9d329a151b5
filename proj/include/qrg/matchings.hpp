#pragma once

// Perfect matchings on [n], their joint multigraph, and independence
// certification via distinct-label cycle search.
//
// Node labels are 1-based in every public type and in the text format.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qrg {

using Node = int;
using Edge = std::pair<Node, Node>;

class MatchingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A partition of {1..n} into n/2 disjoint pairs. Pairs are stored with
/// first < second, sorted by first element.
class Matching {
 public:
  Matching(int n, std::vector<Edge> pairs);

  int n() const { return n_; }
  const std::vector<Edge>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

  /// Node matched with `v`.
  Node partner(Node v) const { return partner_[static_cast<std::size_t>(v - 1)]; }
  bool contains(Node i, Node j) const;
  /// Position of edge {i,j} in pairs(), or nullopt.
  std::optional<std::size_t> edge_index(Node i, Node j) const;

  friend bool operator==(const Matching& a, const Matching& b) {
    return a.n_ == b.n_ && a.pairs_ == b.pairs_;
  }

 private:
  int n_;
  std::vector<Edge> pairs_;
  std::vector<Node> partner_;
};

using Family = std::vector<Matching>;

struct LabeledEdge {
  Node i;
  Node j;
  int label;
};

/// Multigraph union of a family; edge labels index the source matching.
struct JointGraph {
  int n = 0;
  int k = 0;
  std::vector<LabeledEdge> edges;
  /// neighbor[label][v-1] is the label-partner of v.
  std::vector<std::vector<Node>> neighbor;
};

/// Closed walk whose edges carry pairwise-distinct labels.
/// nodes.front() == nodes.back(); labels.size() == nodes.size() - 1.
struct CycleWitness {
  std::vector<Node> nodes;
  std::vector<int> labels;
};

struct IndependenceReport {
  bool independent = true;
  std::optional<CycleWitness> witness;
  /// Set when the GF(2) rank cross-check ran (n <= 8, k <= 3).
  bool rank_checked = false;
};

/// All perfect matchings of [n] in lexicographic order, 2 <= n <= 10 even.
std::vector<Matching> enumerate_matchings(int n);

JointGraph join(const Family& family);

std::optional<CycleWitness> find_distinct_label_cycle(const JointGraph& g);

/// Replays every step of the witness against the graph.
bool verify_witness(const JointGraph& g, const CycleWitness& w);

IndependenceReport is_independent(const Family& family);

/// Rank over GF(2) of the parity constraints x_i ^ x_j for the given edges
/// on n variables.
int gf2_rank(int n, const std::vector<Edge>& edges);

/// Grows an independent family on n nodes into k+1 matchings on 2n nodes:
/// each input matching is copied onto nodes n+1..2n and the new matching is
/// {(i, i+n)}.
Family double_family(const Family& family);

/// k matchings on n = 2^k; matching j pairs (0-based) i with i ^ 2^(j-1).
Family canonical_family(int k);

/// k >= 3 matchings on n = 3 * 2^(k-2), grown from the 6-node triple.
Family sextet_family(int k);

// Plain-text family format:
//   n k
//   i-j i-j ...        (one line per matching)
void write_family(std::ostream& os, const Family& family);
Family read_family(std::istream& is);
std::string format_family(const Family& family);
Family parse_family(const std::string& text);

std::string format_witness(const CycleWitness& w);

}  // namespace qrg
