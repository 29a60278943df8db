#pragma once

#include <cstdint>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dks {

// Key for an unordered vertex pair {u, v}, u != v.
using PairKey = std::uint64_t;

inline PairKey pair_key(int u, int v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

inline std::pair<int, int> key_pair(PairKey key) {
  return {static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffULL)};
}

// Sorted, duplicate-free set of vertex indices.
class VertexSubset {
 public:
  VertexSubset() = default;
  explicit VertexSubset(std::vector<int> members);
  static VertexSubset full(int n);
  static VertexSubset range(int lo, int hi);  // [lo, hi)

  const std::vector<int>& members() const { return members_; }
  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  bool contains(int v) const;

  bool operator==(const VertexSubset& o) const { return members_ == o.members_; }

 private:
  std::vector<int> members_;
};

// Undirected weighted graph over n vertices.  Edges live in a sparse map
// keyed by unordered pair; absent pair means weight 0, stored weights are
// strictly positive.  Mutation is construction-phase only; instances are
// treated as immutable once built.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(int vertex_count);

  int vertex_count() const { return n_; }
  std::size_t edge_count() const { return weights_.size(); }

  // w > 0 inserts/overwrites; w == 0 erases; w < 0 throws.
  void set_weight(int u, int v, double w);
  double weight(int u, int v) const;
  bool has_edge(int u, int v) const;

  double weighted_degree(int i) const;
  double total_weight() const { return total_weight_; }

  const std::unordered_map<PairKey, double>& weights() const { return weights_; }
  const std::vector<std::pair<int, double>>& neighbors(int i) const;

  // Edges as (u, v, w) with u < v, sorted lexicographically.
  std::vector<std::tuple<int, int, double>> sorted_edges() const;

  bool operator==(const WeightedGraph& o) const;

 private:
  void check_pair(int u, int v) const;

  int n_ = 0;
  std::unordered_map<PairKey, double> weights_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  std::vector<double> degree_;
  double total_weight_ = 0;
};

// Total edge weight strictly inside the subset.
double rho(const WeightedGraph& graph, const VertexSubset& subset);

double weighted_degree(const WeightedGraph& graph, int i);

struct InducedSubgraph {
  WeightedGraph graph;
  std::vector<int> index_map;  // index_map[new] = old
};

InducedSubgraph induced_subgraph(const WeightedGraph& graph, const VertexSubset& subset);

// 2 rho(subset) / |subset|
double average_degree(const WeightedGraph& graph, const VertexSubset& subset);

}  // namespace dks
