#include "dks/graph.hpp"

#include <algorithm>
#include <cmath>

#include "dks/errors.hpp"

namespace dks {

VertexSubset::VertexSubset(std::vector<int> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

VertexSubset VertexSubset::full(int n) { return range(0, n); }

VertexSubset VertexSubset::range(int lo, int hi) {
  VertexSubset s;
  s.members_.reserve(hi > lo ? hi - lo : 0);
  for (int v = lo; v < hi; ++v) s.members_.push_back(v);
  return s;
}

bool VertexSubset::contains(int v) const {
  return std::binary_search(members_.begin(), members_.end(), v);
}

WeightedGraph::WeightedGraph(int vertex_count) : n_(vertex_count) {
  if (vertex_count <= 0) throw ParameterError("vertex_count must be positive");
  adj_.resize(n_);
  degree_.assign(n_, 0.0);
}

void WeightedGraph::check_pair(int u, int v) const {
  if (u < 0 || u >= n_ || v < 0 || v >= n_)
    throw IndexError("vertex index out of range: (" + std::to_string(u) + ", " +
                     std::to_string(v) + ") with n = " + std::to_string(n_));
  if (u == v) throw ParameterError("self-loops are not representable");
}

void WeightedGraph::set_weight(int u, int v, double w) {
  check_pair(u, v);
  if (w < 0 || !std::isfinite(w)) throw ParameterError("edge weight must be finite and non-negative");
  PairKey key = pair_key(u, v);
  auto it = weights_.find(key);
  double old = (it == weights_.end()) ? 0.0 : it->second;
  if (w == 0.0) {
    if (it == weights_.end()) return;
    weights_.erase(it);
    for (auto* list : {&adj_[u], &adj_[v]}) {
      int other = (list == &adj_[u]) ? v : u;
      auto pos = std::find_if(list->begin(), list->end(),
                              [other](const auto& e) { return e.first == other; });
      if (pos != list->end()) list->erase(pos);
    }
  } else if (it == weights_.end()) {
    weights_.emplace(key, w);
    adj_[u].emplace_back(v, w);
    adj_[v].emplace_back(u, w);
  } else {
    it->second = w;
    for (auto* list : {&adj_[u], &adj_[v]}) {
      int other = (list == &adj_[u]) ? v : u;
      for (auto& e : *list)
        if (e.first == other) e.second = w;
    }
  }
  degree_[u] += w - old;
  degree_[v] += w - old;
  total_weight_ += w - old;
}

double WeightedGraph::weight(int u, int v) const {
  check_pair(u, v);
  auto it = weights_.find(pair_key(u, v));
  return it == weights_.end() ? 0.0 : it->second;
}

bool WeightedGraph::has_edge(int u, int v) const {
  check_pair(u, v);
  return weights_.count(pair_key(u, v)) > 0;
}

double WeightedGraph::weighted_degree(int i) const {
  if (i < 0 || i >= n_)
    throw IndexError("vertex index out of range: " + std::to_string(i));
  return degree_[i];
}

const std::vector<std::pair<int, double>>& WeightedGraph::neighbors(int i) const {
  if (i < 0 || i >= n_)
    throw IndexError("vertex index out of range: " + std::to_string(i));
  return adj_[i];
}

std::vector<std::tuple<int, int, double>> WeightedGraph::sorted_edges() const {
  std::vector<std::tuple<int, int, double>> out;
  out.reserve(weights_.size());
  for (const auto& [key, w] : weights_) {
    auto [u, v] = key_pair(key);
    out.emplace_back(u, v, w);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool WeightedGraph::operator==(const WeightedGraph& o) const {
  return n_ == o.n_ && weights_ == o.weights_;
}

double rho(const WeightedGraph& graph, const VertexSubset& subset) {
  std::vector<char> in(graph.vertex_count(), 0);
  for (int v : subset.members()) {
    if (v < 0 || v >= graph.vertex_count())
      throw IndexError("subset vertex out of range: " + std::to_string(v));
    in[v] = 1;
  }
  double sum = 0;
  for (int v : subset.members())
    for (const auto& [u, w] : graph.neighbors(v))
      if (u > v && in[u]) sum += w;
  return sum;
}

double weighted_degree(const WeightedGraph& graph, int i) { return graph.weighted_degree(i); }

InducedSubgraph induced_subgraph(const WeightedGraph& graph, const VertexSubset& subset) {
  std::vector<int> to_new(graph.vertex_count(), -1);
  for (int idx = 0; idx < subset.size(); ++idx) {
    int v = subset.members()[idx];
    if (v < 0 || v >= graph.vertex_count())
      throw IndexError("subset vertex out of range: " + std::to_string(v));
    to_new[v] = idx;
  }
  InducedSubgraph out;
  out.index_map = subset.members();
  if (subset.empty()) return out;
  out.graph = WeightedGraph(subset.size());
  for (int v : subset.members())
    for (const auto& [u, w] : graph.neighbors(v))
      if (u > v && to_new[u] >= 0) out.graph.set_weight(to_new[v], to_new[u], w);
  return out;
}

double average_degree(const WeightedGraph& graph, const VertexSubset& subset) {
  if (subset.empty()) throw DomainError("average_degree over an empty subset");
  return 2.0 * rho(graph, subset) / subset.size();
}

}  // namespace dks
