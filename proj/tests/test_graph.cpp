#include <doctest.h>

#include <algorithm>
#include <tuple>
#include <vector>

#include "dks/errors.hpp"
#include "dks/graph.hpp"

using namespace dks;

namespace {

WeightedGraph triangle_plus_pendant() {
  WeightedGraph g(4);
  g.set_weight(0, 1, 1.0);
  g.set_weight(1, 2, 2.0);
  g.set_weight(0, 2, 0.5);
  g.set_weight(2, 3, 4.0);
  return g;
}

}  // namespace

TEST_CASE("pair_key round-trips and is order-insensitive") {
  CHECK(pair_key(3, 7) == pair_key(7, 3));
  auto [u, v] = key_pair(pair_key(12, 5));
  CHECK(u == 5);
  CHECK(v == 12);
}

TEST_CASE("vertex subset basics") {
  VertexSubset s({4, 1, 2, 2});
  CHECK(s.size() == 3);
  CHECK(s.members() == std::vector<int>{1, 2, 4});
  CHECK(s.contains(2));
  CHECK(!s.contains(3));
  CHECK(VertexSubset::full(3).members() == std::vector<int>{0, 1, 2});
  CHECK(VertexSubset::range(2, 5).members() == std::vector<int>{2, 3, 4});
  CHECK(VertexSubset().empty());
}

TEST_CASE("weight accessors are symmetric") {
  auto g = triangle_plus_pendant();
  CHECK(g.vertex_count() == 4);
  CHECK(g.edge_count() == 4);
  CHECK(g.weight(1, 0) == 1.0);
  CHECK(g.weight(0, 1) == 1.0);
  CHECK(g.has_edge(2, 3));
  CHECK(!g.has_edge(0, 3));
  CHECK(g.weight(0, 3) == 0.0);
}

TEST_CASE("set_weight overwrites, erases on zero, rejects negatives") {
  auto g = triangle_plus_pendant();
  g.set_weight(0, 1, 3.0);
  CHECK(g.weight(0, 1) == 3.0);
  CHECK(g.edge_count() == 4);
  CHECK(g.total_weight() == doctest::Approx(3.0 + 2.0 + 0.5 + 4.0));

  g.set_weight(0, 1, 0.0);
  CHECK(!g.has_edge(0, 1));
  CHECK(g.edge_count() == 3);

  CHECK_THROWS_AS(g.set_weight(0, 1, -1.0), ParameterError);
  CHECK_THROWS_AS(g.set_weight(0, 0, 1.0), ParameterError);
  CHECK_THROWS_AS(g.set_weight(0, 4, 1.0), IndexError);
  CHECK_THROWS_AS(g.set_weight(-1, 2, 1.0), IndexError);
}

TEST_CASE("degrees and totals stay consistent under mutation") {
  auto g = triangle_plus_pendant();
  CHECK(g.weighted_degree(2) == doctest::Approx(2.0 + 0.5 + 4.0));
  CHECK(g.weighted_degree(3) == doctest::Approx(4.0));
  CHECK(weighted_degree(g, 3) == doctest::Approx(4.0));
  g.set_weight(2, 3, 1.0);
  CHECK(g.weighted_degree(3) == doctest::Approx(1.0));
  CHECK(g.total_weight() == doctest::Approx(1.0 + 2.0 + 0.5 + 1.0));
}

TEST_CASE("neighbors match the weight map") {
  auto g = triangle_plus_pendant();
  auto nb = g.neighbors(2);
  std::sort(nb.begin(), nb.end());
  std::vector<std::pair<int, double>> want{{0, 0.5}, {1, 2.0}, {3, 4.0}};
  CHECK(nb == want);
}

TEST_CASE("sorted_edges is lexicographic with u < v") {
  auto g = triangle_plus_pendant();
  auto edges = g.sorted_edges();
  std::vector<std::tuple<int, int, double>> want{
      {0, 1, 1.0}, {0, 2, 0.5}, {1, 2, 2.0}, {2, 3, 4.0}};
  CHECK(edges == want);
}

TEST_CASE("graph equality is structural") {
  auto a = triangle_plus_pendant();
  auto b = triangle_plus_pendant();
  CHECK(a == b);
  b.set_weight(0, 3, 1.0);
  CHECK(!(a == b));
  WeightedGraph c(5);
  CHECK(!(a == c));
}

TEST_CASE("rho sums weights strictly inside the subset") {
  auto g = triangle_plus_pendant();
  CHECK(rho(g, VertexSubset({0, 1, 2})) == doctest::Approx(3.5));
  CHECK(rho(g, VertexSubset({2, 3})) == doctest::Approx(4.0));
  CHECK(rho(g, VertexSubset({0, 3})) == doctest::Approx(0.0));
  CHECK(rho(g, VertexSubset({1})) == doctest::Approx(0.0));
  CHECK(rho(g, VertexSubset::full(4)) == doctest::Approx(g.total_weight()));
}

TEST_CASE("average_degree matches 2 rho / size") {
  auto g = triangle_plus_pendant();
  CHECK(average_degree(g, VertexSubset({0, 1, 2})) == doctest::Approx(2.0 * 3.5 / 3.0));
}

TEST_CASE("induced subgraph relabels and keeps inner edges only") {
  auto g = triangle_plus_pendant();
  auto sub = induced_subgraph(g, VertexSubset({1, 2, 3}));
  CHECK(sub.graph.vertex_count() == 3);
  CHECK(sub.index_map == std::vector<int>{1, 2, 3});
  CHECK(sub.graph.weight(0, 1) == 2.0);  // old (1,2)
  CHECK(sub.graph.weight(1, 2) == 4.0);  // old (2,3)
  CHECK(sub.graph.edge_count() == 2);
  CHECK(rho(sub.graph, VertexSubset::full(3)) ==
        doctest::Approx(rho(g, VertexSubset({1, 2, 3}))));
}

TEST_CASE("rho rejects out-of-range members") {
  auto g = triangle_plus_pendant();
  CHECK_THROWS_AS(rho(g, VertexSubset({0, 4})), IndexError);
}
