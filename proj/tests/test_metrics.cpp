#include "doctest.h"

#include "qsw/errors.hpp"
#include "qsw/graph.hpp"
#include "qsw/metrics.hpp"
#include "qsw/rng.hpp"

#include <Eigen/Dense>

#include <vector>

using namespace qsw;

namespace {

TopologySpec sized(Topology kind, int n) {
  TopologySpec s;
  s.kind = kind;
  s.n = n;
  return s;
}

// oracle: d(i,j) is the smallest k with (A^k)_ij > 0, computed by repeated
// boolean matrix powers; slow but independent of the BFS implementation
Eigen::MatrixXi power_distances(const Graph& g) {
  const int n = g.num_nodes();
  Eigen::MatrixXd a = g.adjacency();
  Eigen::MatrixXd reach = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXi d = Eigen::MatrixXi::Constant(n, n, -1);
  for (int i = 0; i < n; ++i) d(i, i) = 0;
  for (int k = 1; k < n; ++k) {
    reach = (reach * a).eval();
    for (int i = 0; i < n; ++i)  // clamp to keep entries from exploding
      for (int j = 0; j < n; ++j) reach(i, j) = reach(i, j) > 0.0 ? 1.0 : 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d(i, j) < 0 && reach(i, j) > 0.0) d(i, j) = k;
  }
  return d;
}

std::vector<TopologySpec> small_family_zoo() {
  TopologySpec lattice;
  lattice.kind = Topology::square_lattice;
  lattice.side = 3;
  TopologySpec sw = lattice;
  sw.kind = Topology::small_world;
  sw.rewiring = 0.4;
  TopologySpec tree;
  tree.kind = Topology::kary_tree;
  tree.arity = 2;
  tree.depth = 2;
  TopologySpec dend;
  dend.kind = Topology::dendrimer;
  dend.branching = 3;
  dend.generations = 2;
  return {sized(Topology::chain, 8),    sized(Topology::ring, 9),
          sized(Topology::star, 10),    sized(Topology::complete, 7),
          lattice,                      sw,
          tree,                         dend,
          sized(Topology::random_regular, 8), sized(Topology::scale_free, 10)};
}

Graph random_connected(int n, double edge_prob, Rng& rng) {
  for (int tries = 0; tries < 200; ++tries) {
    std::vector<Edge> e;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.bernoulli(edge_prob)) e.push_back({i, j});
    Graph g(n, std::move(e));
    if (g.connected()) return g;
  }
  FAIL("could not draw a connected graph");
  return Graph(1, {});
}

}  // namespace

TEST_CASE("bfs distances match the matrix-power oracle on the family zoo") {
  for (const TopologySpec& spec : small_family_zoo()) {
    Graph g = generate_graph(spec, 31);
    Eigen::MatrixXi got = all_pairs_shortest_paths(g);
    Eigen::MatrixXi want = power_distances(g);
    CHECK_MESSAGE(got == want, spec.describe());
  }
}

TEST_CASE("bfs distances match the matrix-power oracle on random graphs") {
  Rng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 4 + static_cast<int>(rng.below(9));  // 4..12
    Graph g = random_connected(n, 0.35, rng);
    CHECK(all_pairs_shortest_paths(g) == power_distances(g));
  }
}

TEST_CASE("distinct eigenvalues exceed the diameter") {
  // a graph with diameter D has at least D+1 distinct adjacency eigenvalues
  for (const TopologySpec& spec : small_family_zoo()) {
    Graph g = generate_graph(spec, 7);
    GraphMetrics m = compute_metrics(g);
    CHECK_MESSAGE(m.distinct_eigenvalues >= m.diameter + 1, spec.describe());
  }
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g = random_connected(4 + static_cast<int>(rng.below(9)), 0.3, rng);
    GraphMetrics m = compute_metrics(g);
    CHECK(m.distinct_eigenvalues >= m.diameter + 1);
  }
}

TEST_CASE("lattice distances and diameter") {
  TopologySpec spec;
  spec.kind = Topology::square_lattice;
  spec.side = 5;
  Graph g = generate_graph(spec);
  GraphMetrics m = compute_metrics(g);
  CHECK(m.diameter == 8);  // 2*(m-1) between opposite corners
  CHECK(m.shortest_paths(0, 24) == 8);
  CHECK(m.shortest_paths(0, 4) == 4);
  CHECK(m.clustering == doctest::Approx(0.0));
}

TEST_CASE("chain characteristic path length") {
  Graph g = generate_graph(sized(Topology::chain, 4));
  GraphMetrics m = compute_metrics(g);
  CHECK(m.char_path_length == doctest::Approx(10.0 / 6.0));
  CHECK(m.diameter == 3);
}

TEST_CASE("complete graph spectrum is n-1 and -1") {
  Graph g = generate_graph(sized(Topology::complete, 9));
  GraphMetrics m = compute_metrics(g);
  CHECK(m.eigenvalues[0] == doctest::Approx(8.0).epsilon(1e-12));
  for (int i = 1; i < 9; ++i) CHECK(m.eigenvalues[i] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(m.distinct_eigenvalues == 2);
  CHECK(m.spectral_gap == doctest::Approx(7.0));
  CHECK(m.clustering == doctest::Approx(1.0));
}

TEST_CASE("clustering on a mixed example") {
  // triangle 0-1-2 plus pendant 3 on node 2
  Graph g(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}});
  GraphMetrics m = compute_metrics(g);
  CHECK(m.clustering == doctest::Approx((1.0 + 1.0 + 1.0 / 3.0 + 0.0) / 4.0));
}

TEST_CASE("shortest path nodes walk a geodesic") {
  Graph chain = generate_graph(sized(Topology::chain, 5));
  std::vector<int> want = {0, 1, 2, 3, 4};
  CHECK(shortest_path_nodes(chain, 0, 4) == want);

  TopologySpec spec;
  spec.kind = Topology::square_lattice;
  spec.side = 3;
  Graph g = generate_graph(spec);
  std::vector<int> path = shortest_path_nodes(g, 0, 8);
  CHECK(path.size() == 5);
  CHECK(path.front() == 0);
  CHECK(path.back() == 8);
  for (size_t i = 0; i + 1 < path.size(); ++i) CHECK(g.has_edge(path[i], path[i + 1]));
}

TEST_CASE("transition matrix is column stochastic") {
  Graph g = generate_graph(sized(Topology::star, 6));
  Eigen::MatrixXd t = transition_matrix(g);
  for (int j = 0; j < 6; ++j) CHECK(t.col(j).sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(t(0, 1) == doctest::Approx(1.0));        // leaf sends all weight to hub
  CHECK(t(1, 0) == doctest::Approx(1.0 / 5.0));  // hub spreads over 5 leaves
  CHECK(t(1, 2) == doctest::Approx(0.0));
}

TEST_CASE("pearson correlation") {
  std::vector<double> x = {1, 2, 3, 4};
  std::vector<double> up = {2, 4, 6, 8};
  std::vector<double> down = {9, 7, 5, 3};
  std::vector<double> flat = {5, 5, 5, 5};
  CHECK(pearson(x, up) == doctest::Approx(1.0));
  CHECK(pearson(x, down) == doctest::Approx(-1.0));
  CHECK(pearson(x, flat) == doctest::Approx(0.0));
  CHECK_THROWS_AS(pearson(x, {1.0, 2.0}), UsageError);
}

TEST_CASE("metrics require a connected graph") {
  Graph g(4, {{0, 1}, {2, 3}});
  CHECK_FALSE(g.connected());
  CHECK_THROWS_AS(compute_metrics(g), ConstructionError);
}
