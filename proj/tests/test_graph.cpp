#include "doctest.h"

#include "qsw/errors.hpp"
#include "qsw/graph.hpp"
#include "qsw/rng.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <unistd.h>

using namespace qsw;

namespace {

TopologySpec sized(Topology kind, int n) {
  TopologySpec s;
  s.kind = kind;
  s.n = n;
  return s;
}

std::string temp_path(const char* stem) {
  return std::string("qsw_test_") + stem + "_" + std::to_string(::getpid()) + ".txt";
}

}  // namespace

TEST_CASE("graph constructor validates input") {
  CHECK_THROWS_AS(Graph(3, {{0, 0}}), ConstructionError);        // loop
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), ConstructionError);        // out of range
  CHECK_THROWS_AS(Graph(3, {{-1, 2}}), ConstructionError);       // negative
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), ConstructionError);  // duplicate
  CHECK_THROWS_AS(Graph(0, {}), ConstructionError);
}

TEST_CASE("edges are canonicalized") {
  Graph g(4, {{2, 1}, {3, 0}, {0, 1}});
  std::vector<Edge> want = {{0, 1}, {0, 3}, {1, 2}};
  CHECK(g.edges() == want);
  CHECK(g.has_edge(1, 2));
  CHECK(g.has_edge(2, 1));
  CHECK_FALSE(g.has_edge(0, 2));
}

TEST_CASE("chain ring star complete shapes") {
  Graph chain = generate_graph(sized(Topology::chain, 6));
  CHECK(chain.num_edges() == 5);
  CHECK(chain.degree(0) == 1);
  CHECK(chain.degree(3) == 2);

  Graph ring = generate_graph(sized(Topology::ring, 6));
  CHECK(ring.num_edges() == 6);
  for (int v = 0; v < 6; ++v) CHECK(ring.degree(v) == 2);
  CHECK(ring.has_edge(0, 5));

  Graph star = generate_graph(sized(Topology::star, 6));
  CHECK(star.num_edges() == 5);
  CHECK(star.degree(0) == 5);
  CHECK(star.degree(4) == 1);

  Graph full = generate_graph(sized(Topology::complete, 6));
  CHECK(full.num_edges() == 15);
  for (int v = 0; v < 6; ++v) CHECK(full.degree(v) == 5);
}

TEST_CASE("square lattice shape") {
  TopologySpec spec;
  spec.kind = Topology::square_lattice;
  spec.side = 4;
  Graph g = generate_graph(spec);
  CHECK(g.num_nodes() == 16);
  CHECK(g.num_edges() == 24);  // 2*m*(m-1)
  CHECK(g.degree(0) == 2);     // corner
  CHECK(g.degree(1) == 3);     // edge
  CHECK(g.degree(5) == 4);     // interior
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(0, 4));
  CHECK_FALSE(g.has_edge(3, 4));  // no wraparound between rows
}

TEST_CASE("kary tree and dendrimer sizes") {
  TopologySpec tree;
  tree.kind = Topology::kary_tree;
  tree.arity = 2;
  tree.depth = 3;
  Graph t = generate_graph(tree);
  CHECK(t.num_nodes() == 15);
  CHECK(t.num_edges() == 14);
  CHECK(t.degree(0) == 2);
  CHECK(t.has_edge(1, 3));
  CHECK(t.has_edge(1, 4));

  tree.depth = 7;
  CHECK(tree.expected_nodes() == 255);

  TopologySpec dend;
  dend.kind = Topology::dendrimer;
  dend.branching = 3;
  dend.generations = 2;
  Graph d = generate_graph(dend);
  CHECK(d.num_nodes() == 10);  // 1 + 3 + 6
  CHECK(d.degree(0) == 3);
  CHECK(d.degree(1) == 3);  // shell-1 node: center + 2 children
  CHECK(d.degree(9) == 1);

  dend.generations = 6;
  CHECK(dend.expected_nodes() == 190);
}

TEST_CASE("random regular substrate is 4-regular and connected") {
  TopologySpec spec = sized(Topology::random_regular, 200);
  for (uint64_t seed : {1ULL, 2ULL, 77ULL}) {
    Graph g = generate_graph(spec, seed);
    CHECK(g.num_nodes() == 200);
    CHECK(g.connected());
    for (int v = 0; v < g.num_nodes(); ++v) CHECK(g.degree(v) == 4);
  }
  CHECK(generate_graph(spec, 1).edges() != generate_graph(spec, 2).edges());
}

TEST_CASE("scale free graph grows heavy tails") {
  TopologySpec spec = sized(Topology::scale_free, 187);
  Graph g = generate_graph(spec, 9);
  CHECK(g.num_nodes() == 187);
  CHECK(g.connected());
  // m=2 attachment: every vertex after the seed adds exactly 2 edges
  CHECK(g.num_edges() == 3 + 2 * (187 - 3));
  std::vector<int> deg = g.degrees();
  CHECK(*std::max_element(deg.begin(), deg.end()) >= 15);  // hubs form
  CHECK(*std::min_element(deg.begin(), deg.end()) >= 2);
}

TEST_CASE("small world rewiring preserves degrees and connectivity") {
  TopologySpec spec;
  spec.kind = Topology::small_world;
  spec.side = 8;
  spec.rewiring = 0.3;
  TopologySpec base;
  base.kind = Topology::square_lattice;
  base.side = 8;
  std::vector<int> want = generate_graph(base).degrees();
  for (uint64_t seed : {1ULL, 5ULL, 123ULL}) {
    Graph g = generate_graph(spec, seed);
    CHECK(g.connected());
    CHECK(g.degrees() == want);
    CHECK(g.num_edges() == 2 * 8 * 7);
  }
}

TEST_CASE("rewiring probability zero is the identity") {
  TopologySpec base;
  base.kind = Topology::square_lattice;
  base.side = 5;
  Graph g = generate_graph(base);
  Graph r = rewire_small_world(g, 0.0, 42);
  CHECK(r.edges() == g.edges());
}

TEST_CASE("perturb_links rewire keeps degrees, remove keeps connectivity") {
  TopologySpec base;
  base.kind = Topology::square_lattice;
  base.side = 7;
  Graph g = generate_graph(base);

  Graph rw = perturb_links(g, PerturbMode::rewire, 12, 3);
  CHECK(rw.degrees() == g.degrees());
  CHECK(rw.connected());
  // count edges that moved
  int moved = 0;
  for (const Edge& e : rw.edges())
    if (!g.has_edge(e.first, e.second)) ++moved;
  CHECK(moved >= 12);  // each swap moves two edges but swaps can overlap

  Graph rm = perturb_links(g, PerturbMode::remove, 12, 3);
  CHECK(rm.num_edges() == g.num_edges() - 12);
  CHECK(rm.connected());
}

TEST_CASE("perturb_links refuses impossible removals") {
  // a tree has no removable edge; achieved() reports progress before failure
  Graph tree = generate_graph(sized(Topology::chain, 10));
  try {
    perturb_links(tree, PerturbMode::remove, 1, 7);
    FAIL("expected PerturbationError");
  } catch (const PerturbationError& err) {
    CHECK(err.achieved() == 0);
  }
}

TEST_CASE("save and load round-trip") {
  TopologySpec spec;
  spec.kind = Topology::small_world;
  spec.side = 6;
  spec.rewiring = 0.2;
  Graph g = generate_graph(spec, 17);
  std::string path = temp_path("roundtrip");
  save_graph(g, path);
  Graph back = load_graph(path);
  CHECK(back.num_nodes() == g.num_nodes());
  CHECK(back.edges() == g.edges());
  std::remove(path.c_str());
}

TEST_CASE("load_graph rejects malformed input") {
  std::string path = temp_path("badload");
  {
    FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("nonsense\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_graph(path), IoError);
  {
    FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("N 3\n0 1\n1 1\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_graph(path), ConstructionError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_graph(path), IoError);  // missing file
}

TEST_CASE("spec validation rejects bad parameters") {
  CHECK_THROWS_AS(sized(Topology::chain, 1).validate(), UsageError);
  CHECK_THROWS_AS(sized(Topology::complete, -3).validate(), UsageError);
  TopologySpec lattice;
  lattice.kind = Topology::square_lattice;
  lattice.side = 1;
  CHECK_THROWS_AS(lattice.validate(), UsageError);
  TopologySpec sw;
  sw.kind = Topology::small_world;
  sw.side = 5;
  sw.rewiring = 1.5;
  CHECK_THROWS_AS(sw.validate(), UsageError);
  TopologySpec sf = sized(Topology::scale_free, 50);
  sf.attach_edges = 0;
  CHECK_THROWS_AS(sf.validate(), UsageError);
}

TEST_CASE("topology names round-trip") {
  for (Topology t : {Topology::chain, Topology::ring, Topology::star, Topology::complete,
                     Topology::square_lattice, Topology::kary_tree, Topology::dendrimer,
                     Topology::small_world, Topology::random_regular, Topology::scale_free})
    CHECK(topology_from_name(topology_name(t)) == t);
  CHECK_THROWS_AS(topology_from_name("moebius"), UsageError);
  CHECK(perturb_mode_from_name("delete") == PerturbMode::remove);
  CHECK(perturb_mode_from_name("remove") == PerturbMode::remove);
  CHECK(perturb_mode_from_name("rewire") == PerturbMode::rewire);
}
