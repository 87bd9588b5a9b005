#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qsw {

using Edge = std::pair<int, int>;

// Undirected simple graph, nodes 0..n-1. Edges are stored canonically
// (first < second, lexicographically sorted) so identical graphs always
// serialize identically.
class Graph {
 public:
  Graph(int n_nodes, std::vector<Edge> edges);

  int num_nodes() const { return n_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  std::vector<int> degrees() const;
  bool has_edge(int a, int b) const;
  bool connected() const;
  Eigen::MatrixXd adjacency() const;

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
};

enum class Topology {
  chain,
  ring,
  star,
  complete,
  square_lattice,
  kary_tree,
  dendrimer,
  small_world,
  random_regular,
  scale_free,
};

const char* topology_name(Topology t);
Topology topology_from_name(const std::string& name);

// Parameters for one concrete graph instance. Which fields matter depends on
// the kind; validate() rejects inconsistent combinations.
struct TopologySpec {
  Topology kind = Topology::chain;
  int n = 0;            // chain, ring, star, complete, random_regular, scale_free
  int side = 0;         // square_lattice: side length m, n = m*m
  int arity = 0;        // kary_tree: children per node
  int depth = 0;        // kary_tree: levels below the root
  int branching = 0;    // dendrimer: branches at every site
  int generations = 0;  // dendrimer: shells around the center
  double rewiring = 0.0;  // small_world: per-vertex rewiring probability
  int attach_edges = 2;   // scale_free: edges added per new vertex

  void validate() const;
  int expected_nodes() const;
  std::string describe() const;
  bool stochastic() const {
    return kind == Topology::small_world || kind == Topology::random_regular ||
           kind == Topology::scale_free;
  }
};

// Deterministic kinds ignore the seed.
Graph generate_graph(const TopologySpec& spec, uint64_t seed = 0);

// One pass over the vertices in index order; for each vertex one incident
// edge may swap endpoints with a random partner edge. Degrees are preserved
// exactly. Throws ConstructionError if a vertex cannot be rewired in 100
// attempts without creating loops, duplicate edges, or disconnection.
Graph rewire_small_world(const Graph& g, double rewiring, uint64_t seed);

enum class PerturbMode { rewire, remove };

const char* perturb_mode_name(PerturbMode m);
PerturbMode perturb_mode_from_name(const std::string& name);

// Applies exactly `count` random link changes (degree-preserving swaps or
// deletions), keeping the graph connected. Throws PerturbationError when a
// change cannot be placed in 100 attempts; achieved() reports how many were.
Graph perturb_links(const Graph& g, PerturbMode mode, int count, uint64_t seed);

void save_graph(const Graph& g, const std::string& path);
Graph load_graph(const std::string& path);

}  // namespace qsw
