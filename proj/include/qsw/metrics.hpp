#pragma once

#include "qsw/graph.hpp"

#include <Eigen/Dense>

#include <vector>

namespace qsw {

struct GraphMetrics {
  Eigen::MatrixXi shortest_paths;   // hop counts, BFS
  double char_path_length = 0.0;    // mean over unordered pairs
  int diameter = 0;
  double clustering = 0.0;          // mean local coefficient, C_i = 0 when deg <= 1
  std::vector<int> degrees;
  Eigen::VectorXd eigenvalues;      // adjacency spectrum, descending
  double spectral_gap = 0.0;        // gap between the two largest |lambda|
  int distinct_eigenvalues = 0;     // eigenvalue clusters at tolerance 1e-8 * max(1, |lambda_1|)
};

// Requires a connected graph (path lengths would be infinite otherwise).
GraphMetrics compute_metrics(const Graph& g);

// BFS hop counts from every source.
Eigen::MatrixXi all_pairs_shortest_paths(const Graph& g);

// One geodesic between two nodes (BFS predecessors), as a node sequence.
std::vector<int> shortest_path_nodes(const Graph& g, int from, int to);

// Column-stochastic classical transition matrix: T(i,j) = A_ij / deg(j).
Eigen::MatrixXd transition_matrix(const Graph& g);

double mean_clustering(const Graph& g);

// Pearson correlation; returns 0 when either side has zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qsw
