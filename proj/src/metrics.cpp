#include "qsw/metrics.hpp"

#include "qsw/errors.hpp"

#include <cmath>
#include <queue>

namespace qsw {

Eigen::MatrixXi all_pairs_shortest_paths(const Graph& g) {
  const int n = g.num_nodes();
  Eigen::MatrixXi d = Eigen::MatrixXi::Constant(n, n, -1);
  std::vector<int> dist(n);
  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int w : g.neighbors(v))
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
    }
    for (int t = 0; t < n; ++t) d(s, t) = dist[t];
  }
  return d;
}

std::vector<int> shortest_path_nodes(const Graph& g, int from, int to) {
  const int n = g.num_nodes();
  if (from < 0 || from >= n || to < 0 || to >= n)
    throw UsageError("path endpoints out of range");
  std::vector<int> pred(n, -1), dist(n, -1);
  dist[from] = 0;
  std::queue<int> q;
  q.push(from);
  while (!q.empty() && dist[to] < 0) {
    int v = q.front();
    q.pop();
    for (int w : g.neighbors(v))
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        pred[w] = v;
        q.push(w);
      }
  }
  if (dist[to] < 0) throw ConstructionError("nodes are not connected");
  std::vector<int> path;
  for (int v = to; v >= 0; v = pred[v]) {
    path.push_back(v);
    if (v == from) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double mean_clustering(const Graph& g) {
  const int n = g.num_nodes();
  double sum = 0.0;
  for (int v = 0; v < n; ++v) {
    int d = g.degree(v);
    if (d <= 1) continue;  // C_v = 0 by convention
    const auto& nb = g.neighbors(v);
    int links = 0;
    for (size_t i = 0; i < nb.size(); ++i)
      for (size_t j = i + 1; j < nb.size(); ++j)
        if (g.has_edge(nb[i], nb[j])) ++links;
    sum += 2.0 * links / (static_cast<double>(d) * (d - 1));
  }
  return sum / n;
}

Eigen::MatrixXd transition_matrix(const Graph& g) {
  const int n = g.num_nodes();
  for (int v = 0; v < n; ++v)
    if (g.degree(v) == 0) throw ConstructionError("isolated node " + std::to_string(v));
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double w = 1.0 / g.degree(j);
    for (int i : g.neighbors(j)) t(i, j) = w;
  }
  return t;
}

GraphMetrics compute_metrics(const Graph& g) {
  if (!g.connected()) throw ConstructionError("metrics need a connected graph");
  const int n = g.num_nodes();
  GraphMetrics m;
  m.shortest_paths = all_pairs_shortest_paths(g);
  long long total = 0;
  int diam = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      total += m.shortest_paths(i, j);
      diam = std::max(diam, m.shortest_paths(i, j));
    }
  m.char_path_length = n > 1 ? 2.0 * static_cast<double>(total) / (static_cast<double>(n) * (n - 1)) : 0.0;
  m.diameter = diam;
  m.clustering = mean_clustering(g);
  m.degrees = g.degrees();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.adjacency());
  Eigen::VectorXd asc = es.eigenvalues();
  m.eigenvalues = asc.reverse();

  std::vector<double> by_mag(asc.data(), asc.data() + n);
  std::sort(by_mag.begin(), by_mag.end(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });
  m.spectral_gap = n > 1 ? std::abs(by_mag[0]) - std::abs(by_mag[1]) : 0.0;

  double tol = 1e-8 * std::max(1.0, std::abs(m.eigenvalues(0)));
  int clusters = 0;
  for (int i = 0; i < n; ++i)
    if (i == 0 || m.eigenvalues(i - 1) - m.eigenvalues(i) > tol) ++clusters;
  m.distinct_eigenvalues = clusters;
  return m;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("pearson needs two equal-length samples");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace qsw
