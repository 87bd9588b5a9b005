#include "qsw/graph.hpp"

#include "qsw/errors.hpp"
#include "qsw/rng.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <sstream>

namespace qsw {

namespace {

Edge canonical(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// edge list + membership matrix; cheap to copy, supports swap/remove with
// rollback for the rewiring loops
struct EdgeSet {
  int n = 0;
  std::vector<Edge> edges;
  std::vector<char> has;

  explicit EdgeSet(const Graph& g) : n(g.num_nodes()), edges(g.edges()), has(static_cast<size_t>(n) * n, 0) {
    for (const Edge& e : edges) set(e.first, e.second, 1);
  }

  char get(int a, int b) const { return has[static_cast<size_t>(a) * n + b]; }
  void set(int a, int b, char v) {
    has[static_cast<size_t>(a) * n + b] = v;
    has[static_cast<size_t>(b) * n + a] = v;
  }

  void replace(size_t idx, Edge e) {
    set(edges[idx].first, edges[idx].second, 0);
    edges[idx] = canonical(e.first, e.second);
    set(e.first, e.second, 1);
  }

  void remove(size_t idx) {
    set(edges[idx].first, edges[idx].second, 0);
    edges[idx] = edges.back();
    edges.pop_back();
  }

  bool connected() const {
    if (n == 0) return false;
    std::vector<std::vector<int>> adj(n);
    for (const Edge& e : edges) {
      adj[e.first].push_back(e.second);
      adj[e.second].push_back(e.first);
    }
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          q.push(w);
        }
    }
    return count == n;
  }

  Graph to_graph() const { return Graph(n, edges); }
};

constexpr int kMaxRetries = 100;

}  // namespace

Graph::Graph(int n_nodes, std::vector<Edge> edges) : n_(n_nodes), edges_(std::move(edges)) {
  if (n_ < 1) throw ConstructionError("graph needs at least one node");
  for (Edge& e : edges_) {
    if (e.first == e.second)
      throw ConstructionError("self-loop at node " + std::to_string(e.first));
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.first < 0 || e.second >= n_)
      throw ConstructionError("edge (" + std::to_string(e.first) + "," +
                              std::to_string(e.second) + ") out of range for n=" +
                              std::to_string(n_));
  }
  std::sort(edges_.begin(), edges_.end());
  for (size_t i = 1; i < edges_.size(); ++i)
    if (edges_[i] == edges_[i - 1])
      throw ConstructionError("duplicate edge (" + std::to_string(edges_[i].first) + "," +
                              std::to_string(edges_[i].second) + ")");
  adj_.assign(n_, {});
  for (const Edge& e : edges_) {
    adj_[e.first].push_back(e.second);
    adj_[e.second].push_back(e.first);
  }
  for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

std::vector<int> Graph::degrees() const {
  std::vector<int> d(n_);
  for (int v = 0; v < n_; ++v) d[v] = degree(v);
  return d;
}

bool Graph::has_edge(int a, int b) const {
  if (a < 0 || b < 0 || a >= n_ || b >= n_) return false;
  const auto& nb = adj_[a];
  return std::binary_search(nb.begin(), nb.end(), b);
}

bool Graph::connected() const {
  std::vector<char> seen(n_, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w : adj_[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        q.push(w);
      }
  }
  return count == n_;
}

Eigen::MatrixXd Graph::adjacency() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
  for (const Edge& e : edges_) {
    a(e.first, e.second) = 1.0;
    a(e.second, e.first) = 1.0;
  }
  return a;
}

const char* topology_name(Topology t) {
  switch (t) {
    case Topology::chain: return "chain";
    case Topology::ring: return "ring";
    case Topology::star: return "star";
    case Topology::complete: return "complete";
    case Topology::square_lattice: return "square_lattice";
    case Topology::kary_tree: return "kary_tree";
    case Topology::dendrimer: return "dendrimer";
    case Topology::small_world: return "small_world";
    case Topology::random_regular: return "random_regular";
    case Topology::scale_free: return "scale_free";
  }
  return "unknown";
}

Topology topology_from_name(const std::string& name) {
  static const std::pair<const char*, Topology> table[] = {
      {"chain", Topology::chain},
      {"ring", Topology::ring},
      {"star", Topology::star},
      {"complete", Topology::complete},
      {"square_lattice", Topology::square_lattice},
      {"lattice", Topology::square_lattice},
      {"kary_tree", Topology::kary_tree},
      {"dendrimer", Topology::dendrimer},
      {"small_world", Topology::small_world},
      {"random_regular", Topology::random_regular},
      {"scale_free", Topology::scale_free},
  };
  for (const auto& [n, t] : table)
    if (name == n) return t;
  throw UsageError("unknown topology '" + name + "'");
}

void TopologySpec::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw UsageError("invalid topology parameters: " + what);
  };
  switch (kind) {
    case Topology::chain:
      need(n >= 2, "chain needs n >= 2");
      break;
    case Topology::ring:
      need(n >= 3, "ring needs n >= 3");
      break;
    case Topology::star:
      need(n >= 2, "star needs n >= 2");
      break;
    case Topology::complete:
      need(n >= 2, "complete needs n >= 2");
      break;
    case Topology::square_lattice:
      need(side >= 2, "square_lattice needs side >= 2");
      break;
    case Topology::kary_tree:
      need(arity >= 1 && depth >= 1, "kary_tree needs arity >= 1 and depth >= 1");
      break;
    case Topology::dendrimer:
      need(branching >= 2 && generations >= 1,
           "dendrimer needs branching >= 2 and generations >= 1");
      break;
    case Topology::small_world:
      need(side >= 3, "small_world needs side >= 3");
      need(rewiring >= 0.0 && rewiring <= 1.0, "rewiring must be in [0,1]");
      break;
    case Topology::random_regular:
      need(n >= 5, "random_regular needs n >= 5");
      break;
    case Topology::scale_free:
      need(attach_edges >= 1, "scale_free needs attach_edges >= 1");
      need(n >= attach_edges + 2, "scale_free needs n >= attach_edges + 2");
      break;
  }
  if (expected_nodes() > 200000) throw UsageError("topology too large");
}

int TopologySpec::expected_nodes() const {
  switch (kind) {
    case Topology::chain:
    case Topology::ring:
    case Topology::star:
    case Topology::complete:
    case Topology::random_regular:
    case Topology::scale_free:
      return n;
    case Topology::square_lattice:
    case Topology::small_world:
      return side * side;
    case Topology::kary_tree: {
      long long total = 1, level = 1;
      for (int d = 0; d < depth; ++d) {
        level *= arity;
        total += level;
        if (total > 200000) return 200001;
      }
      return static_cast<int>(total);
    }
    case Topology::dendrimer: {
      long long total = 1, shell = branching;
      for (int g = 0; g < generations; ++g) {
        total += shell;
        shell *= branching - 1;
        if (total > 200000) return 200001;
      }
      return static_cast<int>(total);
    }
  }
  return 0;
}

std::string TopologySpec::describe() const {
  std::ostringstream out;
  out << topology_name(kind) << "(";
  switch (kind) {
    case Topology::chain:
    case Topology::ring:
    case Topology::star:
    case Topology::complete:
    case Topology::random_regular:
      out << "n=" << n;
      break;
    case Topology::square_lattice:
      out << "side=" << side;
      break;
    case Topology::kary_tree:
      out << "arity=" << arity << ",depth=" << depth;
      break;
    case Topology::dendrimer:
      out << "branching=" << branching << ",generations=" << generations;
      break;
    case Topology::small_world:
      out << "side=" << side << ",rewiring=" << rewiring;
      break;
    case Topology::scale_free:
      out << "n=" << n << ",attach_edges=" << attach_edges;
      break;
  }
  out << ")";
  return out.str();
}

namespace {

Graph make_chain(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return Graph(n, std::move(e));
}

Graph make_ring(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  e.push_back({0, n - 1});
  return Graph(n, std::move(e));
}

Graph make_star(int n) {
  std::vector<Edge> e;
  for (int i = 1; i < n; ++i) e.push_back({0, i});
  return Graph(n, std::move(e));
}

Graph make_complete(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.push_back({i, j});
  return Graph(n, std::move(e));
}

// row-major numbering; node (r,c) = r*m + c, corners at 0 and m*m-1
Graph make_square_lattice(int m) {
  std::vector<Edge> e;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      int v = r * m + c;
      if (c + 1 < m) e.push_back({v, v + 1});
      if (r + 1 < m) e.push_back({v, v + m});
    }
  return Graph(m * m, std::move(e));
}

// heap numbering: children of v are arity*v + 1 .. arity*v + arity
Graph make_kary_tree(int arity, int depth) {
  long long total = 1, level = 1;
  for (int d = 0; d < depth; ++d) {
    level *= arity;
    total += level;
  }
  int n = static_cast<int>(total);
  std::vector<Edge> e;
  for (int v = 1; v < n; ++v) e.push_back({(v - 1) / arity, v});
  return Graph(n, std::move(e));
}

// center 0 with `branching` neighbors; every later generation adds
// branching-1 children to each node of the previous shell
Graph make_dendrimer(int branching, int generations) {
  std::vector<Edge> e;
  std::vector<int> shell = {0};
  int next = 1;
  for (int g = 0; g < generations; ++g) {
    std::vector<int> grown;
    int kids = (g == 0) ? branching : branching - 1;
    for (int parent : shell)
      for (int c = 0; c < kids; ++c) {
        e.push_back({parent, next});
        grown.push_back(next);
        ++next;
      }
    shell = std::move(grown);
  }
  return Graph(next, std::move(e));
}

// ring with first and second neighbours; exactly 4-regular for n >= 5
Graph make_circulant_c12(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) {
    e.push_back(canonical(i, (i + 1) % n));
    e.push_back(canonical(i, (i + 2) % n));
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return Graph(n, std::move(e));
}

Graph make_scale_free(int n, int v, uint64_t seed) {
  Rng rng(seed);
  std::vector<Edge> e;
  std::vector<int> deg(n, 0);
  int seed_nodes = v + 1;
  for (int i = 0; i < seed_nodes; ++i)
    for (int j = i + 1; j < seed_nodes; ++j) {
      e.push_back({i, j});
      ++deg[i];
      ++deg[j];
    }
  for (int newcomer = seed_nodes; newcomer < n; ++newcomer) {
    long long total = 0;
    for (int i = 0; i < newcomer; ++i) total += deg[i];
    std::vector<int> targets;
    while (static_cast<int>(targets.size()) < v) {
      double x = rng.uniform01() * static_cast<double>(total);
      long long acc = 0;
      int pick = newcomer - 1;
      for (int i = 0; i < newcomer; ++i) {
        acc += deg[i];
        if (x < static_cast<double>(acc)) {
          pick = i;
          break;
        }
      }
      if (std::find(targets.begin(), targets.end(), pick) == targets.end())
        targets.push_back(pick);
    }
    for (int t : targets) {
      e.push_back(canonical(newcomer, t));
      ++deg[newcomer];
      ++deg[t];
    }
  }
  return Graph(n, std::move(e));
}

}  // namespace

Graph generate_graph(const TopologySpec& spec, uint64_t seed) {
  spec.validate();
  switch (spec.kind) {
    case Topology::chain: return make_chain(spec.n);
    case Topology::ring: return make_ring(spec.n);
    case Topology::star: return make_star(spec.n);
    case Topology::complete: return make_complete(spec.n);
    case Topology::square_lattice: return make_square_lattice(spec.side);
    case Topology::kary_tree: return make_kary_tree(spec.arity, spec.depth);
    case Topology::dendrimer: return make_dendrimer(spec.branching, spec.generations);
    case Topology::small_world:
      return rewire_small_world(make_square_lattice(spec.side), spec.rewiring, seed);
    case Topology::random_regular:
      return rewire_small_world(make_circulant_c12(spec.n), 1.0, seed);
    case Topology::scale_free:
      return make_scale_free(spec.n, spec.attach_edges, seed);
  }
  throw ConstructionError("unhandled topology");
}

namespace {

// Tries one degree-preserving swap: edge `idx` {a,b} and a partner edge not
// touching a or b exchange endpoints. Returns true once a swap passing the
// loop/duplicate/connectivity checks is applied.
bool try_swap(EdgeSet& es, size_t idx, Rng& rng, int retries) {
  const Edge e1 = es.edges[idx];
  for (int attempt = 0; attempt < retries; ++attempt) {
    std::vector<size_t> candidates;
    candidates.reserve(es.edges.size());
    for (size_t j = 0; j < es.edges.size(); ++j) {
      if (j == idx) continue;
      const Edge& e2 = es.edges[j];
      if (e2.first == e1.first || e2.first == e1.second || e2.second == e1.first ||
          e2.second == e1.second)
        continue;
      candidates.push_back(j);
    }
    if (candidates.empty()) return false;
    size_t jdx = candidates[rng.below(candidates.size())];
    Edge e2 = es.edges[jdx];
    if (rng.bernoulli(0.5)) std::swap(e2.first, e2.second);
    // proposed: {a, e2.second} and {e2.first, b}
    Edge n1 = canonical(e1.first, e2.second);
    Edge n2 = canonical(e2.first, e1.second);
    if (es.get(n1.first, n1.second) || es.get(n2.first, n2.second)) continue;
    Edge old2 = es.edges[jdx];
    es.replace(idx, n1);
    es.replace(jdx, n2);
    if (es.connected()) return true;
    es.replace(idx, e1);
    es.replace(jdx, old2);
  }
  return false;
}

}  // namespace

Graph rewire_small_world(const Graph& g, double rewiring, uint64_t seed) {
  if (rewiring < 0.0 || rewiring > 1.0) throw UsageError("rewiring must be in [0,1]");
  EdgeSet es(g);
  Rng rng(seed);
  for (int v = 0; v < g.num_nodes(); ++v) {
    if (!rng.bernoulli(rewiring)) continue;
    std::vector<size_t> incident;
    for (size_t j = 0; j < es.edges.size(); ++j)
      if (es.edges[j].first == v || es.edges[j].second == v) incident.push_back(j);
    if (incident.empty()) continue;
    size_t idx = incident[rng.below(incident.size())];
    if (!try_swap(es, idx, rng, kMaxRetries))
      throw ConstructionError("rewiring stuck at vertex " + std::to_string(v));
  }
  return es.to_graph();
}

const char* perturb_mode_name(PerturbMode m) {
  return m == PerturbMode::rewire ? "rewire" : "delete";
}

PerturbMode perturb_mode_from_name(const std::string& name) {
  if (name == "rewire") return PerturbMode::rewire;
  if (name == "delete" || name == "remove") return PerturbMode::remove;
  throw UsageError("unknown perturbation mode '" + name + "'");
}

Graph perturb_links(const Graph& g, PerturbMode mode, int count, uint64_t seed) {
  if (count < 0) throw UsageError("perturbation count must be >= 0");
  EdgeSet es(g);
  Rng rng(seed);
  for (int done = 0; done < count; ++done) {
    bool ok = false;
    if (mode == PerturbMode::rewire) {
      for (int attempt = 0; attempt < kMaxRetries && !ok; ++attempt) {
        size_t idx = es.edges.size() ? rng.below(es.edges.size()) : 0;
        if (es.edges.empty()) break;
        ok = try_swap(es, idx, rng, 1);
      }
    } else {
      for (int attempt = 0; attempt < kMaxRetries && !ok; ++attempt) {
        if (es.edges.empty()) break;
        size_t idx = rng.below(es.edges.size());
        Edge removed = es.edges[idx];
        es.remove(idx);
        if (es.connected()) {
          ok = true;
        } else {
          es.edges.push_back(removed);
          es.set(removed.first, removed.second, 1);
        }
      }
    }
    if (!ok)
      throw PerturbationError("could not place link change " + std::to_string(done + 1) +
                                  " of " + std::to_string(count),
                              done);
  }
  return es.to_graph();
}

void save_graph(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "N " << g.num_nodes() << "\n";
  for (const Edge& e : g.edges()) out << e.first << " " << e.second << "\n";
  if (!out) throw IoError("write failed on '" + path + "'");
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string tag;
  int n = 0;
  if (!(in >> tag >> n) || tag != "N") throw IoError("bad header in '" + path + "'");
  std::vector<Edge> edges;
  int a, b;
  while (in >> a >> b) edges.push_back({a, b});
  if (!in.eof()) throw IoError("trailing garbage in '" + path + "'");
  return Graph(n, std::move(edges));
}

}  // namespace qsw
