#include "doctest.h"

#include "qsw/dynamics.hpp"
#include "qsw/errors.hpp"
#include "qsw/graph.hpp"
#include "qsw/metrics.hpp"
#include "qsw/rng.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <vector>

using namespace qsw;

namespace {

TopologySpec sized(Topology kind, int n) {
  TopologySpec s;
  s.kind = kind;
  s.n = n;
  return s;
}

// independent right-hand side, written straight from the Lindblad form with
// jump operators |i><j| over edges; deliberately naive so it shares nothing
// with the production kernel
Eigen::MatrixXcd naive_rhs(const Graph& g, const QswConfig& cfg, const Eigen::MatrixXcd& rho) {
  const int n = g.num_nodes();
  const int s = cfg.resolved_sink(n);
  const std::complex<double> im(0.0, 1.0);
  Eigen::MatrixXd a = g.adjacency();
  Eigen::MatrixXd t = transition_matrix(g);
  Eigen::MatrixXcd d = -im * (1.0 - cfg.p) * (a * rho - rho * a);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (a(i, j) == 0.0) continue;
      double rate = cfg.convention == AmplitudeConvention::sqrt_rate ? t(i, j)
                                                                     : t(i, j) * t(i, j);
      d(i, i) += cfg.p * rate * rho(j, j);          // L rho L^dag
      d.row(j) -= 0.5 * cfg.p * rate * rho.row(j);  // -1/2 {L^dag L, rho}
      d.col(j) -= 0.5 * cfg.p * rate * rho.col(j);
    }
  d.row(s) -= cfg.gamma * rho.row(s);
  d.col(s) -= cfg.gamma * rho.col(s);
  return d;
}

// column-major vectorization of the naive generator
Eigen::MatrixXcd liouvillian(const Graph& g, const QswConfig& cfg) {
  const int n = g.num_nodes();
  Eigen::MatrixXcd l(n * n, n * n);
  for (int k = 0; k < n * n; ++k) {
    Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(n, n);
    basis(k % n, k / n) = 1.0;
    Eigen::MatrixXcd dk = naive_rhs(g, cfg, basis);
    l.col(k) = Eigen::Map<Eigen::VectorXcd>(dk.data(), n * n);
  }
  return l;
}

Eigen::MatrixXcd propagate_exact(const Graph& g, const QswConfig& cfg,
                                 const Eigen::MatrixXcd& rho0, double t) {
  const int n = g.num_nodes();
  Eigen::MatrixXcd l = liouvillian(g, cfg);
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), n * n);
  Eigen::VectorXcd vt = (l * t).exp() * v;
  return Eigen::Map<Eigen::MatrixXcd>(vt.data(), n, n);
}

Eigen::MatrixXcd random_hermitian(int n, Rng& rng) {
  Eigen::MatrixXcd b(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      b(i, j) = std::complex<double>(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
  return 0.5 * (b + b.adjoint());
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

TEST_CASE("kernel derivative matches the naive Lindblad form") {
  Rng rng(808);
  for (AmplitudeConvention conv : {AmplitudeConvention::sqrt_rate, AmplitudeConvention::literal}) {
    for (int trial = 0; trial < 6; ++trial) {
      Graph g = random_connected(5 + static_cast<int>(rng.below(4)), 0.45, rng);
      const int n = g.num_nodes();
      QswConfig cfg;
      cfg.p = rng.uniform01();
      cfg.gamma = 0.2 + rng.uniform01();
      cfg.sink_site = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
      cfg.convention = conv;
      Eigen::MatrixXcd rho = random_hermitian(n, rng);
      Eigen::MatrixXcd want = naive_rhs(g, cfg, rho);

      QswGenerator gen(g, cfg);
      Eigen::MatrixXcd got(n, n);
      double dsunk = 0.0;
      gen.derivative(rho, got, dsunk);
      CHECK((got - want).norm() <= 1e-12 * std::max(1.0, want.norm()));
      CHECK(dsunk ==
            doctest::Approx(2.0 * cfg.gamma * rho(cfg.sink_site, cfg.sink_site).real())
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("evolution matches the exact matrix-exponential propagator") {
  Graph g = generate_graph(sized(Topology::chain, 5));
  for (AmplitudeConvention conv : {AmplitudeConvention::sqrt_rate, AmplitudeConvention::literal})
    for (double p : {0.0, 0.3, 1.0}) {
      QswConfig cfg;
      cfg.p = p;
      cfg.gamma = 0.7;
      cfg.convention = conv;
      IntegratorSettings settings;
      settings.dt = 0.004;  // small enough that RK4 error sits below the tolerance
      settings.record_populations = true;
      const double t = 4.0;
      Trajectory traj = evolve_qsw(g, cfg, InitialState::at_site(0), t, settings);

      Eigen::MatrixXcd rho_t = propagate_exact(g, cfg, initial_density(InitialState::at_site(0), 5), t);
      CHECK(traj.times.back() == doctest::Approx(t));
      Eigen::VectorXd want_pop = rho_t.diagonal().real();
      CHECK((traj.populations.back() - want_pop).norm() <= 1e-8);
      CHECK((traj.final_state - rho_t).norm() <= 1e-8);
      // absorbed weight equals the trace the sink has eaten
      CHECK(traj.final_efficiency() == doctest::Approx(1.0 - rho_t.real().trace()).epsilon(1e-8));
    }
}

TEST_CASE("conservation holds on 50 random trajectories") {
  Rng rng(616);
  for (int trial = 0; trial < 50; ++trial) {
    Graph g = random_connected(6 + static_cast<int>(rng.below(7)), 0.35, rng);
    QswConfig cfg;
    cfg.p = rng.uniform01();
    cfg.gamma = 0.1 + 2.0 * rng.uniform01();
    cfg.sink_site = g.num_nodes() - 1;
    Trajectory traj = evolve_qsw(g, cfg, InitialState::at_site(0), 5.0);
    CHECK(traj.conservation_drift <= 1e-6);
    CHECK(traj.final_efficiency() >= 0.0);
    CHECK(traj.final_efficiency() <= 1.0 + 1e-9);
  }
}

TEST_CASE("rk4 shows fourth-order convergence") {
  Graph g = generate_graph(sized(Topology::chain, 4));
  QswConfig cfg;
  cfg.p = 0.4;
  cfg.gamma = 0.8;
  const double t = 1.6;
  Eigen::MatrixXcd exact = propagate_exact(g, cfg, initial_density(InitialState::at_site(0), 4), t);
  Eigen::VectorXd want_pop = exact.diagonal().real();

  auto error_at = [&](double dt) {
    IntegratorSettings settings;
    settings.dt = dt;
    settings.record_populations = true;
    Trajectory traj = evolve_qsw(g, cfg, InitialState::at_site(0), t, settings);
    return (traj.populations.back() - want_pop).norm();
  };
  const double e1 = error_at(0.2);
  const double e2 = error_at(0.1);
  const double ratio = e1 / e2;
  CHECK(ratio > 16.0 * 0.7);
  CHECK(ratio < 16.0 * 1.3);
}

TEST_CASE("p=1 reproduces the classical walk") {
  TopologySpec spec;
  spec.kind = Topology::square_lattice;
  spec.side = 4;
  Graph g = generate_graph(spec);
  const int n = g.num_nodes();
  QswConfig cfg;
  cfg.p = 1.0;
  cfg.gamma = 1.0;
  IntegratorSettings settings;
  settings.dt = 0.01;
  settings.record_populations = true;
  settings.max_samples = 7;
  const double t = 6.0;
  Trajectory quantum = evolve_qsw(g, cfg, InitialState::at_site(0), t, settings);

  Eigen::VectorXd q0 = Eigen::VectorXd::Zero(n);
  q0[0] = 1.0;
  CrwTrajectory classical = crw_sink_evolve(g, 1.0, n - 1, q0, t, 0.01, 7);
  REQUIRE(classical.times.size() == quantum.times.size());
  for (size_t i = 0; i < quantum.times.size(); ++i) {
    CHECK(quantum.times[i] == doctest::Approx(classical.times[i]));
    CHECK((quantum.populations[i] - classical.states[i]).lpNorm<Eigen::Infinity>() <= 1e-6);
    CHECK(std::abs(quantum.efficiency[i] - classical.efficiency[i]) <= 1e-6);
  }
}

TEST_CASE("unitary limit preserves purity") {
  Graph g = generate_graph(sized(Topology::ring, 8));
  QswConfig cfg;
  cfg.p = 0.0;
  cfg.gamma = 0.0;
  IntegratorSettings settings;
  settings.dt = 0.005;  // RK4 damps the fastest coherences by ~dt^5 per unit time
  Trajectory traj = evolve_qsw(g, cfg, InitialState::at_site(0), 7.3, settings);
  CHECK(std::abs(purity(traj.final_state) - 1.0) <= 1e-8);
  CHECK(traj.final_efficiency() == doctest::Approx(0.0));

  // any decoherence degrades purity
  cfg.p = 0.3;
  Trajectory mixed = evolve_qsw(g, cfg, InitialState::at_site(0), 7.3, settings);
  CHECK(purity(mixed.final_state) < 0.9);
}

TEST_CASE("complete graph dark subspace") {
  Graph g6 = generate_graph(sized(Topology::complete, 6));
  InvariantSubspace sub6 = invariant_subspace(g6, 5);
  CHECK(sub6.dimension == 4);
  CHECK(sub6.trapped_weight(0) == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(sub6.trapped_weight(5) == doctest::Approx(0.0).epsilon(1e-10));
  // projector is idempotent and symmetric
  CHECK((sub6.projector * sub6.projector - sub6.projector).norm() <= 1e-10);
  CHECK((sub6.projector - sub6.projector.transpose()).norm() <= 1e-12);

  Graph g20 = generate_graph(sized(Topology::complete, 20));
  InvariantSubspace sub20 = invariant_subspace(g20, 19);
  CHECK(sub20.dimension == 18);
  CHECK(sub20.trapped_weight(0) == doctest::Approx(18.0 / 19.0).epsilon(1e-10));
}

TEST_CASE("trapped weight bounds the unitary walk's efficiency") {
  Graph g = generate_graph(sized(Topology::complete, 6));
  QswConfig cfg;
  cfg.p = 0.0;
  cfg.gamma = 1.0;
  Trajectory traj = evolve_qsw(g, cfg, InitialState::at_site(0), 400.0);
  const double trapped = invariant_subspace(g, 5).trapped_weight(0);
  CHECK(traj.final_efficiency() == doctest::Approx(1.0 - trapped).epsilon(1e-3));
}

TEST_CASE("chain geometry frees the walk: efficiency keeps growing") {
  Graph g = generate_graph(sized(Topology::chain, 8));
  QswConfig cfg;
  cfg.p = 0.2;
  Trajectory traj = evolve_qsw(g, cfg, InitialState::at_site(0), 60.0);
  for (size_t i = 1; i < traj.efficiency.size(); ++i)
    CHECK(traj.efficiency[i] >= traj.efficiency[i - 1] - 1e-12);
  CHECK(traj.final_efficiency() > 0.5);
}

TEST_CASE("mixture state equals the average over site states") {
  Graph g = generate_graph(sized(Topology::star, 6));
  QswConfig cfg;
  cfg.p = 0.3;
  IntegratorSettings settings;
  settings.record_populations = true;
  const double t = 8.0;
  Trajectory mix = evolve_qsw(g, cfg, InitialState::mixture(), t, settings);

  Eigen::VectorXd mean_pop = Eigen::VectorXd::Zero(6);
  double mean_e = 0.0;
  for (int s = 0; s < 6; ++s) {
    Trajectory traj = evolve_qsw(g, cfg, InitialState::at_site(s), t, settings);
    mean_pop += traj.populations.back() / 6.0;
    mean_e += traj.final_efficiency() / 6.0;
  }
  CHECK(std::abs(mix.final_efficiency() - mean_e) <= 1e-12);
  CHECK((mix.populations.back() - mean_pop).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("classical efficiency matches time stepping and the expm oracle") {
  Rng rng(99);
  Graph g = random_connected(9, 0.3, rng);
  const int n = g.num_nodes();
  Eigen::VectorXd q0 = Eigen::VectorXd::Zero(n);
  q0[2] = 1.0;
  const double gamma = 0.9;
  const double t = 25.0;

  const double exact = classical_efficiency(g, gamma, n - 1, q0, t);
  CrwTrajectory stepped = crw_sink_evolve(g, gamma, n - 1, q0, t);
  CHECK(exact == doctest::Approx(stepped.efficiency.back()).epsilon(1e-8));

  // expm of the explicit generator T - 1 - 2 gamma P_s
  Eigen::MatrixXd m = transition_matrix(g) - Eigen::MatrixXd::Identity(n, n);
  m(n - 1, n - 1) -= 2.0 * gamma;
  Eigen::VectorXd qt = (m * t).exp() * q0;
  CHECK(exact == doctest::Approx(1.0 - qt.sum()).epsilon(1e-10));
}

TEST_CASE("select_tbar finds a saturating horizon") {
  Graph g = generate_graph(sized(Topology::chain, 6));
  QswConfig cfg;
  TbarResult tb = select_tbar(g, cfg, InitialState::mixture());
  CHECK(tb.threshold_met);
  CHECK(tb.best_efficiency >= 0.99);
  // horizon follows the 5N * 2^k schedule
  double k = std::log2(tb.t_bar / 30.0);
  CHECK(k == doctest::Approx(std::round(k)));
  CHECK(tb.t_bar <= 64.0 * 30.0);
}

TEST_CASE("config validation") {
  QswConfig cfg;
  cfg.p = -0.1;
  CHECK_THROWS_AS(cfg.validate(5), UsageError);
  cfg.p = 1.1;
  CHECK_THROWS_AS(cfg.validate(5), UsageError);
  cfg.p = 0.5;
  cfg.gamma = -1.0;
  CHECK_THROWS_AS(cfg.validate(5), UsageError);
  cfg.gamma = 1.0;
  cfg.sink_site = 5;
  CHECK_THROWS_AS(cfg.validate(5), UsageError);
  cfg.sink_site = -1;
  CHECK(cfg.resolved_sink(5) == 4);
  CHECK_THROWS_AS(InitialState::at_site(9).validate(5), UsageError);
  IntegratorSettings s;
  s.dt = -0.5;
  CHECK_THROWS_AS(s.validate(), UsageError);
  s.dt = 0.0;
  s.max_samples = 1;
  CHECK_THROWS_AS(s.validate(), UsageError);
}

TEST_CASE("initial density shapes") {
  Eigen::MatrixXcd site = initial_density(InitialState::at_site(2), 4);
  CHECK(site(2, 2).real() == doctest::Approx(1.0));
  CHECK(site.real().trace() == doctest::Approx(1.0));
  CHECK(site.norm() == doctest::Approx(1.0));

  Eigen::MatrixXcd mix = initial_density(InitialState::mixture(), 4);
  CHECK(mix(0, 0).real() == doctest::Approx(0.25));
  CHECK(mix(1, 2).real() == doctest::Approx(0.0));
  CHECK(mix.real().trace() == doctest::Approx(1.0));
}
