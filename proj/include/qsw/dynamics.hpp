#pragma once

#include "qsw/graph.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace qsw {

// Lindblad amplitude convention. sqrt_rate uses L_ij = sqrt(T_ij) |i><j| so
// the p = 1 limit reproduces the classical walk exactly; literal uses
// L_ij = T_ij |i><j| (rates T^2), kept behind this switch for comparison.
enum class AmplitudeConvention { sqrt_rate, literal };

struct QswConfig {
  double p = 0.1;       // 0 = unitary walk, 1 = classical walk
  double gamma = 1.0;   // sink rate; the sink term is not scaled by p
  int sink_site = -1;   // -1 resolves to node n-1
  AmplitudeConvention convention = AmplitudeConvention::sqrt_rate;

  void validate(int n_nodes) const;
  int resolved_sink(int n_nodes) const { return sink_site < 0 ? n_nodes - 1 : sink_site; }
};

struct IntegratorSettings {
  double dt = 0.0;        // explicit step; 0 picks 0.05 / max(|A| estimate, gamma)
  double dt_scale = 1.0;  // multiplies the automatic step
  int max_samples = 512;  // cap on recorded trajectory points
  bool record_populations = false;

  void validate() const;
};

struct InitialState {
  enum class Kind { site, mixture };
  Kind kind = Kind::site;
  int site = 0;

  static InitialState at_site(int s) { return {Kind::site, s}; }
  static InitialState mixture() { return {Kind::mixture, 0}; }
  std::string describe() const;
  void validate(int n_nodes) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> efficiency;                // E(t), equals absorbed weight
  std::vector<Eigen::VectorXd> populations;      // diag(rho), when requested
  Eigen::MatrixXcd final_state;                  // rho at t_final
  double dt_used = 0.0;
  long long steps = 0;
  double conservation_drift = 0.0;               // max |tr rho + E - 1| seen

  double final_efficiency() const { return efficiency.empty() ? 0.0 : efficiency.back(); }
};

// Precomputed right-hand side of the master equation
//   drho = -i(1-p)[A,rho] + p D(rho) - gamma {P_sink, rho},
// with D in the chosen convention, plus the absorbed-weight flow
// dE = 2 gamma rho_ss. Kernel cost is O(E*N + N^2) per call.
class QswGenerator {
 public:
  QswGenerator(const Graph& g, const QswConfig& cfg);

  int dim() const { return n_; }
  double norm_estimate() const { return norm_estimate_; }
  double default_dt(const IntegratorSettings& s) const;

  void derivative(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& drho, double& dsunk) const;

 private:
  int n_;
  int sink_;
  double p_;
  double gamma_;
  AmplitudeConvention convention_;
  double norm_estimate_;
  std::vector<int> offsets_;    // CSR over sorted neighbor lists
  std::vector<int> nbr_;
  std::vector<double> invdeg_;
  std::vector<double> w2_;      // literal convention: column sums of T.^2
  mutable Eigen::MatrixXcd m_;  // rho*A scratch; makes derivative non-reentrant
};

Eigen::MatrixXcd initial_density(const InitialState& init, int n_nodes);

Trajectory evolve_qsw(const Graph& g, const QswConfig& cfg, const InitialState& init,
                      double t_final, const IntegratorSettings& settings = {});

double transfer_efficiency(const Graph& g, const QswConfig& cfg, const InitialState& init,
                           double t_bar, const IntegratorSettings& settings = {});

struct TbarResult {
  double t_bar = 0.0;
  bool threshold_met = false;  // some probe p reached E >= 0.99
  double best_efficiency = 0.0;
};

// Doubling schedule t = 5N * 2^k (capped at 64 * 5N); stops once any probe
// mixing weight p in {0, 0.1, 0.5, 1} has E(p, t) >= 0.99. Probe states are
// advanced incrementally, so the total cost is one trajectory per probe.
TbarResult select_tbar(const Graph& g, const QswConfig& cfg, const InitialState& init,
                       const IntegratorSettings& settings = {});

struct InvariantSubspace {
  int dimension = 0;
  Eigen::MatrixXd projector;  // onto states with no amplitude at the sink, ever

  double trapped_weight(int site) const { return projector(site, site); }
};

// Dark states of the p = 0 walk: per eigenvalue cluster of A, the span of the
// cluster minus its single component visible at the sink site.
InvariantSubspace invariant_subspace(const Graph& g, int sink_site);

struct CrwTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> efficiency;  // stays zero without a sink
  double dt_used = 0.0;
};

// Classical random walk dq/dt = (T - 1)q, fixed-step RK4.
CrwTrajectory crw_evolve(const Eigen::MatrixXd& t_matrix, const Eigen::VectorXd& q0,
                         double t_final, double dt, int max_samples = 512);

// Same walk with an absorbing sink: dq = (T - 1)q - 2 gamma e_s e_s^T q.
// Matches the p = 1 master equation populations exactly.
CrwTrajectory crw_sink_evolve(const Graph& g, double gamma, int sink_site,
                              const Eigen::VectorXd& q0, double t_final, double dt = 0.0,
                              int max_samples = 512);

// Stationary distribution d_i / sum(d).
Eigen::VectorXd crw_stationary(const Graph& g);

// Absorbed weight of the classical walk with sink at time t, computed exactly:
// T - 1 - 2 gamma P_s is similar to a symmetric matrix under D^(1/2), so the
// propagator comes from one real eigendecomposition instead of time stepping.
double classical_efficiency(const Graph& g, double gamma, int sink_site,
                            const Eigen::VectorXd& q0, double t);

double purity(const Eigen::MatrixXcd& rho);

}  // namespace qsw
