#pragma once

#include "qsw/dynamics.hpp"
#include "qsw/graph.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace qsw {

// Runs fn(0..n_tasks-1) over a small thread pool. Each task must draw its
// randomness from a seed split off a master seed, never from shared state, so
// the result is identical for any thread count.
void run_parallel(size_t n_tasks, const std::function<void(size_t)>& fn, int threads);

// flag > 0 wins, then the THREADS environment variable, then the hardware.
int effective_threads(int requested);

struct SweepPoint {
  double x = 0.0;
  double mean = 0.0;
  std::vector<double> per_seed;
};

struct EfficiencyCurve {
  std::string abscissa;  // "p", "rewiring", "links_changed", "n_nodes"
  std::vector<SweepPoint> points;

  // echoed into CSV/manifest output so a run can be replayed
  std::string topology;
  std::vector<uint64_t> seeds;
  double t_bar = 0.0;
  bool t_bar_threshold_met = true;
  double gamma = 1.0;
  std::string initial;
  int sink_site = -1;
  double dt_scale = 1.0;
};

struct POpt {
  double p_opt = 0.0;
  double e_max = 0.0;
  bool flat = false;  // max - min below 1e-6; p_opt is then meaningless
};

// Grid argmax (ties to the smaller abscissa) plus one parabolic refinement
// through the winning point and its neighbors, clamped to that bracket.
// Boundary maxima are returned unrefined.
POpt find_p_opt(const EfficiencyCurve& curve);

// 21 points: 0, 0.05, ..., 1.
std::vector<double> default_p_grid();

enum class InitialPolicy { fixed_site, average_all };

struct SweepRequest {
  TopologySpec spec;
  InitialPolicy policy = InitialPolicy::fixed_site;
  int site = 0;
  std::vector<double> p_grid;      // empty = default grid
  int n_seeds = 20;                // forced to 1 for deterministic topologies
  uint64_t master_seed = 1;
  double gamma = 1.0;
  int sink_site = -1;
  AmplitudeConvention convention = AmplitudeConvention::sqrt_rate;
  IntegratorSettings settings;
  double t_bar = 0.0;              // 0 = select on the first realization
  int threads = 1;
};

// E(p, t_bar) against p, ensemble-averaged for stochastic topologies.
// average_all runs a single maximally mixed initial state; by linearity this
// equals the mean of the per-site curves.
EfficiencyCurve sweep_p(const SweepRequest& req);

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
  std::vector<std::string> warnings;
};

// OLS on ln y vs ln x. Non-positive coordinates are dropped with a warning;
// fewer than 3 surviving points is an error.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

struct ScalingRow {
  int n_nodes = 0;
  double p = 0.0;
  double mean = 0.0;
  std::vector<double> per_seed;
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  std::vector<std::pair<double, PowerLawFit>> fits;  // per p, E vs N
};

// E(p, 5N) across sizes of one family; one fit per p.
ScalingStudy scaling_study(const std::vector<TopologySpec>& sizes,
                           const std::vector<double>& ps, InitialPolicy policy, int site,
                           int n_seeds, uint64_t master_seed, double gamma,
                           const IntegratorSettings& settings, int threads);

struct SmallWorldSweep {
  std::vector<double> rs;
  std::vector<EfficiencyCurve> curves;
  std::vector<POpt> popts;
  std::vector<double> flatness;  // max - min of each mean curve
};

SmallWorldSweep small_world_sweep(int side, const std::vector<double>& rs,
                                  const std::vector<double>& p_grid, int n_seeds,
                                  uint64_t master_seed, double gamma,
                                  const IntegratorSettings& settings, int threads);

struct RewiringMatch {
  double p = 0.0;
  double target = 0.0;    // QSW efficiency to be matched
  double r_e = 0.0;       // rewiring fraction whose classical walk matches it
  double achieved = 0.0;  // classical efficiency at r_e
  double mismatch = 0.0;  // |achieved - target|
  int iterations = 0;
  bool bracketed = true;  // target inside [E_crw(0), E_crw(1)]
};

struct EffectiveRewiring {
  EfficiencyCurve qsw_curve;
  std::vector<RewiringMatch> matches;
  PowerLawFit fit;  // r_e vs p over the bracketed matches
  double t_bar = 0.0;
};

// For each p, bisects the rewiring fraction r until the classical efficiency
// on rewired lattices (ensemble mean over a fixed seed list) matches the
// lattice QSW efficiency at that p. Both sides use the same t_bar, source,
// and sink.
EffectiveRewiring effective_rewiring(int side, const std::vector<double>& ps, int n_seeds,
                                     uint64_t master_seed, double gamma,
                                     const IntegratorSettings& settings, int threads);

struct RobustnessCurves {
  std::vector<int> counts;
  std::vector<EfficiencyCurve> curves;
  std::vector<POpt> popts;
};

// p_opt stability of the lattice under random link rewiring or deletion.
RobustnessCurves robustness_curve(int side, PerturbMode mode, const std::vector<int>& counts,
                                  const std::vector<double>& p_grid, int n_seeds,
                                  uint64_t master_seed, double gamma,
                                  const IntegratorSettings& settings, int threads);

struct ScanRow {
  std::string family;
  uint64_t seed = 0;
  int n_nodes = 0;
  int diameter = 0;
  int initial_site = 0;
  int sink_site = 0;
  double efficiency = 0.0;  // classical, t = 5N
};

struct DiameterScan {
  std::vector<ScanRow> rows;
  double correlation = 0.0;  // Pearson, diameter vs efficiency
};

// Classical transport efficiency against graph diameter across families,
// random distinct source/sink per row.
DiameterScan diameter_efficiency_scan(const std::vector<TopologySpec>& specs, int replicates,
                                      uint64_t master_seed, double gamma, int threads);

}  // namespace qsw
