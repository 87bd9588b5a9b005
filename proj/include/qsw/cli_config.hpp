#pragma once

#include "qsw/graph.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qsw {

// Everything the CLI can be told, after merging flags > config file > defaults.
struct RunConfig {
  std::string command;
  bool help_requested = false;
  std::string help_text;

  // graph source
  std::string topology;
  int n = 0;
  int side = 0;
  int arity = 0;
  int depth = 0;
  int branching = 0;
  int generations = 0;
  int attach_edges = 2;
  double rewiring = 0.0;
  std::string graph_in;
  uint64_t seed = 1;

  // dynamics
  double p = 0.1;
  double gamma = 1.0;
  int sink_site = -1;
  std::string convention = "sqrt_rate";
  int initial_site = 0;
  bool mixture = false;
  double t_final = 0.0;  // 0 = pick via select_tbar
  double dt = 0.0;
  double dt_scale = 1.0;
  int max_samples = 512;
  bool populations = false;

  // sweep
  std::string policy = "fixed";
  int seeds = 20;
  int p_points = 21;
  std::string p_list;  // explicit comma-separated grid, overrides p_points
  double t_bar = 0.0;

  // experiment
  std::string preset;

  // output
  std::string out;
  std::string svg;
  std::string layout_svg;
  std::string eigenvalues_out;
  std::string outdir;
  int threads = 0;  // 0 = THREADS env, then hardware

  std::vector<std::pair<std::string, std::string>> echo;
};

// Throws UsageError on bad flags, bad config files, or unknown config keys.
RunConfig parse_run_config(const std::vector<std::string>& args);

TopologySpec topology_from_config(const RunConfig& c);

std::vector<double> parse_value_list(const std::string& csv);

// Full dispatch; returns the process exit code instead of throwing.
int run_cli(int argc, const char* const* argv);

}  // namespace qsw
