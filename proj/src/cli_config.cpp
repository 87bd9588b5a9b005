#include "qsw/cli_config.hpp"

#include "qsw/csv.hpp"
#include "qsw/dynamics.hpp"
#include "qsw/errors.hpp"
#include "qsw/experiments.hpp"
#include "qsw/metrics.hpp"
#include "qsw/presets.hpp"
#include "qsw/svg.hpp"
#include "qsw/version.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace qsw {

std::vector<double> parse_value_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + item + "' in list");
    }
  }
  if (out.empty()) throw UsageError("empty value list");
  return out;
}

TopologySpec topology_from_config(const RunConfig& c) {
  if (c.topology.empty()) throw UsageError("--topology is required here");
  TopologySpec spec;
  spec.kind = topology_from_name(c.topology);
  spec.n = c.n;
  spec.side = c.side;
  spec.arity = c.arity;
  spec.depth = c.depth;
  spec.branching = c.branching;
  spec.generations = c.generations;
  spec.rewiring = c.rewiring;
  spec.attach_edges = c.attach_edges;
  spec.validate();
  return spec;
}

namespace {

void add_topology_options(CLI::App* cmd, RunConfig& c, bool with_file_input) {
  cmd->add_option("--topology", c.topology,
                  "chain|ring|star|complete|square_lattice|kary_tree|dendrimer|"
                  "small_world|random_regular|scale_free");
  cmd->add_option("--n", c.n, "node count (chain, ring, star, complete, random_regular, scale_free)");
  cmd->add_option("--side,--m", c.side, "lattice side length");
  cmd->add_option("--arity", c.arity, "k-ary tree children per node");
  cmd->add_option("--depth", c.depth, "k-ary tree depth");
  cmd->add_option("--branching", c.branching, "dendrimer branches per site");
  cmd->add_option("--generations", c.generations, "dendrimer generations");
  cmd->add_option("--rewiring", c.rewiring, "small-world rewiring probability");
  cmd->add_option("--attach-edges", c.attach_edges, "scale-free edges per new node");
  cmd->add_option("--seed", c.seed, "random seed");
  if (with_file_input) cmd->add_option("--in", c.graph_in, "read the graph from a file instead");
}

void add_dynamics_options(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--gamma", c.gamma, "sink trapping rate");
  cmd->add_option("--sink-site", c.sink_site, "sink node (-1 = last node)");
  cmd->add_option("--convention", c.convention, "sqrt_rate|literal Lindblad amplitudes");
  cmd->add_option("--dt", c.dt, "integrator step (0 = automatic)");
  cmd->add_option("--dt-scale", c.dt_scale, "multiplier on the automatic step");
}

Graph graph_from_config(const RunConfig& c) {
  if (!c.graph_in.empty()) return load_graph(c.graph_in);
  return generate_graph(topology_from_config(c), c.seed);
}

AmplitudeConvention convention_from_string(const std::string& s) {
  if (s == "sqrt_rate") return AmplitudeConvention::sqrt_rate;
  if (s == "literal") return AmplitudeConvention::literal;
  throw UsageError("unknown convention '" + s + "'");
}

std::vector<double> grid_from_config(const RunConfig& c) {
  if (!c.p_list.empty()) return parse_value_list(c.p_list);
  if (c.p_points < 2) throw UsageError("--p-points must be >= 2");
  std::vector<double> g(c.p_points);
  for (int i = 0; i < c.p_points; ++i)
    g[i] = static_cast<double>(i) / (c.p_points - 1);
  return g;
}

int run_generate(const RunConfig& c) {
  if (c.out.empty()) throw UsageError("generate needs --out");
  Graph g = generate_graph(topology_from_config(c), c.seed);
  save_graph(g, c.out);
  if (!c.layout_svg.empty())
    emit_graph_svg(g, c.seed, c.layout_svg,
                   shortest_path_nodes(g, 0, g.num_nodes() - 1));
  std::cout << "graph " << topology_from_config(c).describe() << ": " << g.num_nodes()
            << " nodes, " << g.num_edges() << " edges -> " << c.out << "\n";
  return 0;
}

int run_metrics(const RunConfig& c) {
  if (c.out.empty()) throw UsageError("metrics needs --out");
  Graph g = graph_from_config(c);
  GraphMetrics m = compute_metrics(g);
  emit_csv(metrics_table(m), c.out);
  if (!c.eigenvalues_out.empty()) emit_csv(eigenvalues_table(m), c.eigenvalues_out);
  std::cout << "n=" << g.num_nodes() << " L=" << format_double(m.char_path_length)
            << " D=" << m.diameter << " C=" << format_double(m.clustering)
            << " gap=" << format_double(m.spectral_gap) << " pi=" << m.distinct_eigenvalues
            << " -> " << c.out << "\n";
  return 0;
}

int run_evolve(const RunConfig& c) {
  if (c.out.empty()) throw UsageError("evolve needs --out");
  Graph g = graph_from_config(c);
  QswConfig cfg;
  cfg.p = c.p;
  cfg.gamma = c.gamma;
  cfg.sink_site = c.sink_site;
  cfg.convention = convention_from_string(c.convention);
  InitialState init =
      c.mixture ? InitialState::mixture() : InitialState::at_site(c.initial_site);
  IntegratorSettings settings;
  settings.dt = c.dt;
  settings.dt_scale = c.dt_scale;
  settings.max_samples = c.max_samples;
  settings.record_populations = c.populations;

  double t_final = c.t_final;
  if (t_final <= 0.0) {
    TbarResult tb = select_tbar(g, cfg, init, settings);
    t_final = tb.t_bar;
    std::cout << "t_bar " << format_double(tb.t_bar)
              << (tb.threshold_met ? "" : " (threshold not met)") << "\n";
  }
  Trajectory traj = evolve_qsw(g, cfg, init, t_final, settings);
  emit_csv(trajectory_table(traj), c.out);
  if (!c.svg.empty()) {
    PlotSeries s;
    s.name = "E(t), p=" + format_double(c.p);
    for (size_t i = 0; i < traj.times.size(); ++i)
      s.points.push_back({traj.times[i], traj.efficiency[i]});
    AxesSpec axes;
    axes.title = "transfer efficiency";
    axes.xlabel = "t";
    axes.ylabel = "E";
    emit_svg_plot({s}, axes, c.svg);
  }
  std::cout << "E(" << format_double(t_final) << ") = " << format_double(traj.final_efficiency())
            << "  steps=" << traj.steps << " dt=" << format_double(traj.dt_used)
            << " drift=" << format_double(traj.conservation_drift) << " -> " << c.out << "\n";
  return 0;
}

int run_sweep(const RunConfig& c) {
  if (c.out.empty()) throw UsageError("sweep needs --out");
  SweepRequest req;
  req.spec = topology_from_config(c);
  if (c.policy == "fixed")
    req.policy = InitialPolicy::fixed_site;
  else if (c.policy == "average")
    req.policy = InitialPolicy::average_all;
  else
    throw UsageError("policy must be fixed or average");
  req.site = c.initial_site;
  req.p_grid = grid_from_config(c);
  req.n_seeds = c.seeds;
  req.master_seed = c.seed;
  req.gamma = c.gamma;
  req.sink_site = c.sink_site;
  req.convention = convention_from_string(c.convention);
  req.settings.dt = c.dt;
  req.settings.dt_scale = c.dt_scale;
  req.t_bar = c.t_bar;
  req.threads = effective_threads(c.threads);

  EfficiencyCurve curve = sweep_p(req);
  emit_csv(curve_table(curve), c.out);
  if (!c.svg.empty()) {
    PlotSeries s;
    s.name = curve.topology;
    for (const SweepPoint& pt : curve.points) s.points.push_back({pt.x, pt.mean});
    AxesSpec axes;
    axes.title = "E(p) at t_bar=" + format_double(curve.t_bar);
    axes.xlabel = "p";
    axes.ylabel = "E";
    emit_svg_plot({s}, axes, c.svg);
  }
  POpt opt = find_p_opt(curve);
  std::cout << "t_bar=" << format_double(curve.t_bar)
            << (curve.t_bar_threshold_met ? "" : " (threshold not met)")
            << " p_opt=" << format_double(opt.p_opt) << " e_max=" << format_double(opt.e_max)
            << (opt.flat ? " (flat curve)" : "") << " -> " << c.out << "\n";
  return 0;
}

int run_experiment(const RunConfig& c) {
  if (c.preset.empty()) throw UsageError("experiment needs --preset");
  if (c.outdir.empty()) throw UsageError("experiment needs --outdir");
  run_preset(c.preset, c.outdir, c.seed, effective_threads(c.threads), std::cout);
  return 0;
}

}  // namespace

RunConfig parse_run_config(const std::vector<std::string>& args) {
  RunConfig c;
  CLI::App app{"quantum stochastic walk transport simulator"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "read options from a config file");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(0, 1);

  CLI::App* gen = app.add_subcommand("generate", "build a graph and save it");
  add_topology_options(gen, c, false);
  gen->add_option("--out", c.out, "output graph file");
  gen->add_option("--layout-svg", c.layout_svg, "also draw the graph");

  CLI::App* met = app.add_subcommand("metrics", "structural metrics of a graph");
  add_topology_options(met, c, true);
  met->add_option("--out", c.out, "metrics CSV");
  met->add_option("--eigenvalues-out", c.eigenvalues_out, "full spectrum CSV");

  CLI::App* evo = app.add_subcommand("evolve", "integrate one trajectory");
  add_topology_options(evo, c, true);
  add_dynamics_options(evo, c);
  evo->add_option("--p", c.p, "quantum-classical mixing weight");
  evo->add_option("--initial-site", c.initial_site, "start node");
  evo->add_flag("--mixture", c.mixture, "start from the maximally mixed state");
  evo->add_option("--t-final", c.t_final, "integration horizon (0 = select t_bar)");
  evo->add_option("--samples", c.max_samples, "max recorded points");
  evo->add_flag("--populations", c.populations, "record site populations");
  evo->add_option("--out", c.out, "trajectory CSV");
  evo->add_option("--svg", c.svg, "efficiency plot");

  CLI::App* swp = app.add_subcommand("sweep", "efficiency against p");
  add_topology_options(swp, c, false);
  add_dynamics_options(swp, c);
  swp->add_option("--policy", c.policy, "fixed|average initial-state policy");
  swp->add_option("--site", c.initial_site, "start node for the fixed policy");
  swp->add_option("--p-points", c.p_points, "equally spaced grid size");
  swp->add_option("--p-list", c.p_list, "explicit comma-separated p grid");
  swp->add_option("--seeds", c.seeds, "ensemble size for stochastic topologies");
  swp->add_option("--t-bar", c.t_bar, "fixed horizon (0 = select automatically)");
  swp->add_option("--threads", c.threads, "worker threads (0 = THREADS env, then hardware)");
  swp->add_option("--out", c.out, "curve CSV");
  swp->add_option("--svg", c.svg, "curve plot");

  CLI::App* exp = app.add_subcommand("experiment", "run a named preset");
  exp->add_option("--preset", c.preset, "preset name (figN)");
  exp->add_option("--outdir", c.outdir, "output directory");
  exp->add_option("--seed", c.seed, "master seed");
  exp->add_option("--threads", c.threads, "worker threads (0 = THREADS env, then hardware)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    c.help_requested = true;
    c.help_text = app.help();
    return c;
  } catch (const CLI::CallForVersion&) {
    c.help_requested = true;
    c.help_text = std::string(kVersion) + "\n";
    return c;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  for (CLI::App* sub : {gen, met, evo, swp, exp})
    if (sub->parsed()) c.command = sub->get_name();
  if (c.command.empty()) {
    c.help_requested = true;
    c.help_text = app.help();
  }

  c.echo = {{"command", c.command}};
  return c;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    RunConfig c = parse_run_config(args);
    if (c.help_requested) {
      std::cout << c.help_text;
      return 0;
    }
    if (c.command == "generate") return run_generate(c);
    if (c.command == "metrics") return run_metrics(c);
    if (c.command == "evolve") return run_evolve(c);
    if (c.command == "sweep") return run_sweep(c);
    if (c.command == "experiment") return run_experiment(c);
    throw UsageError("no command given");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qsw
