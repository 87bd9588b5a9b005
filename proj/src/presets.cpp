#include "qsw/presets.hpp"

#include "qsw/csv.hpp"
#include "qsw/dynamics.hpp"
#include "qsw/errors.hpp"
#include "qsw/experiments.hpp"
#include "qsw/graph.hpp"
#include "qsw/metrics.hpp"
#include "qsw/rng.hpp"
#include "qsw/svg.hpp"
#include "qsw/version.hpp"

#include <filesystem>
#include <ostream>

namespace qsw {

namespace {

// heavier experiments run at a coarser (still deeply stable) step; the
// accuracy impact is checked against dt_scale=1 in the acceptance suite
constexpr double kHeavyScale = 4.0;

using Entries = std::vector<std::pair<std::string, std::string>>;

struct PresetIo {
  std::string outdir;
  uint64_t seed;
  int threads;
  std::ostream& log;
  Entries manifest;
  std::vector<std::string> files;

  std::string path(const std::string& name) {
    files.push_back(name);
    return outdir + "/" + name;
  }
  void note(const std::string& k, const std::string& v) { manifest.push_back({k, v}); }
  void finish(const std::string& preset) {
    Entries all = {{"version", kVersion},
                   {"preset", preset},
                   {"master_seed", std::to_string(seed)},
                   {"threads", std::to_string(threads)}};
    all.insert(all.end(), manifest.begin(), manifest.end());
    std::string names;
    for (const auto& f : files) names += (names.empty() ? "" : " ") + f;
    all.push_back({"files", names});
    write_manifest(outdir + "/manifest.txt", all);
  }
};

PlotSeries curve_series(const EfficiencyCurve& curve, const std::string& name) {
  PlotSeries s;
  s.name = name;
  for (const SweepPoint& pt : curve.points) s.points.push_back({pt.x, pt.mean});
  return s;
}

PlotSeries trajectory_series(const Trajectory& t, const std::string& name) {
  PlotSeries s;
  s.name = name;
  s.markers = false;
  for (size_t i = 0; i < t.times.size(); ++i) s.points.push_back({t.times[i], t.efficiency[i]});
  return s;
}

void note_curve(PresetIo& io, const std::string& tag, const EfficiencyCurve& curve) {
  POpt opt = find_p_opt(curve);
  io.note(tag + ".topology", curve.topology);
  io.note(tag + ".t_bar", format_double(curve.t_bar));
  io.note(tag + ".t_bar_threshold_met", curve.t_bar_threshold_met ? "1" : "0");
  io.note(tag + ".initial", curve.initial);
  io.note(tag + ".dt_scale", format_double(curve.dt_scale));
  io.note(tag + ".p_opt", format_double(opt.p_opt));
  io.note(tag + ".e_max", format_double(opt.e_max));
  if (opt.flat) io.note(tag + ".flat", "1");
}

SweepRequest base_request(PresetIo& io) {
  SweepRequest req;
  req.master_seed = io.seed;
  req.threads = io.threads;
  return req;
}

void preset_fig1(PresetIo& io) {
  TopologySpec spec;
  spec.kind = Topology::chain;
  spec.n = 35;

  // per-case horizons: the ballistic end-source walk uses the linear-in-N
  // convention (5N) where its coherent head start is still visible; the
  // other cases saturate later and self-select
  struct Case {
    const char* tag;
    InitialPolicy policy;
    int site;
    double t_bar;
  } cases[] = {{"end", InitialPolicy::fixed_site, 0, 5.0 * 35},
               {"center", InitialPolicy::fixed_site, 17, 0.0},
               {"average", InitialPolicy::average_all, 0, 0.0}};
  std::vector<PlotSeries> series;
  for (const Case& cs : cases) {
    SweepRequest req = base_request(io);
    req.spec = spec;
    req.policy = cs.policy;
    req.site = cs.site;
    req.t_bar = cs.t_bar;
    EfficiencyCurve curve = sweep_p(req);
    emit_csv(curve_table(curve), io.path(std::string("fig1_") + cs.tag + ".csv"));
    note_curve(io, cs.tag, curve);
    series.push_back(curve_series(curve, cs.tag));
    io.log << "fig1 " << cs.tag << ": p_opt=" << format_double(find_p_opt(curve).p_opt) << "\n";
  }
  AxesSpec axes;
  axes.title = "chain n=35: efficiency against p";
  axes.xlabel = "p";
  axes.ylabel = "E";
  emit_svg_plot(series, axes, io.path("fig1.svg"));
}

void layout_preset(PresetIo& io, const std::string& stem, const TopologySpec& spec,
                   uint64_t graph_seed) {
  Graph g = generate_graph(spec, graph_seed);
  save_graph(g, io.path(stem + ".txt"));
  emit_graph_svg(g, graph_seed, io.path(stem + ".svg"),
                 shortest_path_nodes(g, 0, g.num_nodes() - 1));
  GraphMetrics m = compute_metrics(g);
  emit_csv(metrics_table(m), io.path(stem + "_metrics.csv"));
  io.note("topology", spec.describe());
  io.note("nodes", std::to_string(g.num_nodes()));
  io.note("edges", std::to_string(g.num_edges()));
  io.note("diameter", std::to_string(m.diameter));
  io.log << stem << ": " << g.num_nodes() << " nodes, diameter " << m.diameter << "\n";
}

void preset_fig3(PresetIo& io) {
  TopologySpec spec;
  spec.kind = Topology::square_lattice;
  spec.side = 14;
  Graph g = generate_graph(spec);
  QswConfig base;
  IntegratorSettings settings;
  settings.dt_scale = kHeavyScale;
  TbarResult tb = select_tbar(g, base, InitialState::mixture(), settings);
  io.note("t_bar", format_double(tb.t_bar));

  struct Case {
    const char* tag;
    InitialPolicy policy;
    int site;
  } cases[] = {{"corner", InitialPolicy::fixed_site, 0},
               {"average", InitialPolicy::average_all, 0}};
  std::vector<PlotSeries> series;
  for (const Case& cs : cases) {
    SweepRequest req = base_request(io);
    req.spec = spec;
    req.policy = cs.policy;
    req.site = cs.site;
    req.settings = settings;
    req.t_bar = tb.t_bar;
    EfficiencyCurve curve = sweep_p(req);
    emit_csv(curve_table(curve), io.path(std::string("fig3_") + cs.tag + ".csv"));
    note_curve(io, cs.tag, curve);
    series.push_back(curve_series(curve, cs.tag));
    io.log << "fig3 " << cs.tag << ": p_opt=" << format_double(find_p_opt(curve).p_opt) << "\n";
  }
  AxesSpec axes;
  axes.title = "square lattice n=196: efficiency against p";
  axes.xlabel = "p";
  axes.ylabel = "E";
  emit_svg_plot(series, axes, io.path("fig3.svg"));
}

void preset_fig5(PresetIo& io) {
  IntegratorSettings settings;
  settings.dt_scale = kHeavyScale;
  SmallWorldSweep sw =
      small_world_sweep(14, {0.01, 0.1, 0.5}, default_p_grid(), 20, io.seed, 1.0, settings,
                        io.threads);
  std::vector<PlotSeries> series;
  for (size_t k = 0; k < sw.rs.size(); ++k) {
    std::string tag = "r" + format_double(sw.rs[k]);
    emit_csv(curve_table(sw.curves[k]), io.path("fig5_" + tag + ".csv"));
    note_curve(io, tag, sw.curves[k]);
    io.note(tag + ".flatness", format_double(sw.flatness[k]));
    series.push_back(curve_series(sw.curves[k], "r=" + format_double(sw.rs[k])));
    io.log << "fig5 " << tag << ": p_opt=" << format_double(sw.popts[k].p_opt)
           << " flatness=" << format_double(sw.flatness[k]) << "\n";
  }
  AxesSpec axes;
  axes.title = "small-world n=196: efficiency against p";
  axes.xlabel = "p";
  axes.ylabel = "E";
  emit_svg_plot(series, axes, io.path("fig5.svg"));
}

void preset_fig6(PresetIo& io) {
  IntegratorSettings settings;
  settings.dt_scale = kHeavyScale;
  std::vector<double> ps;
  for (int i = 0; i <= 14; ++i) ps.push_back(0.2 + 0.05 * i);
  EffectiveRewiring er = effective_rewiring(14, ps, 20, io.seed, 1.0, settings, io.threads);
  emit_csv(rewiring_table(er), io.path("fig6_matches.csv"));
  emit_csv(curve_table(er.qsw_curve), io.path("fig6_qsw.csv"));
  io.note("t_bar", format_double(er.t_bar));
  io.note("fit.exponent", format_double(er.fit.exponent));
  io.note("fit.prefactor", format_double(er.fit.prefactor));
  io.note("fit.r_squared", format_double(er.fit.r_squared));
  io.log << "fig6: exponent=" << format_double(er.fit.exponent)
         << " r2=" << format_double(er.fit.r_squared) << "\n";

  PlotSeries data;
  data.name = "r_e(p)";
  data.line = false;
  PlotSeries fitline;
  fitline.name = "fit";
  fitline.markers = false;
  for (const RewiringMatch& m : er.matches)
    if (m.bracketed && m.r_e > 0.0) {
      data.points.push_back({m.p, m.r_e});
      fitline.points.push_back({m.p, er.fit.prefactor * std::pow(m.p, er.fit.exponent)});
    }
  AxesSpec axes;
  axes.title = "effective rewiring against p";
  axes.xlabel = "p";
  axes.ylabel = "r_e";
  axes.logx = true;
  axes.logy = true;
  emit_svg_plot({data, fitline}, axes, io.path("fig6.svg"));
}

void preset_fig7(PresetIo& io) {
  TopologySpec spec;
  spec.kind = Topology::square_lattice;
  spec.side = 14;
  Graph g = generate_graph(spec);
  const int n = g.num_nodes();
  QswConfig base;
  IntegratorSettings settings;
  settings.dt_scale = kHeavyScale;
  settings.max_samples = 256;
  // same mid-growth horizon the effective-rewiring match uses
  const double t_bar = 2.5 * n;
  const double r_e = 0.09;
  io.note("t_bar", format_double(t_bar));
  io.note("r_e", format_double(r_e));

  std::vector<PlotSeries> series;
  for (double p : {0.0, 0.65}) {
    QswConfig cfg = base;
    cfg.p = p;
    Trajectory t = evolve_qsw(g, cfg, InitialState::at_site(0), t_bar, settings);
    std::string tag = "p" + format_double(p);
    emit_csv(trajectory_table(t), io.path("fig7_" + tag + ".csv"));
    io.note(tag + ".final_e", format_double(t.final_efficiency()));
    series.push_back(trajectory_series(t, "p=" + format_double(p)));
    io.log << "fig7 " << tag << ": E=" << format_double(t.final_efficiency()) << "\n";
  }

  // classical partner of the p=0.65 walk: seed-averaged small world at r_e,
  // plus the bare-lattice classical extreme, both on one fixed time grid
  Eigen::VectorXd q0 = Eigen::VectorXd::Zero(n);
  q0[0] = 1.0;
  const int kSwSeeds = 5;
  auto classical_series = [&](const char* name, bool rewired) {
    PlotSeries s;
    s.name = name;
    s.markers = false;
    CsvTable tab;
    tab.header = {"time", "efficiency"};
    std::vector<Graph> graphs;
    if (rewired)
      for (int k = 0; k < kSwSeeds; ++k)
        graphs.push_back(rewire_small_world(g, r_e, split_seed(io.seed, 500 + k)));
    else
      graphs.push_back(g);
    for (int i = 0; i < 256; ++i) {
      const double t = t_bar * (i + 1) / 256.0;
      double sum = 0.0;
      for (const Graph& gr : graphs) sum += classical_efficiency(gr, 1.0, n - 1, q0, t);
      const double e = sum / graphs.size();
      s.points.push_back({t, e});
      tab.rows.push_back({format_double(t), format_double(e)});
    }
    emit_csv(tab, io.path(std::string("fig7_") + name + ".csv"));
    io.note(std::string(name) + ".final_e", format_double(s.points.back().second));
    series.push_back(s);
  };
  classical_series("sw_crw", true);
  classical_series("lattice_crw", false);

  AxesSpec axes;
  axes.title = "matched pair (p=0.65, r_e=0.09): efficiency against time";
  axes.xlabel = "t";
  axes.ylabel = "E";
  emit_svg_plot(series, axes, io.path("fig7.svg"));
}

void robustness_preset(PresetIo& io, const std::string& stem, PerturbMode mode) {
  IntegratorSettings settings;
  settings.dt_scale = kHeavyScale;
  const std::vector<int> counts = {0, 5, 10, 20, 40};
  RobustnessCurves rc = robustness_curve(14, mode, counts, default_p_grid(), 5, io.seed, 1.0,
                                         settings, io.threads);
  std::vector<PlotSeries> series;
  CsvTable summary;
  summary.header = {"links_changed", "p_opt", "e_max"};
  for (size_t k = 0; k < rc.counts.size(); ++k) {
    emit_csv(curve_table(rc.curves[k]),
             io.path(stem + "_count" + std::to_string(rc.counts[k]) + ".csv"));
    summary.rows.push_back({std::to_string(rc.counts[k]), format_double(rc.popts[k].p_opt),
                            format_double(rc.popts[k].e_max)});
    io.note("count" + std::to_string(rc.counts[k]) + ".p_opt",
            format_double(rc.popts[k].p_opt));
    series.push_back(curve_series(rc.curves[k], std::to_string(rc.counts[k]) + " links"));
    io.log << stem << " count=" << rc.counts[k]
           << ": p_opt=" << format_double(rc.popts[k].p_opt) << "\n";
  }
  emit_csv(summary, io.path(stem + "_popt.csv"));
  AxesSpec axes;
  axes.title = std::string("lattice with ") +
               (mode == PerturbMode::rewire ? "rewired" : "deleted") + " links";
  axes.xlabel = "p";
  axes.ylabel = "E";
  emit_svg_plot(series, axes, io.path(stem + ".svg"));
}

void preset_fig12(PresetIo& io) {
  IntegratorSettings settings;
  settings.dt_scale = kHeavyScale;
  std::vector<PlotSeries> series;

  TopologySpec rr;
  rr.kind = Topology::random_regular;
  rr.n = 200;
  TopologySpec sf;
  sf.kind = Topology::scale_free;
  sf.n = 187;
  struct Case {
    const char* tag;
    TopologySpec spec;
  } cases[] = {{"random_regular", rr}, {"scale_free", sf}};
  for (const Case& cs : cases) {
    SweepRequest req = base_request(io);
    req.spec = cs.spec;
    req.settings = settings;
    req.n_seeds = 20;
    EfficiencyCurve curve = sweep_p(req);
    emit_csv(curve_table(curve), io.path(std::string("fig12_") + cs.tag + ".csv"));
    note_curve(io, cs.tag, curve);
    series.push_back(curve_series(curve, cs.tag));
    io.log << "fig12 " << cs.tag << ": p_opt=" << format_double(find_p_opt(curve).p_opt)
           << "\n";
  }
  AxesSpec axes;
  axes.title = "random-regular and scale-free: efficiency against p";
  axes.xlabel = "p";
  axes.ylabel = "E";
  emit_svg_plot(series, axes, io.path("fig12.svg"));
}

void preset_fig13(PresetIo& io) {
  auto with_n = [](Topology kind, int n) {
    TopologySpec s;
    s.kind = kind;
    s.n = n;
    return s;
  };
  TopologySpec lattice;
  lattice.kind = Topology::square_lattice;
  lattice.side = 14;
  TopologySpec sw;
  sw.kind = Topology::small_world;
  sw.side = 14;
  sw.rewiring = 0.1;
  TopologySpec kary;
  kary.kind = Topology::kary_tree;
  kary.arity = 2;
  kary.depth = 7;
  TopologySpec dend;
  dend.kind = Topology::dendrimer;
  dend.branching = 3;
  dend.generations = 6;
  std::vector<TopologySpec> families = {
      with_n(Topology::chain, 200),   with_n(Topology::ring, 200),
      with_n(Topology::star, 200),    with_n(Topology::complete, 200),
      lattice,                        sw,
      with_n(Topology::random_regular, 200), with_n(Topology::scale_free, 187),
      kary,                           dend};

  DiameterScan scan = diameter_efficiency_scan(families, 5, io.seed, 1.0, io.threads);
  emit_csv(scan_table(scan), io.path("fig13_scan.csv"));
  io.note("pearson", format_double(scan.correlation));
  io.log << "fig13: corr(D, E)=" << format_double(scan.correlation) << "\n";

  PlotSeries pts;
  pts.name = "families";
  pts.line = false;
  for (const ScanRow& row : scan.rows)
    pts.points.push_back({static_cast<double>(row.diameter), row.efficiency});
  AxesSpec axes;
  axes.title = "classical efficiency against diameter";
  axes.xlabel = "diameter";
  axes.ylabel = "E(p=1)";
  emit_svg_plot({pts}, axes, io.path("fig13_scatter.svg"));

  // complete-graph exception: optimal at p=1
  SweepRequest req = base_request(io);
  req.spec = with_n(Topology::complete, 20);
  EfficiencyCurve fc = sweep_p(req);
  emit_csv(curve_table(fc), io.path("fig13_fc.csv"));
  note_curve(io, "fc", fc);
  io.log << "fig13 fc: p_opt=" << format_double(find_p_opt(fc).p_opt) << "\n";
  AxesSpec fcaxes;
  fcaxes.title = "complete graph n=20: efficiency against p";
  fcaxes.xlabel = "p";
  fcaxes.ylabel = "E";
  emit_svg_plot({curve_series(fc, "complete n=20")}, fcaxes, io.path("fig13_fc.svg"));
}

}  // namespace

std::vector<std::string> list_presets() {
  return {"fig1", "fig2",  "fig3",  "fig4",  "fig5",  "fig6", "fig7",
          "fig8", "fig9", "fig10", "fig11", "fig12", "fig13"};
}

void run_preset(const std::string& name, const std::string& outdir, uint64_t master_seed,
                int threads, std::ostream& log) {
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw IoError("cannot create '" + outdir + "': " + ec.message());
  PresetIo io{outdir, master_seed, threads, log, {}, {}};

  if (name == "fig1") {
    preset_fig1(io);
  } else if (name == "fig2") {
    TopologySpec spec;
    spec.kind = Topology::square_lattice;
    spec.side = 14;
    layout_preset(io, "fig2_lattice", spec, master_seed);
  } else if (name == "fig3") {
    preset_fig3(io);
  } else if (name == "fig4") {
    TopologySpec spec;
    spec.kind = Topology::small_world;
    spec.side = 14;
    spec.rewiring = 0.1;
    layout_preset(io, "fig4_small_world", spec, master_seed);
  } else if (name == "fig5") {
    preset_fig5(io);
  } else if (name == "fig6") {
    preset_fig6(io);
  } else if (name == "fig7") {
    preset_fig7(io);
  } else if (name == "fig8") {
    robustness_preset(io, "fig8_rewire", PerturbMode::rewire);
  } else if (name == "fig9") {
    robustness_preset(io, "fig9_delete", PerturbMode::remove);
  } else if (name == "fig10") {
    TopologySpec spec;
    spec.kind = Topology::random_regular;
    spec.n = 200;
    layout_preset(io, "fig10_random_regular", spec, master_seed);
  } else if (name == "fig11") {
    TopologySpec spec;
    spec.kind = Topology::scale_free;
    spec.n = 187;
    layout_preset(io, "fig11_scale_free", spec, master_seed);
  } else if (name == "fig12") {
    preset_fig12(io);
  } else if (name == "fig13") {
    preset_fig13(io);
  } else {
    std::string known;
    for (const auto& p : list_presets()) known += (known.empty() ? "" : ", ") + p;
    throw UsageError("unknown preset '" + name + "' (known: " + known + ")");
  }
  io.finish(name);
}

}  // namespace qsw
