#pragma once

#include "qsw/graph.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qsw {

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool line = true;
  bool markers = true;
};

struct AxesSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  int width = 760;
  int height = 520;
};

// Self-contained SVG line/scatter plot. Non-finite data or non-positive
// values on a log axis raise PlotError naming the offending series.
void emit_svg_plot(const std::vector<PlotSeries>& series, const AxesSpec& axes,
                   const std::string& path);

// Force-directed layout (seeded, fixed iteration count, deterministic) with
// an optional node path drawn in red on top.
void emit_graph_svg(const Graph& g, uint64_t layout_seed, const std::string& path,
                    const std::vector<int>& highlight_path = {});

}  // namespace qsw
