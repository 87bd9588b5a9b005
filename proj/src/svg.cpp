#include "qsw/svg.hpp"

#include "qsw/errors.hpp"
#include "qsw/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qsw {

namespace {

const char* kPalette[] = {"#4477aa", "#cc3311", "#228833", "#ee7733",
                          "#aa3377", "#66ccee", "#999933", "#555555"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

std::vector<double> linear_ticks(double lo, double hi) {
  double span = hi - lo;
  if (span <= 0.0) span = 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double step = (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0) * mag;
  std::vector<double> ticks;
  double t = std::ceil(lo / step - 1e-9) * step;
  while (t <= hi + 1e-9 * span) {
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    t += step;
  }
  return ticks;
}

std::vector<double> decade_ticks(double lo, double hi) {
  std::vector<double> ticks;
  for (int e = static_cast<int>(std::floor(lo)); e <= static_cast<int>(std::ceil(hi)); ++e)
    if (e >= lo - 1e-9 && e <= hi + 1e-9) ticks.push_back(e);
  if (ticks.size() < 2) return {lo, hi};
  return ticks;
}

}  // namespace

void emit_svg_plot(const std::vector<PlotSeries>& series, const AxesSpec& axes,
                   const std::string& path) {
  if (series.empty()) throw PlotError("plot needs at least one series");
  for (const PlotSeries& s : series) {
    if (s.points.empty()) throw PlotError("series '" + s.name + "' is empty");
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y))
        throw PlotError("series '" + s.name + "' has a non-finite point");
      if (axes.logx && x <= 0.0)
        throw PlotError("series '" + s.name + "' has x <= 0 on a log axis");
      if (axes.logy && y <= 0.0)
        throw PlotError("series '" + s.name + "' has y <= 0 on a log axis");
    }
  }

  auto tx = [&](double x) { return axes.logx ? std::log10(x) : x; };
  auto ty = [&](double y) { return axes.logy ? std::log10(y) : y; };

  double xlo = tx(series[0].points[0].first), xhi = xlo;
  double ylo = ty(series[0].points[0].second), yhi = ylo;
  for (const PlotSeries& s : series)
    for (const auto& [x, y] : s.points) {
      xlo = std::min(xlo, tx(x));
      xhi = std::max(xhi, tx(x));
      ylo = std::min(ylo, ty(y));
      yhi = std::max(yhi, ty(y));
    }
  auto pad = [](double& lo, double& hi) {
    double span = hi - lo;
    if (span <= 0.0) span = std::max(1.0, std::abs(lo));
    lo -= 0.05 * span;
    hi += 0.05 * span;
  };
  double pxlo = xlo, pxhi = xhi, pylo = ylo, pyhi = yhi;
  pad(pxlo, pxhi);
  pad(pylo, pyhi);

  const double ml = 72, mr = 20, mt = 42, mb = 56;
  const double pw = axes.width - ml - mr, ph = axes.height - mt - mb;
  auto px = [&](double x) { return ml + (tx(x) - pxlo) / (pxhi - pxlo) * pw; };
  auto py = [&](double y) { return mt + ph - (ty(y) - pylo) / (pyhi - pylo) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << axes.width << "\" height=\""
      << axes.height << "\" viewBox=\"0 0 " << axes.width << " " << axes.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!axes.title.empty())
    svg << "<text x=\"" << axes.width / 2 << "\" y=\"24\" font-family=\"sans-serif\" "
        << "font-size=\"15\" text-anchor=\"middle\">" << escape(axes.title) << "</text>\n";

  const std::vector<double> xticks =
      axes.logx ? decade_ticks(pxlo, pxhi) : linear_ticks(pxlo, pxhi);
  const std::vector<double> yticks =
      axes.logy ? decade_ticks(pylo, pyhi) : linear_ticks(pylo, pyhi);
  for (double t : xticks) {
    const double x = ml + (t - pxlo) / (pxhi - pxlo) * pw;
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(x)
        << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(mt + ph + 18)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
        << (axes.logx ? "1e" + fmt_label(t) : fmt_label(t)) << "</text>\n";
  }
  for (double t : yticks) {
    const double y = mt + ph - (t - pylo) / (pyhi - pylo) * ph;
    svg << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(ml + pw)
        << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
        << (axes.logy ? "1e" + fmt_label(t) : fmt_label(t)) << "</text>\n";
  }
  svg << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
      << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  if (!axes.xlabel.empty())
    svg << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(mt + ph + 40)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
        << escape(axes.xlabel) << "</text>\n";
  if (!axes.ylabel.empty())
    svg << "<text x=\"18\" y=\"" << fmt(mt + ph / 2)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 18 " << fmt(mt + ph / 2) << ")\">" << escape(axes.ylabel)
        << "</text>\n";

  for (size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
    const PlotSeries& s = series[k];
    if (s.line && s.points.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
      for (const auto& [x, y] : s.points) svg << fmt(px(x)) << "," << fmt(py(y)) << " ";
      svg << "\"/>\n";
    }
    if (s.markers)
      for (const auto& [x, y] : s.points)
        svg << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y))
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
  }

  bool legend = series.size() > 1 || (series.size() == 1 && !series[0].name.empty());
  if (legend) {
    const double lx = ml + pw - 160, lh = 18.0;
    svg << "<rect x=\"" << fmt(lx - 8) << "\" y=\"" << fmt(mt + 6) << "\" width=\"164\" height=\""
        << fmt(series.size() * lh + 10) << "\" fill=\"white\" fill-opacity=\"0.85\" "
        << "stroke=\"#999999\"/>\n";
    for (size_t k = 0; k < series.size(); ++k) {
      const char* color = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
      const double y = mt + 6 + lh * (k + 1) - 4;
      svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(y - 4) << "\" x2=\"" << fmt(lx + 22)
          << "\" y2=\"" << fmt(y - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << fmt(lx + 28) << "\" y=\"" << fmt(y)
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(series[k].name)
          << "</text>\n";
    }
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << svg.str();
  if (!out) throw IoError("write failed on '" + path + "'");
}

void emit_graph_svg(const Graph& g, uint64_t layout_seed, const std::string& path,
                    const std::vector<int>& highlight_path) {
  const int n = g.num_nodes();
  Rng rng(layout_seed);
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = rng.uniform01();
    y[i] = rng.uniform01();
  }
  // Fruchterman-Reingold, fixed 300 sweeps with linear cooling
  const double k = std::sqrt(1.0 / n);
  std::vector<double> dx(n), dy(n);
  for (int it = 0; it < 300; ++it) {
    const double temp = 0.1 * (1.0 - it / 300.0) + 1e-3;
    std::fill(dx.begin(), dx.end(), 0.0);
    std::fill(dy.begin(), dy.end(), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double ex = x[i] - x[j], ey = y[i] - y[j];
        double d2 = ex * ex + ey * ey + 1e-9;
        double f = k * k / d2;
        dx[i] += ex * f;
        dy[i] += ey * f;
        dx[j] -= ex * f;
        dy[j] -= ey * f;
      }
    for (const Edge& e : g.edges()) {
      double ex = x[e.first] - x[e.second], ey = y[e.first] - y[e.second];
      double d = std::sqrt(ex * ex + ey * ey) + 1e-9;
      double f = d / k;  // pull proportional to distance
      dx[e.first] -= ex * f;
      dy[e.first] -= ey * f;
      dx[e.second] += ex * f;
      dy[e.second] += ey * f;
    }
    for (int i = 0; i < n; ++i) {
      double d = std::sqrt(dx[i] * dx[i] + dy[i] * dy[i]);
      if (d > 1e-12) {
        double step = std::min(d, temp);
        x[i] += dx[i] / d * step;
        y[i] += dy[i] / d * step;
      }
    }
  }
  double xlo = x[0], xhi = x[0], ylo = y[0], yhi = y[0];
  for (int i = 0; i < n; ++i) {
    xlo = std::min(xlo, x[i]);
    xhi = std::max(xhi, x[i]);
    ylo = std::min(ylo, y[i]);
    yhi = std::max(yhi, y[i]);
  }
  const double size = 640, margin = 28;
  auto sx = [&](int i) {
    return margin + (x[i] - xlo) / std::max(1e-12, xhi - xlo) * (size - 2 * margin);
  };
  auto sy = [&](int i) {
    return margin + (y[i] - ylo) / std::max(1e-12, yhi - ylo) * (size - 2 * margin);
  };

  std::vector<char> on_path(n, 0);
  std::vector<std::pair<int, int>> path_edges;
  for (size_t i = 0; i < highlight_path.size(); ++i) {
    int v = highlight_path[i];
    if (v < 0 || v >= n) throw PlotError("highlight node out of range");
    on_path[v] = 1;
    if (i > 0) path_edges.push_back({highlight_path[i - 1], v});
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const Edge& e : g.edges())
    svg << "<line x1=\"" << fmt(sx(e.first)) << "\" y1=\"" << fmt(sy(e.first)) << "\" x2=\""
        << fmt(sx(e.second)) << "\" y2=\"" << fmt(sy(e.second))
        << "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
  for (const auto& [a, b] : path_edges)
    svg << "<line x1=\"" << fmt(sx(a)) << "\" y1=\"" << fmt(sy(a)) << "\" x2=\"" << fmt(sx(b))
        << "\" y2=\"" << fmt(sy(b)) << "\" stroke=\"#cc3311\" stroke-width=\"2.5\"/>\n";
  for (int i = 0; i < n; ++i)
    svg << "<circle cx=\"" << fmt(sx(i)) << "\" cy=\"" << fmt(sy(i)) << "\" r=\""
        << (on_path[i] ? "5" : "3.5") << "\" fill=\"" << (on_path[i] ? "#cc3311" : "#4477aa")
        << "\"/>\n";
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << svg.str();
  if (!out) throw IoError("write failed on '" + path + "'");
}

}  // namespace qsw
