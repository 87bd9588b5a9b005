#include "qsw/csv.hpp"

#include "qsw/errors.hpp"

#include <cstdio>
#include <fstream>

namespace qsw {

std::string format_double(double v) {
  char buf[40];
  // 17 significant digits round-trip; try shorter forms first for clean files
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// RFC 4180 quoting, needed only when a cell holds a delimiter
std::string csv_quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (char c : cell) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void emit_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  auto write_row = [&](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << csv_quote(row[i]);
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw IoError("ragged row in CSV for '" + path + "'");
    write_row(row);
  }
  if (!out) throw IoError("write failed on '" + path + "'");
}

CsvTable curve_table(const EfficiencyCurve& curve) {
  CsvTable t;
  t.header.push_back(curve.abscissa);
  t.header.push_back("mean_efficiency");
  const size_t n_seeds = curve.points.empty() ? 0 : curve.points[0].per_seed.size();
  for (size_t s = 0; s < n_seeds; ++s) t.header.push_back("e_seed" + std::to_string(s));
  for (const SweepPoint& pt : curve.points) {
    std::vector<std::string> row;
    row.push_back(format_double(pt.x));
    row.push_back(format_double(pt.mean));
    for (double v : pt.per_seed) row.push_back(format_double(v));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable trajectory_table(const Trajectory& traj) {
  CsvTable t;
  t.header = {"time", "efficiency"};
  const bool pops = !traj.populations.empty();
  if (pops)
    for (int i = 0; i < traj.populations[0].size(); ++i)
      t.header.push_back("rho_" + std::to_string(i));
  for (size_t k = 0; k < traj.times.size(); ++k) {
    std::vector<std::string> row;
    row.push_back(format_double(traj.times[k]));
    row.push_back(format_double(traj.efficiency[k]));
    if (pops)
      for (int i = 0; i < traj.populations[k].size(); ++i)
        row.push_back(format_double(traj.populations[k][i]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable metrics_table(const GraphMetrics& m) {
  CsvTable t;
  t.header = {"n_nodes", "n_edges",        "char_path_length",     "diameter",
              "clustering", "spectral_gap", "distinct_eigenvalues", "max_degree",
              "min_degree"};
  int n = static_cast<int>(m.degrees.size());
  long long edges = 0;
  int dmax = 0, dmin = n ? m.degrees[0] : 0;
  for (int d : m.degrees) {
    edges += d;
    dmax = std::max(dmax, d);
    dmin = std::min(dmin, d);
  }
  t.rows.push_back({std::to_string(n), std::to_string(edges / 2),
                    format_double(m.char_path_length), std::to_string(m.diameter),
                    format_double(m.clustering), format_double(m.spectral_gap),
                    std::to_string(m.distinct_eigenvalues), std::to_string(dmax),
                    std::to_string(dmin)});
  return t;
}

CsvTable eigenvalues_table(const GraphMetrics& m) {
  CsvTable t;
  t.header = {"index", "eigenvalue"};
  for (int i = 0; i < m.eigenvalues.size(); ++i)
    t.rows.push_back({std::to_string(i), format_double(m.eigenvalues(i))});
  return t;
}

CsvTable scaling_table(const ScalingStudy& s) {
  CsvTable t;
  const size_t n_seeds = s.rows.empty() ? 0 : s.rows[0].per_seed.size();
  t.header = {"n_nodes", "p", "mean_efficiency"};
  for (size_t k = 0; k < n_seeds; ++k) t.header.push_back("e_seed" + std::to_string(k));
  for (const ScalingRow& row : s.rows) {
    std::vector<std::string> r = {std::to_string(row.n_nodes), format_double(row.p),
                                  format_double(row.mean)};
    for (double v : row.per_seed) r.push_back(format_double(v));
    t.rows.push_back(std::move(r));
  }
  return t;
}

CsvTable scaling_fits_table(const ScalingStudy& s) {
  CsvTable t;
  t.header = {"p", "exponent", "prefactor", "r_squared", "points_used"};
  for (const auto& [p, fit] : s.fits)
    t.rows.push_back({format_double(p), format_double(fit.exponent),
                      format_double(fit.prefactor), format_double(fit.r_squared),
                      std::to_string(fit.points_used)});
  return t;
}

CsvTable rewiring_table(const EffectiveRewiring& r) {
  CsvTable t;
  t.header = {"p", "target_efficiency", "r_e", "achieved_efficiency",
              "mismatch", "iterations", "bracketed"};
  for (const RewiringMatch& m : r.matches)
    t.rows.push_back({format_double(m.p), format_double(m.target), format_double(m.r_e),
                      format_double(m.achieved), format_double(m.mismatch),
                      std::to_string(m.iterations), m.bracketed ? "1" : "0"});
  return t;
}

CsvTable scan_table(const DiameterScan& s) {
  CsvTable t;
  t.header = {"family", "seed", "n_nodes", "diameter", "initial_site", "sink_site",
              "efficiency"};
  for (const ScanRow& row : s.rows)
    t.rows.push_back({row.family, std::to_string(row.seed), std::to_string(row.n_nodes),
                      std::to_string(row.diameter), std::to_string(row.initial_site),
                      std::to_string(row.sink_site), format_double(row.efficiency)});
  return t;
}

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
  if (!out) throw IoError("write failed on '" + path + "'");
}

}  // namespace qsw
