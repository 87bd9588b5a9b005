#pragma once

#include "qsw/dynamics.hpp"
#include "qsw/experiments.hpp"
#include "qsw/metrics.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qsw {

// shortest round-trip-exact decimal form (%.17g trimmed)
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// UTF-8, '\n' line ends, header first; every row must match the header width.
void emit_csv(const CsvTable& table, const std::string& path);

CsvTable curve_table(const EfficiencyCurve& curve);
CsvTable trajectory_table(const Trajectory& t);
CsvTable metrics_table(const GraphMetrics& m);
CsvTable eigenvalues_table(const GraphMetrics& m);
CsvTable scaling_table(const ScalingStudy& s);
CsvTable scaling_fits_table(const ScalingStudy& s);
CsvTable rewiring_table(const EffectiveRewiring& r);
CsvTable scan_table(const DiameterScan& s);

// "key = value" lines; records what produced a result directory.
void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace qsw
