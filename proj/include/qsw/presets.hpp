#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qsw {

std::vector<std::string> list_presets();

// Runs one named experiment preset, writing CSV/SVG artifacts plus a
// manifest.txt into outdir. Progress goes to log.
void run_preset(const std::string& name, const std::string& outdir, uint64_t master_seed,
                int threads, std::ostream& log);

}  // namespace qsw
