#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "photonbench/correlate.hpp"

namespace photonbench {

/// `# mode=...,bin_width_ns=...,t_min_ns=...,t_max_ns=...,n_starts=...,n_stops=...,duration_s=...`
/// followed by a `bin_center_ns,counts` header and one row per bin.
void write_histogram_csv(std::ostream& os, const Histogram& h);
Histogram read_histogram_csv(std::istream& is);

void save_histogram(const std::filesystem::path& path, const Histogram& h);
Histogram load_histogram(const std::filesystem::path& path);

/// `t_ns,g2,stderr` rows.
void write_g2_csv(std::ostream& os, const std::vector<G2Point>& points);
void save_g2(const std::filesystem::path& path, const std::vector<G2Point>& points);

}  // namespace photonbench
