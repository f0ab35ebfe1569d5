#include "photonbench/histogram_io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "photonbench/errors.hpp"
#include "photonbench/text.hpp"

namespace photonbench {

void write_histogram_csv(std::ostream& os, const Histogram& h) {
  h.validate();
  os << "# mode=" << to_string(h.mode) << ",bin_width_ns=" << format_double(h.bin_width_ns)
     << ",t_min_ns=" << format_double(h.t_min_ns) << ",t_max_ns=" << format_double(h.t_max_ns)
     << ",n_starts=" << h.n_starts << ",n_stops=" << h.n_stops
     << ",duration_s=" << format_double(h.acquisition_duration_s) << '\n';
  os << "bin_center_ns,counts\n";
  for (std::size_t k = 0; k < h.bin_count(); ++k) {
    os << format_double(h.bin_center_ns(k)) << ',' << h.counts[k] << '\n';
  }
  if (!os) throw DataError("histogram CSV: write failed");
}

Histogram read_histogram_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw DataError("histogram CSV line 1: missing '# mode=...' metadata header");
  }
  std::map<std::string, std::string> meta;
  std::stringstream header(line.substr(2));
  std::string field;
  while (std::getline(header, field, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw DataError("histogram CSV line 1: malformed field '" + field + "'");
    meta[std::string(trim(std::string_view(field).substr(0, eq)))] = std::string(trim(std::string_view(field).substr(eq + 1)));
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end()) throw DataError(std::string("histogram CSV line 1: missing field ") + key);
    return it->second;
  };
  Histogram h;
  try {
    h.mode = parse_histogram_mode(need("mode"));
  } catch (const ConfigError& e) {
    throw DataError(std::string("histogram CSV line 1: ") + e.what());
  }
  h.bin_width_ns = parse_double(need("bin_width_ns"), "histogram CSV bin_width_ns");
  h.t_min_ns = parse_double(need("t_min_ns"), "histogram CSV t_min_ns");
  h.t_max_ns = parse_double(need("t_max_ns"), "histogram CSV t_max_ns");
  h.n_starts = parse_u64(need("n_starts"), "histogram CSV n_starts");
  h.n_stops = parse_u64(need("n_stops"), "histogram CSV n_stops");
  h.acquisition_duration_s = parse_double(need("duration_s"), "histogram CSV duration_s");
  if (meta.size() != 7) throw DataError("histogram CSV line 1: unexpected extra header fields");

  if (!std::getline(is, line) || trim(line) != "bin_center_ns,counts") {
    throw DataError("histogram CSV line 2: expected column header 'bin_center_ns,counts'");
  }
  std::size_t line_no = 2;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    const std::string where = "histogram CSV line " + std::to_string(line_no);
    if (comma == std::string::npos) throw DataError(where + ": expected 'bin_center_ns,counts'");
    parse_double(std::string_view(line).substr(0, comma), where);
    h.counts.push_back(parse_u64(std::string_view(line).substr(comma + 1), where));
  }
  h.validate();
  return h;
}

void save_histogram(const std::filesystem::path& path, const Histogram& h) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path.string() + "' for writing");
  write_histogram_csv(os, h);
}

Histogram load_histogram(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  try {
    return read_histogram_csv(is);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_g2_csv(std::ostream& os, const std::vector<G2Point>& points) {
  os << "t_ns,g2,stderr\n";
  for (const auto& p : points) {
    os << format_double(p.t_ns) << ',' << format_double(p.g2) << ',' << format_double(p.stderr_g2) << '\n';
  }
  if (!os) throw DataError("g2 CSV: write failed");
}

void save_g2(const std::filesystem::path& path, const std::vector<G2Point>& points) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path.string() + "' for writing");
  write_g2_csv(os, points);
}

}  // namespace photonbench
