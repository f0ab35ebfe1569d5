#include "photonbench/tables_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "photonbench/text.hpp"

namespace photonbench {

namespace {

// Reads the column header line and the data rows of a simple CSV file.
class CsvReader {
 public:
  CsvReader(std::istream& is, std::string_view expected_header, const char* what)
      : is_(is), what_(what) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      if (!trim(line).empty() && line[0] != '#') break;
      line.clear();
    }
    if (trim(line) != expected_header) {
      throw DataError(std::string(what_) + " line " + std::to_string(line_no_) + ": expected header '" +
                      std::string(expected_header) + "'");
    }
  }

  /// Next non-empty row split on commas; false at end of input.
  bool next(std::vector<std::string>& fields, std::size_t expected) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_no_;
      if (trim(line).empty() || line[0] == '#') continue;
      split(line, fields);
      if (fields.size() != expected) {
        throw DataError(where() + ": expected " + std::to_string(expected) + " fields, found " +
                        std::to_string(fields.size()));
      }
      return true;
    }
    return false;
  }

  std::string where() const { return std::string(what_) + " line " + std::to_string(line_no_); }

 private:
  // Comma-separated fields; a field may be double-quoted, with "" as an escaped quote.
  void split(const std::string& line, std::vector<std::string>& fields) const {
    fields.assign(1, std::string{});
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch != '"') {
          fields.back() += ch;
        } else if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        fields.emplace_back();
      } else {
        fields.back() += ch;
      }
    }
    if (quoted) throw DataError(where() + ": unterminated quoted field");
  }

  std::istream& is_;
  const char* what_;
  std::size_t line_no_ = 0;
};

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

}  // namespace

void write_spad_counts_csv(std::ostream& os, const std::vector<SpadGate>& gates) {
  os << "gate_s,counts\n";
  for (const auto& g : gates) os << format_double(g.duration_s) << ',' << g.counts << '\n';
}

std::vector<SpadGate> read_spad_counts_csv(std::istream& is) {
  CsvReader r(is, "gate_s,counts", "SPAD counts CSV");
  std::vector<SpadGate> out;
  std::vector<std::string> f;
  while (r.next(f, 2)) out.push_back({parse_double(f[0], r.where()), parse_u64(f[1], r.where())});
  if (out.empty()) throw DataError("SPAD counts CSV: no gates");
  return out;
}

void write_voltages_csv(std::ostream& os, const std::vector<double>& volts) {
  os << "voltage_V\n";
  for (double v : volts) os << format_double(v) << '\n';
}

std::vector<double> read_voltages_csv(std::istream& is) {
  CsvReader r(is, "voltage_V", "voltage CSV");
  std::vector<double> out;
  std::vector<std::string> f;
  while (r.next(f, 1)) out.push_back(parse_double(f[0], r.where()));
  if (out.empty()) throw DataError("voltage CSV: no samples");
  return out;
}

void write_budget_csv(std::ostream& os, const std::vector<BudgetComponent>& rows) {
  os << "name,relative_percent,type\n";
  for (const auto& c : rows) {
    os << csv_field(c.name) << ',' << (c.exact ? std::string("-") : format_double(c.relative_percent)) << ','
       << (c.type == EvaluationType::A ? 'A' : 'B') << '\n';
  }
}

std::vector<BudgetComponent> read_budget_csv(std::istream& is) {
  CsvReader r(is, "name,relative_percent,type", "budget CSV");
  std::vector<BudgetComponent> out;
  std::vector<std::string> f;
  while (r.next(f, 3)) {
    BudgetComponent c;
    c.name = std::string(trim(f[0]));
    const auto value = trim(f[1]);
    if (value == "-") {
      c.exact = true;
    } else {
      c.relative_percent = parse_double(value, r.where());
    }
    const auto type = trim(f[2]);
    if (type == "A") c.type = EvaluationType::A;
    else if (type == "B") c.type = EvaluationType::B;
    else throw DataError(r.where() + ": type must be A or B");
    out.push_back(c);
  }
  if (out.empty()) throw DataError("budget CSV: no components");
  return out;
}

void write_saturation_csv(std::ostream& os, const std::vector<SaturationPoint>& points) {
  os << "power_uW,rate,stderr\n";
  for (const auto& p : points) {
    os << format_double(p.power_uW) << ',' << format_double(p.rate) << ',' << format_double(p.stderr_rate) << '\n';
  }
}

std::vector<SaturationPoint> read_saturation_csv(std::istream& is) {
  CsvReader r(is, "power_uW,rate,stderr", "saturation CSV");
  std::vector<SaturationPoint> out;
  std::vector<std::string> f;
  while (r.next(f, 3)) {
    out.push_back({parse_double(f[0], r.where()), parse_double(f[1], r.where()), parse_double(f[2], r.where())});
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os || !os.write(text.data(), static_cast<std::streamsize>(text.size()))) {
    throw DataError("cannot write '" + path.string() + "'");
  }
}

}  // namespace photonbench
