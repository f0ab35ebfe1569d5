#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "photonbench/calibrate.hpp"
#include "photonbench/fit.hpp"

namespace photonbench {

/// `gate_s,counts`
void write_spad_counts_csv(std::ostream& os, const std::vector<SpadGate>& gates);
std::vector<SpadGate> read_spad_counts_csv(std::istream& is);

/// `voltage_V`
void write_voltages_csv(std::ostream& os, const std::vector<double>& volts);
std::vector<double> read_voltages_csv(std::istream& is);

/// `name,relative_percent,type`; a '-' value marks an exact constant.
void write_budget_csv(std::ostream& os, const std::vector<BudgetComponent>& rows);
std::vector<BudgetComponent> read_budget_csv(std::istream& is);

/// `power_uW,rate,stderr`
void write_saturation_csv(std::ostream& os, const std::vector<SaturationPoint>& points);
std::vector<SaturationPoint> read_saturation_csv(std::istream& is);

/// Opens `path` and applies `reader`, prefixing errors with the path.
template <typename Reader>
auto read_file(const std::filesystem::path& path, Reader reader);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace photonbench

#include <fstream>

#include "photonbench/errors.hpp"

namespace photonbench {

template <typename Reader>
auto read_file(const std::filesystem::path& path, Reader reader) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  try {
    return reader(is);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace photonbench
