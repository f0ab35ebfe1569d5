#pragma once

#include <filesystem>
#include <iosfwd>

#include "photonbench/stream.hpp"

namespace photonbench {

/// PTMS binary layout, all integers little-endian:
///   "PTMS" | u16 version | u64 resolution_ps | u64 duration_ticks | u64 count | count × u64 tick
inline constexpr std::uint16_t kPtmsVersion = 1;

void write_ptms(std::ostream& os, const PhotonStream& stream);
PhotonStream read_ptms(std::istream& is);

/// `# resolution_ps=...,duration_ticks=...` then one tick per line.
void write_stream_csv(std::ostream& os, const PhotonStream& stream);
PhotonStream read_stream_csv(std::istream& is);

/// File variants; the format is chosen by extension (.csv or PTMS otherwise).
/// Errors name the path.
void save_stream(const std::filesystem::path& path, const PhotonStream& stream);
PhotonStream load_stream(const std::filesystem::path& path);

}  // namespace photonbench
