#include "photonbench/stream_io.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "photonbench/errors.hpp"
#include "photonbench/text.hpp"

namespace photonbench {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'T', 'M', 'S'};

template <typename T>
void put_le(std::ostream& os, T v) {
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& is, const char* field) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw DataError(std::string("PTMS: truncated while reading ") + field);
  }
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes[i]) << (8 * i);
  return v;
}

bool has_csv_extension(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".csv";
}

}  // namespace

void write_ptms(std::ostream& os, const PhotonStream& stream) {
  stream.validate();
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(os, kPtmsVersion);
  put_le<std::uint64_t>(os, stream.resolution_ps);
  put_le<std::uint64_t>(os, stream.duration_ticks);
  put_le<std::uint64_t>(os, stream.size());
  std::string buffer;
  buffer.resize(8 * stream.size());
  for (std::size_t k = 0; k < stream.size(); ++k) {
    const Tick t = stream.timestamps[k];
    for (int i = 0; i < 8; ++i) buffer[8 * k + i] = static_cast<char>((t >> (8 * i)) & 0xff);
  }
  os.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!os) throw DataError("PTMS: write failed");
}

PhotonStream read_ptms(std::istream& is) {
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) {
    throw DataError("PTMS: bad magic (expected 'PTMS')");
  }
  const auto version = get_le<std::uint16_t>(is, "version");
  if (version != kPtmsVersion) {
    throw DataError("PTMS: unsupported version " + std::to_string(version));
  }
  PhotonStream s;
  s.resolution_ps = get_le<std::uint64_t>(is, "resolution_ps");
  s.duration_ticks = get_le<std::uint64_t>(is, "duration_ticks");
  const auto count = get_le<std::uint64_t>(is, "count");
  if (count > (std::uint64_t{1} << 40)) throw DataError("PTMS: implausible event count");
  std::string buffer(8 * count, '\0');
  if (!is.read(buffer.data(), static_cast<std::streamsize>(buffer.size()))) {
    throw DataError("PTMS: truncated timestamp block (expected " + std::to_string(count) + " ticks)");
  }
  s.timestamps.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    Tick t = 0;
    for (int i = 0; i < 8; ++i) t |= static_cast<Tick>(static_cast<unsigned char>(buffer[8 * k + i])) << (8 * i);
    s.timestamps[k] = t;
  }
  if (is.peek() != std::char_traits<char>::eof()) throw DataError("PTMS: trailing bytes after timestamp block");
  s.validate();
  return s;
}

void write_stream_csv(std::ostream& os, const PhotonStream& stream) {
  stream.validate();
  os << "# resolution_ps=" << stream.resolution_ps << ",duration_ticks=" << stream.duration_ticks << '\n';
  for (Tick t : stream.timestamps) os << t << '\n';
  if (!os) throw DataError("stream CSV: write failed");
}

PhotonStream read_stream_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw DataError("stream CSV: missing '# resolution_ps=...,duration_ticks=...' header");
  }
  PhotonStream s;
  bool have_res = false;
  bool have_dur = false;
  std::stringstream header(line.substr(2));
  std::string field;
  while (std::getline(header, field, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw DataError("stream CSV: malformed header field '" + field + "'");
    const auto key = std::string(trim(std::string_view(field).substr(0, eq)));
    const auto value = std::string_view(field).substr(eq + 1);
    if (key == "resolution_ps") {
      s.resolution_ps = parse_u64(value, "stream CSV header resolution_ps");
      have_res = true;
    } else if (key == "duration_ticks") {
      s.duration_ticks = parse_u64(value, "stream CSV header duration_ticks");
      have_dur = true;
    } else {
      throw DataError("stream CSV: unknown header field '" + key + "'");
    }
  }
  if (!have_res || !have_dur) throw DataError("stream CSV: header needs resolution_ps and duration_ticks");
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    s.timestamps.push_back(parse_u64(line, "stream CSV line " + std::to_string(line_no)));
  }
  s.validate();
  return s;
}

void save_stream(const std::filesystem::path& path, const PhotonStream& stream) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path.string() + "' for writing");
  try {
    if (has_csv_extension(path)) {
      write_stream_csv(os, stream);
    } else {
      write_ptms(os, stream);
    }
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

PhotonStream load_stream(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  try {
    return has_csv_extension(path) ? read_stream_csv(is) : read_ptms(is);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace photonbench
