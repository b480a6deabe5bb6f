#include "xrt/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "xrt/error.hpp"

namespace xrt {

namespace {

constexpr const char* kFormat = "xrt-field";
constexpr int kVersion = 1;

std::uint64_t to_little(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::little) return bits;
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out = (out << 8) | ((bits >> (8 * i)) & 0xffu);
  return out;
}

}  // namespace

nlohmann::json grid_to_json(const Grid& grid) {
  nlohmann::json j;
  j["d"] = grid.dim();
  j["side"] = std::string(to_string(grid.side()));
  j["origin"] = grid.origin();
  j["spacing"] = grid.spacing();
  j["counts"] = grid.counts();
  return j;
}

Grid grid_from_json(const nlohmann::json& j) {
  try {
    const Side side = parse_side(j.at("side").get<std::string>());
    const auto counts = j.at("counts").get<std::vector<std::size_t>>();
    if (j.contains("lo")) {
      const auto lo = j.at("lo").get<std::vector<double>>();
      const auto hi = j.at("hi").get<std::vector<double>>();
      return Grid::box(side, lo, hi, counts);
    }
    Grid g(side, j.at("origin").get<std::vector<double>>(), j.at("spacing").get<std::vector<double>>(), counts);
    if (j.contains("d") && j.at("d").get<int>() != g.dim()) {
      throw Error(ErrorKind::format, "grid header dimension disagrees with counts");
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::format, std::string("bad grid description: ") + e.what());
  }
}

void write_field(std::ostream& out, const SampledField& field, const nlohmann::json& extra) {
  nlohmann::json header = grid_to_json(field.grid());
  header["format"] = kFormat;
  header["version"] = kVersion;
  for (const auto& [key, value] : extra.items()) {
    if (!header.contains(key)) header[key] = value;
  }
  out << header.dump() << '\n';
  std::vector<char> buffer(field.size() * 8);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(field[i]));
    std::memcpy(buffer.data() + 8 * i, &bits, 8);
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!out) throw Error(ErrorKind::format, "failed writing field data");
}

void write_field(const std::string& path, const SampledField& field, const nlohmann::json& extra) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::format, "cannot open '" + path + "' for writing");
  write_field(out, field, extra);
}

FieldFile read_field_file(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::format, "missing field header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::format, std::string("field header is not JSON: ") + e.what());
  }
  if (header.value("format", std::string()) != kFormat) throw Error(ErrorKind::format, "not an xrt-field file");
  if (header.value("version", 0) != kVersion) throw Error(ErrorKind::format, "unsupported field version");
  Grid grid = grid_from_json(header);

  std::vector<char> buffer(grid.size() * 8);
  in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (in.gcount() != static_cast<std::streamsize>(buffer.size())) {
    throw Error(ErrorKind::format, "field data truncated");
  }
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, buffer.data() + 8 * i, 8);
    values[i] = std::bit_cast<double>(to_little(bits));
  }

  FieldFile file;
  file.field = SampledField(std::move(grid), std::move(values));
  for (const char* key : {"format", "version", "d", "side", "origin", "spacing", "counts"}) header.erase(key);
  file.extra = std::move(header);
  return file;
}

FieldFile read_field_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::format, "cannot open '" + path + "'");
  return read_field_file(in);
}

SampledField read_field(const std::string& path) { return read_field_file(path).field; }

}  // namespace xrt
