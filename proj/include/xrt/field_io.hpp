#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "xrt/field.hpp"

namespace xrt {

// File layout: one JSON header line
//   {"format":"xrt-field","version":1,"d":..,"side":..,"origin":[..],"spacing":[..],"counts":[..]}
// then prod(counts) little-endian float64 values, row-major.

struct FieldFile {
  SampledField field;
  // Header keys beyond the grid description, e.g. search state bookkeeping.
  nlohmann::json extra = nlohmann::json::object();
};

void write_field(std::ostream& out, const SampledField& field, const nlohmann::json& extra = nlohmann::json::object());
void write_field(const std::string& path, const SampledField& field,
                 const nlohmann::json& extra = nlohmann::json::object());

FieldFile read_field_file(std::istream& in);
FieldFile read_field_file(const std::string& path);
SampledField read_field(const std::string& path);

nlohmann::json grid_to_json(const Grid& grid);
/// Accepts {"side","origin","spacing","counts"} or {"side","lo","hi","counts"}.
Grid grid_from_json(const nlohmann::json& j);

}  // namespace xrt
