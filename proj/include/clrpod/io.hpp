#pragma once

// Instance files (km/deg on the wire, DU/rad inside) and atomic writes.

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "clrpod/model.hpp"

namespace clrpod::io {

/// Raised for malformed instance documents; the message names the field.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

model::Instance instance_from_json(const nlohmann::json& doc);
nlohmann::json instance_to_json(const model::Instance& inst);

/// Reads and validates an instance. Throws FormatError.
model::Instance read_instance(const std::filesystem::path& path);
void write_instance(const std::filesystem::path& path,
                    const model::Instance& inst);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_atomic(const std::filesystem::path& path,
                  const std::string& content);

/// Orbit with a_km, i_deg, raan_deg.
nlohmann::json orbit_to_json(const astro::CircularOrbit& o,
                             const astro::CanonicalScale& scale);

/// Rounds to 15 significant digits so written files round-trip exactly.
double round15(double v);

}  // namespace clrpod::io
