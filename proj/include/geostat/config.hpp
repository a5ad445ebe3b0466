#pragma once

#include <nlohmann/json.hpp>

#include "geostat/presets.hpp"

namespace geostat {

// JSON forms of the frozen configurations, used for sidecar metadata and for
// --config overrides.
nlohmann::json to_json(const KrigingPreset& preset);
nlohmann::json to_json(const GeoCPPreset& preset);

// Overwrites only the fields present in `overrides`. Throws InvalidArgument
// on unknown enum names or mistyped values.
void apply_overrides(KrigingPreset& preset, const nlohmann::json& overrides);
void apply_overrides(GeoCPPreset& preset, const nlohmann::json& overrides);

}  // namespace geostat
