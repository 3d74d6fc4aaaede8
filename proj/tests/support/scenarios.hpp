#pragma once

#include <string>

#include "patdelay/scenario.hpp"

namespace fixtures {

inline patdelay::Node leo(std::string id, double raan, double anomaly, double alt_km = 550.0, double inc = 53.0) {
  return {std::move(id), "leo", patdelay::presets::leo_table1(), patdelay::LeoOrbit{alt_km, inc, raan, anomaly}};
}

inline patdelay::Node ground(std::string id, double lat, double lon, patdelay::TerminalSpec spec = patdelay::presets::leo_table1()) {
  return {std::move(id), "ground", spec, patdelay::GroundSite{lat, lon}};
}

inline patdelay::Node deep(std::string id, patdelay::Vec3 dir, double range_m) {
  return {std::move(id), "ipn", patdelay::presets::ipn_table1(), patdelay::DeepSpaceTarget{patdelay::normalized(dir), range_m}};
}

inline std::string reference_config_path() { return std::string(PATDELAY_SOURCE_DIR) + "/scenarios/reference_ssi.json"; }

}  // namespace fixtures
