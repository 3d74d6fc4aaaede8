#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "patdelay/error.hpp"
#include "patdelay/scenario.hpp"
#include "patdelay/stats.hpp"
#include "patdelay/terminal.hpp"

namespace patdelay {

struct OutputControls {
  double bin_width_s = 2.0;
  std::optional<double> kde_bandwidth;  // nullopt selects Silverman's rule
  double min_prominence = stats::kDefaultMinProminence;
};

struct ConfigDocument {
  std::map<std::string, TerminalSpec> terminals;
  Scenario scenario;
  OutputControls output;
  std::vector<std::string> warnings;
};

namespace config_detail {

using nlohmann::json;

[[noreturn]] inline void invalid(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ValidationError, where + ": " + what);
}

inline void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) invalid(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) invalid(where + "/" + key, "unknown key");
  }
}

inline double number(const json& obj, const std::string& where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) invalid(where + "/" + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) invalid(where + "/" + key, "expected a finite number");
  return d;
}

inline double required_number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) invalid(where, std::string("missing required key '") + key + "'");
  return number(obj, where, key, 0.0);
}

inline bool boolean(const json& obj, const std::string& where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) invalid(where + "/" + key, "expected true or false");
  return obj.at(key).get<bool>();
}

inline std::string string(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_string()) invalid(where, std::string("missing string key '") + key + "'");
  return obj.at(key).get<std::string>();
}

inline TerminalSpec parse_terminal(const json& j, const std::string& where) {
  check_keys(j, where,
             {"preset", "slew_rate_az_deg_s", "slew_rate_el_deg_s", "fsm_tip_rate_rad_s", "fsm_tilt_rate_rad_s",
              "dwell_time_s", "beam_width_deg", "fou_deg", "track_sensor_fov_deg", "poll_frequency_hz", "p_signal",
              "alpha", "beaconless"});
  TerminalSpec s;
  if (j.contains("preset")) {
    const std::string name = string(j, where, "preset");
    auto p = presets::by_name(name);
    if (!p) invalid(where + "/preset", "unknown preset '" + name + "' (expected ipn_table1 or leo_table1)");
    s = *p;
  }
  s.slew_rate_az_deg_s = number(j, where, "slew_rate_az_deg_s", s.slew_rate_az_deg_s);
  s.slew_rate_el_deg_s = number(j, where, "slew_rate_el_deg_s", s.slew_rate_el_deg_s);
  s.fsm_tip_rate_rad_s = number(j, where, "fsm_tip_rate_rad_s", s.fsm_tip_rate_rad_s);
  s.fsm_tilt_rate_rad_s = number(j, where, "fsm_tilt_rate_rad_s", s.fsm_tilt_rate_rad_s);
  s.dwell_time_s = number(j, where, "dwell_time_s", s.dwell_time_s);
  s.beam_width_deg = number(j, where, "beam_width_deg", s.beam_width_deg);
  s.fou_deg = number(j, where, "fou_deg", s.fou_deg);
  s.track_sensor_fov_deg = number(j, where, "track_sensor_fov_deg", s.track_sensor_fov_deg);
  s.poll_frequency_hz = number(j, where, "poll_frequency_hz", s.poll_frequency_hz);
  s.p_signal = number(j, where, "p_signal", s.p_signal);
  s.alpha = number(j, where, "alpha", s.alpha);
  s.beaconless = boolean(j, where, "beaconless", s.beaconless);
  s.validate(where);
  return s;
}

inline void check_leo_altitude(double alt_km, const std::string& where, std::vector<std::string>& warnings) {
  if (!(alt_km > 0.0)) invalid(where, "altitude_km must be positive");
  if (alt_km < 300.0 || alt_km > 2000.0) {
    warnings.push_back(where + ": LEO altitude " + std::to_string(alt_km) + " km is outside [300, 2000] km");
  }
}

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace config_detail

/// Parses and validates a JSON configuration document. Validation errors name
/// the JSON path of the offending value.
inline ConfigDocument parse_config(const std::string& text) {
  using namespace config_detail;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, line_col(text, e.byte) + ": " + e.what());
  }
  check_keys(root, "", {"terminals", "nodes", "constellations", "links", "scenario", "model", "output"});

  ConfigDocument doc;
  if (root.contains("terminals")) {
    if (!root["terminals"].is_object()) invalid("/terminals", "expected an object");
    for (const auto& [name, t] : root["terminals"].items()) {
      doc.terminals[name] = parse_terminal(t, "/terminals/" + name);
    }
  }
  auto resolve_terminal = [&](const std::string& name, const std::string& where) {
    if (auto it = doc.terminals.find(name); it != doc.terminals.end()) return it->second;
    if (auto p = presets::by_name(name)) return *p;
    invalid(where, "terminal '" + name + "' is not defined");
  };

  Scenario& sc = doc.scenario;
  std::set<std::string> ids;
  auto add_node = [&](Node n, const std::string& where) {
    if (n.id.empty()) invalid(where, "node id must not be empty");
    if (!ids.insert(n.id).second) invalid(where, "duplicate node id '" + n.id + "'");
    sc.nodes.push_back(std::move(n));
  };

  if (root.contains("nodes")) {
    if (!root["nodes"].is_array()) invalid("/nodes", "expected an array");
    for (std::size_t i = 0; i < root["nodes"].size(); ++i) {
      const json& j = root["nodes"][i];
      const std::string where = "/nodes/" + std::to_string(i);
      check_keys(j, where,
                 {"id", "class", "terminal", "altitude_km", "inclination_deg", "raan_deg", "true_anomaly_deg",
                  "latitude_deg", "longitude_deg", "direction", "range_m"});
      Node n;
      n.id = string(j, where, "id");
      n.terminal = string(j, where, "terminal");
      n.spec = resolve_terminal(n.terminal, where + "/terminal");
      const std::string cls = string(j, where, "class");
      const auto nc = node_class_from_string(cls);
      if (!nc) invalid(where + "/class", "expected LEO, GROUND or DEEP_SPACE");
      auto forbid = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys) {
          if (j.contains(k)) invalid(where + "/" + k, "not valid for a " + cls + " node");
        }
      };
      switch (*nc) {
        case NodeClass::Leo: {
          forbid({"latitude_deg", "longitude_deg", "direction", "range_m"});
          LeoOrbit o;
          o.altitude_km = required_number(j, where, "altitude_km");
          o.inclination_deg = number(j, where, "inclination_deg", 0.0);
          o.raan_deg = number(j, where, "raan_deg", 0.0);
          o.true_anomaly_deg = number(j, where, "true_anomaly_deg", 0.0);
          check_leo_altitude(o.altitude_km, where, doc.warnings);
          n.placement = o;
          break;
        }
        case NodeClass::Ground: {
          forbid({"altitude_km", "inclination_deg", "raan_deg", "true_anomaly_deg", "direction", "range_m"});
          GroundSite g;
          g.latitude_deg = required_number(j, where, "latitude_deg");
          g.longitude_deg = required_number(j, where, "longitude_deg");
          if (std::abs(g.latitude_deg) > 90.0) invalid(where + "/latitude_deg", "must lie in [-90, 90]");
          n.placement = g;
          break;
        }
        case NodeClass::DeepSpace: {
          forbid({"altitude_km", "inclination_deg", "raan_deg", "true_anomaly_deg", "latitude_deg", "longitude_deg"});
          DeepSpaceTarget d;
          if (!j.contains("direction") || !j["direction"].is_array() || j["direction"].size() != 3) {
            invalid(where + "/direction", "expected an array of three numbers");
          }
          for (const auto& c : j["direction"]) {
            if (!c.is_number()) invalid(where + "/direction", "expected an array of three numbers");
          }
          const Vec3 dir{j["direction"][0].get<double>(), j["direction"][1].get<double>(), j["direction"][2].get<double>()};
          if (!(norm(dir) > 0.0)) invalid(where + "/direction", "direction must be nonzero");
          d.direction = normalized(dir);
          d.range_m = required_number(j, where, "range_m");
          if (!(d.range_m >= 1e9)) invalid(where + "/range_m", "deep-space range must be >= 1e9 m");
          n.placement = d;
          break;
        }
      }
      add_node(std::move(n), where);
    }
  }

  if (root.contains("constellations")) {
    if (!root["constellations"].is_array()) invalid("/constellations", "expected an array");
    for (std::size_t i = 0; i < root["constellations"].size(); ++i) {
      const json& j = root["constellations"][i];
      const std::string where = "/constellations/" + std::to_string(i);
      check_keys(j, where,
                 {"id_prefix", "terminal", "planes", "sats_per_plane", "altitude_km", "inclination_deg", "raan0_deg",
                  "raan_spread_deg", "phasing"});
      const std::string prefix = string(j, where, "id_prefix");
      const std::string terminal = string(j, where, "terminal");
      const TerminalSpec spec = resolve_terminal(terminal, where + "/terminal");
      const double planes = required_number(j, where, "planes");
      const double per_plane = required_number(j, where, "sats_per_plane");
      if (planes < 1 || per_plane < 1 || planes != std::floor(planes) || per_plane != std::floor(per_plane)) {
        invalid(where, "planes and sats_per_plane must be positive integers");
      }
      const double alt = required_number(j, where, "altitude_km");
      check_leo_altitude(alt, where, doc.warnings);
      const double inc = number(j, where, "inclination_deg", 53.0);
      const double raan0 = number(j, where, "raan0_deg", 0.0);
      const double spread = number(j, where, "raan_spread_deg", 360.0);
      const double phasing = number(j, where, "phasing", 1.0);
      const int np = static_cast<int>(planes), ns = static_cast<int>(per_plane);
      for (int p = 0; p < np; ++p) {
        for (int s = 0; s < ns; ++s) {
          Node n;
          char buf[64];
          std::snprintf(buf, sizeof buf, "%d-%02d", p, s);
          n.id = prefix + buf;
          n.terminal = terminal;
          n.spec = spec;
          n.placement = LeoOrbit{alt, inc, raan0 + spread * p / np,
                                 360.0 * s / ns + 360.0 * phasing * p / (np * ns)};
          add_node(std::move(n), where);
        }
      }
    }
  }

  if (root.contains("links")) {
    const json& j = root["links"];
    check_keys(j, "/links",
               {"leo_leo", "ground_leo", "ground_deep_space", "leo_deep_space", "deep_space_deep_space", "pairs"});
    if (j.contains("leo_leo")) {
      const std::string mode = string(j, "/links", "leo_leo");
      if (mode == "none") {
        sc.links.leo_leo = LeoLeoLinks::None;
      } else if (mode == "adjacent_plane") {
        sc.links.leo_leo = LeoLeoLinks::AdjacentPlane;
      } else if (mode == "cross_plane") {
        sc.links.leo_leo = LeoLeoLinks::CrossPlane;
      } else if (mode == "all") {
        sc.links.leo_leo = LeoLeoLinks::All;
      } else {
        invalid("/links/leo_leo", "expected none, adjacent_plane, cross_plane or all");
      }
    }
    sc.links.ground_leo = boolean(j, "/links", "ground_leo", sc.links.ground_leo);
    sc.links.ground_deep_space = boolean(j, "/links", "ground_deep_space", sc.links.ground_deep_space);
    sc.links.leo_deep_space = boolean(j, "/links", "leo_deep_space", sc.links.leo_deep_space);
    sc.links.deep_space_deep_space = boolean(j, "/links", "deep_space_deep_space", sc.links.deep_space_deep_space);
    if (j.contains("pairs")) {
      for (std::size_t i = 0; i < j["pairs"].size(); ++i) {
        const json& p = j["pairs"][i];
        const std::string where = "/links/pairs/" + std::to_string(i);
        if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string()) {
          invalid(where, "expected [\"id_a\", \"id_b\"]");
        }
        const auto a = p[0].get<std::string>(), b = p[1].get<std::string>();
        if (!ids.count(a) || !ids.count(b)) invalid(where, "unknown node id");
        if (a == b) invalid(where, "a link needs two distinct nodes");
        sc.links.extra_pairs.emplace_back(a, b);
      }
    }
  }

  if (root.contains("scenario")) {
    const json& j = root["scenario"];
    check_keys(j, "/scenario",
               {"horizon_s", "time_step_s", "seed", "elevation_mask_deg", "slot_s", "prioritize_ipn",
                "atmosphere_margin_km"});
    auto& c = sc.controls;
    c.horizon_s = number(j, "/scenario", "horizon_s", c.horizon_s);
    c.time_step_s = number(j, "/scenario", "time_step_s", c.time_step_s);
    c.elevation_mask_deg = number(j, "/scenario", "elevation_mask_deg", c.elevation_mask_deg);
    c.slot_s = number(j, "/scenario", "slot_s", c.slot_s);
    c.prioritize_ipn = boolean(j, "/scenario", "prioritize_ipn", c.prioritize_ipn);
    c.atmosphere_margin_m = 1e3 * number(j, "/scenario", "atmosphere_margin_km", c.atmosphere_margin_m / 1e3);
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) invalid("/scenario/seed", "expected a non-negative integer");
      c.seed = j["seed"].get<std::uint64_t>();
    }
    if (!(c.horizon_s > 0.0)) invalid("/scenario/horizon_s", "must be > 0");
    if (!(c.time_step_s > 0.0)) invalid("/scenario/time_step_s", "must be > 0");
    if (!(c.slot_s > 0.0)) invalid("/scenario/slot_s", "must be > 0");
    if (!(c.elevation_mask_deg >= -90.0 && c.elevation_mask_deg < 90.0)) {
      invalid("/scenario/elevation_mask_deg", "must lie in [-90, 90)");
    }
    if (!(c.atmosphere_margin_m >= 0.0)) invalid("/scenario/atmosphere_margin_km", "must be >= 0");
  }

  if (root.contains("model")) {
    const json& j = root["model"];
    check_keys(j, "/model",
               {"sequential_axes", "geometric_d_mode", "expected_fraction", "allow_negative_counter", "max_samples"});
    auto& m = sc.model;
    m.pointing.sequential_axes = boolean(j, "/model", "sequential_axes", m.pointing.sequential_axes);
    m.acquisition.geometric_d_mode = boolean(j, "/model", "geometric_d_mode", m.acquisition.geometric_d_mode);
    m.acquisition.expected_fraction = number(j, "/model", "expected_fraction", m.acquisition.expected_fraction);
    m.tracking.allow_negative_counter = boolean(j, "/model", "allow_negative_counter", m.tracking.allow_negative_counter);
    const double max_samples = number(j, "/model", "max_samples", static_cast<double>(m.tracking.max_samples));
    if (!(max_samples >= 1.0)) invalid("/model/max_samples", "must be >= 1");
    m.tracking.max_samples = static_cast<std::int64_t>(max_samples);
    if (!(m.acquisition.expected_fraction > 0.0 && m.acquisition.expected_fraction <= 1.0)) {
      invalid("/model/expected_fraction", "must lie in (0, 1]");
    }
  }

  if (root.contains("output")) {
    const json& j = root["output"];
    check_keys(j, "/output", {"bin_width_s", "kde_bandwidth", "min_prominence"});
    auto& o = doc.output;
    o.bin_width_s = number(j, "/output", "bin_width_s", o.bin_width_s);
    o.min_prominence = number(j, "/output", "min_prominence", o.min_prominence);
    if (j.contains("kde_bandwidth")) {
      const json& bw = j["kde_bandwidth"];
      if (bw.is_string() && bw.get<std::string>() == "silverman") {
        o.kde_bandwidth.reset();
      } else if (bw.is_number() && bw.get<double>() > 0.0) {
        o.kde_bandwidth = bw.get<double>();
      } else {
        invalid("/output/kde_bandwidth", "expected \"silverman\" or a positive number");
      }
    }
    if (!(o.bin_width_s > 0.0)) invalid("/output/bin_width_s", "must be > 0");
    if (!(o.min_prominence >= 0.0 && o.min_prominence < 1.0)) invalid("/output/min_prominence", "must lie in [0, 1)");
  }
  return doc;
}

inline ConfigDocument load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + std::string(e.what()).substr(to_string(e.code()).size() + 2));
  }
}

}  // namespace patdelay
