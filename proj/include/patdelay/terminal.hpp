#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "patdelay/error.hpp"

namespace patdelay {

/// Hardware parameters of one optical terminal. Angles are in degrees, FSM
/// rates in rad/s, slew rates in deg/s.
struct TerminalSpec {
  double slew_rate_az_deg_s = 1.0;
  double slew_rate_el_deg_s = 1.0;
  double fsm_tip_rate_rad_s = 5.0e-3;
  double fsm_tilt_rate_rad_s = 5.0e-3;
  double dwell_time_s = 0.5;
  double beam_width_deg = 0.2;
  double fou_deg = 1.0;
  double track_sensor_fov_deg = 2.0;
  double poll_frequency_hz = 1000.0;
  double p_signal = 0.7;
  double alpha = 100.0;
  bool beaconless = false;

  /// Throws ValidationError naming the first violated constraint.
  void validate(std::string_view where = "terminal") const {
    auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::ValidationError, std::string(where) + ": " + what);
    };
    auto positive = [&](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) fail(std::string(name) + " must be > 0");
    };
    positive(slew_rate_az_deg_s, "slew_rate_az");
    positive(slew_rate_el_deg_s, "slew_rate_el");
    positive(fsm_tip_rate_rad_s, "fsm_tip_rate");
    positive(fsm_tilt_rate_rad_s, "fsm_tilt_rate");
    if (!(dwell_time_s >= 0.0) || !std::isfinite(dwell_time_s)) fail("dwell_time must be >= 0");
    positive(beam_width_deg, "beam_width");
    positive(fou_deg, "fou");
    positive(track_sensor_fov_deg, "track_sensor_fov");
    positive(poll_frequency_hz, "poll_frequency");
    positive(alpha, "alpha");
    if (!(beam_width_deg < fou_deg)) fail("beam_width must be smaller than fou");
    if (!(fou_deg < 180.0) || !(track_sensor_fov_deg < 180.0)) fail("fou and track_sensor_fov must be < 180 deg");
    if (!(p_signal > 2.0 / 3.0 && p_signal <= 1.0)) {
      fail("p_signal must satisfy 2/3 < p_signal <= 1 (tracking counter must drift upward)");
    }
  }
};

namespace presets {

inline TerminalSpec ipn_table1() {
  TerminalSpec s;
  s.slew_rate_az_deg_s = 1.0;
  s.slew_rate_el_deg_s = 1.0;
  s.fsm_tip_rate_rad_s = 5.0e-3;
  s.fsm_tilt_rate_rad_s = 5.0e-3;
  s.dwell_time_s = 0.5;
  s.beam_width_deg = 0.2;
  s.fou_deg = 1.0;
  s.poll_frequency_hz = 1000.0;
  s.p_signal = 0.7;
  return s;
}

inline TerminalSpec leo_table1() {
  TerminalSpec s;
  s.slew_rate_az_deg_s = 2.0;
  s.slew_rate_el_deg_s = 0.5;
  s.fsm_tip_rate_rad_s = 8.5e-3;
  s.fsm_tilt_rate_rad_s = 8.5e-3;
  s.dwell_time_s = 0.5;
  s.beam_width_deg = 0.2;
  s.fou_deg = 0.75;
  s.poll_frequency_hz = 1000.0;
  s.p_signal = 0.7;
  return s;
}

inline std::optional<TerminalSpec> by_name(std::string_view name) {
  if (name == "ipn_table1") return ipn_table1();
  if (name == "leo_table1") return leo_table1();
  return std::nullopt;
}

}  // namespace presets
}  // namespace patdelay
