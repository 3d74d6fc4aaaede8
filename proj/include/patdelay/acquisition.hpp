#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "patdelay/error.hpp"
#include "patdelay/geometry.hpp"
#include "patdelay/numeric.hpp"
#include "patdelay/terminal.hpp"

namespace patdelay {

/// Linear sizes of the search problem at range, plus the angular quantities the
/// seek/stare constraint needs.
struct AcquisitionGeometry {
  double range_m = 0.0;
  double fou_radius_m = 0.0;
  double beam_diameter_m = 0.0;
  double fou_seek_deg = 0.0;
  double fou_stare_deg = 0.0;
  double stare_sensor_fov_deg = 0.0;
};

/// Hexagonal spiral search: n_steps beam positions visited with four diagonal
/// slews for every two horizontal slews.
struct SearchPlan {
  std::int64_t n_steps = 0;
  std::int64_t n_diagonal = 0;
  std::int64_t n_horizontal = 0;
  double step_length_m = 0.0;
  double tip_speed_m_s = 0.0;
  double tilt_speed_m_s = 0.0;
};

struct AcquisitionOptions {
  // Beam size as 2 * D * tan(theta / 2) instead of the literal D * tan(theta / 2).
  bool geometric_d_mode = false;
  // Fraction of the pattern searched; 1 is the worst case, 0.5 the mean for a
  // uniformly placed partner.
  double expected_fraction = 1.0;
};

struct AcquisitionResult {
  double t_seek_s = 0.0;
  double dwell_total_s = 0.0;
  double t_acq_s = 0.0;
  SearchPlan plan{};
};

/// Number of beam positions that tile a FOU disk of radius R with spots of
/// width d in hexagonal close packing.
inline std::int64_t n_steps(double fou_radius_m, double beam_diameter_m) {
  if (!(fou_radius_m > 0.0) || !(beam_diameter_m > 0.0)) {
    throw Error(ErrorCode::InvalidGeometry, "n_steps needs R > 0 and d > 0");
  }
  const double ratio = 2.0 * std::numbers::pi * fou_radius_m * fou_radius_m /
                       (std::numbers::sqrt3 * beam_diameter_m * beam_diameter_m);
  return ceil_count(ratio);
}

inline SearchPlan make_search_plan(std::int64_t steps, double step_length_m, double tip_speed_m_s,
                                   double tilt_speed_m_s) {
  if (steps < 0 || !(tip_speed_m_s > 0.0) || !(tilt_speed_m_s > 0.0)) {
    throw Error(ErrorCode::InvalidGeometry, "search plan needs steps >= 0 and positive FSM speeds");
  }
  const std::int64_t groups = (steps + 5) / 6;
  return {steps, 4 * groups, 2 * groups, step_length_m, tip_speed_m_s, tilt_speed_m_s};
}

inline double seek_time(const SearchPlan& plan) {
  const double slow = std::min(plan.tip_speed_m_s, plan.tilt_speed_m_s);
  return static_cast<double>(plan.n_diagonal) * plan.step_length_m / slow +
         static_cast<double>(plan.n_horizontal) * plan.step_length_m / plan.tip_speed_m_s;
}

/// Sweep speed of the beam spot at range for a given FSM angular rate.
inline double fsm_linear_speed(double range_m, double fsm_rate_rad_s) {
  if (!(range_m > 0.0) || !(fsm_rate_rad_s > 0.0)) {
    throw Error(ErrorCode::InvalidGeometry, "fsm_linear_speed needs range > 0 and rate > 0");
  }
  return range_m * fsm_rate_rad_s;
}

inline AcquisitionGeometry make_acquisition_geometry(double range_m, const TerminalSpec& seeker,
                                                     const TerminalSpec& stare,
                                                     const AcquisitionOptions& opts = {}) {
  AcquisitionGeometry g;
  g.range_m = range_m;
  g.fou_radius_m = project_angle_to_length(range_m, deg_to_rad(seeker.fou_deg));
  g.beam_diameter_m = project_angle_to_length(range_m, deg_to_rad(seeker.beam_width_deg));
  if (opts.geometric_d_mode) g.beam_diameter_m *= 2.0;
  g.fou_seek_deg = seeker.fou_deg;
  g.fou_stare_deg = stare.fou_deg;
  g.stare_sensor_fov_deg = stare.track_sensor_fov_deg;
  return g;
}

inline AcquisitionResult acquisition_delay(const AcquisitionGeometry& geometry, const TerminalSpec& seeker,
                                           const AcquisitionOptions& opts = {}) {
  if (seeker.beaconless) return {};
  if (!(geometry.range_m > 0.0) || !(geometry.fou_radius_m > 0.0) || !(geometry.beam_diameter_m > 0.0) ||
      !(geometry.fou_radius_m > geometry.beam_diameter_m / 2.0)) {
    throw Error(ErrorCode::InvalidGeometry, "acquisition needs D > 0, d > 0 and R > d/2");
  }
  if (!(geometry.stare_sensor_fov_deg > geometry.fou_stare_deg)) {
    throw Error(ErrorCode::StareFovViolation, "stare track sensor FOV must exceed the stare FOU");
  }
  if (!(opts.expected_fraction > 0.0 && opts.expected_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidGeometry, "expected_fraction must lie in (0, 1]");
  }

  std::int64_t steps = n_steps(geometry.fou_radius_m, geometry.beam_diameter_m);
  if (opts.expected_fraction < 1.0) {
    steps = ceil_count(static_cast<double>(steps) * opts.expected_fraction);
  }
  const SearchPlan plan =
      make_search_plan(steps, geometry.beam_diameter_m, fsm_linear_speed(geometry.range_m, seeker.fsm_tip_rate_rad_s),
                       fsm_linear_speed(geometry.range_m, seeker.fsm_tilt_rate_rad_s));
  AcquisitionResult r;
  r.plan = plan;
  r.t_seek_s = seek_time(plan);
  r.dwell_total_s = static_cast<double>(steps) * seeker.dwell_time_s;
  r.t_acq_s = r.t_seek_s + r.dwell_total_s;
  return r;
}

enum class Seeker { A, B };

/// The endpoint with the larger FOU seeks; ties go to A.
inline Seeker select_seeker(const TerminalSpec& a, const TerminalSpec& b) {
  return b.fou_deg > a.fou_deg ? Seeker::B : Seeker::A;
}

}  // namespace patdelay
