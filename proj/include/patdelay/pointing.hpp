#pragma once

#include <algorithm>

#include "patdelay/geometry.hpp"
#include "patdelay/terminal.hpp"

namespace patdelay {

/// Where the optical head points now and where the next link needs it.
struct PointingState {
  Vec3 v_init{};
  Vec3 v_link{};
  LocalFrame frame{};
};

struct SlewRequirement {
  double total_angle = 0.0;  // rad
  double delta_az = 0.0;     // rad
  double delta_el = 0.0;     // rad
};

struct PointingOptions {
  // Sum the per-axis times instead of taking the slower axis.
  bool sequential_axes = false;
};

inline SlewRequirement slew_requirement(const PointingState& state) {
  const double total = angle_between(state.v_init, state.v_link);
  const AzEl from = to_az_el(state.v_init, state.frame);
  const AzEl to = to_az_el(state.v_link, state.frame);
  const AzElDelta d = angular_separation_az_el(from, to);
  return {total, d.delta_az, d.delta_el};
}

/// Coarse-pointing time for one terminal. Both gimbal axes move at once, so the
/// slower axis sets the time unless sequential_axes is requested.
inline double pointing_delay_one_side(const SlewRequirement& req, const TerminalSpec& spec,
                                      const PointingOptions& opts = {}) {
  const double t_az = req.delta_az / deg_to_rad(spec.slew_rate_az_deg_s);
  const double t_el = req.delta_el / deg_to_rad(spec.slew_rate_el_deg_s);
  return opts.sequential_axes ? t_az + t_el : std::max(t_az, t_el);
}

/// Acquisition starts only after both ends finish slewing.
inline double pointing_delay_link(const PointingState& state_a, const TerminalSpec& spec_a,
                                  const PointingState& state_b, const TerminalSpec& spec_b,
                                  const PointingOptions& opts = {}) {
  return std::max(pointing_delay_one_side(slew_requirement(state_a), spec_a, opts),
                  pointing_delay_one_side(slew_requirement(state_b), spec_b, opts));
}

}  // namespace patdelay
