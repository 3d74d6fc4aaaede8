#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "patdelay/acquisition.hpp"
#include "patdelay/error.hpp"
#include "patdelay/scenario.hpp"
#include "patdelay/stats.hpp"

namespace patdelay::stats {

struct SweepResult {
  std::string parameter_name;
  std::vector<double> parameter_values;
  std::vector<double> mean_delay;
  std::string class_label;
};

namespace detail {

inline void require_increasing(const std::vector<double>& grid, const char* what) {
  if (grid.empty()) throw Error(ErrorCode::ValidationError, std::string(what) + " grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw Error(ErrorCode::ValidationError, std::string(what) + " grid values must be > 0");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error(ErrorCode::ValidationError, std::string(what) + " grid must be strictly increasing");
    }
  }
}

}  // namespace detail

/// Re-evaluates a fixed contact plan with every terminal's az and el slew rate
/// set to each grid value, and reports the mean pointing delay per contact
/// transition class. FIRST_CONTACT is left out.
inline std::vector<SweepResult> sweep_slew_rate(const Scenario& scenario, const std::vector<Contact>& plan,
                                                const std::vector<double>& rates_deg_s) {
  detail::require_increasing(rates_deg_s, "slew rate");
  std::map<LinkTransitionClass, SweepResult> by_class;
  for (std::size_t r = 0; r < rates_deg_s.size(); ++r) {
    Scenario sc = scenario;
    for (Node& n : sc.nodes) {
      n.spec.slew_rate_az_deg_s = rates_deg_s[r];
      n.spec.slew_rate_el_deg_s = rates_deg_s[r];
    }
    std::map<LinkTransitionClass, std::vector<double>> samples;
    for (const auto& ec : evaluate_plan(plan, sc)) {
      const auto cls = ec.eval.breakdown.transition_class;
      if (cls != LinkTransitionClass::FirstContact) samples[cls].push_back(ec.eval.breakdown.t_pointing_s);
    }
    for (auto& [cls, v] : samples) {
      auto& res = by_class[cls];
      res.parameter_name = "slew_rate";
      res.class_label = std::string(to_string(cls));
      res.parameter_values.push_back(rates_deg_s[r]);
      res.mean_delay.push_back(mean(v));
    }
  }
  std::vector<SweepResult> out;
  for (auto& [cls, res] : by_class) out.push_back(std::move(res));
  return out;
}

inline std::vector<SweepResult> sweep_slew_rate(const Scenario& scenario, const std::vector<double>& rates_deg_s) {
  const auto opportunities = generate_contacts(scenario, scenario.controls.horizon_s, scenario.controls.time_step_s);
  return sweep_slew_rate(scenario, schedule_contacts(scenario, opportunities), rates_deg_s);
}

/// True when the swept means vary by less than threshold_s overall.
inline bool near_flat(const SweepResult& r, double threshold_s = 5.0) {
  if (r.mean_delay.empty()) return true;
  const auto [mn, mx] = std::minmax_element(r.mean_delay.begin(), r.mean_delay.end());
  return *mx - *mn < threshold_s;
}

/// A seeker/stare terminal pair whose acquisition delay is swept over FOU.
struct AcquisitionCase {
  std::string label;
  TerminalSpec seeker;
  TerminalSpec stare;
  double range_m = 1.0e6;
};

/// Worst-case acquisition delay with the seeker's FOU set to each grid value.
inline std::vector<SweepResult> sweep_fou(const std::vector<AcquisitionCase>& cases, const std::vector<double>& fous_deg,
                                          const AcquisitionOptions& opts = {}) {
  detail::require_increasing(fous_deg, "FOU");
  std::vector<SweepResult> out;
  for (const auto& c : cases) {
    SweepResult res{"fou", {}, {}, c.label};
    for (double fou : fous_deg) {
      if (!(fou > c.seeker.beam_width_deg)) {
        throw Error(ErrorCode::InvalidGeometry, "FOU " + std::to_string(fou) + " deg does not exceed the beam width");
      }
      TerminalSpec seeker = c.seeker;
      seeker.fou_deg = fou;
      const auto acq = acquisition_delay(make_acquisition_geometry(c.range_m, seeker, c.stare, opts), seeker, opts);
      res.parameter_values.push_back(fou);
      res.mean_delay.push_back(acq.t_acq_s);
    }
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace patdelay::stats
