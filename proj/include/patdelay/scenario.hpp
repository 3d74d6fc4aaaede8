#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "patdelay/acquisition.hpp"
#include "patdelay/error.hpp"
#include "patdelay/geometry.hpp"
#include "patdelay/pointing.hpp"
#include "patdelay/terminal.hpp"
#include "patdelay/tracking.hpp"

namespace patdelay {

inline constexpr double kMuEarth = 3.986004418e14;         // m^3/s^2
inline constexpr double kEarthRadius = 6371.0e3;           // m
inline constexpr double kEarthRotationRate = 7.2921159e-5; // rad/s, sidereal

// ---------------------------------------------------------------------------
// Nodes

enum class NodeClass { Leo, Ground, DeepSpace };

constexpr std::string_view to_string(NodeClass c) {
  switch (c) {
    case NodeClass::Leo: return "LEO";
    case NodeClass::Ground: return "GROUND";
    case NodeClass::DeepSpace: return "DEEP_SPACE";
  }
  return "?";
}

inline std::optional<NodeClass> node_class_from_string(std::string_view s) {
  if (s == "LEO") return NodeClass::Leo;
  if (s == "GROUND") return NodeClass::Ground;
  if (s == "DEEP_SPACE") return NodeClass::DeepSpace;
  return std::nullopt;
}

struct LeoOrbit {
  double altitude_km = 550.0;
  double inclination_deg = 53.0;
  double raan_deg = 0.0;
  double true_anomaly_deg = 0.0;  // at epoch
};

struct GroundSite {
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
};

struct DeepSpaceTarget {
  Vec3 direction{1.0, 0.0, 0.0};  // inertial, unit
  double range_m = 1.0e11;
};

using Placement = std::variant<LeoOrbit, GroundSite, DeepSpaceTarget>;

struct Node {
  std::string id;
  std::string terminal;  // name of the terminal spec, informational
  TerminalSpec spec{};
  Placement placement{};

  NodeClass node_class() const {
    switch (placement.index()) {
      case 0: return NodeClass::Leo;
      case 1: return NodeClass::Ground;
      default: return NodeClass::DeepSpace;
    }
  }
};

inline double orbital_period(const LeoOrbit& orbit) {
  const double a = kEarthRadius + orbit.altitude_km * 1e3;
  return kTwoPi * std::sqrt(a * a * a / kMuEarth);
}

namespace detail {

struct LeoState {
  Vec3 position;
  Vec3 velocity_dir;
};

inline LeoState leo_state(const LeoOrbit& o, double t) {
  const double a = kEarthRadius + o.altitude_km * 1e3;
  const double mean_motion = std::sqrt(kMuEarth / (a * a * a));
  const double u = deg_to_rad(o.true_anomaly_deg) + mean_motion * t;
  const double inc = deg_to_rad(o.inclination_deg);
  const double raan = deg_to_rad(o.raan_deg);
  const double cu = std::cos(u), su = std::sin(u);
  const double ci = std::cos(inc), si = std::sin(inc);
  const double co = std::cos(raan), so = std::sin(raan);
  // Rz(raan) * Rx(inc) applied to the in-plane vectors (cos u, sin u, 0) and (-sin u, cos u, 0).
  auto rotate = [&](double px, double py) {
    const double x1 = px;
    const double y1 = py * ci;
    const double z1 = py * si;
    return Vec3{co * x1 - so * y1, so * x1 + co * y1, z1};
  };
  return {rotate(cu, su) * a, rotate(-su, cu)};
}

inline double ground_angle(const GroundSite& s, double t) {
  return deg_to_rad(s.longitude_deg) + kEarthRotationRate * t;
}

}  // namespace detail

/// Earth-centered inertial position at t seconds after epoch.
inline Vec3 propagate(const Node& node, double t) {
  return std::visit(
      [t](const auto& p) -> Vec3 {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LeoOrbit>) {
          return detail::leo_state(p, t).position;
        } else if constexpr (std::is_same_v<T, GroundSite>) {
          const double lat = deg_to_rad(p.latitude_deg);
          const double lon = detail::ground_angle(p, t);
          return Vec3{std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)} * kEarthRadius;
        } else {
          return normalized(p.direction) * p.range_m;
        }
      },
      node.placement);
}

/// Gimbal frame of a node: topocentric ENU on the ground, velocity-as-north
/// orbital frame for LEO, and for deep-space nodes a fixed inertial frame whose
/// north axis points back at Earth.
inline LocalFrame node_frame(const Node& node, double t) {
  return std::visit(
      [&](const auto& p) -> LocalFrame {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LeoOrbit>) {
          const auto st = detail::leo_state(p, t);
          const Vec3 up = normalized(st.position);
          const Vec3 north = normalized(st.velocity_dir);
          return {st.position, cross(north, up), north, up};
        } else if constexpr (std::is_same_v<T, GroundSite>) {
          const double lat = deg_to_rad(p.latitude_deg);
          const double lon = detail::ground_angle(p, t);
          const double cl = std::cos(lat), sl = std::sin(lat);
          const double co = std::cos(lon), so = std::sin(lon);
          return {propagate(node, t), Vec3{-so, co, 0.0}, Vec3{-sl * co, -sl * so, cl}, Vec3{cl * co, cl * so, sl}};
        } else {
          const Vec3 north = -normalized(p.direction);
          Vec3 ref{0.0, 0.0, 1.0};
          if (std::abs(dot(ref, north)) > 0.99) ref = Vec3{1.0, 0.0, 0.0};
          const Vec3 up = normalized(ref - north * dot(ref, north));
          return {propagate(node, t), cross(north, up), north, up};
        }
      },
      node.placement);
}

// ---------------------------------------------------------------------------
// Line of sight

struct LineOfSight {
  Vec3 direction{};
  double range_m = 0.0;
  bool occluded = false;
};

/// Direction and range from a to b. The link is occluded when the segment
/// passes through the sphere of radius occlusion_radius_m; an endpoint inside
/// that sphere (a ground site) instead needs the other end above its horizon.
inline LineOfSight line_of_sight(const Vec3& a_pos, const Vec3& b_pos,
                                 double occlusion_radius_m = kEarthRadius + 100.0e3) {
  const Vec3 ab = b_pos - a_pos;
  const double range = norm(ab);
  if (!(range > 0.0)) {
    throw Error(ErrorCode::CoincidentNodes, "line of sight between coincident positions");
  }
  LineOfSight los{ab * (1.0 / range), range, false};
  const bool a_low = norm(a_pos) < occlusion_radius_m;
  const bool b_low = norm(b_pos) < occlusion_radius_m;
  if (a_low || b_low) {
    if (a_low && dot(los.direction, a_pos) < 0.0) los.occluded = true;
    if (b_low && dot(-los.direction, b_pos) < 0.0) los.occluded = true;
    return los;
  }
  const double s = std::clamp(-dot(a_pos, ab) / (range * range), 0.0, 1.0);
  const Vec3 closest = a_pos + ab * s;
  los.occluded = norm(closest) < occlusion_radius_m;
  return los;
}

// ---------------------------------------------------------------------------
// Scenario description

enum class LeoLeoLinks { None, AdjacentPlane, CrossPlane, All };

struct LinkPolicy {
  LeoLeoLinks leo_leo = LeoLeoLinks::CrossPlane;
  bool ground_leo = true;
  bool ground_deep_space = true;
  bool leo_deep_space = false;
  bool deep_space_deep_space = false;
  std::vector<std::pair<std::string, std::string>> extra_pairs;
};

struct ScenarioControls {
  double horizon_s = 86400.0;
  double time_step_s = 10.0;
  std::uint64_t seed = 42;
  double elevation_mask_deg = 10.0;
  double atmosphere_margin_m = 100.0e3;
  // Scheduler slot length; each slot every node serves at most one link.
  double slot_s = 300.0;
  // Links with a deep-space endpoint are matched before the rest of a slot.
  bool prioritize_ipn = true;
};

struct ModelOptions {
  PointingOptions pointing{};
  AcquisitionOptions acquisition{};
  TrackingSimOptions tracking{};
};

struct Scenario {
  std::vector<Node> nodes;
  LinkPolicy links{};
  ScenarioControls controls{};
  ModelOptions model{};

  std::optional<std::size_t> find(std::string_view id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].id == id) return i;
    }
    return std::nullopt;
  }

  const Node& node(std::string_view id) const {
    if (auto i = find(id)) return nodes[*i];
    throw Error(ErrorCode::UnknownNode, "unknown node id '" + std::string(id) + "'");
  }
};

struct Contact {
  std::string node_a;
  std::string node_b;
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<std::string> seeker;  // overrides the default seeker selection
};

// ---------------------------------------------------------------------------
// Contact opportunities

namespace detail {

inline bool same_plane(const LeoOrbit& a, const LeoOrbit& b) {
  return std::abs(a.raan_deg - b.raan_deg) < 1e-9 && std::abs(a.inclination_deg - b.inclination_deg) < 1e-9;
}

/// Sorted distinct RAANs of the scenario's LEO nodes; a node's plane is its index here.
inline std::vector<double> plane_raans(const std::vector<Node>& nodes) {
  std::vector<double> raans;
  for (const auto& n : nodes) {
    if (const auto* o = std::get_if<LeoOrbit>(&n.placement)) {
      const double r = std::fmod(std::fmod(o->raan_deg, 360.0) + 360.0, 360.0);
      if (std::none_of(raans.begin(), raans.end(), [&](double x) { return std::abs(x - r) < 1e-9; })) raans.push_back(r);
    }
  }
  std::sort(raans.begin(), raans.end());
  return raans;
}

inline std::size_t plane_index(const std::vector<double>& raans, const LeoOrbit& o) {
  const double r = std::fmod(std::fmod(o.raan_deg, 360.0) + 360.0, 360.0);
  for (std::size_t i = 0; i < raans.size(); ++i) {
    if (std::abs(raans[i] - r) < 1e-9) return i;
  }
  return 0;
}

}  // namespace detail

/// Node index pairs (i < j) that may form links under the scenario's policy.
inline std::vector<std::pair<std::size_t, std::size_t>> configured_pairs(const Scenario& sc) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const auto& nodes = sc.nodes;
  const auto raans = detail::plane_raans(nodes);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const NodeClass a = nodes[i].node_class();
      const NodeClass b = nodes[j].node_class();
      auto is = [&](NodeClass x, NodeClass y) { return (a == x && b == y) || (a == y && b == x); };
      bool take = false;
      if (is(NodeClass::Leo, NodeClass::Leo)) {
        if (sc.links.leo_leo == LeoLeoLinks::All) {
          take = true;
        } else if (sc.links.leo_leo == LeoLeoLinks::CrossPlane) {
          take = !detail::same_plane(std::get<LeoOrbit>(nodes[i].placement), std::get<LeoOrbit>(nodes[j].placement));
        } else if (sc.links.leo_leo == LeoLeoLinks::AdjacentPlane) {
          const std::size_t pi = detail::plane_index(raans, std::get<LeoOrbit>(nodes[i].placement));
          const std::size_t pj = detail::plane_index(raans, std::get<LeoOrbit>(nodes[j].placement));
          const std::size_t np = raans.size();
          take = np > 1 && ((pi + 1) % np == pj || (pj + 1) % np == pi);
        }
      } else if (is(NodeClass::Ground, NodeClass::Leo)) {
        take = sc.links.ground_leo;
      } else if (is(NodeClass::Ground, NodeClass::DeepSpace)) {
        take = sc.links.ground_deep_space;
      } else if (is(NodeClass::Leo, NodeClass::DeepSpace)) {
        take = sc.links.leo_deep_space;
      } else if (is(NodeClass::DeepSpace, NodeClass::DeepSpace)) {
        take = sc.links.deep_space_deep_space;
      }
      if (take) pairs.emplace_back(i, j);
    }
  }
  for (const auto& [x, y] : sc.links.extra_pairs) {
    const auto ix = sc.find(x);
    const auto iy = sc.find(y);
    if (!ix || !iy) throw Error(ErrorCode::UnknownNode, "link pair names unknown node '" + (ix ? y : x) + "'");
    if (*ix == *iy) throw Error(ErrorCode::CoincidentNodes, "link pair joins node '" + x + "' to itself");
    const auto key = std::minmax(*ix, *iy);
    if (std::find(pairs.begin(), pairs.end(), std::pair{key.first, key.second}) == pairs.end()) {
      pairs.emplace_back(key.first, key.second);
    }
  }
  return pairs;
}

inline bool contact_order(const Contact& x, const Contact& y) {
  if (x.start_s != y.start_s) return x.start_s < y.start_s;
  if (x.node_a != y.node_a) return x.node_a < y.node_a;
  if (x.node_b != y.node_b) return x.node_b < y.node_b;
  return x.end_s < y.end_s;
}

/// Maximal visibility intervals, sampled every time_step, for every configured
/// pair. Ground links also need the partner above the elevation mask. A LEO or
/// ground endpoint must also be able to follow its partner: when the line of
/// sight turns further in one step than that node's faster gimbal axis can
/// slew, the interval is cut at that step.
inline std::vector<Contact> generate_contacts(const Scenario& sc, double horizon_s, double time_step_s) {
  if (sc.nodes.size() < 2) {
    throw Error(ErrorCode::EmptyScenario, "scenario needs at least two nodes");
  }
  if (!(horizon_s > 0.0) || !(time_step_s > 0.0)) {
    throw Error(ErrorCode::ValidationError, "horizon and time_step must be positive");
  }
  const auto pairs = configured_pairs(sc);
  if (pairs.empty()) {
    throw Error(ErrorCode::EmptyScenario, "no node pairs are eligible for links");
  }

  const auto n_samples = static_cast<std::size_t>(std::floor(horizon_s / time_step_s + 1e-9)) + 1;
  std::vector<std::vector<Vec3>> pos(sc.nodes.size(), std::vector<Vec3>(n_samples));
  for (std::size_t i = 0; i < sc.nodes.size(); ++i) {
    for (std::size_t k = 0; k < n_samples; ++k) {
      pos[i][k] = propagate(sc.nodes[i], static_cast<double>(k) * time_step_s);
    }
  }

  const double occlusion_radius = kEarthRadius + sc.controls.atmosphere_margin_m;
  const double sin_mask = std::sin(deg_to_rad(sc.controls.elevation_mask_deg));
  std::vector<Contact> out;
  for (const auto& [i, j] : pairs) {
    const bool gi = sc.nodes[i].node_class() == NodeClass::Ground;
    const bool gj = sc.nodes[j].node_class() == NodeClass::Ground;
    auto reach = [&](const Node& n) {
      if (n.node_class() == NodeClass::DeepSpace) return kPi;
      return deg_to_rad(std::max(n.spec.slew_rate_az_deg_s, n.spec.slew_rate_el_deg_s)) * time_step_s;
    };
    const double reach_max = std::min(reach(sc.nodes[i]), reach(sc.nodes[j]));
    Vec3 prev_dir{};
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::size_t run_start = kNone;
    auto close_run = [&](std::size_t last) {
      if (last > run_start) {
        out.push_back({sc.nodes[i].id, sc.nodes[j].id, static_cast<double>(run_start) * time_step_s,
                       static_cast<double>(last) * time_step_s, std::nullopt});
      }
      run_start = kNone;
    };
    for (std::size_t k = 0; k < n_samples; ++k) {
      const LineOfSight los = line_of_sight(pos[i][k], pos[j][k], occlusion_radius);
      bool visible = !los.occluded;
      if (visible && gi) visible = dot(los.direction, normalized(pos[i][k])) >= sin_mask;
      if (visible && gj) visible = dot(-los.direction, normalized(pos[j][k])) >= sin_mask;
      if (visible && run_start != kNone && angle_between(prev_dir, los.direction) >= reach_max) {
        close_run(k - 1);
      }
      if (visible) {
        if (run_start == kNone) run_start = k;
      } else if (run_start != kNone) {
        close_run(k - 1);
      }
      prev_dir = los.direction;
    }
    if (run_start != kNone) close_run(n_samples - 1);
  }
  std::sort(out.begin(), out.end(), contact_order);
  return out;
}

namespace detail {

/// Fisher-Yates with a plain modulo draw; stable across standard libraries.
template <class T>
void portable_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng() % i]);
  }
}

}  // namespace detail

/// Turns overlapping visibility opportunities into a contact plan in which every
/// node serves at most one link at a time. Time is cut into slots; in each slot
/// the pairs visible for the whole slot are matched greedily in a seeded random
/// order (deep-space links first when prioritize_ipn is set). Consecutive slots
/// of the same pair merge into one contact.
inline std::vector<Contact> schedule_contacts(const Scenario& sc, const std::vector<Contact>& opportunities) {
  const double slot = sc.controls.slot_s;
  const double horizon = sc.controls.horizon_s;
  if (!(slot > 0.0)) throw Error(ErrorCode::ValidationError, "slot_s must be positive");

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < sc.nodes.size(); ++i) index[sc.nodes[i].id] = i;
  auto is_ipn = [&](const Contact& c) {
    return sc.nodes.at(index.at(c.node_a)).node_class() == NodeClass::DeepSpace ||
           sc.nodes.at(index.at(c.node_b)).node_class() == NodeClass::DeepSpace;
  };

  std::mt19937_64 rng(sc.controls.seed);
  std::map<std::pair<std::string, std::string>, std::size_t> open;  // pair -> index into plan
  std::vector<Contact> plan;
  const auto n_slots = static_cast<std::size_t>(std::ceil(horizon / slot - 1e-9));
  for (std::size_t k = 0; k < n_slots; ++k) {
    const double t0 = static_cast<double>(k) * slot;
    const double t1 = std::min(static_cast<double>(k + 1) * slot, horizon);  // same rounding as the next t0
    std::vector<const Contact*> first, rest;
    for (const Contact& c : opportunities) {
      if (c.start_s <= t0 && c.end_s >= t1) (sc.controls.prioritize_ipn && is_ipn(c) ? first : rest).push_back(&c);
    }
    detail::portable_shuffle(first, rng);
    detail::portable_shuffle(rest, rng);
    first.insert(first.end(), rest.begin(), rest.end());

    std::vector<bool> busy(sc.nodes.size(), false);
    std::map<std::pair<std::string, std::string>, std::size_t> still_open;
    for (const Contact* c : first) {
      const std::size_t a = index.at(c->node_a), b = index.at(c->node_b);
      if (busy[a] || busy[b]) continue;
      busy[a] = busy[b] = true;
      const auto key = std::pair{c->node_a, c->node_b};
      if (auto it = open.find(key); it != open.end() && plan[it->second].end_s == t0) {
        plan[it->second].end_s = t1;
        still_open[key] = it->second;
      } else {
        plan.push_back({c->node_a, c->node_b, t0, t1, std::nullopt});
        still_open[key] = plan.size() - 1;
      }
    }
    open = std::move(still_open);
  }
  std::sort(plan.begin(), plan.end(), contact_order);
  return plan;
}

// ---------------------------------------------------------------------------
// Transition classes and per-contact evaluation

enum class LinkTransitionClass { IpnToIpn, GroundOrLeoToIpn, LeoToLeo, LeoToGround, FirstContact };

constexpr std::string_view to_string(LinkTransitionClass c) {
  switch (c) {
    case LinkTransitionClass::IpnToIpn: return "IPN_TO_IPN";
    case LinkTransitionClass::GroundOrLeoToIpn: return "GROUND_OR_LEO_TO_IPN";
    case LinkTransitionClass::LeoToLeo: return "LEO_TO_LEO";
    case LinkTransitionClass::LeoToGround: return "LEO_TO_GROUND";
    case LinkTransitionClass::FirstContact: return "FIRST_CONTACT";
  }
  return "?";
}

inline std::optional<LinkTransitionClass> transition_class_from_string(std::string_view s) {
  for (auto c : {LinkTransitionClass::IpnToIpn, LinkTransitionClass::GroundOrLeoToIpn, LinkTransitionClass::LeoToLeo,
                 LinkTransitionClass::LeoToGround, LinkTransitionClass::FirstContact}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

/// Class of one endpoint's retarget, keyed on what it linked to before and next.
inline LinkTransitionClass classify_transition(NodeClass node, std::optional<NodeClass> previous_partner,
                                               NodeClass next_partner) {
  using C = LinkTransitionClass;
  if (!previous_partner) return C::FirstContact;
  const NodeClass prev = *previous_partner;
  if (node == NodeClass::DeepSpace) return C::IpnToIpn;
  if (next_partner == NodeClass::DeepSpace) {
    return prev == NodeClass::DeepSpace ? C::IpnToIpn : C::GroundOrLeoToIpn;
  }
  if (next_partner == NodeClass::Ground) return C::LeoToGround;
  // next partner is a LEO satellite
  if (prev == NodeClass::Leo) return C::LeoToLeo;
  if (node == NodeClass::Ground || prev == NodeClass::Ground) return C::LeoToGround;
  return C::LeoToLeo;
}

/// One class per contact from its two endpoint classes. FIRST_CONTACT yields to
/// the other side; otherwise the class with the larger typical slew wins.
inline LinkTransitionClass contact_transition_class(LinkTransitionClass a, LinkTransitionClass b) {
  using C = LinkTransitionClass;
  if (a == C::FirstContact) return b;
  if (b == C::FirstContact) return a;
  auto rank = [](C c) {
    switch (c) {
      case C::LeoToLeo: return 4;
      case C::LeoToGround: return 3;
      case C::GroundOrLeoToIpn: return 2;
      case C::IpnToIpn: return 1;
      default: return 0;
    }
  };
  return rank(a) >= rank(b) ? a : b;
}

struct PatDelayBreakdown {
  double t_pointing_s = 0.0;
  double t_seek_s = 0.0;
  double t_dwell_total_s = 0.0;
  double t_acq_s = 0.0;
  double t_acq_to_track_s = 0.0;
  double t_total_s = 0.0;
  LinkTransitionClass transition_class = LinkTransitionClass::FirstContact;
};

/// Where an endpoint's head was left pointing, held in its own gimbal frame.
struct PriorPointing {
  NodeClass partner_class = NodeClass::Leo;
  AzEl held{};
};

struct LinkEvaluation {
  LinkTransitionClass class_a = LinkTransitionClass::FirstContact;
  LinkTransitionClass class_b = LinkTransitionClass::FirstContact;
  double pointing_a_s = 0.0;
  double pointing_b_s = 0.0;
  double range_m = 0.0;
  NodeClass seeker_class = NodeClass::Leo;
  PatDelayBreakdown breakdown{};
};

/// Full PAT pipeline for a link between a and b starting at time t.
inline LinkEvaluation evaluate_link(const Node& a, const Node& b, double t, const std::optional<PriorPointing>& prior_a,
                                    const std::optional<PriorPointing>& prior_b, const ModelOptions& model,
                                    const std::optional<std::string>& seeker_override = std::nullopt) {
  const Vec3 pa = propagate(a, t);
  const Vec3 pb = propagate(b, t);
  const LineOfSight los = line_of_sight(pa, pb);

  auto side = [&](const Node& n, const std::optional<PriorPointing>& prior, const Vec3& dir) {
    const LocalFrame frame = node_frame(n, t);
    PointingState st{dir, dir, frame};
    if (prior) st.v_init = from_az_el(prior->held, frame);
    return pointing_delay_one_side(slew_requirement(st), n.spec, model.pointing);
  };

  LinkEvaluation ev;
  ev.range_m = los.range_m;
  ev.class_a = classify_transition(a.node_class(), prior_a ? std::optional{prior_a->partner_class} : std::nullopt,
                                   b.node_class());
  ev.class_b = classify_transition(b.node_class(), prior_b ? std::optional{prior_b->partner_class} : std::nullopt,
                                   a.node_class());
  ev.pointing_a_s = side(a, prior_a, los.direction);
  ev.pointing_b_s = side(b, prior_b, -los.direction);

  Seeker who = select_seeker(a.spec, b.spec);
  if (seeker_override) {
    if (*seeker_override == a.id) {
      who = Seeker::A;
    } else if (*seeker_override == b.id) {
      who = Seeker::B;
    } else {
      throw Error(ErrorCode::UnknownNode, "seeker '" + *seeker_override + "' is not an endpoint of the link");
    }
  }
  const Node& seeker = who == Seeker::A ? a : b;
  const Node& stare = who == Seeker::A ? b : a;
  ev.seeker_class = seeker.node_class();
  const AcquisitionResult acq =
      acquisition_delay(make_acquisition_geometry(los.range_m, seeker.spec, stare.spec, model.acquisition),
                        seeker.spec, model.acquisition);

  auto& br = ev.breakdown;
  br.t_pointing_s = std::max(ev.pointing_a_s, ev.pointing_b_s);
  br.t_seek_s = acq.t_seek_s;
  br.t_dwell_total_s = acq.dwell_total_s;
  br.t_acq_s = acq.t_acq_s;
  br.t_acq_to_track_s = std::max(acq_to_track_delay(tracking_params(a.spec)), acq_to_track_delay(tracking_params(b.spec)));
  br.t_total_s = br.t_pointing_s + br.t_acq_s + br.t_acq_to_track_s;
  br.transition_class = contact_transition_class(ev.class_a, ev.class_b);
  return ev;
}

using PointingMemory = std::map<std::string, PriorPointing>;

struct EvaluatedContact {
  Contact contact;
  LinkEvaluation eval;
};

/// Evaluates one contact against the per-node pointing memory, then records the
/// line of sight each head holds at the end of the contact.
inline EvaluatedContact evaluate_contact(const Contact& contact, PointingMemory& memory, const Scenario& sc) {
  const Node& a = sc.node(contact.node_a);
  const Node& b = sc.node(contact.node_b);
  auto prior = [&](const Node& n) -> std::optional<PriorPointing> {
    if (auto it = memory.find(n.id); it != memory.end()) return it->second;
    return std::nullopt;
  };
  EvaluatedContact out{contact, evaluate_link(a, b, contact.start_s, prior(a), prior(b), sc.model, contact.seeker)};

  const LineOfSight end_los = line_of_sight(propagate(a, contact.end_s), propagate(b, contact.end_s));
  memory[a.id] = {b.node_class(), to_az_el(end_los.direction, node_frame(a, contact.end_s))};
  memory[b.id] = {a.node_class(), to_az_el(-end_los.direction, node_frame(b, contact.end_s))};
  return out;
}

/// Evaluates a plan in start order. A node may not serve two overlapping contacts.
inline std::vector<EvaluatedContact> evaluate_plan(std::vector<Contact> plan, const Scenario& sc) {
  std::stable_sort(plan.begin(), plan.end(), contact_order);
  std::map<std::string, double> busy_until;
  for (const Contact& c : plan) {
    if (c.node_a == c.node_b) throw Error(ErrorCode::CoincidentNodes, "contact links node '" + c.node_a + "' to itself");
    if (!(c.start_s < c.end_s)) throw Error(ErrorCode::ValidationError, "contact start must precede its end");
    for (const auto* id : {&c.node_a, &c.node_b}) {
      auto it = busy_until.find(*id);
      if (it != busy_until.end() && c.start_s < it->second) {
        throw Error(ErrorCode::OverlappingContacts, "node '" + *id + "' has overlapping contacts");
      }
      busy_until[*id] = c.end_s;
    }
  }
  PointingMemory memory;
  std::vector<EvaluatedContact> out;
  out.reserve(plan.size());
  for (const Contact& c : plan) out.push_back(evaluate_contact(c, memory, sc));
  return out;
}

struct SimulationRun {
  std::size_t opportunity_count = 0;
  std::vector<Contact> plan;
  std::vector<EvaluatedContact> contacts;
};

inline SimulationRun simulate(const Scenario& sc) {
  SimulationRun run;
  const auto opportunities = generate_contacts(sc, sc.controls.horizon_s, sc.controls.time_step_s);
  run.opportunity_count = opportunities.size();
  run.plan = schedule_contacts(sc, opportunities);
  run.contacts = evaluate_plan(run.plan, sc);
  return run;
}

/// "LEO Acq" or "IPN Acq" by the class of the seeking node.
inline std::string_view acquisition_label(NodeClass seeker) {
  return seeker == NodeClass::DeepSpace ? "IPN Acq" : "LEO Acq";
}

}  // namespace patdelay
