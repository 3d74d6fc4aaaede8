#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "patdelay/config.hpp"
#include "patdelay/error.hpp"
#include "patdelay/scenario.hpp"
#include "patdelay/stats.hpp"
#include "patdelay/sweep.hpp"

namespace patdelay::io {

using nlohmann::json;

inline constexpr std::array<std::string_view, 13> kDelaysHeader = {
    "contact_id", "node_a",  "node_b",   "start_s", "end_s",   "class_a",  "class_b",
    "t_pointing_s", "t_seek_s", "t_dwell_s", "t_acq_s", "t_track_s", "t_total_s"};

inline constexpr std::string_view kSweepHeader = "class,param_value,mean_delay_s";

// ---------------------------------------------------------------------------
// Number formatting. std::to_chars keeps output identical across locales and
// platforms.

inline std::string fixed6(double v) {
  if (v == 0.0) v = 0.0;  // no "-0.000000"
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  return {buf, res.ptr};
}

inline std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

/// Rounds to 6 significant digits; the JSON writer then prints the short form.
inline double sig6(double v) {
  if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  double out = 0.0;
  std::from_chars(buf, res.ptr, out);
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

/// Writes via a temporary file and rename, so a failed run leaves no partial file.
inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// delays.csv

struct DelayRow {
  std::string contact_id;
  std::string node_a;
  std::string node_b;
  double start_s = 0.0;
  double end_s = 0.0;
  LinkTransitionClass class_a = LinkTransitionClass::FirstContact;
  LinkTransitionClass class_b = LinkTransitionClass::FirstContact;
  double t_pointing_s = 0.0;
  double t_seek_s = 0.0;
  double t_dwell_s = 0.0;
  double t_acq_s = 0.0;
  double t_track_s = 0.0;
  double t_total_s = 0.0;
};

inline std::string delays_csv(const std::vector<EvaluatedContact>& contacts) {
  std::string out;
  for (std::size_t i = 0; i < kDelaysHeader.size(); ++i) {
    if (i) out += ',';
    out += kDelaysHeader[i];
  }
  out += '\n';
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    const auto& c = contacts[i].contact;
    const auto& ev = contacts[i].eval;
    const auto& b = ev.breakdown;
    out += std::to_string(i) + ',' + c.node_a + ',' + c.node_b + ',' + fixed6(c.start_s) + ',' + fixed6(c.end_s) + ',';
    out += std::string(to_string(ev.class_a)) + ',' + std::string(to_string(ev.class_b)) + ',';
    out += fixed6(b.t_pointing_s) + ',' + fixed6(b.t_seek_s) + ',' + fixed6(b.t_dwell_total_s) + ',' +
           fixed6(b.t_acq_s) + ',' + fixed6(b.t_acq_to_track_s) + ',' + fixed6(b.t_total_s) + '\n';
  }
  return out;
}

inline std::vector<DelayRow> read_delays_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw Error(ErrorCode::SchemaError, "missing header row");
  const auto header = split_csv_line(lines[0]);
  const std::set<std::string> have(header.begin(), header.end());
  std::set<std::string> want;
  for (auto h : kDelaysHeader) want.emplace(h);
  std::string missing;
  for (auto w : kDelaysHeader) {
    if (!have.count(std::string(w))) missing += (missing.empty() ? "'" : ", '") + std::string(w) + "'";
  }
  if (!missing.empty()) throw Error(ErrorCode::SchemaError, "missing column " + missing);
  for (const auto& h : header) {
    if (!want.count(h)) throw Error(ErrorCode::SchemaError, "unexpected column '" + h + "'");
  }
  if (header.size() != want.size()) throw Error(ErrorCode::SchemaError, "duplicate column in header");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;

  std::vector<DelayRow> rows;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const auto f = split_csv_line(lines[ln]);
    const std::string where = "line " + std::to_string(ln + 1);
    if (f.size() != header.size()) throw Error(ErrorCode::SchemaError, where + ": expected " + std::to_string(header.size()) + " fields");
    auto num = [&](const char* name) {
      auto v = parse_double(f[col.at(name)]);
      if (!v) throw Error(ErrorCode::SchemaError, where + ": column '" + name + "' is not a number");
      return *v;
    };
    auto cls = [&](const char* name) {
      auto c = transition_class_from_string(f[col.at(name)]);
      if (!c) throw Error(ErrorCode::SchemaError, where + ": column '" + name + "' is not a transition class");
      return *c;
    };
    DelayRow r;
    r.contact_id = f[col.at("contact_id")];
    r.node_a = f[col.at("node_a")];
    r.node_b = f[col.at("node_b")];
    r.start_s = num("start_s");
    r.end_s = num("end_s");
    r.class_a = cls("class_a");
    r.class_b = cls("class_b");
    r.t_pointing_s = num("t_pointing_s");
    r.t_seek_s = num("t_seek_s");
    r.t_dwell_s = num("t_dwell_s");
    r.t_acq_s = num("t_acq_s");
    r.t_track_s = num("t_track_s");
    r.t_total_s = num("t_total_s");
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Distribution JSON

inline json to_json(const stats::DelayDistribution& d) {
  json j;
  j["label"] = d.class_label;
  j["count"] = d.samples.size();
  json bins = json::array();
  for (const auto& b : d.bins) bins.push_back({sig6(b.lower), sig6(b.upper), b.count});
  j["bins"] = std::move(bins);
  if (d.kde) {
    json x = json::array(), y = json::array();
    for (double v : d.kde->x) x.push_back(sig6(v));
    for (double v : d.kde->density) y.push_back(sig6(v));
    j["kde"] = {{"bandwidth", sig6(d.kde->bandwidth)}, {"x", std::move(x)}, {"density", std::move(y)}};
  } else {
    j["kde"] = nullptr;
  }
  json modes = json::array();
  for (const auto& m : d.modes) modes.push_back({{"location", sig6(m.location)}, {"density", sig6(m.density)}});
  j["modes"] = std::move(modes);
  return j;
}

/// Acquisition label inferred from the endpoint classes of a delays.csv row:
/// any IPN transition marks the link as a deep-space link.
inline std::string_view acquisition_label_from_classes(LinkTransitionClass a, LinkTransitionClass b) {
  using C = LinkTransitionClass;
  auto ipn = [](C c) { return c == C::IpnToIpn || c == C::GroundOrLeoToIpn; };
  if (ipn(a) || ipn(b)) return "IPN Acq";
  if (a == C::FirstContact && b == C::FirstContact) return "UNCLASSIFIED Acq";
  return "LEO Acq";
}

struct LabeledSample {
  std::string label;
  double pointing_s = 0.0;
  double acq_s = 0.0;
  LinkTransitionClass contact_class = LinkTransitionClass::FirstContact;
};

/// Pointing and acquisition distributions, overall and per class. Samples are
/// sorted before any arithmetic so the result does not depend on row order.
inline json analyze_samples(std::vector<LabeledSample> rows, const OutputControls& out) {
  auto make = [&](const std::string& label, std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return to_json(stats::make_distribution(label, std::move(v), out.bin_width_s, out.kde_bandwidth, out.min_prominence));
  };

  std::vector<double> pointing_all, acq_all;
  std::map<std::string, std::vector<double>> pointing_by, acq_by;
  for (const auto& r : rows) {
    acq_all.push_back(r.acq_s);
    acq_by[r.label].push_back(r.acq_s);
    if (r.contact_class != LinkTransitionClass::FirstContact) {
      pointing_all.push_back(r.pointing_s);
      pointing_by[std::string(to_string(r.contact_class))].push_back(r.pointing_s);
    }
  }
  json j;
  j["pointing"]["all"] = pointing_all.empty() ? json(nullptr) : make("all", pointing_all);
  j["pointing"]["by_class"] = json::object();
  for (auto& [k, v] : pointing_by) j["pointing"]["by_class"][k] = make(k, v);
  j["acquisition"]["all"] = make("all", acq_all);
  j["acquisition"]["by_class"] = json::object();
  for (auto& [k, v] : acq_by) j["acquisition"]["by_class"][k] = make(k, v);
  return j;
}

// ---------------------------------------------------------------------------
// Commands

inline stats::DelayDistribution pointing_distribution(const std::vector<EvaluatedContact>& contacts,
                                                      const OutputControls& out) {
  std::vector<double> v;
  for (const auto& c : contacts) {
    if (c.eval.breakdown.transition_class != LinkTransitionClass::FirstContact) v.push_back(c.eval.breakdown.t_pointing_s);
  }
  std::sort(v.begin(), v.end());
  return stats::make_distribution("pointing", std::move(v), out.bin_width_s, out.kde_bandwidth, out.min_prominence);
}

inline stats::DelayDistribution acquisition_distribution(const std::vector<EvaluatedContact>& contacts,
                                                         const OutputControls& out) {
  std::vector<double> v;
  for (const auto& c : contacts) v.push_back(c.eval.breakdown.t_acq_s);
  std::sort(v.begin(), v.end());
  return stats::make_distribution("acquisition", std::move(v), out.bin_width_s, out.kde_bandwidth, out.min_prominence);
}

inline json summary_json(const SimulationRun& run, const ConfigDocument& cfg) {
  json j;
  j["seed"] = cfg.scenario.controls.seed;
  j["opportunities"] = run.opportunity_count;
  j["contacts"] = run.contacts.size();

  std::map<std::string, std::vector<const PatDelayBreakdown*>> by_class;
  std::map<std::string, std::vector<double>> acq_by;
  for (const auto& c : run.contacts) {
    by_class[std::string(to_string(c.eval.breakdown.transition_class))].push_back(&c.eval.breakdown);
    acq_by[std::string(acquisition_label(c.eval.seeker_class))].push_back(c.eval.breakdown.t_acq_s);
  }
  j["classes"] = json::object();
  for (const auto& [k, v] : by_class) {
    double p = 0, a = 0, t = 0;
    for (const auto* b : v) {
      p += b->t_pointing_s;
      a += b->t_acq_s;
      t += b->t_total_s;
    }
    const double n = static_cast<double>(v.size());
    j["classes"][k] = {{"count", v.size()},
                       {"mean_t_pointing_s", sig6(p / n)},
                       {"mean_t_acq_s", sig6(a / n)},
                       {"mean_t_total_s", sig6(t / n)}};
  }
  j["acquisition_classes"] = json::object();
  for (const auto& [k, v] : acq_by) {
    j["acquisition_classes"][k] = {{"count", v.size()}, {"mean_t_acq_s", sig6(stats::mean(v))}};
  }

  auto modes = [](const stats::DelayDistribution& d) {
    json m = json::array();
    for (const auto& x : d.modes) m.push_back(sig6(x.location));
    return m;
  };
  bool any_pointing = false;
  for (const auto& c : run.contacts) {
    any_pointing = any_pointing || c.eval.breakdown.transition_class != LinkTransitionClass::FirstContact;
  }
  j["pointing_modes_s"] = any_pointing ? modes(pointing_distribution(run.contacts, cfg.output)) : json::array();
  j["acquisition_modes_s"] = run.contacts.empty() ? json::array() : modes(acquisition_distribution(run.contacts, cfg.output));
  return j;
}

struct SimulateOutput {
  SimulationRun run;
  std::string delays_csv;
  std::string summary_json;
};

inline SimulateOutput run_simulate(const ConfigDocument& cfg) {
  SimulateOutput out;
  out.run = simulate(cfg.scenario);
  out.delays_csv = delays_csv(out.run.contacts);
  out.summary_json = summary_json(out.run, cfg).dump(2) + "\n";
  return out;
}

inline SimulateOutput cmd_simulate(const ConfigDocument& cfg, const std::filesystem::path& out_dir) {
  SimulateOutput out = run_simulate(cfg);
  write_file(out_dir / "delays.csv", out.delays_csv);
  write_file(out_dir / "summary.json", out.summary_json);
  return out;
}

enum class SweepAxis { SlewRate, Fou };

/// Seeker/stare cases for the FOU sweep: one per acquisition class present in
/// the config, using the first node of that class as both ends.
inline std::vector<stats::AcquisitionCase> fou_cases(const ConfigDocument& cfg) {
  std::vector<stats::AcquisitionCase> cases;
  const Node* earth = nullptr;
  const Node* deep = nullptr;
  for (const auto& n : cfg.scenario.nodes) {
    if (n.node_class() == NodeClass::DeepSpace) {
      if (!deep) deep = &n;
    } else if (!earth || (earth->node_class() == NodeClass::Ground && n.node_class() == NodeClass::Leo)) {
      earth = &n;
    }
  }
  if (earth) cases.push_back({"LEO Acq", earth->spec, earth->spec, 1.0e6});
  if (deep) cases.push_back({"IPN Acq", deep->spec, deep->spec, 1.0e6});
  if (cases.empty()) {
    for (const auto& [name, spec] : cfg.terminals) cases.push_back({name, spec, spec, 1.0e6});
  }
  if (cases.empty()) throw Error(ErrorCode::EmptyScenario, "no terminals or nodes to sweep");
  return cases;
}

inline std::string sweep_csv(std::vector<stats::SweepResult> results) {
  std::sort(results.begin(), results.end(),
            [](const auto& a, const auto& b) { return a.class_label < b.class_label; });
  std::string out = std::string(kSweepHeader) + "\n";
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.parameter_values.size(); ++i) {
      out += r.class_label + ',' + shortest(r.parameter_values[i]) + ',' + fixed6(r.mean_delay[i]) + '\n';
    }
  }
  return out;
}

inline std::vector<stats::SweepResult> run_sweep(const ConfigDocument& cfg, SweepAxis axis, const std::vector<double>& grid) {
  if (axis == SweepAxis::SlewRate) return stats::sweep_slew_rate(cfg.scenario, grid);
  return stats::sweep_fou(fou_cases(cfg), grid, cfg.scenario.model.acquisition);
}

inline std::string cmd_sweep(const ConfigDocument& cfg, SweepAxis axis, const std::vector<double>& grid,
                             const std::filesystem::path& out_dir) {
  const std::string csv = sweep_csv(run_sweep(cfg, axis, grid));
  write_file(out_dir / (axis == SweepAxis::SlewRate ? "sweep_slew_rate.csv" : "sweep_fou.csv"), csv);
  return csv;
}

inline json analyze_rows(const std::vector<DelayRow>& rows, const OutputControls& out) {
  if (rows.empty()) throw Error(ErrorCode::EmptySamples, "delay file has no data rows");
  if (rows.size() < 2) throw Error(ErrorCode::DegenerateSamples, "a distribution needs at least two rows");
  std::vector<LabeledSample> samples;
  for (const auto& r : rows) {
    samples.push_back({std::string(acquisition_label_from_classes(r.class_a, r.class_b)), r.t_pointing_s, r.t_acq_s,
                       contact_transition_class(r.class_a, r.class_b)});
  }
  return analyze_samples(std::move(samples), out);
}

inline std::string cmd_analyze(const std::filesystem::path& delays_csv_path, const std::filesystem::path& out_dir,
                               const OutputControls& out = {}) {
  const std::string text = analyze_rows(read_delays_csv(delays_csv_path), out).dump(2) + "\n";
  write_file(out_dir / "analysis.json", text);
  return text;
}

// ---------------------------------------------------------------------------
// Contact plan annotation

inline constexpr std::array<std::string_view, 4> kPlanRequired = {"from_id", "to_id", "start_s", "end_s"};

inline std::string annotate_plan(const std::vector<std::string>& lines, const ConfigDocument& cfg) {
  if (lines.empty()) throw Error(ErrorCode::MalformedRow, "line 1: missing header row");
  const auto header = split_csv_line(lines[0]);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (auto name : kPlanRequired) {
    if (!col.count(std::string(name))) {
      throw Error(ErrorCode::MalformedRow, "line 1: missing column '" + std::string(name) + "'");
    }
  }
  const Scenario& sc = cfg.scenario;

  std::string out = lines[0] + ",t_pat_s,effective_duration_s,infeasible\n";
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const std::string where = "line " + std::to_string(ln + 1);
    if (lines[ln].empty()) continue;
    const auto f = split_csv_line(lines[ln]);
    if (f.size() != header.size()) {
      throw Error(ErrorCode::MalformedRow, where + ": expected " + std::to_string(header.size()) + " fields, got " +
                                               std::to_string(f.size()));
    }
    auto field = [&](const char* name) -> std::string {
      auto it = col.find(name);
      return it == col.end() ? std::string{} : f[it->second];
    };
    const auto start = parse_double(field("start_s"));
    const auto end = parse_double(field("end_s"));
    if (!start || !end) throw Error(ErrorCode::MalformedRow, where + ": start_s/end_s must be numbers");
    if (!(*start < *end)) throw Error(ErrorCode::MalformedRow, where + ": start_s must be < end_s");
    auto resolve = [&](const std::string& id) -> const Node& {
      if (auto i = sc.find(id)) return sc.nodes[*i];
      throw Error(ErrorCode::UnknownNode, where + ": unknown node '" + id + "'");
    };
    const Node& from = resolve(field("from_id"));
    const Node& to = resolve(field("to_id"));
    if (from.id == to.id) throw Error(ErrorCode::MalformedRow, where + ": a contact needs two distinct nodes");

    auto prior = [&](const Node& self, const std::string& target_id) -> std::optional<PriorPointing> {
      if (target_id.empty()) return std::nullopt;
      const Node& target = resolve(target_id);
      if (target.id == self.id) throw Error(ErrorCode::MalformedRow, where + ": a node cannot target itself");
      const LineOfSight los = line_of_sight(propagate(self, *start), propagate(target, *start));
      return PriorPointing{target.node_class(), to_az_el(los.direction, node_frame(self, *start))};
    };
    const LinkEvaluation ev = evaluate_link(from, to, *start, prior(from, field("prev_target_from")),
                                            prior(to, field("prev_target_to")), sc.model);
    const double pat = ev.breakdown.t_total_s;
    const double effective = std::max(0.0, (*end - *start) - pat);
    const bool infeasible = pat > *end - *start;
    out += lines[ln] + ',' + fixed6(pat) + ',' + fixed6(effective) + ',' + (infeasible ? "true" : "false") + '\n';
  }
  return out;
}

inline std::string cmd_annotate(const std::filesystem::path& plan_csv, const ConfigDocument& cfg,
                                const std::filesystem::path& out_path) {
  const std::string text = annotate_plan(read_lines(plan_csv), cfg);
  write_file(out_path, text);
  return text;
}

/// Parses "1,2,4" into doubles.
inline std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> grid;
  for (const auto& part : split_csv_line(text)) {
    std::string_view s = part;
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    auto v = parse_double(s);
    if (!v) throw Error(ErrorCode::ValidationError, "grid value '" + part + "' is not a number");
    grid.push_back(*v);
  }
  return grid;
}

}  // namespace patdelay::io
