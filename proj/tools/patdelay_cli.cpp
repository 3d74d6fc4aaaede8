// patdelay: PAT delay simulation, sweeps, analysis and contact-plan annotation.
//
// Exit codes: 0 success, 1 model error, 2 config/scenario error, 3 analysis error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "patdelay/patdelay.hpp"

namespace {

patdelay::ConfigDocument load(const std::string& path, const std::optional<std::uint64_t>& seed) {
  auto cfg = patdelay::load_config(path);
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
  if (seed) cfg.scenario.controls.seed = *seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pointing, acquisition and tracking delay models for optical satellite links"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override the configured RNG seed");

  std::string config_path, out, axis, grid, input, plan;

  auto* simulate = app.add_subcommand("simulate", "Generate contacts and write delays.csv + summary.json");
  simulate->add_option("--config", config_path, "Configuration file")->required();
  simulate->add_option("--out", out, "Output directory")->required();
  simulate->add_option("--seed", seed, "Override the configured RNG seed");

  auto* sweep = app.add_subcommand("sweep", "Sweep slew rate or FOU and write sweep_<axis>.csv");
  sweep->add_option("--config", config_path, "Configuration file")->required();
  sweep->add_option("--axis", axis, "slew_rate or fou")->required()->check(CLI::IsMember({"slew_rate", "fou"}));
  sweep->add_option("--grid", grid, "Comma-separated parameter values")->required();
  sweep->add_option("--out", out, "Output directory")->required();
  sweep->add_option("--seed", seed, "Override the configured RNG seed");

  patdelay::OutputControls analysis;
  double bandwidth = 0.0;
  auto* analyze = app.add_subcommand("analyze", "Histogram, KDE and modes of a delays.csv, as analysis.json");
  analyze->add_option("--input", input, "delays.csv written by simulate")->required();
  analyze->add_option("--out", out, "Output directory")->required();
  analyze->add_option("--bin-width", analysis.bin_width_s, "Histogram bin width [s]");
  analyze->add_option("--bandwidth", bandwidth, "KDE bandwidth [s] (default: Silverman)");
  analyze->add_option("--min-prominence", analysis.min_prominence, "Mode prominence as a fraction of the peak");

  auto* annotate = app.add_subcommand("annotate", "Add PAT delay and effective duration to a contact plan");
  annotate->add_option("--plan", plan, "Contact plan CSV")->required();
  annotate->add_option("--config", config_path, "Configuration file")->required();
  annotate->add_option("--out", out, "Output CSV path")->required();
  annotate->add_option("--seed", seed, "Override the configured RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*simulate) {
      const auto res = patdelay::io::cmd_simulate(load(config_path, seed), out);
      std::cerr << "wrote " << res.run.contacts.size() << " contacts to " << out << "\n";
    } else if (*sweep) {
      const auto cfg = load(config_path, seed);
      const auto ax = axis == "fou" ? patdelay::io::SweepAxis::Fou : patdelay::io::SweepAxis::SlewRate;
      patdelay::io::cmd_sweep(cfg, ax, patdelay::io::parse_grid(grid), out);
    } else if (*analyze) {
      if (bandwidth > 0.0) analysis.kde_bandwidth = bandwidth;
      patdelay::io::cmd_analyze(input, out, analysis);
    } else if (*annotate) {
      patdelay::io::cmd_annotate(plan, load(config_path, seed), out);
    }
  } catch (const patdelay::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return patdelay::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
