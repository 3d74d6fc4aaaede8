#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "patdelay/cli_io.hpp"
#include "support/scenarios.hpp"
#include "support/tmpdir.hpp"

using namespace patdelay;
using namespace patdelay::io;
using fixtures::run_cli;
using fixtures::slurp;
using fixtures::spit;
using fixtures::test_dir;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

ConfigDocument small_reference(double hours = 3.0) {
  auto cfg = load_config(fixtures::reference_config_path());
  cfg.scenario.controls.horizon_s = hours * 3600.0;
  return cfg;
}

// Two identical terminals whose whole PAT budget is a 60 s tracking transition.
const char* kSixtySecondConfig = R"({
  "terminals": {"t": {"preset": "leo_table1", "beaconless": true, "p_signal": 1.0, "alpha": 60, "poll_frequency_hz": 1}},
  "nodes": [
    {"id": "G", "class": "GROUND", "terminal": "t", "latitude_deg": 0, "longitude_deg": 0},
    {"id": "L", "class": "LEO", "terminal": "t", "altitude_km": 550, "inclination_deg": 0}
  ]
})";

}  // namespace

TEST(Formatting, FixedAndSignificant) {
  EXPECT_EQ(fixed6(1.5), "1.500000");
  EXPECT_EQ(fixed6(-0.0000001), "-0.000000");
  EXPECT_EQ(sig6(123.4567891), 123.457);
  EXPECT_EQ(sig6(0.000123456789), 0.000123457);
  EXPECT_EQ(shortest(0.25), "0.25");
  EXPECT_FALSE(parse_double("1,5").has_value());
  EXPECT_EQ(*parse_double("2.5e3"), 2500.0);
}

TEST(CmdSimulate, ReferenceRowsAndSums) {
  const auto dir = test_dir();
  const auto out = cmd_simulate(load_config(fixtures::reference_config_path()), dir);
  const auto rows = read_delays_csv(dir / "delays.csv");
  EXPECT_GE(rows.size(), 1000u);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.t_total_s, r.t_pointing_s + r.t_seek_s + r.t_dwell_s + r.t_track_s, 4e-6) << r.contact_id;
    EXPECT_NEAR(r.t_acq_s, r.t_seek_s + r.t_dwell_s, 2e-6) << r.contact_id;
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
  EXPECT_EQ(out.run.contacts.size(), rows.size());
}

TEST(CmdSimulate, CsvByteFormat) {
  const auto out = run_simulate(small_reference());
  const std::string& csv = out.delays_csv;
  EXPECT_EQ(csv.rfind("contact_id,node_a,node_b,start_s,end_s,class_a,class_b,t_pointing_s,t_seek_s,t_dwell_s,"
                      "t_acq_s,t_track_s,t_total_s\n",
                      0),
            0u);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_EQ(csv.back(), '\n');
  for (unsigned char ch : csv) EXPECT_LT(ch, 0x80);
  for (const auto& line : lines_of(csv)) EXPECT_EQ(std::count(line.begin(), line.end(), ','), 12) << line;
}

TEST(CmdSimulate, SeedChangesValuesNotSchema) {
  auto cfg = small_reference();
  const auto a = run_simulate(cfg);
  cfg.scenario.controls.seed = 43;
  const auto b = run_simulate(cfg);
  EXPECT_NE(a.delays_csv, b.delays_csv);
  EXPECT_EQ(lines_of(a.delays_csv)[0], lines_of(b.delays_csv)[0]);
}

TEST(CmdSimulate, Deterministic) {
  const auto dir = test_dir();
  cmd_simulate(small_reference(), dir / "a");
  cmd_simulate(small_reference(), dir / "b");
  EXPECT_EQ(slurp(dir / "a" / "delays.csv"), slurp(dir / "b" / "delays.csv"));
  EXPECT_EQ(slurp(dir / "a" / "summary.json"), slurp(dir / "b" / "summary.json"));
}

TEST(Cli, EmptyScenarioExitsTwo) {
  const auto dir = test_dir();
  spit(dir / "empty.json", "{}");
  const int rc = run_cli("simulate --config " + (dir / "empty.json").string() + " --out " + (dir / "o").string(),
                         dir / "err.txt");
  EXPECT_EQ(rc, 2);
  EXPECT_NE(slurp(dir / "err.txt").find("EmptyScenario"), std::string::npos);
}

TEST(Cli, BadConfigExitsTwo) {
  const auto dir = test_dir();
  spit(dir / "bad.json", R"({"terminals": {"t": {"preset": "leo_table1", "p_signal": 0.5}}})");
  EXPECT_EQ(run_cli("simulate --config " + (dir / "bad.json").string() + " --out " + (dir / "o").string(),
                    dir / "err.txt"),
            2);
  EXPECT_NE(slurp(dir / "err.txt").find("ValidationError"), std::string::npos);
  EXPECT_EQ(run_cli("simulate --config", dir / "err2.txt"), 2);
}

TEST(Cli, SingleRowAnalyzeExitsThree) {
  const auto dir = test_dir();
  const auto csv = run_simulate(small_reference(1.0)).delays_csv;
  const auto lines = lines_of(csv);
  spit(dir / "one.csv", lines[0] + "\n" + lines[1] + "\n");
  const int rc = run_cli("analyze --input " + (dir / "one.csv").string() + " --out " + (dir / "o").string(),
                         dir / "err.txt");
  EXPECT_EQ(rc, 3);
  EXPECT_NE(slurp(dir / "err.txt").find("DegenerateSamples"), std::string::npos);
  spit(dir / "none.csv", lines[0] + "\n");
  EXPECT_EQ(run_cli("analyze --input " + (dir / "none.csv").string() + " --out " + (dir / "o").string(),
                    dir / "err.txt"),
            3);
}

TEST(Cli, ModelErrorExitsOne) {
  const auto dir = test_dir();
  spit(dir / "plan.csv", "from_id,to_id,start_s,end_s\nG,L,0,300\n");
  spit(dir / "cfg.json", R"({
    "terminals": {"t": {"preset": "leo_table1", "track_sensor_fov_deg": 0.5}},
    "nodes": [
      {"id": "G", "class": "GROUND", "terminal": "t", "latitude_deg": 0, "longitude_deg": 0},
      {"id": "L", "class": "LEO", "terminal": "t", "altitude_km": 550, "inclination_deg": 0}]})");
  EXPECT_EQ(run_cli("annotate --plan " + (dir / "plan.csv").string() + " --config " + (dir / "cfg.json").string() +
                        " --out " + (dir / "out.csv").string(),
                    dir / "err.txt"),
            1);
  EXPECT_NE(slurp(dir / "err.txt").find("StareFovViolation"), std::string::npos);
}

TEST(Analyze, ShuffledRowsGiveIdenticalOutput) {
  const auto dir = test_dir();
  const auto csv = run_simulate(small_reference()).delays_csv;
  auto lines = lines_of(csv);
  spit(dir / "in.csv", csv);
  std::mt19937_64 rng(5);
  std::shuffle(lines.begin() + 1, lines.end(), rng);
  std::string shuffled;
  for (const auto& l : lines) shuffled += l + "\n";
  spit(dir / "shuffled.csv", shuffled);
  EXPECT_EQ(cmd_analyze(dir / "in.csv", dir / "a"), cmd_analyze(dir / "shuffled.csv", dir / "b"));
}

TEST(Analyze, SchemaErrorsNameTheColumn) {
  const auto dir = test_dir();
  spit(dir / "missing.csv", "contact_id,node_a\n0,A\n");
  try {
    cmd_analyze(dir / "missing.csv", dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaError);
    EXPECT_NE(std::string(e.what()).find("node_b"), std::string::npos);
    EXPECT_EQ(exit_code_for(e.code()), 3);
  }
  const auto csv = run_simulate(small_reference(1.0)).delays_csv;
  auto lines = lines_of(csv);
  lines[0] += ",extra";
  for (std::size_t i = 1; i < lines.size(); ++i) lines[i] += ",1";
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  spit(dir / "extra.csv", text);
  try {
    cmd_analyze(dir / "extra.csv", dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("extra"), std::string::npos);
  }
}

TEST(Analyze, RoundTripFromSimulate) {
  const auto dir = test_dir();
  const auto cfg = load_config(fixtures::reference_config_path());
  cmd_simulate(cfg, dir);
  const auto j = nlohmann::json::parse(cmd_analyze(dir / "delays.csv", dir, cfg.output));
  EXPECT_EQ(j["pointing"]["all"]["modes"].size(), 3u);
  EXPECT_EQ(j["acquisition"]["all"]["modes"].size(), 2u);
  EXPECT_TRUE(j["acquisition"]["by_class"].contains("LEO Acq"));
  EXPECT_TRUE(j["acquisition"]["by_class"].contains("IPN Acq"));
  EXPECT_TRUE(j["pointing"]["by_class"].contains("IPN_TO_IPN"));
  EXPECT_EQ(j["pointing"]["all"]["kde"]["x"].size(), stats::kKdeGridPoints);
}

TEST(Sweep, SingleValueGridOneRowPerClass) {
  const auto dir = test_dir();
  const auto csv = cmd_sweep(small_reference(), SweepAxis::SlewRate, {2.0}, dir);
  const auto lines = lines_of(csv);
  EXPECT_EQ(lines[0], "class,param_value,mean_delay_s");
  std::set<std::string> classes;
  for (std::size_t i = 1; i < lines.size(); ++i) classes.insert(lines[i].substr(0, lines[i].find(',')));
  EXPECT_EQ(classes.size(), lines.size() - 1);
  EXPECT_TRUE(std::filesystem::exists(dir / "sweep_slew_rate.csv"));
}

TEST(Sweep, FouAxis) {
  const auto dir = test_dir();
  const auto csv = cmd_sweep(small_reference(), SweepAxis::Fou, {0.25, 0.5, 1.0, 2.0}, dir);
  const auto lines = lines_of(csv);
  ASSERT_EQ(lines.size(), 9u);
  EXPECT_EQ(lines[1].substr(0, 8), "IPN Acq,");
  EXPECT_EQ(lines[5].substr(0, 8), "LEO Acq,");
  EXPECT_THROW(parse_grid("1,x"), Error);
  EXPECT_EQ(parse_grid(" 1, 2 ,4").size(), 3u);
}

TEST(Annotate, EffectiveDurationAndInfeasible) {
  const auto cfg = parse_config(kSixtySecondConfig);
  const auto out = annotate_plan({"from_id,to_id,start_s,end_s", "G,L,0,300", "G,L,400,430"}, cfg);
  const auto lines = lines_of(out);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "from_id,to_id,start_s,end_s,t_pat_s,effective_duration_s,infeasible");
  EXPECT_EQ(lines[1], "G,L,0,300,60.000000,240.000000,false");
  EXPECT_EQ(lines[2], "G,L,400,430,60.000000,0.000000,true");
}

TEST(Annotate, FiveMinuteLeoWindow) {
  const auto cfg = parse_config(R"({"nodes": [
    {"id": "G", "class": "GROUND", "terminal": "leo_table1", "latitude_deg": 0, "longitude_deg": 0},
    {"id": "L", "class": "LEO", "terminal": "leo_table1", "altitude_km": 550, "inclination_deg": 0}]})");
  const auto lines = lines_of(annotate_plan({"from_id,to_id,start_s,end_s", "G,L,0,300"}, cfg));
  const auto f = split_csv_line(lines[1]);
  const double pat = *parse_double(f[4]);
  EXPECT_GE(pat, 37.0);
  EXPECT_LE(pat, 60.0);
  EXPECT_LE(pat / 300.0, 0.20);
}

TEST(Annotate, PreviousTargetsAddPointing) {
  const auto cfg = parse_config(R"({"nodes": [
    {"id": "G", "class": "GROUND", "terminal": "leo_table1", "latitude_deg": 0, "longitude_deg": 0},
    {"id": "L", "class": "LEO", "terminal": "leo_table1", "altitude_km": 550, "inclination_deg": 0},
    {"id": "M", "class": "LEO", "terminal": "leo_table1", "altitude_km": 550, "inclination_deg": 0, "true_anomaly_deg": 15}]})");
  const auto base = lines_of(annotate_plan({"from_id,to_id,start_s,end_s", "G,L,0,300"}, cfg));
  const auto with = lines_of(
      annotate_plan({"from_id,to_id,start_s,end_s,prev_target_from,prev_target_to", "G,L,0,300,M,"}, cfg));
  EXPECT_GT(*parse_double(split_csv_line(with[1])[6]), *parse_double(split_csv_line(base[1])[4]));
}

TEST(Annotate, Errors) {
  const auto cfg = parse_config(kSixtySecondConfig);
  auto code = [&](std::vector<std::string> lines) {
    try {
      annotate_plan(lines, cfg);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::SchemaError;
  };
  EXPECT_EQ(code({"from_id,to_id,start_s,end_s", "G,X,0,300"}), ErrorCode::UnknownNode);
  EXPECT_EQ(code({"from_id,to_id,start_s,end_s", "G,L,0"}), ErrorCode::MalformedRow);
  EXPECT_EQ(code({"from_id,to_id,start_s,end_s", "G,L,zero,300"}), ErrorCode::MalformedRow);
  EXPECT_EQ(code({"from_id,to_id,start_s", "G,L,0"}), ErrorCode::MalformedRow);
  try {
    annotate_plan({"from_id,to_id,start_s,end_s", "G,L,0,300", "G,L,5"}, cfg);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}
