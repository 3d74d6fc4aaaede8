#include <gtest/gtest.h>

#include <cmath>

#include "oracles/spiral_walker.hpp"
#include "patdelay/acquisition.hpp"
#include "support/gen.hpp"

using namespace patdelay;

namespace {

TerminalSpec random_seeker(gen::Gen& g) {
  TerminalSpec s;
  s.fsm_tip_rate_rad_s = g.log_uniform(1e-3, 5e-2);
  s.fsm_tilt_rate_rad_s = g.log_uniform(1e-3, 5e-2);
  s.dwell_time_s = g.uniform(0.01, 2.0);
  s.beam_width_deg = g.uniform(0.02, 0.5);
  s.fou_deg = s.beam_width_deg * g.uniform(1.0, 12.0);
  return s;
}

TerminalSpec wide_stare() {
  TerminalSpec s;
  s.fou_deg = 0.5;
  s.track_sensor_fov_deg = 30.0;
  return s;
}

AcquisitionResult acquire(double range, const TerminalSpec& seeker, const AcquisitionOptions& opts = {}) {
  return acquisition_delay(make_acquisition_geometry(range, seeker, wide_stare(), opts), seeker, opts);
}

}  // namespace

TEST(AcquisitionProperty, IndependentOfRange) {
  gen::Gen g(301);
  for (int i = 0; i < gen::kCases; ++i) {
    const auto s = random_seeker(g);
    const AcquisitionOptions opts{g.coin()};
    const auto ref = acquire(1e6, s, opts);
    for (double d : {1e5, 1e9}) {
      const auto r = acquire(d, s, opts);
      ASSERT_EQ(r.plan.n_steps, ref.plan.n_steps) << i << " D=" << d;
      ASSERT_NEAR(r.t_acq_s, ref.t_acq_s, 1e-9 * ref.t_acq_s) << i << " D=" << d;
    }
  }
}

TEST(AcquisitionProperty, DoublingFouQuadruplesSteps) {
  gen::Gen g(302);
  for (int i = 0; i < gen::kCases; ++i) {
    const double fou = g.uniform(0.1, 1.0);
    const double beam = g.uniform(fou / 10.0, fou / 1.5);
    const double d = project_angle_to_length(1e6, deg_to_rad(beam));
    const auto n1 = n_steps(project_angle_to_length(1e6, deg_to_rad(fou)), d);
    const auto n2 = n_steps(project_angle_to_length(1e6, deg_to_rad(2 * fou)), d);
    ASSERT_LE(std::llabs(n2 - 4 * n1), 4) << i;
  }
}

TEST(AcquisitionProperty, PlanCountsCoverAllSteps) {
  gen::Gen g(303);
  for (int i = 0; i < gen::kCases; ++i) {
    const std::int64_t n = g.coin() ? g.integer(1, 60) : g.integer(1, 2'000'000);
    const auto plan = make_search_plan(n, 1.0, 1.0, 1.0);
    const std::int64_t groups = (n + 5) / 6;
    ASSERT_EQ(plan.n_diagonal, 4 * groups);
    ASSERT_EQ(plan.n_horizontal, 2 * groups);
    ASSERT_EQ(plan.n_diagonal + plan.n_horizontal, 6 * groups);
    ASSERT_GE(plan.n_diagonal + plan.n_horizontal, n);
  }
}

// The walker stops at exactly n_steps, the closed form rounds up to whole
// groups. The gap is therefore the unwalked tail of the last group, at most
// three diagonal and two horizontal moves.
TEST(AcquisitionProperty, WalkerDiffersOnlyByTheUnfinishedGroup) {
  gen::Gen g(304);
  for (int i = 0; i < gen::kCases; ++i) {
    const auto s = random_seeker(g);
    const double range = g.log_uniform(1e5, 1e11);
    const auto r = acquire(range, s);
    const auto& p = r.plan;
    const auto w = oracle::walk_spiral(p.n_steps, p.step_length_m, p.tip_speed_m_s, p.tilt_speed_m_s);
    ASSERT_EQ(static_cast<std::int64_t>(w.moves.size()), p.n_steps) << i;
    const auto dd = p.n_diagonal - w.diagonal, dh = p.n_horizontal - w.horizontal;
    ASSERT_GE(dd, 0);
    ASSERT_LE(dd, 4);
    ASSERT_GE(dh, 0);
    ASSERT_LE(dh, 2);
    const double step = p.step_length_m / std::min(p.tip_speed_m_s, p.tilt_speed_m_s);
    const double expected_gap = dd * step + dh * p.step_length_m / p.tip_speed_m_s;
    ASSERT_NEAR(r.t_seek_s - w.seconds, expected_gap, 1e-9 * r.t_seek_s) << i;
    ASSERT_LE(r.t_seek_s - w.seconds, 5 * step * (1 + 1e-9)) << i;
    if (p.n_steps % 6 == 0 || p.n_steps % 6 == 5) {
      ASSERT_LE(std::abs(r.t_seek_s - w.seconds), step * (1 + 1e-9)) << i;
    }
  }
}

TEST(AcquisitionProperty, NonDecreasingInFou) {
  gen::Gen g(305);
  for (int i = 0; i < gen::kCases; ++i) {
    const auto s = random_seeker(g);
    auto wider = s;
    wider.fou_deg *= g.uniform(1.0, 3.0);
    ASSERT_LE(acquire(1e6, s).t_acq_s, acquire(1e6, wider).t_acq_s) << i;
  }
}

TEST(AcquisitionProperty, NonIncreasingInFsmRates) {
  gen::Gen g(306);
  for (int i = 0; i < gen::kCases; ++i) {
    const auto s = random_seeker(g);
    auto faster = s;
    (g.coin() ? faster.fsm_tip_rate_rad_s : faster.fsm_tilt_rate_rad_s) *= g.uniform(1.0, 10.0);
    ASSERT_GE(acquire(1e6, s).t_acq_s, acquire(1e6, faster).t_acq_s) << i;
  }
}

TEST(AcquisitionProperty, NonDecreasingInDwell) {
  gen::Gen g(307);
  for (int i = 0; i < gen::kCases; ++i) {
    const auto s = random_seeker(g);
    auto slower = s;
    slower.dwell_time_s += g.uniform(0.0, 2.0);
    ASSERT_LE(acquire(1e6, s).t_acq_s, acquire(1e6, slower).t_acq_s) << i;
  }
}

TEST(AcquisitionProperty, StepsAndDwellNonIncreasingInBeamWidth) {
  gen::Gen g(308);
  for (int i = 0; i < gen::kCases; ++i) {
    const auto s = random_seeker(g);
    auto wider = s;
    wider.beam_width_deg = s.beam_width_deg * g.uniform(1.0, s.fou_deg / s.beam_width_deg);
    const auto a = acquire(1e6, s), b = acquire(1e6, wider);
    ASSERT_GE(a.plan.n_steps, b.plan.n_steps) << i;
    ASSERT_GE(a.dwell_total_s, b.dwell_total_s) << i;
  }
}

// Within a ceiling plateau the step count is fixed while each step gets longer,
// so the total can rise with beam width.
TEST(AcquisitionProperty, TotalCanRiseWithBeamWidthInsideAPlateau) {
  gen::Gen g(309);
  int plateaus = 0;
  for (int i = 0; i < gen::kCases; ++i) {
    const auto s = random_seeker(g);
    auto wider = s;
    wider.beam_width_deg *= 1.0 + 1e-7;
    const auto a = acquire(1e6, s), b = acquire(1e6, wider);
    if (a.plan.n_steps != b.plan.n_steps) continue;
    ++plateaus;
    ASSERT_GT(b.t_acq_s, a.t_acq_s) << i;
  }
  EXPECT_GT(plateaus, gen::kCases / 2);
}

TEST(AcquisitionProperty, BeaconlessSeekerSkipsTheSearch) {
  gen::Gen g(310);
  for (int i = 0; i < gen::kCases; ++i) {
    auto s = random_seeker(g);
    s.beaconless = true;
    const auto r = acquire(g.log_uniform(1e5, 1e11), s);
    ASSERT_EQ(r.t_acq_s, 0.0);
    ASSERT_EQ(r.plan.n_steps, 0);
  }
}

TEST(AcquisitionProperty, StareSensorMustExceedStareFou) {
  gen::Gen g(311);
  for (int i = 0; i < gen::kCases; ++i) {
    const auto s = random_seeker(g);
    TerminalSpec stare;
    stare.fou_deg = g.uniform(0.1, 5.0);
    stare.track_sensor_fov_deg = stare.fou_deg * g.uniform(0.1, 1.0);
    try {
      acquisition_delay(make_acquisition_geometry(1e6, s, stare), s);
      FAIL() << i;
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::StareFovViolation);
    }
  }
}

TEST(AcquisitionProperty, FouMustExceedHalfABeam) {
  gen::Gen g(312);
  for (int i = 0; i < gen::kCases; ++i) {
    auto s = random_seeker(g);
    s.fou_deg = s.beam_width_deg * g.uniform(0.01, 0.49);
    try {
      acquire(g.log_uniform(1e5, 1e11), s);
      FAIL() << i;
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::InvalidGeometry);
    }
  }
}
