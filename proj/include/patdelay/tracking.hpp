#pragma once

#include <algorithm>
#include <cstdint>
#include <random>

#include "patdelay/error.hpp"
#include "patdelay/numeric.hpp"
#include "patdelay/terminal.hpp"

namespace patdelay {

struct TrackingParams {
  double poll_frequency_hz = 1000.0;
  double p_signal = 0.7;
  double alpha = 100.0;
};

inline TrackingParams tracking_params(const TerminalSpec& spec) {
  return {spec.poll_frequency_hz, spec.p_signal, spec.alpha};
}

struct TrackingSimOptions {
  // false clamps the lock counter at zero after a miss.
  bool allow_negative_counter = true;
  std::int64_t max_samples = 10'000'000;
};

/// Samples until the expected lock counter (+1 per hit, -2 per miss) reaches
/// alpha, rounded up to a whole sample.
inline std::int64_t n_samples(const TrackingParams& params) {
  if (!(params.alpha > 0.0)) {
    throw Error(ErrorCode::NonConvergent, "alpha must be positive");
  }
  const double drift = 3.0 * params.p_signal - 2.0;
  if (!(params.p_signal > 2.0 / 3.0) || !(drift > 0.0)) {
    throw Error(ErrorCode::NonConvergent, "p_signal <= 2/3: expected lock counter never reaches alpha");
  }
  return ceil_count(params.alpha / drift);
}

inline double acq_to_track_delay(const TrackingParams& params) {
  if (!(params.poll_frequency_hz > 0.0)) {
    throw Error(ErrorCode::NonConvergent, "poll frequency must be positive");
  }
  return static_cast<double>(n_samples(params)) / params.poll_frequency_hz;
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit engine draw.
/// Unlike std::uniform_real_distribution this is identical across standard libraries.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Runs the lock counter sample by sample and returns the time it first reaches alpha.
inline double simulate_tracking_transition(const TrackingParams& params, std::uint64_t seed,
                                           const TrackingSimOptions& opts = {}) {
  if (!(params.p_signal > 0.0 && params.p_signal <= 1.0)) {
    throw Error(ErrorCode::ValidationError, "p_signal must lie in (0, 1]");
  }
  if (!(params.poll_frequency_hz > 0.0) || !(params.alpha > 0.0)) {
    throw Error(ErrorCode::ValidationError, "poll frequency and alpha must be positive");
  }
  std::mt19937_64 rng(seed);
  std::int64_t counter = 0;
  for (std::int64_t n = 1; n <= opts.max_samples; ++n) {
    if (uniform01(rng) < params.p_signal) {
      ++counter;
    } else {
      counter -= 2;
      if (!opts.allow_negative_counter) counter = std::max<std::int64_t>(counter, 0);
    }
    if (static_cast<double>(counter) >= params.alpha) {
      return static_cast<double>(n) / params.poll_frequency_hz;
    }
  }
  throw Error(ErrorCode::Timeout, "lock counter did not reach alpha within max_samples");
}

}  // namespace patdelay
