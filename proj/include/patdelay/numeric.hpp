#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace patdelay {

/// Ceiling of a nonnegative ratio that should be integral when the inputs are
/// "round" decimal values. Ratios within 1e-9 (relative) above an integer are
/// treated as that integer, so 10 / (3 * 0.7 - 2) counts 100 and not 101.
inline std::int64_t ceil_count(double x) {
  const double slack = 1e-9 * std::max(1.0, std::abs(x));
  return static_cast<std::int64_t>(std::ceil(x - slack));
}

}  // namespace patdelay
