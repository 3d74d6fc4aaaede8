#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "patdelay/error.hpp"

namespace patdelay {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double k) {
    x *= k;
    y *= k;
    z *= k;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator*(Vec3 a, double k) { return a *= k; }
  friend constexpr Vec3 operator*(double k, Vec3 a) { return a *= k; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// Unit vector along v; throws ZeroVector for a zero (or non-finite) input.
inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::ZeroVector, "direction vector has zero norm");
  }
  return v * (1.0 / n);
}

/// Azimuth in [0, 2pi) measured from north toward east; elevation in [-pi/2, pi/2].
struct AzEl {
  double azimuth = 0.0;
  double elevation = 0.0;
};

/// Node-local east/north/up triad. Must be orthonormal and right-handed.
struct LocalFrame {
  Vec3 origin{};
  Vec3 east{1.0, 0.0, 0.0};
  Vec3 north{0.0, 1.0, 0.0};
  Vec3 up{0.0, 0.0, 1.0};

  bool is_orthonormal(double tol = 1e-9) const {
    return std::abs(norm(east) - 1.0) <= tol && std::abs(norm(north) - 1.0) <= tol &&
           std::abs(norm(up) - 1.0) <= tol && std::abs(dot(east, north)) <= tol &&
           std::abs(dot(east, up)) <= tol && std::abs(dot(north, up)) <= tol;
  }

  void validate() const {
    if (!is_orthonormal()) {
      throw Error(ErrorCode::DegenerateFrame, "local frame axes are not orthonormal");
    }
  }

  /// Builds a frame from an up direction and a reference "north" hint; the hint is
  /// projected onto the plane normal to up.
  static LocalFrame from_up_north(const Vec3& origin, const Vec3& up_dir, const Vec3& north_hint) {
    const Vec3 up = normalized(up_dir);
    const Vec3 n = normalized(north_hint - up * dot(north_hint, up));
    return {origin, cross(n, up), n, up};
  }
};

/// Angle between two directions, in [0, pi]. The cosine is clamped so nearly
/// parallel inputs never produce NaN.
inline double angle_between(const Vec3& a, const Vec3& b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw Error(ErrorCode::ZeroVector, "angle_between requires nonzero vectors");
  }
  const double c = std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
  return std::acos(c);
}

inline AzEl to_az_el(const Vec3& v, const LocalFrame& frame) {
  frame.validate();
  const Vec3 u = normalized(v);
  const double e = dot(u, frame.east);
  const double n = dot(u, frame.north);
  const double z = dot(u, frame.up);
  const double el = std::atan2(z, std::hypot(e, n));
  if (kPi / 2.0 - std::abs(el) <= 1e-12) {
    return {0.0, std::copysign(kPi / 2.0, el)};
  }
  double az = std::atan2(e, n);
  if (az < 0.0) az += kTwoPi;
  if (az >= kTwoPi) az -= kTwoPi;
  return {az, el};
}

inline Vec3 from_az_el(const AzEl& ae, const LocalFrame& frame) {
  const double ce = std::cos(ae.elevation);
  return frame.east * (ce * std::sin(ae.azimuth)) + frame.north * (ce * std::cos(ae.azimuth)) +
         frame.up * std::sin(ae.elevation);
}

struct AzElDelta {
  double delta_az = 0.0;
  double delta_el = 0.0;
};

/// Shortest wrap-around azimuth difference and absolute elevation difference.
inline AzElDelta angular_separation_az_el(const AzEl& a, const AzEl& b) {
  double daz = std::fmod(std::abs(a.azimuth - b.azimuth), kTwoPi);
  if (daz > kPi) daz = kTwoPi - daz;
  return {daz, std::abs(a.elevation - b.elevation)};
}

/// range * tan(full_angle / 2): linear half-width of a cone at range.
inline double project_angle_to_length(double range_m, double full_angle_rad) {
  if (!(range_m > 0.0)) {
    throw Error(ErrorCode::InvalidGeometry, "range must be positive");
  }
  if (!(full_angle_rad > 0.0 && full_angle_rad < kPi)) {
    throw Error(ErrorCode::InvalidAngle, "full angle must lie in (0, pi), got " + std::to_string(full_angle_rad));
  }
  return range_m * std::tan(full_angle_rad / 2.0);
}

}  // namespace patdelay
