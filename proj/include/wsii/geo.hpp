#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace wsii {

/// Mean Earth radius in meters, shared by every distance computation.
inline constexpr double kEarthRadiusM = 6'371'000.0;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Meters per degree of latitude on the mean-radius sphere.
inline constexpr double kMetersPerDegLat = kEarthRadiusM * kPi / 180.0;

struct GeoPoint {
  double lat = 0.0;  ///< degrees, [-90, 90]
  double lon = 0.0;  ///< degrees, [-180, 180]
};

struct TimedPoint {
  GeoPoint position;
  double t = 0.0;  ///< seconds since epoch
};

/// Motion model used to extrapolate where a moving object "should" be.
enum class KernelKind { RandomWalk, Kinematic, Linear, Cubic };

inline std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::RandomWalk: return "randomwalk";
    case KernelKind::Kinematic: return "kinematic";
    case KernelKind::Linear: return "linear";
    case KernelKind::Cubic: return "cubic";
  }
  throw std::logic_error("unreachable kernel kind");
}

inline KernelKind parse_kernel(const std::string& name) {
  if (name == "randomwalk") return KernelKind::RandomWalk;
  if (name == "kinematic") return KernelKind::Kinematic;
  if (name == "linear") return KernelKind::Linear;
  if (name == "cubic") return KernelKind::Cubic;
  throw std::invalid_argument("unknown kernel: " + name +
                              " (expected randomwalk, kinematic, linear or cubic)");
}

/// Midpoint of a longitude pair that straddles the antimeridian is rejected.
struct AntimeridianError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Extrapolation support points with duplicate (or unordered) timestamps.
struct DegenerateTimestampsError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline double deg2rad(double deg) { return deg * (kPi / 180.0); }

/// Great-circle distance in meters between two points on the mean-radius sphere.
inline double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dphi = deg2rad(b.lat - a.lat);
  const double dlambda = deg2rad(b.lon - a.lon);
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Component-wise arithmetic mean of two positions. Valid at trajectory-window
/// scale only; pairs straddling the antimeridian are rejected.
inline GeoPoint geo_midpoint(const GeoPoint& a, const GeoPoint& b) {
  if (std::abs(a.lon - b.lon) > 180.0) {
    throw AntimeridianError("geo_midpoint: longitude pair straddles the antimeridian");
  }
  return GeoPoint{(a.lat + b.lat) / 2.0, (a.lon + b.lon) / 2.0};
}

namespace detail {

// Ordinary least-squares line through (t, v) pairs, evaluated at target.
inline double ols_at(const double* t, const double* v, std::size_t n, double target) {
  double tm = 0.0, vm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tm += t[i];
    vm += v[i];
  }
  tm /= static_cast<double>(n);
  vm /= static_cast<double>(n);
  double cov = 0.0, var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (t[i] - tm) * (v[i] - vm);
    var += (t[i] - tm) * (t[i] - tm);
  }
  return vm + cov / var * (target - tm);
}

// Constant-acceleration continuation of three samples, anchored at the end
// nearest to the target time.
inline double kinematic_at(const double* t, const double* v, double target) {
  const double m1 = (t[0] + t[1]) / 2.0;
  const double m2 = (t[1] + t[2]) / 2.0;
  const double v1 = (v[1] - v[0]) / (t[1] - t[0]);
  const double v2 = (v[2] - v[1]) / (t[2] - t[1]);
  const double acc = (v2 - v1) / (m2 - m1);
  if (2.0 * target >= t[0] + t[2]) {
    const double vel = v2 + acc * (t[2] - m2);
    const double dt = target - t[2];
    return v[2] + vel * dt + 0.5 * acc * dt * dt;
  }
  const double vel = v1 + acc * (t[0] - m1);
  const double dt = target - t[0];
  return v[0] + vel * dt + 0.5 * acc * dt * dt;
}

// Unique quadratic through three samples (Newton form); the cubic term has no
// fourth support point and is taken as zero.
inline double quadratic_at(const double* t, const double* v, double target) {
  const double f01 = (v[1] - v[0]) / (t[1] - t[0]);
  const double f12 = (v[2] - v[1]) / (t[2] - t[1]);
  const double f012 = (f12 - f01) / (t[2] - t[0]);
  return v[0] + f01 * (target - t[0]) + f012 * (target - t[0]) * (target - t[1]);
}

}  // namespace detail

/// Estimated position at target_t continued from exactly three time-ordered
/// support points under the given motion model. target_t is expected outside
/// (or at the edge of) the support span.
inline GeoPoint extrapolate(std::span<const TimedPoint> points, double target_t,
                            KernelKind kernel) {
  if (points.size() != 3) {
    throw std::invalid_argument("extrapolate: exactly 3 support points required");
  }
  if (!(points[0].t < points[1].t && points[1].t < points[2].t)) {
    throw DegenerateTimestampsError(
        "extrapolate: support points must have strictly increasing timestamps");
  }

  if (kernel == KernelKind::RandomWalk) {
    // Zero-drift walk: the expectation is the temporally nearest sample.
    std::size_t best = 0;
    double best_d = std::abs(points[0].t - target_t);
    for (std::size_t i = 1; i < 3; ++i) {
      const double d = std::abs(points[i].t - target_t);
      if (d < best_d) {
        best = i;
        best_d = d;
      }
    }
    return points[best].position;
  }

  const double t[3] = {points[0].t, points[1].t, points[2].t};
  const double lat[3] = {points[0].position.lat, points[1].position.lat,
                         points[2].position.lat};
  const double lon[3] = {points[0].position.lon, points[1].position.lon,
                         points[2].position.lon};
  switch (kernel) {
    case KernelKind::Linear:
      return GeoPoint{detail::ols_at(t, lat, 3, target_t),
                      detail::ols_at(t, lon, 3, target_t)};
    case KernelKind::Kinematic:
      return GeoPoint{detail::kinematic_at(t, lat, target_t),
                      detail::kinematic_at(t, lon, target_t)};
    case KernelKind::Cubic:
      return GeoPoint{detail::quadratic_at(t, lat, target_t),
                      detail::quadratic_at(t, lon, target_t)};
    default:
      throw std::logic_error("unreachable kernel kind");
  }
}

}  // namespace wsii
