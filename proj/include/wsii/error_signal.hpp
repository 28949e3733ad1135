#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsii/geo.hpp"
#include "wsii/trajectory.hpp"

namespace wsii {

struct ErrorEntry {
  std::size_t point_index = 0;
  double error_m = 0.0;
};

/// Per-point interpolation deviations in meters for the interior points of one
/// trajectory. The first and last (w-1)/2 points have no defined error and are
/// simply absent.
struct ErrorSignal {
  std::string trajectory_id;
  int window_size = 7;
  std::vector<ErrorEntry> entries;  ///< point_index strictly increasing
  bool input_too_short = false;     ///< set when the trajectory has fewer than w points
};

inline void validate_error_window_size(int w) {
  if (w < 7 || w % 2 == 0) {
    throw std::invalid_argument("error window size w must be an odd integer >= 7");
  }
}

/// Deviation of the window's middle point from its kernel-estimated position:
/// the first three points extrapolate forward, the last three backward, both
/// to the middle timestamp; the estimate is the midpoint of the two.
inline double window_error(std::span<const TimedPoint> window, KernelKind kernel) {
  const int w = static_cast<int>(window.size());
  validate_error_window_size(w);
  for (std::size_t i = 1; i < window.size(); ++i) {
    if (!(window[i - 1].t < window[i].t)) {
      throw DegenerateTimestampsError(
          "window_error: window timestamps must be strictly increasing");
    }
  }
  const std::size_t h = static_cast<std::size_t>((w - 1) / 2);
  const double t_mid = window[h].t;
  const GeoPoint forward = extrapolate(window.first(3), t_mid, kernel);
  const GeoPoint backward = extrapolate(window.last(3), t_mid, kernel);
  return haversine_m(geo_midpoint(forward, backward), window[h].position);
}

/// Slides a w-point window over the trajectory and emits one error value per
/// interior point index h..n-h-1, h = (w-1)/2. Trajectories shorter than w
/// yield an empty signal with input_too_short set.
inline ErrorSignal error_signal(const Trajectory& traj, int w, KernelKind kernel) {
  validate_error_window_size(w);
  validate_trajectory(traj);
  ErrorSignal signal;
  signal.trajectory_id = traj.id;
  signal.window_size = w;
  const std::size_t n = traj.points.size();
  const std::size_t uw = static_cast<std::size_t>(w);
  if (n < uw) {
    signal.input_too_short = true;
    return signal;
  }
  const std::size_t h = (uw - 1) / 2;
  signal.entries.reserve(n - uw + 1);
  for (std::size_t mid = h; mid + h < n; ++mid) {
    const std::span<const TimedPoint> window(traj.points.data() + (mid - h), uw);
    signal.entries.push_back(ErrorEntry{mid, window_error(window, kernel)});
  }
  return signal;
}

}  // namespace wsii
