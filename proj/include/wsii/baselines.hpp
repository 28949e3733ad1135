#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsii/error_signal.hpp"
#include "wsii/eval.hpp"
#include "wsii/segmenter.hpp"
#include "wsii/trajectory.hpp"

namespace wsii {

// ---------------------------------------------------------------------------
// OWS: threshold on the same interpolation-error signal WS-II uses.
// ---------------------------------------------------------------------------

struct OwsParams {
  int w = 7;
  KernelKind kernel = KernelKind::RandomWalk;
  double epsilon = 50.0;  ///< meters, > 0
};

inline void validate(const OwsParams& p) {
  validate_error_window_size(p.w);
  if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon)) {
    throw std::invalid_argument("ows: epsilon must be finite and positive");
  }
}

inline SegmentationResult ows_segment(const Trajectory& traj, const OwsParams& p) {
  validate(p);
  const std::size_t n = traj.points.size();
  if (n == 0) return segmentation_from_splits(traj.id, 0, {});
  const ErrorSignal signal = error_signal(traj, p.w, p.kernel);
  std::vector<std::size_t> flagged;
  for (const ErrorEntry& entry : signal.entries) {
    if (entry.error_m > p.epsilon) flagged.push_back(entry.point_index);
  }
  return segmentation_from_splits(traj.id, n, collapse_runs(flagged, signal));
}

/// Candidate epsilons 5, 10, ... up to the 95th percentile (nearest rank) of
/// the tuning-fold error distribution; a sub-5m percentile degenerates to the
/// percentile itself.
inline std::vector<double> ows_default_epsilon_grid(const std::vector<Trajectory>& tuning,
                                                    int w, KernelKind kernel) {
  std::vector<double> errors;
  for (const Trajectory& traj : tuning) {
    for (const ErrorEntry& entry : error_signal(traj, w, kernel).entries) {
      errors.push_back(entry.error_m);
    }
  }
  if (errors.empty()) return {};
  std::sort(errors.begin(), errors.end());
  const std::size_t rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(errors.size())));
  const double p95 = errors[std::max<std::size_t>(rank, 1) - 1];
  std::vector<double> grid;
  for (double eps = 5.0; eps <= p95; eps += 5.0) grid.push_back(eps);
  if (grid.empty() && p95 > 0.0) grid.push_back(p95);
  return grid;
}

/// Candidate maximizing the mean harmonic score on the labeled tuning fold;
/// ties go to the smallest epsilon.
inline double ows_tune_epsilon(const std::vector<Trajectory>& tuning,
                               const std::vector<double>& grid, int w, KernelKind kernel) {
  if (tuning.empty()) throw std::invalid_argument("ows tuning: empty tuning fold");
  if (grid.empty()) throw std::invalid_argument("ows tuning: empty candidate grid");
  std::vector<double> candidates = grid;
  std::sort(candidates.begin(), candidates.end());
  double best_eps = candidates.front();
  double best_score = -1.0;
  for (double eps : candidates) {
    OwsParams p{w, kernel, eps};
    double sum = 0.0;
    for (const Trajectory& traj : tuning) {
      sum += score(ows_segment(traj, p), traj).harmonic;
    }
    const double mean = sum / static_cast<double>(tuning.size());
    if (mean > best_score) {
      best_score = mean;
      best_eps = eps;
    }
  }
  return best_eps;
}

// ---------------------------------------------------------------------------
// SPD: stay-point detection by distance/time thresholds.
// ---------------------------------------------------------------------------

struct SpdParams {
  double theta_d = 50.0;   ///< meters, > 0
  double theta_t = 300.0;  ///< seconds, > 0
};

inline void validate(const SpdParams& p) {
  if (!(p.theta_d > 0.0) || !(p.theta_t > 0.0)) {
    throw std::invalid_argument("spd: thresholds must be positive");
  }
}

/// Forward scan: from anchor i, the stay candidate extends to the last point
/// within theta_d of p_i; if it lasts longer than theta_t, points i..j-1 are a
/// stay segment and the scan restarts at j. Runs between stays become move
/// segments.
inline SegmentationResult spd_segment(const Trajectory& traj, const SpdParams& p) {
  validate(p);
  validate_trajectory(traj);
  const std::size_t n = traj.points.size();
  if (n == 0) return segmentation_from_splits(traj.id, 0, {});

  std::vector<std::size_t> splits;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n &&
           haversine_m(traj.points[i].position, traj.points[j].position) <= p.theta_d) {
      ++j;
    }
    if (traj.points[j - 1].t - traj.points[i].t > p.theta_t) {
      // stay segment [i, j-1]
      if (i > 0) splits.push_back(i - 1);
      if (j - 1 < n - 1) splits.push_back(j - 1);
      i = j;
    } else {
      ++i;
    }
  }
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
  return segmentation_from_splits(traj.id, n, splits);
}

// ---------------------------------------------------------------------------
// CB-SMoT: linear-neighborhood stop/move clustering.
// ---------------------------------------------------------------------------

struct CbSmotParams {
  double eps = 50.0;        ///< meters of path distance, > 0
  double min_time = 300.0;  ///< seconds, > 0
};

inline void validate(const CbSmotParams& p) {
  if (!(p.eps > 0.0) || !(p.min_time > 0.0)) {
    throw std::invalid_argument("cbsmot: parameters must be positive");
  }
}

/// A point's neighborhood is the maximal run of consecutive points whose
/// cumulative path distance from it stays within eps; the point is core when
/// that run spans at least min_time. Overlapping core neighborhoods merge into
/// stop clusters; alternating stop/move runs become the segments.
inline SegmentationResult cbsmot_segment(const Trajectory& traj, const CbSmotParams& p) {
  validate(p);
  validate_trajectory(traj);
  const std::size_t n = traj.points.size();
  if (n == 0) return segmentation_from_splits(traj.id, 0, {});

  // Prefix path distances; pd[i] = path length from point 0 to point i.
  std::vector<double> pd(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    pd[i] = pd[i - 1] + haversine_m(traj.points[i - 1].position, traj.points[i].position);
  }

  // Stop mask: union of the neighborhoods of all core points. Both bounds are
  // monotone in i because pd is non-decreasing.
  std::vector<char> stop(n, 0);
  std::size_t left = 0, right = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (pd[i] - pd[left] > p.eps) ++left;
    if (right < i) right = i;
    while (right + 1 < n && pd[right + 1] - pd[i] <= p.eps) ++right;
    if (traj.points[right].t - traj.points[left].t >= p.min_time) {
      for (std::size_t k = left; k <= right; ++k) stop[k] = 1;
    }
  }

  std::vector<std::size_t> splits;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (stop[i] != stop[i + 1]) splits.push_back(i);
  }
  return segmentation_from_splits(traj.id, n, splits);
}

// ---------------------------------------------------------------------------
// Grid tuning on the labeled tuning fold, mirroring the OWS tuner.
// ---------------------------------------------------------------------------

inline const std::vector<double>& default_distance_grid() {
  static const std::vector<double> grid{10.0, 25.0, 50.0, 100.0, 200.0};
  return grid;
}

inline const std::vector<double>& default_duration_grid() {
  static const std::vector<double> grid{60.0, 120.0, 300.0, 600.0};
  return grid;
}

inline SpdParams spd_tune(const std::vector<Trajectory>& tuning,
                          const std::vector<double>& distance_grid = default_distance_grid(),
                          const std::vector<double>& duration_grid = default_duration_grid()) {
  if (tuning.empty()) throw std::invalid_argument("spd tuning: empty tuning fold");
  SpdParams best;
  double best_score = -1.0;
  for (double d : distance_grid) {
    for (double t : duration_grid) {
      const SpdParams p{d, t};
      double sum = 0.0;
      for (const Trajectory& traj : tuning) sum += score(spd_segment(traj, p), traj).harmonic;
      const double mean = sum / static_cast<double>(tuning.size());
      if (mean > best_score) {
        best_score = mean;
        best = p;
      }
    }
  }
  return best;
}

inline CbSmotParams cbsmot_tune(
    const std::vector<Trajectory>& tuning,
    const std::vector<double>& distance_grid = default_distance_grid(),
    const std::vector<double>& duration_grid = default_duration_grid()) {
  if (tuning.empty()) throw std::invalid_argument("cbsmot tuning: empty tuning fold");
  CbSmotParams best;
  double best_score = -1.0;
  for (double d : distance_grid) {
    for (double t : duration_grid) {
      const CbSmotParams p{d, t};
      double sum = 0.0;
      for (const Trajectory& traj : tuning) {
        sum += score(cbsmot_segment(traj, p), traj).harmonic;
      }
      const double mean = sum / static_cast<double>(tuning.size());
      if (mean > best_score) {
        best_score = mean;
        best = p;
      }
    }
  }
  return best;
}

}  // namespace wsii
