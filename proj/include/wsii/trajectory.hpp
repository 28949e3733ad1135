#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsii/geo.hpp"

namespace wsii {

/// Time-ordered point sequence of one moving object, optionally carrying one
/// semantic label per point.
struct Trajectory {
  std::string id;
  std::vector<TimedPoint> points;
  std::vector<std::string> labels;  ///< empty, or exactly one label per point

  bool labeled() const { return !labels.empty(); }
  std::size_t size() const { return points.size(); }
};

/// Throws if timestamps are not strictly increasing or labels do not pair up
/// with points.
inline void validate_trajectory(const Trajectory& traj) {
  for (std::size_t i = 1; i < traj.points.size(); ++i) {
    if (!(traj.points[i - 1].t < traj.points[i].t)) {
      throw std::invalid_argument("trajectory " + traj.id +
                                  ": timestamps must be strictly increasing");
    }
  }
  if (!traj.labels.empty() && traj.labels.size() != traj.points.size()) {
    throw std::invalid_argument("trajectory " + traj.id +
                                ": label count must match point count");
  }
}

/// Inclusive index span of consecutive trajectory points.
struct Segment {
  std::size_t start_index = 0;
  std::size_t end_index = 0;
};

/// Ordered, exhaustive, non-overlapping partition of a trajectory's indices.
/// split_indices hold the last point index of every segment but the final one.
struct SegmentationResult {
  std::string trajectory_id;
  std::vector<std::size_t> split_indices;
  std::vector<Segment> segments;
};

/// Ground-truth partitioning positions of one labeled trajectory.
struct GroundTruthSplits {
  std::string trajectory_id;
  std::vector<std::size_t> split_indices;  ///< sorted, each in [0, n-1)
};

/// Builds the segment spans for an n-point trajectory from sorted split
/// indices (each split is the last index of a segment, so in [0, n-2]).
inline SegmentationResult segmentation_from_splits(std::string trajectory_id,
                                                   std::size_t n,
                                                   std::vector<std::size_t> splits) {
  SegmentationResult result;
  result.trajectory_id = std::move(trajectory_id);
  if (n == 0) {
    if (!splits.empty()) {
      throw std::invalid_argument("segmentation_from_splits: splits on empty trajectory");
    }
    return result;
  }
  std::size_t start = 0;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    const std::size_t s = splits[i];
    if (s + 1 >= n || s < start) {
      throw std::invalid_argument(
          "segmentation_from_splits: split indices must be sorted, unique and < n-1");
    }
    result.segments.push_back(Segment{start, s});
    start = s + 1;
  }
  result.segments.push_back(Segment{start, n - 1});
  result.split_indices = std::move(splits);
  return result;
}

/// Partition contract: spans consecutive, non-overlapping and exhaustive over
/// [0, n-1], with one more segment than splits.
inline bool is_valid_partition(const SegmentationResult& result, std::size_t n) {
  if (n == 0) return result.segments.empty() && result.split_indices.empty();
  if (result.segments.empty()) return false;
  if (result.segments.size() != result.split_indices.size() + 1) return false;
  std::size_t expected_start = 0;
  for (std::size_t i = 0; i < result.segments.size(); ++i) {
    const Segment& s = result.segments[i];
    if (s.start_index != expected_start || s.end_index < s.start_index) return false;
    if (i + 1 < result.segments.size() &&
        result.split_indices[i] != s.end_index) {
      return false;
    }
    expected_start = s.end_index + 1;
  }
  return result.segments.back().end_index == n - 1;
}

}  // namespace wsii
