#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsii/error_signal.hpp"
#include "wsii/trajectory.hpp"

namespace wsii {

struct MissingLabelsError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// One supervised example: q consecutive error values and whether the covered
/// point span contains a partitioning position.
struct TrainingSample {
  std::vector<double> features;  ///< q error values, meters
  int label = 0;                 ///< 1 = window contains a partitioning position
  std::string trajectory_id;
  std::size_t start_index = 0;  ///< first point index covered by the window
};

inline void validate_feature_window_size(int q) {
  if (q < 3 || q % 2 == 0) {
    throw std::invalid_argument("feature window size q must be an odd integer >= 3");
  }
}

/// Partitioning positions of a labeled trajectory: index i is a split iff the
/// labels of points i and i+1 differ.
inline GroundTruthSplits splits_from_labels(const Trajectory& traj) {
  if (!traj.labeled()) {
    throw MissingLabelsError("splits_from_labels: trajectory " + traj.id +
                             " has no labels");
  }
  validate_trajectory(traj);
  GroundTruthSplits splits;
  splits.trajectory_id = traj.id;
  for (std::size_t i = 0; i + 1 < traj.labels.size(); ++i) {
    if (traj.labels[i] != traj.labels[i + 1]) {
      splits.split_indices.push_back(i);
    }
  }
  return splits;
}

/// One sample per contiguous q-run of signal entries (slide step 1). A sample
/// is positive iff some ground-truth split index lies within the point-index
/// span [a, a+q-1] its entries cover. Signals shorter than q yield no samples.
inline std::vector<TrainingSample> build_training_set(const ErrorSignal& signal,
                                                      const GroundTruthSplits& splits,
                                                      int q) {
  validate_feature_window_size(q);
  std::vector<TrainingSample> samples;
  const std::size_t uq = static_cast<std::size_t>(q);
  if (signal.entries.size() < uq) {
    return samples;
  }
  samples.reserve(signal.entries.size() - uq + 1);
  for (std::size_t j = 0; j + uq <= signal.entries.size(); ++j) {
    TrainingSample sample;
    sample.trajectory_id = signal.trajectory_id;
    sample.start_index = signal.entries[j].point_index;
    sample.features.reserve(uq);
    for (std::size_t k = 0; k < uq; ++k) {
      sample.features.push_back(signal.entries[j + k].error_m);
    }
    const std::size_t span_end = signal.entries[j + uq - 1].point_index;
    const auto it = std::lower_bound(splits.split_indices.begin(),
                                     splits.split_indices.end(), sample.start_index);
    sample.label = (it != splits.split_indices.end() && *it <= span_end) ? 1 : 0;
    samples.push_back(std::move(sample));
  }
  return samples;
}

/// Signal + split + window pipeline over a set of labeled trajectories.
/// Output order is deterministic: trajectory order as given, then start index.
inline std::vector<TrainingSample> make_training_data(
    const std::vector<Trajectory>& trajectories, int w, int q, KernelKind kernel) {
  std::vector<TrainingSample> all;
  for (const Trajectory& traj : trajectories) {
    const ErrorSignal signal = error_signal(traj, w, kernel);
    const GroundTruthSplits splits = splits_from_labels(traj);
    std::vector<TrainingSample> samples = build_training_set(signal, splits, q);
    all.insert(all.end(), std::make_move_iterator(samples.begin()),
               std::make_move_iterator(samples.end()));
  }
  return all;
}

}  // namespace wsii
