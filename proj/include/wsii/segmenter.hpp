#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsii/error_signal.hpp"
#include "wsii/forest.hpp"
#include "wsii/trajectory.hpp"

namespace wsii {

struct VoteCell {
  std::size_t point_index = 0;
  int votes_cast = 0;
  int votes_positive = 0;
};

/// Per-point window votes. Interior points collect up to q votes; points near
/// the signal boundary vote over however many windows actually cover them.
struct VoteTable {
  std::string trajectory_id;
  std::vector<VoteCell> cells;  ///< point_index strictly increasing
  bool too_short = false;       ///< set when the signal has fewer than q entries
};

/// Classifies every q-window of the signal with the supplied predictor (0/1
/// per feature window) and accrues one vote per covered point per window.
inline VoteTable vote_windows(const ErrorSignal& signal, int q,
                              const std::function<int(std::span<const double>)>& predictor) {
  validate_feature_window_size(q);
  VoteTable table;
  table.trajectory_id = signal.trajectory_id;
  const std::size_t uq = static_cast<std::size_t>(q);
  if (signal.entries.size() < uq) {
    table.too_short = true;
    return table;
  }
  table.cells.reserve(signal.entries.size());
  for (const ErrorEntry& entry : signal.entries) {
    table.cells.push_back(VoteCell{entry.point_index, 0, 0});
  }
  std::vector<double> features(uq);
  for (std::size_t j = 0; j + uq <= signal.entries.size(); ++j) {
    for (std::size_t k = 0; k < uq; ++k) features[k] = signal.entries[j + k].error_m;
    const int prediction = predictor(features);
    if (prediction != 0 && prediction != 1) {
      throw std::invalid_argument("vote: window predictions must be 0 or 1");
    }
    for (std::size_t k = 0; k < uq; ++k) {
      table.cells[j + k].votes_cast += 1;
      table.cells[j + k].votes_positive += prediction;
    }
  }
  return table;
}

inline VoteTable vote(const ErrorSignal& signal, const ForestModel& model, int q) {
  if (q != model.q) {
    throw std::invalid_argument("vote: q does not match the model's feature length");
  }
  return vote_windows(signal, q,
                      [&model](std::span<const double> f) { return predict(model, f); });
}

/// Strict majority: a point is flagged iff more than 50% of its votes are
/// positive. Returns flagged point indices in ascending order.
inline std::vector<std::size_t> decide(const VoteTable& votes) {
  std::vector<std::size_t> flagged;
  for (const VoteCell& cell : votes.cells) {
    if (2 * cell.votes_positive > cell.votes_cast) {
      flagged.push_back(cell.point_index);
    }
  }
  return flagged;
}

/// Each maximal run of consecutive flagged indices collapses to one split at
/// the run's maximum-error index (earliest on ties).
inline std::vector<std::size_t> collapse_runs(const std::vector<std::size_t>& flagged,
                                              const ErrorSignal& signal) {
  std::vector<std::size_t> splits;
  if (flagged.empty()) return splits;
  if (signal.entries.empty()) {
    throw std::invalid_argument("collapse_runs: flagged indices but empty signal");
  }
  const std::size_t first = signal.entries.front().point_index;
  auto error_at = [&](std::size_t point_index) {
    const std::size_t offset = point_index - first;
    if (point_index < first || offset >= signal.entries.size()) {
      throw std::invalid_argument("collapse_runs: flagged index outside the signal");
    }
    return signal.entries[offset].error_m;
  };

  std::size_t run_best = flagged[0];
  double run_best_error = error_at(run_best);
  for (std::size_t i = 1; i <= flagged.size(); ++i) {
    const bool run_ends = i == flagged.size() || flagged[i] != flagged[i - 1] + 1;
    if (run_ends) {
      splits.push_back(run_best);
      if (i < flagged.size()) {
        run_best = flagged[i];
        run_best_error = error_at(run_best);
      }
      continue;
    }
    const double e = error_at(flagged[i]);
    if (e > run_best_error) {
      run_best = flagged[i];
      run_best_error = e;
    }
  }
  return splits;
}

/// WS-II inference: error signal, per-window classification, per-point
/// majority vote, run collapse, segment spans. Trajectories too short for a
/// single window come back as one segment.
inline SegmentationResult segment_wsii(const Trajectory& traj, const ForestModel& model,
                                       int w, int q, KernelKind kernel) {
  if (q != model.q) {
    throw std::invalid_argument("segment: q does not match the model's feature length");
  }
  const std::size_t n = traj.points.size();
  if (n == 0) return segmentation_from_splits(traj.id, 0, {});
  const ErrorSignal signal = error_signal(traj, w, kernel);
  const VoteTable votes = vote(signal, model, q);
  const std::vector<std::size_t> flagged = decide(votes);
  const std::vector<std::size_t> splits = collapse_runs(flagged, signal);
  return segmentation_from_splits(traj.id, n, splits);
}

}  // namespace wsii
