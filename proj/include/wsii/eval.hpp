#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wsii/rng.hpp"
#include "wsii/training.hpp"
#include "wsii/trajectory.hpp"

namespace wsii {

struct SegmentScore {
  double purity = 0.0;
  double coverage = 0.0;
  double harmonic = 0.0;
};

inline double harmonic_mean(double p, double c) {
  return (p + c) == 0.0 ? 0.0 : 2.0 * p * c / (p + c);
}

/// Purity/coverage of a computed segmentation against per-point ground-truth
/// labels. Per computed segment: purity is the modal label share; coverage is
/// the captured fraction of the ground-truth segment contributing the most
/// points (earlier segment on ties). Trajectory scores are point-count
/// weighted means.
inline SegmentScore score(const SegmentationResult& result, const Trajectory& truth) {
  if (!truth.labeled()) {
    throw MissingLabelsError("score: ground-truth trajectory " + truth.id +
                             " has no labels");
  }
  const std::size_t n = truth.points.size();
  if (!is_valid_partition(result, n)) {
    throw std::invalid_argument("score: segmentation is not a partition of the trajectory");
  }
  if (n == 0) return SegmentScore{};

  // Ground-truth segments: maximal runs of one label.
  std::vector<Segment> truth_segments;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i == n || truth.labels[i] != truth.labels[i - 1]) {
      truth_segments.push_back(Segment{start, i - 1});
      start = i;
    }
  }

  double weighted_purity = 0.0;
  double weighted_coverage = 0.0;
  for (const Segment& s : result.segments) {
    const std::size_t size = s.end_index - s.start_index + 1;

    std::map<std::string, std::size_t> counts;
    for (std::size_t i = s.start_index; i <= s.end_index; ++i) counts[truth.labels[i]] += 1;
    std::size_t modal = 0;
    for (const auto& [label, count] : counts) modal = std::max(modal, count);

    std::size_t best_overlap = 0;
    std::size_t best_truth_size = 1;
    for (const Segment& g : truth_segments) {
      const std::size_t lo = std::max(s.start_index, g.start_index);
      const std::size_t hi = std::min(s.end_index, g.end_index);
      const std::size_t overlap = hi >= lo ? hi - lo + 1 : 0;
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best_truth_size = g.end_index - g.start_index + 1;
      }
    }

    weighted_purity += static_cast<double>(modal);
    weighted_coverage += static_cast<double>(size) * static_cast<double>(best_overlap) /
                         static_cast<double>(best_truth_size);
  }

  SegmentScore sc;
  sc.purity = weighted_purity / static_cast<double>(n);
  sc.coverage = weighted_coverage / static_cast<double>(n);
  sc.harmonic = harmonic_mean(sc.purity, sc.coverage);
  return sc;
}

struct MwuResult {
  double u = 0.0;  ///< U statistic of the first sample
  double p = 0.0;  ///< two-sided p-value
};

namespace detail {

// Exact null distribution: count rank subsets of size n1 whose U is <= / >= u.
inline void count_u_tails(std::size_t n, std::size_t n1, double u, std::uint64_t& le,
                          std::uint64_t& ge, std::uint64_t& total) {
  std::vector<std::size_t> pick(n1);
  for (std::size_t i = 0; i < n1; ++i) pick[i] = i;
  const double offset = static_cast<double>(n1 * (n1 + 1)) / 2.0;
  for (;;) {
    double ranksum = 0.0;
    for (std::size_t i = 0; i < n1; ++i) ranksum += static_cast<double>(pick[i] + 1);
    const double u_subset = ranksum - offset;
    total += 1;
    if (u_subset <= u + 1e-9) le += 1;
    if (u_subset >= u - 1e-9) ge += 1;
    // next combination
    std::size_t i = n1;
    while (i > 0) {
      --i;
      if (pick[i] + (n1 - i) < n) {
        pick[i] += 1;
        for (std::size_t j = i + 1; j < n1; ++j) pick[j] = pick[j - 1] + 1;
        break;
      }
      if (i == 0) return;
    }
    if (n1 == 0) return;
  }
}

inline double normal_two_sided_p(double z) {
  return std::erfc(z / std::sqrt(2.0));
}

}  // namespace detail

/// Mann-Whitney U with midrank tie handling. The exact null distribution is
/// enumerated when |a|+|b| <= 16 and the pooled sample is tie-free; otherwise
/// the normal approximation with tie and continuity corrections applies.
inline MwuResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("mann_whitney_u: samples must be non-empty");
  }
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  const std::size_t n = n1 + n2;

  std::vector<std::pair<double, int>> pooled;  // (value, 0 = from a, 1 = from b)
  pooled.reserve(n);
  for (double v : a) pooled.emplace_back(v, 0);
  for (double v : b) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  // Midranks and tie bookkeeping.
  std::vector<double> ranks(n);
  bool has_ties = false;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[j + 1].first == pooled[i].first) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[k] = midrank;
    const double t = static_cast<double>(j - i + 1);
    if (j > i) {
      has_ties = true;
      tie_term += t * t * t - t;
    }
    i = j + 1;
  }

  double rank_sum_a = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (pooled[k].second == 0) rank_sum_a += ranks[k];
  }
  const double u = rank_sum_a - static_cast<double>(n1 * (n1 + 1)) / 2.0;

  MwuResult result;
  result.u = u;

  if (n <= 16 && !has_ties) {
    std::uint64_t le = 0, ge = 0, total = 0;
    detail::count_u_tails(n, n1, u, le, ge, total);
    const double tail = static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
    result.p = std::min(1.0, 2.0 * tail);
    return result;
  }

  const double mu = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;
  const double nn = static_cast<double>(n);
  const double variance = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                          ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
  if (variance <= 0.0) {
    result.p = 1.0;
    return result;
  }
  const double z = std::max(0.0, std::abs(u - mu) - 0.5) / std::sqrt(variance);
  result.p = std::min(1.0, detail::normal_two_sided_p(z));
  return result;
}

/// Disjoint fold assignment over moving objects. Every trajectory of one
/// object lands in one fold; the points-file schema identifies objects by
/// trajectory id, so the grouping key is the id itself.
struct FoldPlan {
  int k = 10;
  std::map<std::string, int> assignment;  ///< trajectory_id -> fold
  int tuning_fold = 0;
};

inline FoldPlan make_fold_plan(std::vector<std::string> ids, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("fold plan: k must be >= 2");
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() < static_cast<std::size_t>(k)) {
    throw std::invalid_argument("fold plan: fewer moving objects than folds");
  }
  Rng rng(seed);
  for (std::size_t i = ids.size(); i > 1; --i) {
    std::swap(ids[i - 1], ids[rng.below(i)]);
  }
  FoldPlan plan;
  plan.k = k;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    plan.assignment[ids[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  }
  return plan;
}

/// One comparable algorithm under the tune/test protocol: given the tuning
/// trajectories, returns the tuned per-trajectory segmenter and a short
/// description of the tuned parameters.
struct ProtocolAlgorithm {
  std::string name;
  std::function<std::pair<std::function<SegmentationResult(const Trajectory&)>, std::string>(
      const std::vector<Trajectory>&)>
      prepare;
};

struct ProtocolResult {
  std::string algorithm;
  std::string tuned_description;
  std::vector<double> fold_means;  ///< fold-level mean harmonic, folds 1..k-1
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation over fold means
};

/// Fold 0 tunes/trains; every other fold is segmented trajectory by
/// trajectory and reports its mean harmonic score.
inline ProtocolResult kfold_protocol(const std::vector<Trajectory>& dataset,
                                     const ProtocolAlgorithm& algorithm, int k,
                                     std::uint64_t seed) {
  std::vector<std::string> ids;
  ids.reserve(dataset.size());
  for (const Trajectory& traj : dataset) {
    if (!traj.labeled()) {
      throw MissingLabelsError("kfold protocol: trajectory " + traj.id + " has no labels");
    }
    ids.push_back(traj.id);
  }
  const FoldPlan plan = make_fold_plan(ids, k, seed);

  std::vector<std::vector<const Trajectory*>> folds(static_cast<std::size_t>(k));
  for (const Trajectory& traj : dataset) {
    folds[static_cast<std::size_t>(plan.assignment.at(traj.id))].push_back(&traj);
  }

  std::vector<Trajectory> tuning;
  for (const Trajectory* traj : folds[static_cast<std::size_t>(plan.tuning_fold)]) {
    tuning.push_back(*traj);
  }
  auto [segmenter, description] = algorithm.prepare(tuning);

  ProtocolResult result;
  result.algorithm = algorithm.name;
  result.tuned_description = description;
  for (int f = 0; f < k; ++f) {
    if (f == plan.tuning_fold) continue;
    double sum = 0.0;
    const auto& fold = folds[static_cast<std::size_t>(f)];
    for (const Trajectory* traj : fold) {
      sum += score(segmenter(*traj), *traj).harmonic;
    }
    result.fold_means.push_back(sum / static_cast<double>(fold.size()));
  }

  double mean = 0.0;
  for (double v : result.fold_means) mean += v;
  mean /= static_cast<double>(result.fold_means.size());
  result.mean = mean;
  if (result.fold_means.size() > 1) {
    double ss = 0.0;
    for (double v : result.fold_means) ss += (v - mean) * (v - mean);
    result.stddev = std::sqrt(ss / static_cast<double>(result.fold_means.size() - 1));
  }
  return result;
}

}  // namespace wsii
