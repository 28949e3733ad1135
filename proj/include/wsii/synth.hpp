#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsii/geo.hpp"
#include "wsii/rng.hpp"
#include "wsii/trajectory.hpp"

namespace wsii {

/// Synthetic labeled-data generator: every trajectory alternates directed and
/// wandering behavior segments, each point labeled with its behavior.
struct SynthSpec {
  std::uint64_t seed = 42;
  int n_trajectories = 30;
  int segments_min = 4;  ///< segments per trajectory, inclusive range
  int segments_max = 8;
  int points_min = 40;  ///< points per segment, inclusive range
  int points_max = 80;
  double gps_noise_m = 5.0;  ///< isotropic Gaussian position noise, meters

  // Directed behavior: near-constant velocity with small heading jitter.
  double directed_speed_min_mps = 5.0;
  double directed_speed_max_mps = 15.0;
  double heading_jitter_deg = 4.0;

  // Wander behavior: isotropic random steps.
  double wander_step_min_m = 2.0;
  double wander_step_max_m = 6.0;

  double sample_interval_s = 10.0;
};

inline void validate(const SynthSpec& spec) {
  if (spec.n_trajectories < 1) throw std::invalid_argument("synth: need >= 1 trajectory");
  if (spec.segments_min < 1 || spec.segments_max < spec.segments_min) {
    throw std::invalid_argument("synth: invalid segments-per-trajectory range");
  }
  if (spec.points_min < 1 || spec.points_max < spec.points_min) {
    throw std::invalid_argument("synth: invalid points-per-segment range");
  }
  if (spec.gps_noise_m < 0.0) throw std::invalid_argument("synth: noise must be >= 0");
  if (spec.directed_speed_min_mps <= 0.0 ||
      spec.directed_speed_max_mps < spec.directed_speed_min_mps) {
    throw std::invalid_argument("synth: invalid directed speed range");
  }
  if (spec.wander_step_min_m <= 0.0 || spec.wander_step_max_m < spec.wander_step_min_m) {
    throw std::invalid_argument("synth: invalid wander step range");
  }
  if (spec.sample_interval_s <= 0.0) {
    throw std::invalid_argument("synth: sample interval must be positive");
  }
}

/// Fully seed-deterministic generation. Positions integrate in a local
/// meter frame and convert to degrees around a per-trajectory base latitude;
/// GPS noise perturbs the recorded point, not the underlying motion.
inline std::vector<Trajectory> generate_synthetic(const SynthSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(spec.n_trajectories));

  int id_width = 1;
  for (int v = spec.n_trajectories - 1; v >= 10; v /= 10) ++id_width;

  for (int ti = 0; ti < spec.n_trajectories; ++ti) {
    Trajectory traj;
    std::string index = std::to_string(ti);
    traj.id = "synth-" + std::string(static_cast<std::size_t>(id_width) - index.size(), '0') +
              index;

    const double base_lat = 44.0 + rng.uniform(-0.5, 0.5);
    const double base_lon = -63.0 + rng.uniform(-0.5, 0.5);
    const double m_per_deg_lon = kMetersPerDegLat * std::cos(deg2rad(base_lat));

    double x = 0.0, y = 0.0;  // local meters east / north
    double t = 0.0;
    const double dt = spec.sample_interval_s;

    const int segments =
        spec.segments_min + static_cast<int>(rng.below(static_cast<std::size_t>(
                                spec.segments_max - spec.segments_min + 1)));
    for (int s = 0; s < segments; ++s) {
      const bool directed = s % 2 == 0;
      const int points =
          spec.points_min + static_cast<int>(rng.below(static_cast<std::size_t>(
                                spec.points_max - spec.points_min + 1)));
      double heading = rng.uniform(0.0, 2.0 * kPi);
      const double speed =
          rng.uniform(spec.directed_speed_min_mps, spec.directed_speed_max_mps);
      const double step_scale = rng.uniform(spec.wander_step_min_m, spec.wander_step_max_m);

      for (int pi = 0; pi < points; ++pi) {
        const double nx = x + spec.gps_noise_m * rng.normal();
        const double ny = y + spec.gps_noise_m * rng.normal();
        TimedPoint point;
        point.position.lat = base_lat + ny / kMetersPerDegLat;
        point.position.lon = base_lon + nx / m_per_deg_lon;
        point.t = t;
        traj.points.push_back(point);
        traj.labels.push_back(directed ? "directed" : "wander");
        t += dt;

        if (directed) {
          heading += deg2rad(spec.heading_jitter_deg) * rng.normal();
          x += speed * dt * std::cos(heading);
          y += speed * dt * std::sin(heading);
        } else {
          x += step_scale * rng.normal();
          y += step_scale * rng.normal();
        }
      }
    }
    out.push_back(std::move(traj));
  }
  return out;
}

}  // namespace wsii
