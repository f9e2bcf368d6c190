#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stp/collision.hpp"
#include "stp/geometry.hpp"

namespace stp {

/// Crowd generation settings. Agents move with constant velocity; exiting
/// agents are replaced by fresh boundary spawns so the count stays constant.
struct SimAgentSpec {
  Rect bounds{0.0, 0.0, 10.0, 10.0};
  int n_agents = 40;
  double speed_min = 1.2;          ///< m/s, uniform draw lower bound.
  double speed_max = 2.0;          ///< m/s, uniform draw upper bound.
  double speed_noise_sigma = 0.1;  ///< Std dev of observed-speed noise (m/s).
  double agent_radius = 0.25;      ///< m.
  uint64_t rng_seed = 1;

  void validate() const;
};

/// One constant-velocity crowd agent.
struct Agent {
  int32_t id = 0;
  Vec2 pos;
  double heading = 0.0;
  double speed = 0.0;

  Vec2 velocity() const { return {speed * std::cos(heading), speed * std::sin(heading)}; }
};

/// Constant-velocity crowd with boundary respawn.
class World {
 public:
  /// Uniformly spawns spec.n_agents inside spec.bounds. Positions within
  /// clear_radius of keep_clear (when given) are rejection-sampled away so a
  /// robot start can begin collision-free.
  static World spawn(const SimAgentSpec& spec,
                     std::optional<Vec2> keep_clear = std::nullopt,
                     double clear_radius = 1.0);

  /// Direct construction with caller-provided agents (tests, fixed scenes).
  World(const SimAgentSpec& spec, std::vector<Agent> agents);

  /// Advances every agent by dt; agents leaving the bounds are replaced by
  /// fresh spawns on the boundary heading inward.
  void step(double dt);

  /// Snapshot of every agent as an obstacle observed at time t. The observed
  /// speed carries N(0, sigma) noise (clamped at zero); headings are exact.
  std::vector<Obstacle> observe(double t, std::mt19937_64& noise_rng) const;

  const std::vector<Agent>& agents() const { return agents_; }
  const SimAgentSpec& spec() const { return spec_; }

 private:
  SimAgentSpec spec_;
  std::vector<Agent> agents_;
  std::mt19937_64 respawn_rng_;
  int32_t next_id_ = 0;
};

/// One recorded position sample.
struct TrackSample {
  double t = 0.0;
  Vec2 pos;
};

/// One agent's recorded trajectory, resampled to a uniform period.
struct TimedTrack {
  int32_t agent_id = 0;
  std::vector<TrackSample> samples;

  double t_first() const { return samples.front().t; }
  double t_last() const { return samples.back().t; }
};

/// A recorded pedestrian scene resampled to 10 Hz.
struct TrackDataset {
  std::vector<TimedTrack> tracks;
  double dt = 0.1;

  double t_min() const;
  double t_max() const;
  Rect bbox() const;
};

/// Parses a track file: optional comment lines starting with '#', a header
/// line "frame_dt <seconds>", then rows "frame_id agent_id x y". Tracks are
/// linearly resampled to the 10 Hz grid. Malformed input throws
/// std::runtime_error naming the offending line.
TrackDataset load_tracks(const std::string& path);

/// Writes the dataset in the same format (frame_dt 0.1, integer frames).
/// Loading the result reproduces the dataset exactly.
void save_tracks(const TrackDataset& dataset, const std::string& path);

/// Obstacles visible at time t: every track whose recorded span covers t,
/// positioned by interpolation, velocity from the finite difference of the
/// two samples straddling (or preceding) t. Zero velocity at first presence.
std::vector<Obstacle> replay_observe(const TrackDataset& dataset, double t,
                                     double agent_radius);

}  // namespace stp
