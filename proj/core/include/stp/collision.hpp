#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stp/geometry.hpp"
#include "stp/kinematics.hpp"

namespace stp {

/// Moving disc obstacle observed at time t0, extrapolated at constant velocity.
struct Obstacle {
  int32_t id = 0;
  Vec2 pos;           ///< Position at observation time (m).
  Vec2 vel;           ///< Velocity estimate (m/s).
  double radius = 0;  ///< Disc radius (m), >= 0.
  double t0 = 0;      ///< Observation time (s).
};

/// Fixed disc obstacle.
struct StaticDisc {
  Vec2 center;
  double radius = 0;
};

/// Clearance and discretization settings for the collision checker.
struct SafetyConfig {
  double margin = 0.3;      ///< Extra clearance beyond obstacle radius (m), >= 0.
  int n_segments = 4;       ///< Linearization segments per primitive, >= 1.
  double ics_horizon = 2.0; ///< Braking maneuvers are checked through this span (s), > 0.

  void validate() const;
};

/// Extrapolated obstacle center at time t. Throws std::invalid_argument for
/// t earlier than the observation time.
Vec2 predict_obstacle(const Obstacle& obs, double t);

/// Obstacle-minus-robot waypoints at n_segments+1 uniform times over the
/// primitive. The robot keeps the required clearance iff the origin keeps its
/// distance to this polyline (up to the deviation bound).
std::vector<Vec2> relative_polyline(const MotionPrimitive& prim, const Obstacle& obs,
                                    int n_segments);

/// Upper bound on the distance between the traced path and the secant segment
/// of any linearization subinterval: the circular sagitta of the widest
/// sub-arc. Zero for straight primitives.
double deviation_bound(const MotionPrimitive& prim, int n_segments);

/// Per-subinterval bounds used by primitive_collision_free. On top of the
/// sagitta these include the time-reparameterization slack (the secant is
/// parameterized by time, not arc length), so a clearance verdict stays valid
/// for speed profiles that saturate or stop inside a subinterval.
std::vector<double> segment_deviation_bounds(const MotionPrimitive& prim, int n_segments);

/// True when every obstacle keeps distance > margin + radius from the robot
/// along the whole primitive, judged segment-wise against the relative
/// polyline minus the deviation bound. Conservative: never true when the true
/// minimum distance is at or below margin + radius.
bool primitive_collision_free(const MotionPrimitive& prim,
                              const std::vector<Obstacle>& obstacles,
                              const std::vector<StaticDisc>& statics,
                              const SafetyConfig& cfg);

/// Full-brake maneuver from `state` along one steering angle: a_min until the
/// speed reaches zero, then holding the stopped pose, split into tau-chunks
/// covering cfg.ics_horizon.
std::vector<MotionPrimitive> braking_maneuver(const RobotState& state, double steer,
                                              double tau, const VehicleParams& params,
                                              const SafetyConfig& cfg);

/// Searches the steering set for a collision-free full-brake maneuver.
/// Returns the first one found (set order), or nullopt when every braking
/// direction is blocked.
std::optional<std::vector<MotionPrimitive>> find_safe_braking(
    const RobotState& state, const std::vector<Obstacle>& obstacles,
    const std::vector<StaticDisc>& statics, const std::vector<double>& steer_set,
    double tau, const VehicleParams& params, const SafetyConfig& cfg);

/// A state is safe to commit to when at least one braking direction stays
/// collision-free through the ICS horizon.
bool is_ics_free(const RobotState& state, const std::vector<Obstacle>& obstacles,
                 const std::vector<StaticDisc>& statics,
                 const std::vector<double>& steer_set, double tau,
                 const VehicleParams& params, const SafetyConfig& cfg);

}  // namespace stp
