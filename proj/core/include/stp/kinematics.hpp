#pragma once

#include <utility>
#include <vector>

#include "stp/geometry.hpp"

namespace stp {

/// Steering angles at or below this magnitude are treated as straight motion.
inline constexpr double kStraightSteerEps = 1e-6;

/// Car-like platform limits. All fields must be finite.
struct VehicleParams {
  double wheelbase = 0.5;    ///< Axle distance (m), > 0.
  double max_steer = 0.6;    ///< Steering magnitude limit (rad), in (0, pi/2).
  double v_max = 1.8;        ///< Forward speed limit (m/s), > 0.
  double a_min = -2.0;       ///< Braking acceleration (m/s^2), < 0.
  double a_max = 1.0;        ///< Driving acceleration (m/s^2), > 0. Kept gentle
                             ///< relative to braking so that speeding up pays for
                             ///< itself inside the planning horizon under the
                             ///< default cost weights.

  /// Minimum turn radius at full steer (m).
  double min_turn_radius() const;

  /// Throws std::invalid_argument when any limit is out of range.
  void validate() const;
};

/// Robot configuration plus motion context at a point in time.
struct RobotState {
  Vec2 pos;            ///< Rear-axle position (m).
  double heading = 0;  ///< Orientation (rad), kept in (-pi, pi].
  double speed = 0;    ///< Longitudinal speed (m/s), in [0, v_max].
  double t = 0;        ///< Absolute time (s).
};

/// Constant steering angle and acceleration held over one primitive.
struct ControlInput {
  double steer = 0;  ///< Steering angle (rad), |steer| <= max_steer.
  double accel = 0;  ///< Longitudinal acceleration (m/s^2), in [a_min, a_max].
};

/// One closed-form motion segment of fixed duration.
///
/// The pose follows a circular arc (straight line for near-zero steer) whose
/// arc length grows quadratically until the speed saturates at v_max or 0,
/// then linearly. end == eval_primitive(*this, duration).
struct MotionPrimitive {
  RobotState start;
  ControlInput control;
  double duration = 0;         ///< Segment length in time (s).
  double saturation_time = 0;  ///< Time at which speed hits v_max or 0; may exceed duration when the ramp never completes inside the segment.
  double saturated_speed = 0;  ///< Speed held after saturation_time (v_max or 0).
  double turn_radius = 0;      ///< Signed radius wheelbase/tan(steer) (m); +inf when straight.
  RobotState end;
};

/// Maps (steer, accel) at elapsed time t from initial speed v0 to the
/// platform-level (speed, yaw rate) pair. Speed is clamped to [0, v_max].
std::pair<double, double> transform_control(const ControlInput& u, double v0,
                                            double t, const VehicleParams& params);

/// Running cost of holding control u for tau seconds.
struct CostWeights {
  double accel = 2.0;  ///< Quadratic weight on acceleration, > 1.
  double steer = 2.0;  ///< Quadratic weight on steering, > 1.
  double base = 2.0;   ///< Constant time preference, > 0.
};

/// (accel_w * a^2 + steer_w * psi^2 + base) * tau. The null control prices
/// at base * tau, strictly cheaper than any other control.
double primitive_cost(const ControlInput& u, double tau, const CostWeights& weights);

/// The n_steer uniform steering angles spanning [-max_steer, max_steer],
/// ascending. n_steer must be odd so the set always contains 0.
std::vector<double> steering_angles(const VehicleParams& params, int n_steer);

/// Discretizes the control set: n_steer uniform steering angles spanning
/// [-max_steer, max_steer] crossed with the given acceleration levels.
/// Controls that would keep the robot at rest for the whole primitive
/// (v0 == 0 with a <= 0) are dropped.
///
/// Throws std::invalid_argument when n_steer is even or < 1, or when an
/// acceleration level violates [a_min, a_max].
std::vector<ControlInput> sample_control_set(const VehicleParams& params,
                                             int n_steer,
                                             const std::vector<double>& accel_levels,
                                             double v0);

/// Integrates control u from `start` over tau seconds in closed form.
MotionPrimitive integrate_primitive(const RobotState& start, const ControlInput& u,
                                    double tau, const VehicleParams& params);

/// Distance traveled along the primitive after local time s.
double primitive_arc_length(const MotionPrimitive& prim, double s);

/// State at local time s in [0, duration]. Throws std::out_of_range outside
/// the interval (beyond a 1e-9 slack for accumulated rounding).
RobotState eval_primitive(const MotionPrimitive& prim, double s);

}  // namespace stp
