#include "stp/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace stp {

double VehicleParams::min_turn_radius() const {
  return wheelbase / std::tan(max_steer);
}

void VehicleParams::validate() const {
  if (!(wheelbase > 0.0)) throw std::invalid_argument("wheelbase must be > 0");
  if (!(max_steer > 0.0 && max_steer < M_PI / 2.0))
    throw std::invalid_argument("max_steer must be in (0, pi/2)");
  if (!(v_max > 0.0)) throw std::invalid_argument("v_max must be > 0");
  if (!(a_min < 0.0)) throw std::invalid_argument("a_min must be < 0");
  if (!(a_max > 0.0)) throw std::invalid_argument("a_max must be > 0");
}

std::pair<double, double> transform_control(const ControlInput& u, double v0,
                                            double t, const VehicleParams& params) {
  const double v = std::clamp(v0 + u.accel * t, 0.0, params.v_max);
  const double omega = std::tan(u.steer) / params.wheelbase * v;
  return {v, omega};
}

double primitive_cost(const ControlInput& u, double tau, const CostWeights& weights) {
  return (weights.accel * u.accel * u.accel + weights.steer * u.steer * u.steer +
          weights.base) *
         tau;
}

std::vector<double> steering_angles(const VehicleParams& params, int n_steer) {
  if (n_steer < 1 || n_steer % 2 == 0)
    throw std::invalid_argument("n_steer must be odd and >= 1");
  std::vector<double> steers;
  steers.reserve(static_cast<size_t>(n_steer));
  if (n_steer == 1) {
    steers.push_back(0.0);
    return steers;
  }
  const double step = 2.0 * params.max_steer / (n_steer - 1);
  for (int i = 0; i < n_steer; ++i) steers.push_back(-params.max_steer + i * step);
  return steers;
}

std::vector<ControlInput> sample_control_set(const VehicleParams& params,
                                             int n_steer,
                                             const std::vector<double>& accel_levels,
                                             double v0) {
  if (accel_levels.empty())
    throw std::invalid_argument("accel_levels must be nonempty");
  for (double a : accel_levels) {
    if (a < params.a_min || a > params.a_max)
      throw std::invalid_argument("acceleration level " + std::to_string(a) +
                                  " outside [a_min, a_max]");
  }

  const std::vector<double> steers = steering_angles(params, n_steer);

  std::vector<ControlInput> controls;
  controls.reserve(static_cast<size_t>(n_steer) * accel_levels.size());
  for (double a : accel_levels) {
    if (v0 <= 0.0 && a <= 0.0) continue;  // speed would stay pinned at zero
    for (double psi : steers) controls.push_back({psi, a});
  }
  return controls;
}

MotionPrimitive integrate_primitive(const RobotState& start, const ControlInput& u,
                                    double tau, const VehicleParams& params) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");

  MotionPrimitive prim;
  prim.start = start;
  prim.control = u;
  prim.duration = tau;

  if (u.accel > 0.0) {
    prim.saturation_time = std::max(0.0, (params.v_max - start.speed) / u.accel);
    prim.saturated_speed = params.v_max;
  } else if (u.accel < 0.0) {
    prim.saturation_time = std::max(0.0, start.speed / -u.accel);
    prim.saturated_speed = 0.0;
  } else {
    prim.saturation_time = tau;
    prim.saturated_speed = start.speed;
  }

  prim.turn_radius = std::abs(u.steer) <= kStraightSteerEps
                         ? std::numeric_limits<double>::infinity()
                         : params.wheelbase / std::tan(u.steer);

  prim.end = eval_primitive(prim, tau);
  return prim;
}

double primitive_arc_length(const MotionPrimitive& prim, double s) {
  const double v0 = prim.start.speed;
  const double a = prim.control.accel;
  const double tc = std::min(s, prim.saturation_time);
  double len = v0 * tc + 0.5 * a * tc * tc;
  if (s > prim.saturation_time) len += prim.saturated_speed * (s - prim.saturation_time);
  return len;
}

RobotState eval_primitive(const MotionPrimitive& prim, double s) {
  if (s < -1e-9 || s > prim.duration + 1e-9)
    throw std::out_of_range("eval_primitive: local time outside [0, duration]");
  s = std::clamp(s, 0.0, prim.duration);

  const double len = primitive_arc_length(prim, s);

  RobotState out;
  out.t = prim.start.t + s;
  if (s >= prim.saturation_time) {
    out.speed = prim.saturated_speed;
  } else {
    const double v = prim.start.speed + prim.control.accel * s;
    // Rounding near the saturation boundary must not leak past the limits.
    out.speed = prim.control.accel > 0.0 ? std::min(v, prim.saturated_speed)
                                         : std::max(v, 0.0);
  }

  const double phi0 = prim.start.heading;
  if (std::isinf(prim.turn_radius)) {
    out.pos = prim.start.pos + Vec2{len * std::cos(phi0), len * std::sin(phi0)};
    out.heading = phi0;
  } else {
    const double r = prim.turn_radius;
    const double phi = phi0 + len / r;
    out.pos.x = prim.start.pos.x + r * (std::sin(phi) - std::sin(phi0));
    out.pos.y = prim.start.pos.y - r * (std::cos(phi) - std::cos(phi0));
    out.heading = wrap_angle(phi);
  }
  return out;
}

}  // namespace stp
