#include "stp/collision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stp {

void SafetyConfig::validate() const {
  if (!(margin >= 0.0)) throw std::invalid_argument("margin must be >= 0");
  if (n_segments < 1) throw std::invalid_argument("n_segments must be >= 1");
  if (!(ics_horizon > 0.0)) throw std::invalid_argument("ics_horizon must be > 0");
}

Vec2 predict_obstacle(const Obstacle& obs, double t) {
  if (t < obs.t0 - 1e-9)
    throw std::invalid_argument("predict_obstacle: t precedes observation time");
  return obs.pos + obs.vel * (t - obs.t0);
}

std::vector<Vec2> relative_polyline(const MotionPrimitive& prim, const Obstacle& obs,
                                    int n_segments) {
  if (n_segments < 1) throw std::invalid_argument("n_segments must be >= 1");
  std::vector<Vec2> waypoints;
  waypoints.reserve(static_cast<size_t>(n_segments) + 1);
  const double dt = prim.duration / n_segments;
  for (int j = 0; j <= n_segments; ++j) {
    const double s = j == n_segments ? prim.duration : j * dt;
    waypoints.push_back(predict_obstacle(obs, prim.start.t + s) -
                        eval_primitive(prim, s).pos);
  }
  return waypoints;
}

namespace {

// Max distance between the unit-speed sub-arc and its chord when both are
// walked proportionally to arc length: sagitta plus the along-chord error
// |sin u - u * sinc(h)|. Falls back to the diameter for very wide sub-arcs.
double arc_chord_deviation(double radius_abs, double half_angle) {
  if (half_angle <= 0.0) return 0.0;
  if (half_angle >= M_PI / 2.0) return 2.0 * radius_abs;
  const double sagitta = radius_abs * (1.0 - std::cos(half_angle));
  const double c = std::sin(half_angle) / half_angle;
  const double cc = std::clamp(c, -1.0, 1.0);
  const double tangential = radius_abs * (std::sqrt(std::max(0.0, 1.0 - cc * cc)) -
                                          cc * std::acos(cc));
  return sagitta + tangential;
}

}  // namespace

double deviation_bound(const MotionPrimitive& prim, int n_segments) {
  if (n_segments < 1) throw std::invalid_argument("n_segments must be >= 1");
  if (std::isinf(prim.turn_radius)) return 0.0;
  const double r = std::abs(prim.turn_radius);
  const double dt = prim.duration / n_segments;
  double worst = 0.0;
  double len_prev = 0.0;
  for (int j = 1; j <= n_segments; ++j) {
    const double s = j == n_segments ? prim.duration : j * dt;
    const double len = primitive_arc_length(prim, s);
    const double sweep = std::min((len - len_prev) / r, 2.0 * M_PI);
    worst = std::max(worst, r * (1.0 - std::cos(0.5 * sweep)));
    len_prev = len;
  }
  return worst;
}

std::vector<double> segment_deviation_bounds(const MotionPrimitive& prim,
                                             int n_segments) {
  if (n_segments < 1) throw std::invalid_argument("n_segments must be >= 1");
  const double dt = prim.duration / n_segments;
  // Linear time-interpolation of the arc length errs by at most |a|*dt^2/8.
  const double chrono = std::abs(prim.control.accel) * dt * dt / 8.0;
  std::vector<double> bounds(static_cast<size_t>(n_segments));
  const bool straight = std::isinf(prim.turn_radius);
  const double r = straight ? 0.0 : std::abs(prim.turn_radius);
  double len_prev = 0.0;
  for (int j = 1; j <= n_segments; ++j) {
    const double s = j == n_segments ? prim.duration : j * dt;
    const double len = primitive_arc_length(prim, s);
    const double geometric = straight ? 0.0 : arc_chord_deviation(r, 0.5 * (len - len_prev) / r);
    bounds[static_cast<size_t>(j - 1)] = geometric + chrono;
    len_prev = len;
  }
  return bounds;
}

namespace {

bool polyline_clear(const MotionPrimitive& prim, const Vec2* robot_pos,
                    const double* bounds, int n_segments, const Vec2& obs_pos,
                    const Vec2& obs_vel, double obs_t0, double threshold) {
  const double dt = prim.duration / n_segments;
  Vec2 prev = obs_pos + obs_vel * (prim.start.t - obs_t0) - robot_pos[0];
  for (int j = 1; j <= n_segments; ++j) {
    const Vec2 cur =
        obs_pos + obs_vel * (prim.start.t + j * dt - obs_t0) - robot_pos[j];
    const double d = segment_distance_to_origin(prev, cur);
    if (d - bounds[j - 1] <= threshold) return false;
    prev = cur;
  }
  return true;
}

}  // namespace

bool primitive_collision_free(const MotionPrimitive& prim,
                              const std::vector<Obstacle>& obstacles,
                              const std::vector<StaticDisc>& statics,
                              const SafetyConfig& cfg) {
  const int n = cfg.n_segments;
  const double dt = prim.duration / n;

  Vec2 robot_pos[64];
  if (n + 1 > 64) throw std::invalid_argument("n_segments too large");
  for (int j = 0; j <= n; ++j)
    robot_pos[j] = eval_primitive(prim, j == n ? prim.duration : j * dt).pos;
  const std::vector<double> bounds = segment_deviation_bounds(prim, n);

  for (const Obstacle& obs : obstacles) {
    if (prim.start.t < obs.t0 - 1e-9)
      throw std::invalid_argument("obstacle observed after primitive start");
    if (!polyline_clear(prim, robot_pos, bounds.data(), n, obs.pos, obs.vel, obs.t0,
                        cfg.margin + obs.radius))
      return false;
  }
  for (const StaticDisc& disc : statics) {
    if (!polyline_clear(prim, robot_pos, bounds.data(), n, disc.center, Vec2{0.0, 0.0},
                        prim.start.t, cfg.margin + disc.radius))
      return false;
  }
  return true;
}

std::vector<MotionPrimitive> braking_maneuver(const RobotState& state, double steer,
                                              double tau, const VehicleParams& params,
                                              const SafetyConfig& cfg) {
  const int chunks = static_cast<int>(std::ceil(cfg.ics_horizon / tau - 1e-12));
  std::vector<MotionPrimitive> chain;
  chain.reserve(static_cast<size_t>(chunks));
  RobotState cur = state;
  for (int k = 0; k < chunks; ++k) {
    chain.push_back(integrate_primitive(cur, {steer, params.a_min}, tau, params));
    cur = chain.back().end;
  }
  return chain;
}

std::optional<std::vector<MotionPrimitive>> find_safe_braking(
    const RobotState& state, const std::vector<Obstacle>& obstacles,
    const std::vector<StaticDisc>& statics, const std::vector<double>& steer_set,
    double tau, const VehicleParams& params, const SafetyConfig& cfg) {
  for (double steer : steer_set) {
    std::vector<MotionPrimitive> chain = braking_maneuver(state, steer, tau, params, cfg);
    bool clear = true;
    for (const MotionPrimitive& prim : chain) {
      if (!primitive_collision_free(prim, obstacles, statics, cfg)) {
        clear = false;
        break;
      }
    }
    if (clear) return chain;
  }
  return std::nullopt;
}

bool is_ics_free(const RobotState& state, const std::vector<Obstacle>& obstacles,
                 const std::vector<StaticDisc>& statics,
                 const std::vector<double>& steer_set, double tau,
                 const VehicleParams& params, const SafetyConfig& cfg) {
  return find_safe_braking(state, obstacles, statics, steer_set, tau, params, cfg)
      .has_value();
}

}  // namespace stp
