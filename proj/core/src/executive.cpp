#include "stp/executive.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace stp {

void EpisodeConfig::validate() const {
  goal.validate();
  if (!(timeout > 0.0)) throw std::invalid_argument("timeout must be > 0");
  if (!(sample_dt > 0.0)) throw std::invalid_argument("sample_dt must be > 0");
  double ratio = replan_period / sample_dt;
  if (!(replan_period > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-6) {
    throw std::invalid_argument("replan_period must be a positive multiple of sample_dt");
  }
}

const char* failure_name(FailureKind kind) {
  switch (kind) {
    case FailureKind::none: return "none";
    case FailureKind::collision: return "collision";
    case FailureKind::timeout: return "timeout";
    case FailureKind::plan_failure: return "plan_failure";
  }
  return "unknown";
}

SimEnvironment::SimEnvironment(World world, uint64_t observation_seed, double start_time)
    : world_(std::move(world)), obs_rng_(observation_seed), world_time_(start_time) {}

std::vector<Obstacle> SimEnvironment::observe(double t) {
  if (std::abs(t - world_time_) > 1e-6) {
    throw std::logic_error("sim observation time does not match world time");
  }
  return world_.observe(t, obs_rng_);
}

void SimEnvironment::advance(double t_from, double t_to) {
  if (std::abs(t_from - world_time_) > 1e-6 || t_to < t_from) {
    throw std::logic_error("sim advance interval does not continue world time");
  }
  world_.step(t_to - t_from);
  world_time_ = t_to;
}

std::vector<Vec2> SimEnvironment::agent_positions(double t) const {
  if (std::abs(t - world_time_) > 1e-6) {
    throw std::logic_error("sim ground truth requested off the current world time");
  }
  std::vector<Vec2> out;
  out.reserve(world_.agents().size());
  for (const Agent& agent : world_.agents()) out.push_back(agent.pos);
  return out;
}

ReplayEnvironment::ReplayEnvironment(const TrackDataset& dataset, double agent_radius)
    : data_(&dataset), radius_(agent_radius) {
  if (!(agent_radius > 0.0)) throw std::invalid_argument("agent_radius must be > 0");
}

std::vector<Obstacle> ReplayEnvironment::observe(double t) {
  return replay_observe(*data_, t, radius_);
}

std::vector<Vec2> ReplayEnvironment::agent_positions(double t) const {
  std::vector<Vec2> out;
  for (const Obstacle& obs : replay_observe(*data_, t, radius_)) out.push_back(obs.pos);
  return out;
}

SearchReplanner::SearchReplanner(const VehicleParams& params, const PlannerConfig& cfg,
                                 const SafetyConfig& safety)
    : planner_(params, cfg, safety) {}

std::optional<Trajectory> SearchReplanner::replan(const RobotState& state,
                                                  const GoalRegion& goal,
                                                  const std::vector<Obstacle>& obstacles,
                                                  const std::vector<StaticDisc>& statics) {
  PlanResult result = planner_.plan(state, goal, obstacles, statics);
  last_stats_ = std::move(result.stats);
  return std::move(result.trajectory);
}

std::vector<MotionPrimitive> SearchReplanner::emergency_stop(const RobotState& state) {
  return braking_maneuver(state, 0.0, planner_.config().tau, planner_.params(),
                          planner_.safety());
}

WaitAndGoReplanner::WaitAndGoReplanner(const VehicleParams& params,
                                       const SafetyConfig& safety, double tau)
    : params_(params), safety_(safety), tau_(tau) {
  params_.validate();
  safety_.validate();
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
}

std::optional<Trajectory> WaitAndGoReplanner::replan(const RobotState& state,
                                                     const GoalRegion& goal,
                                                     const std::vector<Obstacle>& obstacles,
                                                     const std::vector<StaticDisc>& statics) {
  Trajectory traj;
  MotionPrimitive go = integrate_primitive(state, {0.0, params_.a_max}, tau_, params_);
  if (primitive_collision_free(go, obstacles, statics, safety_)) {
    traj.primitives.push_back(go);
  } else {
    traj.primitives.push_back(integrate_primitive(state, {0.0, params_.a_min}, tau_, params_));
  }
  const MotionPrimitive& prim = traj.primitives.front();
  traj.total_cost = primitive_cost(prim.control, tau_, CostWeights{});
  traj.reached_goal = goal.contains(prim.end);
  return traj;
}

std::vector<MotionPrimitive> WaitAndGoReplanner::emergency_stop(const RobotState& state) {
  return braking_maneuver(state, 0.0, tau_, params_, safety_);
}

namespace {

/// State along a committed primitive chain at absolute time t. Past the end
/// of the chain the terminal pose is held.
RobotState committed_state_at(const std::vector<MotionPrimitive>& committed, double t) {
  const MotionPrimitive& last = committed.back();
  if (t >= last.start.t + last.duration - 1e-9) {
    RobotState held = last.end;
    held.t = t;
    return held;
  }
  for (const MotionPrimitive& prim : committed) {
    if (t <= prim.start.t + prim.duration + 1e-9) {
      double local = std::clamp(t - prim.start.t, 0.0, prim.duration);
      RobotState s = eval_primitive(prim, local);
      s.t = t;
      return s;
    }
  }
  RobotState held = last.end;  // not reachable; keeps the compiler satisfied
  held.t = t;
  return held;
}

}  // namespace

RunMetrics run_episode(Replanner& planner, Environment& env, const EpisodeConfig& cfg,
                       const std::function<void(const ReplanEvent&)>& on_replan) {
  cfg.validate();
  using clock = std::chrono::steady_clock;

  const double t0 = cfg.start.t;
  RobotState robot = cfg.start;
  RunMetrics metrics;

  const double crash_distance =
      cfg.collision_distance >= 0.0 ? cfg.collision_distance : env.agent_radius();
  // Keep the static-disc judge consistent with whatever body allowance the
  // agent threshold encodes beyond the agent radius itself.
  const double body_allowance = std::max(0.0, crash_distance - env.agent_radius());
  auto hits_ground_truth = [&](const RobotState& s, double t) {
    for (const Vec2& pos : env.agent_positions(t)) {
      if ((pos - s.pos).norm() < crash_distance) return true;
    }
    for (const StaticDisc& disc : env.statics()) {
      if ((disc.center - s.pos).norm() < disc.radius + body_allowance) return true;
    }
    return false;
  };

  if (cfg.record_trace) metrics.trace.push_back(robot);
  if (hits_ground_truth(robot, t0)) {
    metrics.failure_kind = FailureKind::collision;
    return metrics;
  }
  if (cfg.goal.contains(robot)) {
    metrics.success = true;
    return metrics;
  }

  std::vector<MotionPrimitive> committed;
  const int steps_per_plan = static_cast<int>(std::round(cfg.replan_period / cfg.sample_dt));

  double t = t0;
  while (t - t0 < cfg.timeout - 1e-9) {
    std::vector<Obstacle> obstacles = env.observe(t);

    auto tic = clock::now();
    std::optional<Trajectory> plan = planner.replan(robot, cfg.goal, obstacles, env.statics());
    double latency_ms =
        std::chrono::duration<double, std::milli>(clock::now() - tic).count();
    metrics.plan_latencies_ms.push_back(latency_ms);
    ++metrics.n_plans;

    if (plan) {
      committed = plan->primitives;
      committed.insert(committed.end(), plan->braking_certificate.begin(),
                       plan->braking_certificate.end());
    } else {
      ++metrics.n_plan_failures;
      // Keep executing the previous commitment (it ends in certified
      // braking). Only when nothing committed spans the upcoming period do
      // we fall back to an unchecked stop.
      double coverage = committed.empty()
                            ? t
                            : committed.back().start.t + committed.back().duration;
      if (coverage < t + cfg.replan_period - 1e-9 && robot.speed > 0.0) {
        committed = planner.emergency_stop(robot);
      }
      if (committed.empty()) {
        committed.push_back(integrate_primitive(robot, {0.0, 0.0}, cfg.replan_period,
                                                VehicleParams{}));
      }
    }
    if (on_replan) {
      ReplanEvent event;
      event.t = t;
      event.latency_ms = latency_ms;
      event.ok = plan.has_value();
      event.trajectory = plan ? &*plan : nullptr;
      event.state = &robot;
      on_replan(event);
    }

    for (int k = 0; k < steps_per_plan; ++k) {
      double t_next = t + cfg.sample_dt;
      env.advance(t, t_next);
      RobotState next = committed_state_at(committed, t_next);
      metrics.path_length += (next.pos - robot.pos).norm();
      robot = next;
      t = t_next;
      if (cfg.record_trace) metrics.trace.push_back(robot);
      if (hits_ground_truth(robot, t)) {
        metrics.failure_kind = FailureKind::collision;
        return metrics;
      }
      if (cfg.goal.contains(robot)) {
        metrics.success = true;
        metrics.time_to_goal = t - t0;
        return metrics;
      }
      if (t - t0 >= cfg.timeout - 1e-9) break;
    }
  }

  metrics.failure_kind = FailureKind::timeout;
  return metrics;
}

}  // namespace stp
