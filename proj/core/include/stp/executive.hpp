#pragma once

#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "stp/search.hpp"
#include "stp/world.hpp"

namespace stp {

/// Episode parameters. The robot replans every replan_period seconds and is
/// stepped along the committed trajectory at sample_dt resolution; collision
/// and goal membership are judged at every sample against ground truth.
struct EpisodeConfig {
  RobotState start;
  GoalRegion goal;
  double timeout = 30.0;       ///< Episode fails after this much elapsed time (s).
  double replan_period = 0.1;  ///< Seconds between replans; integer multiple of sample_dt.
  double sample_dt = 0.1;      ///< Execution / judging step (s).
  /// A ground-truth agent within this center distance is a crash. Negative
  /// selects the environment's agent radius (point robot, margin folded into
  /// the planner's clearance).
  double collision_distance = -1.0;
  bool record_trace = false;   ///< Keep the executed state sequence in the metrics.

  void validate() const;
};

enum class FailureKind { none, collision, timeout, plan_failure };

const char* failure_name(FailureKind kind);

/// Outcome of one episode.
struct RunMetrics {
  bool success = false;
  FailureKind failure_kind = FailureKind::none;
  double time_to_goal = 0.0;  ///< Seconds from start; valid when success.
  double path_length = 0.0;   ///< Meters actually driven.
  int n_plans = 0;
  int n_plan_failures = 0;
  std::vector<double> plan_latencies_ms;
  std::vector<RobotState> trace;  ///< Filled when EpisodeConfig::record_trace.
};

/// What the executive sees and is judged against. observe() may be noisy;
/// agent_positions() is ground truth.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::vector<Obstacle> observe(double t) = 0;
  virtual void advance(double t_from, double t_to) = 0;
  virtual std::vector<Vec2> agent_positions(double t) const = 0;
  virtual double agent_radius() const = 0;
  virtual const std::vector<StaticDisc>& statics() const = 0;
};

/// Live crowd simulation. observe() draws speed noise from a stream seeded
/// independently of the world so runs stay reproducible.
class SimEnvironment final : public Environment {
 public:
  SimEnvironment(World world, uint64_t observation_seed, double start_time = 0.0);

  std::vector<Obstacle> observe(double t) override;
  void advance(double t_from, double t_to) override;
  std::vector<Vec2> agent_positions(double t) const override;
  double agent_radius() const override { return world_.spec().agent_radius; }
  const std::vector<StaticDisc>& statics() const override { return statics_; }

  const World& world() const { return world_; }
  void set_statics(std::vector<StaticDisc> statics) { statics_ = std::move(statics); }

 private:
  World world_;
  std::mt19937_64 obs_rng_;
  double world_time_ = 0.0;
  std::vector<StaticDisc> statics_;
};

/// Recorded pedestrian playback. Deterministic; advance() is a no-op. The
/// dataset must outlive the environment.
class ReplayEnvironment final : public Environment {
 public:
  ReplayEnvironment(const TrackDataset& dataset, double agent_radius);

  std::vector<Obstacle> observe(double t) override;
  void advance(double t_from, double t_to) override {}
  std::vector<Vec2> agent_positions(double t) const override;
  double agent_radius() const override { return radius_; }
  const std::vector<StaticDisc>& statics() const override { return statics_; }

 private:
  const TrackDataset* data_;
  double radius_;
  std::vector<StaticDisc> statics_;
};

/// Produces a committed trajectory each control period.
class Replanner {
 public:
  virtual ~Replanner() = default;

  /// A fresh trajectory whose primitives start at state.t, or nullopt when
  /// no safe plan exists this period.
  virtual std::optional<Trajectory> replan(const RobotState& state, const GoalRegion& goal,
                                           const std::vector<Obstacle>& obstacles,
                                           const std::vector<StaticDisc>& statics) = 0;

  /// Last-resort straight-line stop used when no plan exists and nothing
  /// committed remains; not collision-checked.
  virtual std::vector<MotionPrimitive> emergency_stop(const RobotState& state) = 0;
};

/// Search-based replanner. Partial plans already end in a certified braking
/// maneuver, so a failed replan leaves the robot on a safe committed path.
class SearchReplanner final : public Replanner {
 public:
  SearchReplanner(const VehicleParams& params, const PlannerConfig& cfg,
                  const SafetyConfig& safety);

  std::optional<Trajectory> replan(const RobotState& state, const GoalRegion& goal,
                                   const std::vector<Obstacle>& obstacles,
                                   const std::vector<StaticDisc>& statics) override;
  std::vector<MotionPrimitive> emergency_stop(const RobotState& state) override;

  const PlannerStats& last_stats() const { return last_stats_; }

 private:
  Planner planner_;
  PlannerStats last_stats_;
};

/// Baseline: drive straight along the current heading at full throttle; when
/// the next chunk would collide, brake and wait for the gap. Never steers.
class WaitAndGoReplanner final : public Replanner {
 public:
  WaitAndGoReplanner(const VehicleParams& params, const SafetyConfig& safety, double tau);

  std::optional<Trajectory> replan(const RobotState& state, const GoalRegion& goal,
                                   const std::vector<Obstacle>& obstacles,
                                   const std::vector<StaticDisc>& statics) override;
  std::vector<MotionPrimitive> emergency_stop(const RobotState& state) override;

 private:
  VehicleParams params_;
  SafetyConfig safety_;
  double tau_;
};

/// Fired after every replan attempt.
struct ReplanEvent {
  double t = 0.0;
  double latency_ms = 0.0;
  bool ok = false;
  const Trajectory* trajectory = nullptr;  ///< Valid during the callback only.
  const RobotState* state = nullptr;       ///< Robot state the plan started from.
};

/// Runs one episode: observe, replan, commit (plan plus braking certificate),
/// execute along the exact primitives. When a replan fails the previous
/// committed trajectory keeps executing; if none remains, an emergency stop
/// is committed. Returns when the goal is reached, a ground-truth collision
/// occurs, or the timeout elapses.
RunMetrics run_episode(Replanner& planner, Environment& env, const EpisodeConfig& cfg,
                       const std::function<void(const ReplanEvent&)>& on_replan = {});

}  // namespace stp
