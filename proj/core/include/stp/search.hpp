#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stp/collision.hpp"
#include "stp/geometry.hpp"
#include "stp/kinematics.hpp"

namespace stp {

/// Discrete search cell: position and heading bins plus the expansion depth.
/// Depth is part of the key because collision constraints are time-indexed;
/// states at different depths must never alias the same cell.
struct GridKey {
  int32_t ix = 0;
  int32_t iy = 0;
  int32_t iphi = 0;
  int32_t depth = 0;

  bool operator==(const GridKey&) const = default;

  /// Lossless 64-bit packing for hashing (positions within +-100 km).
  uint64_t packed() const;
};

/// Cell of `state` at the given expansion depth.
GridKey gen_key(const RobotState& state, double res_xy, double res_phi, int depth);

/// Disc goal with an optional heading requirement.
struct GoalRegion {
  Vec2 center;
  double radius = 0.5;
  std::optional<double> heading;      ///< Target heading (rad); enables the RS heuristic.
  std::optional<double> heading_tol;  ///< Accepted deviation (rad); requires heading.

  bool contains(const RobotState& state) const;
  void validate() const;
};

/// Search settings. Defaults match the benchmark setup: 9 primitives
/// (3 steering x 3 acceleration levels), 0.5 s primitives, 3 s horizon.
struct PlannerConfig {
  double res_xy = 0.2;              ///< Position bin size (m).
  double res_phi = M_PI / 18.0;     ///< Heading bin size (rad).
  double tau = 0.5;                 ///< Primitive duration (s).
  double horizon = 3.0;             ///< Partial-plan horizon (s), positive multiple of tau.
  double alpha = 1.3;               ///< Heuristic inflation, >= 1.
  CostWeights weights;
  int n_steer = 3;
  std::vector<double> accel_levels; ///< Empty selects {a_min, 0, a_max}.
  int max_expansions = 50000;
  bool aggregate = true;            ///< Grid-cell aggregation on/off.
  std::optional<Rect> bounds;       ///< States outside are invalid.
  bool record_pop_costs = false;    ///< Debug: log f at every pop into the stats.

  void validate(const VehicleParams& params) const;
  std::vector<double> accel_set(const VehicleParams& params) const;
};

/// Cost-to-go estimate: alpha-scaled minimum travel time to the goal edge
/// priced at the base running cost. Uses the Reeds-Shepp metric when the goal
/// constrains heading and the Euclidean lower bound otherwise; zero inside
/// the goal.
double heuristic(const RobotState& state, const GoalRegion& goal,
                 const PlannerConfig& cfg, const VehicleParams& params);

/// Search node. Nodes live in a pool vector; parents are pool indices.
struct SearchNode {
  GridKey key;
  int32_t idx = 0;  ///< Position in its cell's representative list.
  RobotState state;
  double g = 0;
  double h = 0;
  double f = 0;
  int32_t parent = -1;      ///< Pool index, -1 for the root.
  int32_t depth = 0;
  MotionPrimitive incoming; ///< Primitive from parent; default for the root.
  bool closed = false;
  bool replaced = false;    ///< Evicted from its cell by a cheaper arrival.
};

/// Candidate successor produced by one expansion.
struct Successor {
  MotionPrimitive primitive;
  double g = 0;
  double h = 0;
  double f = 0;
};

/// Expands every sampled control from `state`, keeping only successors whose
/// primitive is collision-free and whose end state is valid (inside bounds).
std::vector<Successor> generate_primitives(const RobotState& state, double parent_g,
                                           const GoalRegion& goal,
                                           const std::vector<Obstacle>& obstacles,
                                           const std::vector<StaticDisc>& statics,
                                           const VehicleParams& params,
                                           const PlannerConfig& cfg,
                                           const SafetyConfig& safety);

/// Primitive chain from the root to `leaf`, in execution order.
std::vector<MotionPrimitive> backtrack(const std::vector<SearchNode>& pool,
                                       int32_t leaf);

/// Planned result. Partial plans (horizon reached) span exactly
/// ceil(horizon/tau) primitives and carry the braking maneuver that
/// certified the terminal state safe.
struct Trajectory {
  std::vector<MotionPrimitive> primitives;
  double total_cost = 0;
  bool reached_goal = false;
  std::vector<MotionPrimitive> braking_certificate;
};

enum class PlanFailureKind { open_exhausted, budget_exceeded };

struct PlannerStats {
  int expansions = 0;       ///< Nodes popped and processed.
  int generated = 0;        ///< Collision-free successors created.
  int admitted_extra = 0;   ///< Aggregation: extra representatives admitted on better h.
  int replaced = 0;         ///< Aggregation: representatives evicted on better g.
  int pruned = 0;           ///< Aggregation: successors dropped.
  int open_peak = 0;
  int max_cell_size = 0;
  double wall_time_ms = 0;
  std::vector<double> pop_costs;
};

struct PlanResult {
  std::optional<Trajectory> trajectory;
  PlanFailureKind failure = PlanFailureKind::open_exhausted;
  PlannerStats stats;

  bool ok() const { return trajectory.has_value(); }
};

/// Online partial motion planner: hashed A* over motion primitives with
/// grid-cell aggregation. Returns a goal trajectory when one is popped first,
/// otherwise a horizon-length partial plan whose final state admits a safe
/// braking maneuver. Instances are single-threaded; use one per worker.
class Planner {
 public:
  Planner(const VehicleParams& params, const PlannerConfig& cfg,
          const SafetyConfig& safety);

  /// Precondition: `start` is collision-free at its own time.
  PlanResult plan(const RobotState& start, const GoalRegion& goal,
                  const std::vector<Obstacle>& obstacles,
                  const std::vector<StaticDisc>& statics);

  const VehicleParams& params() const { return params_; }
  const PlannerConfig& config() const { return cfg_; }
  const SafetyConfig& safety() const { return safety_; }

 private:
  VehicleParams params_;
  PlannerConfig cfg_;
  SafetyConfig safety_;
  std::vector<double> steer_set_;
  std::vector<double> accel_set_;
  std::vector<SearchNode> pool_;
};

}  // namespace stp
