#include "stp/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "stp/reeds_shepp.hpp"

namespace stp {

uint64_t GridKey::packed() const {
  const uint64_t ux = static_cast<uint32_t>(ix) & 0xFFFFFu;
  const uint64_t uy = static_cast<uint32_t>(iy) & 0xFFFFFu;
  const uint64_t up = static_cast<uint32_t>(iphi) & 0xFFFFu;
  const uint64_t ud = static_cast<uint32_t>(depth) & 0xFFu;
  return (ux << 44) | (uy << 24) | (up << 8) | ud;
}

GridKey gen_key(const RobotState& state, double res_xy, double res_phi, int depth) {
  if (!(res_xy > 0.0) || !(res_phi > 0.0))
    throw std::invalid_argument("grid resolutions must be > 0");
  GridKey key;
  key.ix = static_cast<int32_t>(std::floor(state.pos.x / res_xy));
  key.iy = static_cast<int32_t>(std::floor(state.pos.y / res_xy));
  const int bins = static_cast<int>(std::ceil(2.0 * M_PI / res_phi));
  int iphi = static_cast<int>(std::floor(wrap_angle_2pi(state.heading) / res_phi));
  if (iphi >= bins) iphi = 0;  // 2*pi rounding
  key.iphi = iphi;
  key.depth = depth;
  return key;
}

bool GoalRegion::contains(const RobotState& state) const {
  if ((state.pos - center).norm() > radius) return false;
  if (heading_tol)
    return std::abs(wrap_angle(state.heading - *heading)) <= *heading_tol;
  return true;
}

void GoalRegion::validate() const {
  if (!(radius > 0.0)) throw std::invalid_argument("goal radius must be > 0");
  if (heading_tol && !heading)
    throw std::invalid_argument("heading_tol requires a goal heading");
}

void PlannerConfig::validate(const VehicleParams& params) const {
  params.validate();
  if (!(res_xy > 0.0) || !(res_phi > 0.0))
    throw std::invalid_argument("grid resolutions must be > 0");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  const double layers = horizon / tau;
  if (!(horizon > 0.0) || std::abs(layers - std::round(layers)) > 1e-9)
    throw std::invalid_argument("horizon must be a positive multiple of tau");
  if (std::round(layers) > 255)
    throw std::invalid_argument("horizon spans too many layers");
  if (!(alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
  if (!(weights.accel > 1.0) || !(weights.steer > 1.0) || !(weights.base > 0.0))
    throw std::invalid_argument("cost weights: accel, steer > 1 and base > 0");
  if (n_steer < 1 || n_steer % 2 == 0)
    throw std::invalid_argument("n_steer must be odd and >= 1");
  if (max_expansions < 1) throw std::invalid_argument("max_expansions must be >= 1");
  for (double a : accel_levels) {
    if (a < params.a_min || a > params.a_max)
      throw std::invalid_argument("acceleration level outside [a_min, a_max]");
  }
}

std::vector<double> PlannerConfig::accel_set(const VehicleParams& params) const {
  if (!accel_levels.empty()) return accel_levels;
  return {params.a_min, 0.0, params.a_max};
}

double heuristic(const RobotState& state, const GoalRegion& goal,
                 const PlannerConfig& cfg, const VehicleParams& params) {
  if (goal.contains(state)) return 0.0;
  double len;
  if (goal.heading) {
    len = reeds_shepp_length({state.pos, state.heading}, {goal.center, *goal.heading},
                             params.min_turn_radius());
  } else {
    len = (goal.center - state.pos).norm();
  }
  const double remaining = std::max(0.0, len - goal.radius);
  return cfg.alpha * cfg.weights.base * remaining / params.v_max;
}

std::vector<Successor> generate_primitives(const RobotState& state, double parent_g,
                                           const GoalRegion& goal,
                                           const std::vector<Obstacle>& obstacles,
                                           const std::vector<StaticDisc>& statics,
                                           const VehicleParams& params,
                                           const PlannerConfig& cfg,
                                           const SafetyConfig& safety) {
  std::vector<Successor> out;
  const std::vector<ControlInput> controls =
      sample_control_set(params, cfg.n_steer, cfg.accel_set(params), state.speed);
  out.reserve(controls.size());
  for (const ControlInput& u : controls) {
    MotionPrimitive prim = integrate_primitive(state, u, cfg.tau, params);
    if (cfg.bounds && !cfg.bounds->contains(prim.end.pos)) continue;
    if (!primitive_collision_free(prim, obstacles, statics, safety)) continue;
    Successor s;
    s.g = parent_g + primitive_cost(u, cfg.tau, cfg.weights);
    s.h = heuristic(prim.end, goal, cfg, params);
    s.f = s.g + s.h;
    s.primitive = std::move(prim);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<MotionPrimitive> backtrack(const std::vector<SearchNode>& pool,
                                       int32_t leaf) {
  std::vector<MotionPrimitive> chain;
  for (int32_t i = leaf; pool[static_cast<size_t>(i)].parent >= 0;
       i = pool[static_cast<size_t>(i)].parent)
    chain.push_back(pool[static_cast<size_t>(i)].incoming);
  std::reverse(chain.begin(), chain.end());
  return chain;
}

namespace {

struct OpenEntry {
  double f = 0;
  double g = 0;
  uint32_t seq = 0;
  int32_t node = -1;
};

// Pop order: lowest f, then highest g, then first-inserted.
struct OpenWorse {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.seq > b.seq;
  }
};

}  // namespace

Planner::Planner(const VehicleParams& params, const PlannerConfig& cfg,
                 const SafetyConfig& safety)
    : params_(params), cfg_(cfg), safety_(safety) {
  cfg_.validate(params_);
  safety_.validate();
  steer_set_ = steering_angles(params_, cfg_.n_steer);
  accel_set_ = cfg_.accel_set(params_);
}

PlanResult Planner::plan(const RobotState& start, const GoalRegion& goal,
                         const std::vector<Obstacle>& obstacles,
                         const std::vector<StaticDisc>& statics) {
  const auto t_begin = std::chrono::steady_clock::now();
  goal.validate();

  PlanResult result;
  PlannerStats& stats = result.stats;

  const int horizon_depth =
      static_cast<int>(std::llround(cfg_.horizon / cfg_.tau));

  std::vector<SearchNode>& pool = pool_;
  pool.clear();
  std::unordered_map<uint64_t, std::vector<int32_t>> cells;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenWorse> open;
  uint32_t seq = 0;

  const auto push_open = [&](int32_t index) {
    const SearchNode& n = pool[static_cast<size_t>(index)];
    open.push({n.f, n.g, seq++, index});
    stats.open_peak = std::max(stats.open_peak, static_cast<int>(open.size()));
  };

  {
    SearchNode root;
    root.state = start;
    root.key = gen_key(start, cfg_.res_xy, cfg_.res_phi, 0);
    root.g = 0.0;
    root.h = heuristic(start, goal, cfg_, params_);
    root.f = root.h;
    pool.push_back(root);
    cells[root.key.packed()].push_back(0);
    push_open(0);
  }

  const auto finish = [&](Trajectory&& traj) {
    result.trajectory = std::move(traj);
    stats.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  t_begin)
            .count();
    return result;
  };
  const auto fail = [&](PlanFailureKind kind) {
    result.failure = kind;
    stats.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  t_begin)
            .count();
    return result;
  };

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    SearchNode& node = pool[static_cast<size_t>(top.node)];
    if (node.closed || node.replaced) continue;
    node.closed = true;
    ++stats.expansions;
    if (cfg_.record_pop_costs) stats.pop_costs.push_back(node.f);

    if (goal.contains(node.state)) {
      Trajectory traj;
      traj.primitives = backtrack(pool, top.node);
      traj.total_cost = node.g;
      traj.reached_goal = true;
      return finish(std::move(traj));
    }

    if (node.depth >= horizon_depth) {
      // Partial plan: only an ICS-free terminal state may be committed.
      auto maneuver = find_safe_braking(node.state, obstacles, statics, steer_set_,
                                        cfg_.tau, params_, safety_);
      if (maneuver) {
        Trajectory traj;
        traj.primitives = backtrack(pool, top.node);
        traj.total_cost = node.g;
        traj.reached_goal = false;
        traj.braking_certificate = std::move(*maneuver);
        return finish(std::move(traj));
      }
      continue;  // blocked horizon state; never expanded past the horizon
    }

    if (stats.expansions >= cfg_.max_expansions)
      return fail(PlanFailureKind::budget_exceeded);

    // Copy what expansion needs: growing the pool invalidates `node`.
    const RobotState parent_state = node.state;
    const double parent_g = node.g;
    const GridKey parent_key = node.key;
    const int32_t parent_index = top.node;
    const int32_t child_depth = node.depth + 1;

    std::vector<Successor> successors = generate_primitives(
        parent_state, parent_g, goal, obstacles, statics, params_, cfg_, safety_);
    stats.generated += static_cast<int>(successors.size());

    for (Successor& suc : successors) {
      SearchNode child;
      child.key = gen_key(suc.primitive.end, cfg_.res_xy, cfg_.res_phi, child_depth);
      child.state = suc.primitive.end;
      child.g = suc.g;
      child.h = suc.h;
      child.f = suc.f;
      child.parent = parent_index;
      child.depth = child_depth;
      child.incoming = std::move(suc.primitive);

      std::vector<int32_t>& cell = cells[child.key.packed()];
      if (!cfg_.aggregate || cell.empty()) {
        child.idx = static_cast<int32_t>(cell.size());
        const int32_t index = static_cast<int32_t>(pool.size());
        pool.push_back(std::move(child));
        cell.push_back(index);
        push_open(index);
        stats.max_cell_size = std::max(stats.max_cell_size, static_cast<int>(cell.size()));
        continue;
      }

      SearchNode& rep = pool[static_cast<size_t>(cell.back())];
      const bool same_cell_as_parent = rep.key == parent_key;  // never with depth keys
      const bool same_parent = rep.parent == parent_index;
      if (same_cell_as_parent || same_parent) {
        if (child.h < rep.h) {
          child.idx = static_cast<int32_t>(cell.size());
          const int32_t index = static_cast<int32_t>(pool.size());
          pool.push_back(std::move(child));
          cell.push_back(index);
          push_open(index);
          ++stats.admitted_extra;
          stats.max_cell_size =
              std::max(stats.max_cell_size, static_cast<int>(cell.size()));
        } else {
          ++stats.pruned;
        }
      } else if (!rep.closed && child.g < rep.g) {
        child.idx = rep.idx;
        rep.replaced = true;
        const int32_t index = static_cast<int32_t>(pool.size());
        pool.push_back(std::move(child));
        cell.back() = index;
        push_open(index);
        ++stats.replaced;
      } else {
        ++stats.pruned;
      }
    }
  }

  return fail(PlanFailureKind::open_exhausted);
}

}  // namespace stp
