// Microbenchmarks for the planning stack: full plans against seeded crowds,
// the collision kernel, and the Reeds-Shepp metric.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "stp/reeds_shepp.hpp"
#include "stp/search.hpp"
#include "stp/world.hpp"

namespace {

using namespace stp;

struct CrowdScene {
  std::vector<std::vector<Obstacle>> snapshots;
  RobotState start;
  GoalRegion goal;
};

// A bank of observation snapshots from a stepped 10x10 crowd so consecutive
// iterations see different obstacle layouts.
CrowdScene make_scene(int n_agents, uint64_t seed) {
  SimAgentSpec spec;
  spec.n_agents = n_agents;
  spec.speed_noise_sigma = 0.0;
  spec.rng_seed = seed;

  CrowdScene scene;
  scene.start = RobotState{{0.5, 5.0}, 0.0, 0.0, 0.0};
  scene.goal.center = {9.5, 5.0};
  scene.goal.radius = 0.5;
  scene.goal.heading = 0.0;
  scene.goal.heading_tol = M_PI;

  World world = World::spawn(spec, scene.start.pos, 1.0);
  std::mt19937_64 rng(seed ^ 0xbadc0ffeull);
  for (int i = 0; i < 64; ++i) {
    scene.snapshots.push_back(world.observe(0.0, rng));
    world.step(0.1);
  }
  return scene;
}

void BM_PlanCrowd(benchmark::State& state) {
  const int n_agents = static_cast<int>(state.range(0));
  CrowdScene scene = make_scene(n_agents, 7);
  VehicleParams params;
  PlannerConfig cfg;
  cfg.bounds = Rect{0.0, 0.0, 10.0, 10.0};
  SafetyConfig safety;
  Planner planner(params, cfg, safety);

  size_t i = 0;
  std::vector<StaticDisc> statics;
  for (auto _ : state) {
    PlanResult result =
        planner.plan(scene.start, scene.goal, scene.snapshots[i % scene.snapshots.size()],
                     statics);
    benchmark::DoNotOptimize(result);
    ++i;
  }
}
BENCHMARK(BM_PlanCrowd)->Arg(20)->Arg(30)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_CollisionPrimitive(benchmark::State& state) {
  CrowdScene scene = make_scene(40, 11);
  VehicleParams params;
  SafetyConfig safety;
  MotionPrimitive prim =
      integrate_primitive(scene.start, {0.3, params.a_max}, 0.5, params);
  std::vector<StaticDisc> statics;

  size_t i = 0;
  for (auto _ : state) {
    bool free = primitive_collision_free(prim, scene.snapshots[i % scene.snapshots.size()],
                                         statics, safety);
    benchmark::DoNotOptimize(free);
    ++i;
  }
}
BENCHMARK(BM_CollisionPrimitive);

void BM_ReedsShepp(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-8.0, 8.0);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::vector<std::pair<Pose2, Pose2>> queries;
  for (int i = 0; i < 256; ++i) {
    Pose2 from{{coord(rng), coord(rng)}, angle(rng)};
    Pose2 to{{coord(rng), coord(rng)}, angle(rng)};
    queries.emplace_back(from, to);
  }

  size_t i = 0;
  for (auto _ : state) {
    const auto& [from, to] = queries[i % queries.size()];
    double len = reeds_shepp_length(from, to, 0.73);
    benchmark::DoNotOptimize(len);
    ++i;
  }
}
BENCHMARK(BM_ReedsShepp);

}  // namespace

BENCHMARK_MAIN();
