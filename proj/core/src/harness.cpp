#include "stp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

namespace stp {

namespace {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// JSON <-> spec

[[noreturn]] void spec_fail(const std::string& what) {
  throw std::invalid_argument("experiment spec: " + what);
}

void expect_keys(const json& obj, const std::vector<std::string>& allowed,
                 const std::string& where) {
  if (obj.is_null()) return;
  if (!obj.is_object()) spec_fail(where + " must be an object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      spec_fail("unknown key '" + item.key() + "' in " + where);
    }
  }
}

bool has(const json& obj, const char* key) {
  return obj.contains(key) && !obj.at(key).is_null();
}

double get_num(const json& obj, const char* key, double fallback) {
  if (!has(obj, key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) spec_fail(std::string(key) + " must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const char* key, int fallback) {
  if (!has(obj, key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) spec_fail(std::string(key) + " must be an integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const char* key, bool fallback) {
  if (!has(obj, key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) spec_fail(std::string(key) + " must be a boolean");
  return v.get<bool>();
}

std::string get_str(const json& obj, const char* key, const std::string& fallback) {
  if (!has(obj, key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) spec_fail(std::string(key) + " must be a string");
  return v.get<std::string>();
}

Vec2 parse_vec2(const json& v, const char* what) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    spec_fail(std::string(what) + " must be [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

ExperimentSpec spec_from_json(const json& doc) {
  if (!doc.is_object()) spec_fail("document must be an object");
  expect_keys(doc,
              {"scenario", "planner", "vehicle", "search", "safety", "episode", "trials",
               "base_seed", "workers", "sweep"},
              "the document root");

  ExperimentSpec spec;

  const json scenario = doc.value("scenario", json::object());
  expect_keys(scenario,
              {"type", "bounds", "n_agents", "speed_min", "speed_max", "speed_noise_sigma",
               "agent_radius", "tracks"},
              "scenario");
  std::string type = get_str(scenario, "type", "sim");
  if (type == "sim") {
    spec.scenario.type = ScenarioType::sim;
  } else if (type == "replay") {
    spec.scenario.type = ScenarioType::replay;
  } else {
    spec_fail("scenario.type must be 'sim' or 'replay'");
  }

  // Dataset protocol defaults differ from the live-sim ones.
  if (spec.scenario.type == ScenarioType::replay) {
    spec.vehicle.v_max = 1.5;
    spec.safety.margin = 0.4;
  }

  if (has(scenario, "bounds")) {
    const json& b = scenario.at("bounds");
    if (!b.is_array() || b.size() != 4) spec_fail("scenario.bounds must be [x0, y0, x1, y1]");
    spec.scenario.sim.bounds = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                                b[3].get<double>()};
  }
  spec.scenario.sim.n_agents = get_int(scenario, "n_agents", spec.scenario.sim.n_agents);
  spec.scenario.sim.speed_min = get_num(scenario, "speed_min", spec.scenario.sim.speed_min);
  spec.scenario.sim.speed_max = get_num(scenario, "speed_max", spec.scenario.sim.speed_max);
  spec.scenario.sim.speed_noise_sigma =
      get_num(scenario, "speed_noise_sigma", spec.scenario.sim.speed_noise_sigma);
  double radius = get_num(scenario, "agent_radius", 0.25);
  spec.scenario.sim.agent_radius = radius;
  spec.scenario.replay_agent_radius = radius;
  spec.scenario.tracks = get_str(scenario, "tracks", "");

  spec.planner = get_str(doc, "planner", "search");

  const json vehicle = doc.value("vehicle", json::object());
  expect_keys(vehicle, {"wheelbase", "max_steer", "v_max", "a_min", "a_max"}, "vehicle");
  spec.vehicle.wheelbase = get_num(vehicle, "wheelbase", spec.vehicle.wheelbase);
  spec.vehicle.max_steer = get_num(vehicle, "max_steer", spec.vehicle.max_steer);
  spec.vehicle.v_max = get_num(vehicle, "v_max", spec.vehicle.v_max);
  spec.vehicle.a_min = get_num(vehicle, "a_min", spec.vehicle.a_min);
  spec.vehicle.a_max = get_num(vehicle, "a_max", spec.vehicle.a_max);

  const json search = doc.value("search", json::object());
  expect_keys(search,
              {"res_xy", "res_phi", "tau", "horizon", "alpha", "weights", "n_steer",
               "accel_levels", "max_expansions", "aggregate", "bounds"},
              "search");
  PlannerConfig& cfg = spec.planner_cfg;
  cfg.res_xy = get_num(search, "res_xy", cfg.res_xy);
  cfg.res_phi = get_num(search, "res_phi", cfg.res_phi);
  cfg.tau = get_num(search, "tau", cfg.tau);
  cfg.horizon = get_num(search, "horizon", cfg.horizon);
  cfg.alpha = get_num(search, "alpha", cfg.alpha);
  if (has(search, "weights")) {
    const json& w = search.at("weights");
    expect_keys(w, {"accel", "steer", "base"}, "search.weights");
    cfg.weights.accel = get_num(w, "accel", cfg.weights.accel);
    cfg.weights.steer = get_num(w, "steer", cfg.weights.steer);
    cfg.weights.base = get_num(w, "base", cfg.weights.base);
  }
  cfg.n_steer = get_int(search, "n_steer", cfg.n_steer);
  if (has(search, "accel_levels")) {
    const json& levels = search.at("accel_levels");
    if (!levels.is_array()) spec_fail("search.accel_levels must be an array");
    cfg.accel_levels.clear();
    for (const json& v : levels) {
      if (!v.is_number()) spec_fail("search.accel_levels entries must be numbers");
      cfg.accel_levels.push_back(v.get<double>());
    }
  }
  cfg.max_expansions = get_int(search, "max_expansions", cfg.max_expansions);
  cfg.aggregate = get_bool(search, "aggregate", cfg.aggregate);
  if (has(search, "bounds")) {
    const json& b = search.at("bounds");
    if (!b.is_array() || b.size() != 4) spec_fail("search.bounds must be [x0, y0, x1, y1]");
    cfg.bounds = Rect{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                      b[3].get<double>()};
  }

  const json safety = doc.value("safety", json::object());
  expect_keys(safety, {"margin", "n_segments", "ics_horizon"}, "safety");
  spec.safety.margin = get_num(safety, "margin", spec.safety.margin);
  spec.safety.n_segments = get_int(safety, "n_segments", spec.safety.n_segments);
  spec.safety.ics_horizon = get_num(safety, "ics_horizon", spec.safety.ics_horizon);

  const json episode = doc.value("episode", json::object());
  expect_keys(episode,
              {"timeout", "replan_period", "sample_dt", "collision_distance", "auto_place",
               "start", "goal"},
              "episode");
  EpisodeConfig& ep = spec.episode;
  ep.timeout = get_num(episode, "timeout", ep.timeout);
  ep.replan_period = get_num(episode, "replan_period", ep.replan_period);
  ep.sample_dt = get_num(episode, "sample_dt", ep.sample_dt);
  ep.collision_distance = get_num(episode, "collision_distance", ep.collision_distance);

  bool start_given = has(episode, "start");
  bool goal_given = has(episode, "goal");
  if (episode.contains("auto_place") && !episode.at("auto_place").is_null()) {
    spec.auto_place = get_bool(episode, "auto_place", true);
  } else {
    spec.auto_place = !(start_given && goal_given);
  }
  if (spec.auto_place) {
    if (start_given || goal_given) {
      spec_fail("episode.start/goal conflict with auto placement; set auto_place false");
    }
  } else {
    if (!start_given || !goal_given) {
      spec_fail("episode needs both start and goal when auto_place is false");
    }
    const json& s = episode.at("start");
    if (!s.is_array() || s.size() != 4) spec_fail("episode.start must be [x, y, heading, speed]");
    ep.start.pos = {s[0].get<double>(), s[1].get<double>()};
    ep.start.heading = s[2].get<double>();
    ep.start.speed = s[3].get<double>();
    const json& g = episode.at("goal");
    expect_keys(g, {"center", "radius", "heading", "heading_tol"}, "episode.goal");
    ep.goal.center = parse_vec2(g.at("center"), "episode.goal.center");
    ep.goal.radius = get_num(g, "radius", ep.goal.radius);
    if (has(g, "heading")) ep.goal.heading = g.at("heading").get<double>();
    if (has(g, "heading_tol")) ep.goal.heading_tol = g.at("heading_tol").get<double>();
  }

  spec.trials = get_int(doc, "trials", spec.trials);
  if (has(doc, "base_seed")) {
    const json& v = doc.at("base_seed");
    if (!v.is_number_integer()) spec_fail("base_seed must be an integer");
    spec.base_seed = v.get<uint64_t>();
  }
  spec.workers = get_int(doc, "workers", spec.workers);

  if (has(doc, "sweep")) {
    const json& sweep = doc.at("sweep");
    expect_keys(sweep, {"field", "values"}, "sweep");
    SweepSpec sw;
    sw.field = get_str(sweep, "field", "");
    if (!has(sweep, "values") || !sweep.at("values").is_array()) {
      spec_fail("sweep.values must be an array of numbers");
    }
    for (const json& v : sweep.at("values")) {
      if (!v.is_number()) spec_fail("sweep.values entries must be numbers");
      sw.values.push_back(v.get<double>());
    }
    spec.sweep = std::move(sw);
  }
  return spec;
}

json spec_to_json(const ExperimentSpec& spec) {
  json doc;
  json scenario;
  scenario["type"] = spec.scenario.type == ScenarioType::sim ? "sim" : "replay";
  const Rect& b = spec.scenario.sim.bounds;
  scenario["bounds"] = {b.x_min, b.y_min, b.x_max, b.y_max};
  scenario["n_agents"] = spec.scenario.sim.n_agents;
  scenario["speed_min"] = spec.scenario.sim.speed_min;
  scenario["speed_max"] = spec.scenario.sim.speed_max;
  scenario["speed_noise_sigma"] = spec.scenario.sim.speed_noise_sigma;
  scenario["agent_radius"] = spec.scenario.type == ScenarioType::sim
                                 ? spec.scenario.sim.agent_radius
                                 : spec.scenario.replay_agent_radius;
  scenario["tracks"] = spec.scenario.tracks;
  doc["scenario"] = std::move(scenario);

  doc["planner"] = spec.planner;

  json vehicle;
  vehicle["wheelbase"] = spec.vehicle.wheelbase;
  vehicle["max_steer"] = spec.vehicle.max_steer;
  vehicle["v_max"] = spec.vehicle.v_max;
  vehicle["a_min"] = spec.vehicle.a_min;
  vehicle["a_max"] = spec.vehicle.a_max;
  doc["vehicle"] = std::move(vehicle);

  json search;
  search["res_xy"] = spec.planner_cfg.res_xy;
  search["res_phi"] = spec.planner_cfg.res_phi;
  search["tau"] = spec.planner_cfg.tau;
  search["horizon"] = spec.planner_cfg.horizon;
  search["alpha"] = spec.planner_cfg.alpha;
  search["weights"] = {{"accel", spec.planner_cfg.weights.accel},
                       {"steer", spec.planner_cfg.weights.steer},
                       {"base", spec.planner_cfg.weights.base}};
  search["n_steer"] = spec.planner_cfg.n_steer;
  search["accel_levels"] = spec.planner_cfg.accel_levels;
  search["max_expansions"] = spec.planner_cfg.max_expansions;
  search["aggregate"] = spec.planner_cfg.aggregate;
  if (spec.planner_cfg.bounds) {
    const Rect& r = *spec.planner_cfg.bounds;
    search["bounds"] = {r.x_min, r.y_min, r.x_max, r.y_max};
  } else {
    search["bounds"] = nullptr;
  }
  doc["search"] = std::move(search);

  json safety;
  safety["margin"] = spec.safety.margin;
  safety["n_segments"] = spec.safety.n_segments;
  safety["ics_horizon"] = spec.safety.ics_horizon;
  doc["safety"] = std::move(safety);

  json episode;
  episode["timeout"] = spec.episode.timeout;
  episode["replan_period"] = spec.episode.replan_period;
  episode["sample_dt"] = spec.episode.sample_dt;
  episode["collision_distance"] = spec.episode.collision_distance;
  episode["auto_place"] = spec.auto_place;
  if (spec.auto_place) {
    episode["start"] = nullptr;
    episode["goal"] = nullptr;
  } else {
    episode["start"] = {spec.episode.start.pos.x, spec.episode.start.pos.y,
                        spec.episode.start.heading, spec.episode.start.speed};
    json goal;
    goal["center"] = {spec.episode.goal.center.x, spec.episode.goal.center.y};
    goal["radius"] = spec.episode.goal.radius;
    goal["heading"] = spec.episode.goal.heading ? json(*spec.episode.goal.heading) : json();
    goal["heading_tol"] =
        spec.episode.goal.heading_tol ? json(*spec.episode.goal.heading_tol) : json();
    episode["goal"] = std::move(goal);
  }
  doc["episode"] = std::move(episode);

  doc["trials"] = spec.trials;
  doc["base_seed"] = spec.base_seed;
  doc["workers"] = spec.workers;
  if (spec.sweep) {
    json sweep;
    sweep["field"] = spec.sweep->field;
    sweep["values"] = spec.sweep->values;
    doc["sweep"] = std::move(sweep);
  } else {
    doc["sweep"] = nullptr;
  }
  return doc;
}

// Patches one dotted-path field on a serialized spec document.
void patch_document(json& doc, const std::string& dotted_path, const json& value) {
  std::string pointer = "/";
  for (char c : dotted_path) pointer += (c == '.') ? '/' : c;
  json::json_pointer ptr(pointer);
  if (!doc.contains(ptr)) spec_fail("no such field: " + dotted_path);
  json& slot = doc.at(ptr);
  if (!slot.is_null()) {
    bool compatible = (slot.is_number() && value.is_number()) ||
                      (slot.is_boolean() && value.is_boolean()) ||
                      (slot.is_string() && value.is_string()) ||
                      (slot.is_array() && value.is_array()) ||
                      (slot.is_object() && value.is_object());
    if (!compatible) {
      spec_fail("value for " + dotted_path + " does not match the field's type");
    }
    if (slot.is_number_integer() && value.is_number_float()) {
      double v = value.get<double>();
      if (std::abs(v - std::round(v)) > 1e-9) {
        spec_fail(dotted_path + " takes an integer");
      }
      slot = static_cast<int64_t>(std::llround(v));
      return;
    }
  }
  slot = value;
}

ExperimentSpec with_sweep_value(const ExperimentSpec& base, const std::string& field,
                                double value) {
  json doc = spec_to_json(base);
  doc["sweep"] = nullptr;  // the per-point spec is concrete
  patch_document(doc, field, json(value));
  return spec_from_json(doc);
}

// ---------------------------------------------------------------------------
// Episode construction

uint64_t mix_seed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Start on the middle of the left side, goal on the middle of the right.
void auto_place_episode(EpisodeConfig& ep, const Rect& bounds) {
  double inset = std::min(0.5, bounds.width() / 4.0);
  double y_mid = 0.5 * (bounds.y_min + bounds.y_max);
  ep.start.pos = {bounds.x_min + inset, y_mid};
  ep.start.speed = 0.0;
  ep.goal.center = {bounds.x_max - inset, y_mid};
  ep.goal.radius = 0.5;
  double bearing = std::atan2(ep.goal.center.y - ep.start.pos.y,
                              ep.goal.center.x - ep.start.pos.x);
  ep.start.heading = bearing;
  // Keep the Reeds-Shepp heuristic informed without constraining the
  // arrival direction in practice.
  ep.goal.heading = bearing;
  ep.goal.heading_tol = M_PI;
}

struct EpisodeBundle {
  EpisodeConfig episode;
  std::unique_ptr<Environment> env;
  std::unique_ptr<Replanner> planner;
};

PlannerConfig effective_planner_cfg(const ExperimentSpec& spec, const Rect& scene_bounds) {
  PlannerConfig cfg = spec.planner_cfg;
  if (!cfg.bounds) {
    Rect r = scene_bounds;
    if (spec.scenario.type == ScenarioType::replay) {
      // Recorded scenes hug the walkway; give the planner room to maneuver.
      r.x_min -= 2.0;
      r.y_min -= 2.0;
      r.x_max += 2.0;
      r.y_max += 2.0;
    }
    cfg.bounds = r;
  }
  return cfg;
}

std::unique_ptr<Replanner> make_replanner(const ExperimentSpec& spec,
                                          const PlannerConfig& cfg) {
  if (spec.planner == "search") {
    return std::make_unique<SearchReplanner>(spec.vehicle, cfg, spec.safety);
  }
  if (spec.planner == "wait_and_go") {
    return std::make_unique<WaitAndGoReplanner>(spec.vehicle, spec.safety, cfg.tau);
  }
  spec_fail("planner must be 'search' or 'wait_and_go'");
}

EpisodeBundle build_sim_episode(const ExperimentSpec& spec, uint64_t seed) {
  EpisodeBundle bundle;
  bundle.episode = spec.episode;
  const Rect& bounds = spec.scenario.sim.bounds;
  if (spec.auto_place) auto_place_episode(bundle.episode, bounds);
  bundle.episode.start.t = 0.0;

  SimAgentSpec sim = spec.scenario.sim;
  sim.rng_seed = seed;
  World world = World::spawn(sim, bundle.episode.start.pos, 1.0);
  bundle.env = std::make_unique<SimEnvironment>(std::move(world), mix_seed(seed), 0.0);
  bundle.planner = make_replanner(spec, effective_planner_cfg(spec, bounds));
  return bundle;
}

EpisodeBundle build_replay_episode(const ExperimentSpec& spec, const TrackDataset& data,
                                   uint64_t seed) {
  EpisodeBundle bundle;
  bundle.episode = spec.episode;
  Rect box = data.bbox();
  if (spec.auto_place) auto_place_episode(bundle.episode, box);

  // Draw the crossing time, snapped to the playback grid, then walk forward
  // until the start pose has clearance (the recording does not react to us).
  double lo = data.t_min();
  double hi = std::max(lo, data.t_max() - bundle.episode.timeout - 1.0);
  std::mt19937_64 rng(mix_seed(seed ^ 0x7261636b73ull));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double t_start = lo + u(rng) * (hi - lo);
  t_start = std::round(t_start / data.dt) * data.dt;
  double clearance = spec.scenario.replay_agent_radius + std::max(0.5, spec.safety.margin);
  double chosen = t_start;
  for (int k = 0; k <= 20; ++k) {
    double cand = std::min(hi, t_start + 0.5 * k);
    cand = std::round(cand / data.dt) * data.dt;
    bool clear = true;
    for (const Obstacle& obs : replay_observe(data, cand, spec.scenario.replay_agent_radius)) {
      if ((obs.pos - bundle.episode.start.pos).norm() < clearance) {
        clear = false;
        break;
      }
    }
    chosen = cand;
    if (clear) break;
  }
  bundle.episode.start.t = chosen;

  bundle.env = std::make_unique<ReplayEnvironment>(data, spec.scenario.replay_agent_radius);
  bundle.planner = make_replanner(spec, effective_planner_cfg(spec, box));
  return bundle;
}

EpisodeBundle build_episode(const ExperimentSpec& spec, const TrackDataset* data,
                            uint64_t seed) {
  if (spec.scenario.type == ScenarioType::sim) return build_sim_episode(spec, seed);
  if (data == nullptr) spec_fail("replay scenario without a loaded dataset");
  return build_replay_episode(spec, *data, seed);
}

// ---------------------------------------------------------------------------
// Aggregation and output

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (planner != "search" && planner != "wait_and_go") {
    spec_fail("planner must be 'search' or 'wait_and_go'");
  }
  vehicle.validate();
  planner_cfg.validate(vehicle);
  safety.validate();
  episode.validate();
  if (episode.replan_period > planner_cfg.tau + 1e-9) {
    spec_fail("replan_period must not exceed the primitive duration");
  }
  if (scenario.type == ScenarioType::sim) {
    scenario.sim.validate();
  } else {
    if (scenario.tracks.empty()) spec_fail("replay scenario needs scenario.tracks");
    if (!(scenario.replay_agent_radius > 0.0)) spec_fail("agent_radius must be > 0");
  }
  if (trials < 1) spec_fail("trials must be >= 1");
  if (workers < 1) spec_fail("workers must be >= 1");
  if (sweep) {
    if (sweep->field.empty()) spec_fail("sweep.field must be set");
    if (sweep->values.empty()) spec_fail("sweep.values must be nonempty");
    for (const char* pinned : {"trials", "base_seed", "workers", "sweep"}) {
      if (sweep->field == pinned || sweep->field.rfind(std::string(pinned) + ".", 0) == 0) {
        spec_fail("the trial protocol cannot be swept");
      }
    }
    for (double v : sweep->values) {
      ExperimentSpec probe = with_sweep_value(*this, sweep->field, v);
      probe.validate();  // sweep cleared on the per-point spec; no recursion
    }
  }
}

ExperimentSpec parse_experiment(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& err) {
    spec_fail(std::string("not valid JSON: ") + err.what());
  }
  return spec_from_json(doc);
}

ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment spec: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment(buffer.str());
}

std::string experiment_to_json(const ExperimentSpec& spec) {
  return spec_to_json(spec).dump(2) + "\n";
}

void apply_override(ExperimentSpec& spec, const std::string& dotted_path,
                    const std::string& value) {
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;  // bare words are string values
  }
  json doc = spec_to_json(spec);
  patch_document(doc, dotted_path, parsed);
  spec = spec_from_json(doc);
}

SweepPointSummary summarize_point(double value, const std::vector<const RunMetrics*>& runs) {
  SweepPointSummary s;
  s.value = value;
  s.episodes = static_cast<int>(runs.size());
  std::vector<double> times;
  std::vector<double> paths;
  std::vector<double> latencies;
  for (const RunMetrics* m : runs) {
    if (m->success) {
      ++s.successes;
      times.push_back(m->time_to_goal);
      paths.push_back(m->path_length);
    } else if (m->failure_kind == FailureKind::collision) {
      ++s.collisions;
    } else if (m->failure_kind == FailureKind::timeout) {
      ++s.timeouts;
    } else {
      ++s.plan_failures;
    }
    latencies.insert(latencies.end(), m->plan_latencies_ms.begin(),
                     m->plan_latencies_ms.end());
  }
  s.success_rate = s.episodes > 0 ? static_cast<double>(s.successes) / s.episodes : 0.0;
  s.mean_time_to_goal = mean_of(times);
  s.std_time_to_goal = std_of(times, s.mean_time_to_goal);
  s.mean_path_length = mean_of(paths);
  s.mean_latency_ms = mean_of(latencies);
  s.std_latency_ms = std_of(latencies, s.mean_latency_ms);
  if (!latencies.empty()) {
    std::sort(latencies.begin(), latencies.end());
    size_t idx = static_cast<size_t>(
        std::ceil(0.99 * static_cast<double>(latencies.size())));
    idx = std::min(std::max<size_t>(idx, 1), latencies.size()) - 1;
    s.p99_latency_ms = latencies[idx];
    s.max_latency_ms = latencies.back();
  }
  return s;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();

  std::vector<double> points{0.0};
  std::vector<ExperimentSpec> point_specs{spec};
  if (spec.sweep) {
    points = spec.sweep->values;
    point_specs.clear();
    for (double v : points) point_specs.push_back(with_sweep_value(spec, spec.sweep->field, v));
  }

  // Load every distinct dataset once.
  std::map<std::string, std::shared_ptr<TrackDataset>> datasets;
  for (const ExperimentSpec& ps : point_specs) {
    if (ps.scenario.type == ScenarioType::replay && !datasets.count(ps.scenario.tracks)) {
      datasets[ps.scenario.tracks] =
          std::make_shared<TrackDataset>(load_tracks(ps.scenario.tracks));
    }
  }

  ExperimentResult result;
  result.episodes.resize(points.size() * static_cast<size_t>(spec.trials));

  for (size_t p = 0; p < points.size(); ++p) {
    const ExperimentSpec& ps = point_specs[p];
    const TrackDataset* data = ps.scenario.type == ScenarioType::replay
                                   ? datasets.at(ps.scenario.tracks).get()
                                   : nullptr;
    std::atomic<int> next{0};
    // Trial protocol fields come from the base spec; the per-point specs only
    // vary the swept parameter.
    auto worker = [&]() {
      for (int trial = next.fetch_add(1); trial < spec.trials; trial = next.fetch_add(1)) {
        uint64_t seed = spec.base_seed + static_cast<uint64_t>(trial);
        EpisodeRecord record;
        record.sweep_value = points[p];
        record.trial = trial;
        record.seed = seed;
        try {
          EpisodeBundle bundle = build_episode(ps, data, seed);
          record.metrics = run_episode(*bundle.planner, *bundle.env, bundle.episode);
        } catch (const std::exception&) {
          record.metrics = RunMetrics{};
          record.metrics.failure_kind = FailureKind::plan_failure;
        }
        result.episodes[p * static_cast<size_t>(spec.trials) +
                        static_cast<size_t>(trial)] = std::move(record);
      }
    };
    int n_workers = std::clamp(spec.workers, 1, spec.trials);
    if (n_workers == 1) {
      worker();
    } else {
      std::vector<std::thread> threads;
      threads.reserve(static_cast<size_t>(n_workers));
      for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
      for (std::thread& th : threads) th.join();
    }
  }

  for (size_t p = 0; p < points.size(); ++p) {
    std::vector<const RunMetrics*> runs;
    runs.reserve(static_cast<size_t>(spec.trials));
    for (int trial = 0; trial < spec.trials; ++trial) {
      runs.push_back(&result.episodes[p * static_cast<size_t>(spec.trials) +
                                      static_cast<size_t>(trial)].metrics);
    }
    result.summary.push_back(summarize_point(points[p], runs));
  }
  return result;
}

RunMetrics run_experiment_episode(const ExperimentSpec& spec, int trial,
                                  const std::function<void(const ReplanEvent&)>& on_replan) {
  spec.validate();
  if (trial < 0 || trial >= spec.trials) {
    throw std::invalid_argument("episode index out of range");
  }
  ExperimentSpec concrete = spec;
  concrete.sweep.reset();  // the base point; sweeps replay their default column
  std::shared_ptr<TrackDataset> data;
  if (concrete.scenario.type == ScenarioType::replay) {
    data = std::make_shared<TrackDataset>(load_tracks(concrete.scenario.tracks));
  }
  uint64_t seed = concrete.base_seed + static_cast<uint64_t>(trial);
  EpisodeBundle bundle = build_episode(concrete, data.get(), seed);
  bundle.episode.record_trace = true;
  return run_episode(*bundle.planner, *bundle.env, bundle.episode, on_replan);
}

void write_results(const ExperimentResult& result, const ExperimentSpec& spec,
                   const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out_dir);

  const std::string sweep_field = spec.sweep ? spec.sweep->field : "";
  {
    std::ofstream out = open_out(dir / "episodes.csv");
    out << "sweep_field,sweep_value,trial,seed,success,failure_kind,time_to_goal,"
           "path_length,n_plans,n_plan_failures,latency_mean_ms,latency_max_ms\n";
    for (const EpisodeRecord& r : result.episodes) {
      const RunMetrics& m = r.metrics;
      double lat_mean = mean_of(m.plan_latencies_ms);
      double lat_max = 0.0;
      for (double v : m.plan_latencies_ms) lat_max = std::max(lat_max, v);
      out << sweep_field << ',' << fmt(r.sweep_value) << ',' << r.trial << ',' << r.seed
          << ',' << (m.success ? 1 : 0) << ','
          << (m.success ? "none" : failure_name(m.failure_kind)) << ','
          << fmt(m.time_to_goal) << ',' << fmt(m.path_length) << ',' << m.n_plans << ','
          << m.n_plan_failures << ',' << fmt(lat_mean) << ',' << fmt(lat_max) << '\n';
    }
  }
  {
    // Deterministic outcome aggregates only: byte-identical across re-runs.
    std::ofstream out = open_out(dir / "summary.csv");
    out << "sweep_field,sweep_value,episodes,successes,collisions,timeouts,plan_failures,"
           "success_rate,mean_time_to_goal,std_time_to_goal,mean_path_length\n";
    for (const SweepPointSummary& s : result.summary) {
      out << sweep_field << ',' << fmt(s.value) << ',' << s.episodes << ',' << s.successes
          << ',' << s.collisions << ',' << s.timeouts << ',' << s.plan_failures << ','
          << fmt(s.success_rate) << ',' << fmt(s.mean_time_to_goal) << ','
          << fmt(s.std_time_to_goal) << ',' << fmt(s.mean_path_length) << '\n';
    }
  }
  {
    std::ofstream out = open_out(dir / "latency.csv");
    out << "sweep_field,sweep_value,mean_ms,std_ms,p99_ms,max_ms\n";
    for (const SweepPointSummary& s : result.summary) {
      out << sweep_field << ',' << fmt(s.value) << ',' << fmt(s.mean_latency_ms) << ','
          << fmt(s.std_latency_ms) << ',' << fmt(s.p99_latency_ms) << ','
          << fmt(s.max_latency_ms) << '\n';
    }
  }
  {
    std::ofstream out = open_out(dir / "resolved_spec.json");
    out << experiment_to_json(spec);
  }
}

void emit_plot_data(const ExperimentResult& result, const ExperimentSpec& spec,
                    const std::string& path) {
  if (result.summary.empty()) throw std::invalid_argument("no results to emit");
  std::filesystem::path file(path);
  if (file.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
  }
  std::ofstream out = open_out(file);
  out << "# x = " << (spec.sweep ? spec.sweep->field : "(defaults)") << '\n';
  out << "value\tsuccess_rate\tmean_time_to_goal\tstd_time_to_goal\tmean_latency_ms\t"
         "std_latency_ms\tp99_latency_ms\n";
  for (const SweepPointSummary& s : result.summary) {
    out << fmt(s.value) << '\t' << fmt(s.success_rate) << '\t' << fmt(s.mean_time_to_goal)
        << '\t' << fmt(s.std_time_to_goal) << '\t' << fmt(s.mean_latency_ms) << '\t'
        << fmt(s.std_latency_ms) << '\t' << fmt(s.p99_latency_ms) << '\n';
  }
}

std::string summary_table(const ExperimentResult& result, const ExperimentSpec& spec) {
  std::ostringstream out;
  char buf[256];
  const char* field = spec.sweep ? spec.sweep->field.c_str() : "point";
  std::snprintf(buf, sizeof(buf), "%-20s %8s %8s %10s %14s %18s\n", field, "episodes",
                "success", "rate", "time mean(s)", "latency mean(ms)");
  out << buf;
  for (const SweepPointSummary& s : result.summary) {
    std::snprintf(buf, sizeof(buf), "%-20.6g %8d %8d %9.1f%% %14.2f %18.3f\n", s.value,
                  s.episodes, s.successes, 100.0 * s.success_rate, s.mean_time_to_goal,
                  s.mean_latency_ms);
    out << buf;
  }
  return out.str();
}

}  // namespace stp
