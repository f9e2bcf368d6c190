#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stp/executive.hpp"

namespace stp {

enum class ScenarioType { sim, replay };

/// Where the crowd comes from: a seeded simulation or a recorded dataset.
struct ScenarioSpec {
  ScenarioType type = ScenarioType::sim;
  SimAgentSpec sim;
  std::string tracks;                 ///< Track file path (replay only).
  double replay_agent_radius = 0.25;  ///< Disc radius assigned to replayed agents (m).
};

/// One-variable parameter sweep: a dotted field path into the experiment
/// document (e.g. "scenario.n_agents") and the values to try.
struct SweepSpec {
  std::string field;
  std::vector<double> values;
};

/// A self-contained experiment: scenario, planner selection, full parameter
/// set, trial protocol. Serializes with every field enumerated so stored
/// specs are complete archives.
struct ExperimentSpec {
  ScenarioSpec scenario;
  std::string planner = "search";  ///< "search" or "wait_and_go".
  VehicleParams vehicle;
  PlannerConfig planner_cfg;
  SafetyConfig safety;
  EpisodeConfig episode;
  bool auto_place = true;  ///< Derive start/goal from the scene edges.
  int trials = 30;
  uint64_t base_seed = 1;
  int workers = 1;
  std::optional<SweepSpec> sweep;

  /// Rejects invalid settings before any episode runs. Checks the sweep by
  /// dry-applying every value.
  void validate() const;
};

/// Parses an experiment document (JSON). Missing fields take defaults;
/// scenario type "replay" switches the vehicle/safety defaults to the
/// dataset protocol (v_max 1.5, margin 0.4). Unknown keys are errors.
ExperimentSpec parse_experiment(const std::string& json_text);

/// parse_experiment over a file's contents.
ExperimentSpec load_experiment(const std::string& path);

/// Serializes with every field enumerated; parse_experiment round-trips.
std::string experiment_to_json(const ExperimentSpec& spec);

/// Applies one "dotted.path=value" override onto the spec document. The path
/// must name an existing field and the value must match its type.
void apply_override(ExperimentSpec& spec, const std::string& dotted_path,
                    const std::string& value);

/// One finished episode.
struct EpisodeRecord {
  double sweep_value = 0.0;  ///< Swept value (0 when the spec has no sweep).
  int trial = 0;
  uint64_t seed = 0;
  RunMetrics metrics;
};

/// Aggregates over one sweep point. Latency fields are wall-clock and are
/// reported separately from the deterministic outcome columns.
struct SweepPointSummary {
  double value = 0.0;
  int episodes = 0;
  int successes = 0;
  int collisions = 0;
  int timeouts = 0;
  int plan_failures = 0;
  double success_rate = 0.0;
  double mean_time_to_goal = 0.0;  ///< Over successes; 0 when none.
  double std_time_to_goal = 0.0;
  double mean_path_length = 0.0;   ///< Over successes; 0 when none.
  double mean_latency_ms = 0.0;    ///< Over every plan call at this point.
  double std_latency_ms = 0.0;
  double p99_latency_ms = 0.0;
  double max_latency_ms = 0.0;
};

struct ExperimentResult {
  std::vector<EpisodeRecord> episodes;      ///< Ordered by (sweep point, trial).
  std::vector<SweepPointSummary> summary;   ///< One entry per sweep point.
};

/// Runs trials x sweep-points episodes. Episode e of every sweep point is
/// seeded base_seed + e, so points and planners compare on paired worlds.
/// Worker threads split episodes; records land at fixed indices so the
/// result is identical for any worker count. A thrown episode is recorded
/// as failure{plan_failure} rather than aborting the batch.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Re-runs a single trial of the experiment with the replan callback wired
/// through and the executed trace recorded (the `replay` CLI verb).
RunMetrics run_experiment_episode(const ExperimentSpec& spec, int trial,
                                  const std::function<void(const ReplanEvent&)>& on_replan);

/// Recomputes a summary row from per-episode records (definition of record).
SweepPointSummary summarize_point(double value, const std::vector<const RunMetrics*>& runs);

/// Writes episodes.csv, summary.csv, and latency.csv under out_dir (created
/// if needed), plus resolved_spec.json. summary.csv holds only seed-derived
/// columns and is byte-identical across re-runs of the same spec; wall-clock
/// latency statistics live in latency.csv.
void write_results(const ExperimentResult& result, const ExperimentSpec& spec,
                   const std::string& out_dir);

/// Plot-ready table: one row per sweep point (single row without a sweep),
/// x = swept value, columns = success rate, time, and latency statistics.
/// Byte-identical for identical results.
void emit_plot_data(const ExperimentResult& result, const ExperimentSpec& spec,
                    const std::string& path);

/// Human-readable per-point digest for terminal output.
std::string summary_table(const ExperimentResult& result, const ExperimentSpec& spec);

}  // namespace stp
