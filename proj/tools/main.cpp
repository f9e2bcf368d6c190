// Command-line front end: batch experiments, single-episode inspection, and
// track-file conversion.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stp/harness.hpp"

namespace {

using json = nlohmann::ordered_json;

struct OverrideList {
  std::vector<std::string> entries;

  void apply(stp::ExperimentSpec& spec) const {
    for (const std::string& entry : entries) {
      size_t eq = entry.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw std::invalid_argument("override must look like field.path=value: " + entry);
      }
      stp::apply_override(spec, entry.substr(0, eq), entry.substr(eq + 1));
    }
  }
};

int cmd_run(const std::string& spec_path, const OverrideList& overrides,
            const std::string& out_dir, const std::string& plot_path) {
  stp::ExperimentSpec spec = stp::load_experiment(spec_path);
  overrides.apply(spec);
  stp::ExperimentResult result = stp::run_experiment(spec);
  stp::write_results(result, spec, out_dir);
  std::string plot = plot_path.empty() ? out_dir + "/plot.tsv" : plot_path;
  stp::emit_plot_data(result, spec, plot);
  std::cout << stp::summary_table(result, spec);
  std::cout << "wrote " << out_dir << "/{episodes,summary,latency}.csv and " << plot << "\n";
  return 0;
}

int cmd_replay(const std::string& spec_path, const OverrideList& overrides, int episode,
               const std::string& out_path) {
  stp::ExperimentSpec spec = stp::load_experiment(spec_path);
  overrides.apply(spec);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write " + out_path);
    out = &file;
  }

  auto on_replan = [&](const stp::ReplanEvent& event) {
    json line;
    line["type"] = "plan";
    line["t"] = event.t;
    line["latency_ms"] = event.latency_ms;
    line["ok"] = event.ok;
    if (event.ok) {
      line["reached_goal"] = event.trajectory->reached_goal;
      line["cost"] = event.trajectory->total_cost;
      line["n_primitives"] = event.trajectory->primitives.size();
      json controls = json::array();
      for (const stp::MotionPrimitive& prim : event.trajectory->primitives) {
        controls.push_back({prim.control.steer, prim.control.accel});
      }
      line["controls"] = std::move(controls);
      line["braking_chunks"] = event.trajectory->braking_certificate.size();
    }
    *out << line.dump() << '\n';
  };

  stp::RunMetrics metrics = stp::run_experiment_episode(spec, episode, on_replan);

  for (const stp::RobotState& s : metrics.trace) {
    json line;
    line["type"] = "state";
    line["t"] = s.t;
    line["x"] = s.pos.x;
    line["y"] = s.pos.y;
    line["heading"] = s.heading;
    line["speed"] = s.speed;
    *out << line.dump() << '\n';
  }

  json line;
  line["type"] = "result";
  line["success"] = metrics.success;
  line["failure_kind"] = stp::failure_name(metrics.failure_kind);
  line["time_to_goal"] = metrics.time_to_goal;
  line["path_length"] = metrics.path_length;
  line["n_plans"] = metrics.n_plans;
  line["n_plan_failures"] = metrics.n_plan_failures;
  *out << line.dump() << '\n';
  return 0;
}

struct RawTrackRow {
  long frame = 0;
  long agent = 0;
  double x = 0.0;
  double y = 0.0;
};

// Reads one whitespace-separated numeric row; returns the column values.
bool split_columns(const std::string& line, std::vector<double>& cols) {
  cols.clear();
  std::istringstream in(line);
  double v;
  while (in >> v) cols.push_back(v);
  return !cols.empty();
}

int cmd_convert(const std::string& in_path, const std::string& out_path, std::string layout,
                double frame_dt) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);

  auto first_data = [&]() -> std::string {
    for (const std::string& l : lines) {
      size_t start = l.find_first_not_of(" \t\r");
      if (start == std::string::npos || l[start] == '#') continue;
      return l.substr(start);
    }
    return "";
  };

  if (layout == "auto") {
    std::string probe = first_data();
    std::vector<double> cols;
    if (probe.rfind("frame_dt", 0) == 0) {
      layout = "canonical";
    } else if (split_columns(probe, cols) && cols.size() >= 8) {
      layout = "obsmat";
    } else {
      layout = "tsv";
    }
  }

  if (layout == "canonical") {
    // Already in the native schema; resample through a load/save round trip.
    stp::TrackDataset dataset = stp::load_tracks(in_path);
    stp::save_tracks(dataset, out_path);
    std::cout << "resampled " << dataset.tracks.size() << " tracks into " << out_path << "\n";
    return 0;
  }

  std::vector<RawTrackRow> rows;
  std::vector<double> cols;
  int line_no = 0;
  for (const std::string& l : lines) {
    ++line_no;
    size_t start = l.find_first_not_of(" \t\r");
    if (start == std::string::npos || l[start] == '#' || l[start] == '%') continue;
    if (!split_columns(l, cols)) continue;
    RawTrackRow row;
    if (layout == "obsmat") {
      // Columns: frame, id, pos_x, pos_z, pos_y, v_x, v_z, v_y.
      if (cols.size() < 5) {
        throw std::runtime_error(in_path + ":" + std::to_string(line_no) +
                                 ": expected at least 5 obsmat columns");
      }
      row.frame = std::lround(cols[0]);
      row.agent = std::lround(cols[1]);
      row.x = cols[2];
      row.y = cols[4];
    } else if (layout == "tsv") {
      if (cols.size() < 4) {
        throw std::runtime_error(in_path + ":" + std::to_string(line_no) +
                                 ": expected 'frame id x y'");
      }
      row.frame = std::lround(cols[0]);
      row.agent = std::lround(cols[1]);
      row.x = cols[2];
      row.y = cols[3];
    } else {
      throw std::invalid_argument("unknown layout: " + layout);
    }
    rows.push_back(row);
  }

  // Group by agent, order by frame, renumber frames from the earliest one.
  std::map<long, std::vector<RawTrackRow>> by_agent;
  long frame0 = rows.empty() ? 0 : rows.front().frame;
  for (const RawTrackRow& r : rows) frame0 = std::min(frame0, r.frame);
  for (const RawTrackRow& r : rows) by_agent[r.agent].push_back(r);

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "frame_dt %.17g\n", frame_dt);
  out << buf;
  size_t n_rows = 0;
  for (auto& [agent, agent_rows] : by_agent) {
    std::stable_sort(agent_rows.begin(), agent_rows.end(),
                     [](const RawTrackRow& a, const RawTrackRow& b) { return a.frame < b.frame; });
    long last_frame = -1;
    for (const RawTrackRow& r : agent_rows) {
      long frame = r.frame - frame0;
      if (frame == last_frame) continue;  // duplicate annotation rows
      last_frame = frame;
      std::snprintf(buf, sizeof(buf), "%ld %ld %.17g %.17g\n", frame, agent, r.x, r.y);
      out << buf;
      ++n_rows;
    }
  }
  out.flush();
  if (!out) throw std::runtime_error("short write on " + out_path);

  // Confirm the output loads.
  stp::TrackDataset check = stp::load_tracks(out_path);
  std::cout << "converted " << n_rows << " rows, " << check.tracks.size()
            << " tracks -> " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search-based partial motion planner benchmark driver"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_dir = "results";
  std::string plot_path;
  OverrideList overrides;

  CLI::App* run = app.add_subcommand("run", "Run a batch experiment from a spec file");
  run->add_option("spec", spec_path, "Experiment spec (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (default: results)");
  run->add_option("--plot", plot_path, "Plot-data file path (default: <out>/plot.tsv)");
  run->add_option("--set", overrides.entries, "Override a spec field: field.path=value");

  std::string replay_out;
  int episode_index = 0;
  CLI::App* replay = app.add_subcommand("replay", "Re-run one episode verbosely (JSONL)");
  replay->add_option("spec", spec_path, "Experiment spec (JSON)")->required();
  replay->add_option("--episode", episode_index, "Trial index to re-run")->required();
  replay->add_option("--out", replay_out, "Write JSONL here instead of stdout");
  replay->add_option("--set", overrides.entries, "Override a spec field: field.path=value");

  std::string conv_in, conv_out, layout = "auto";
  double frame_dt = 0.4;
  CLI::App* convert = app.add_subcommand("convert-tracks", "Convert track data to the native schema");
  convert->add_option("input", conv_in, "Input file")->required();
  convert->add_option("output", conv_out, "Output track file")->required();
  convert->add_option("--layout", layout, "Input layout: auto|canonical|tsv|obsmat");
  convert->add_option("--frame-dt", frame_dt, "Seconds per frame step (tsv/obsmat)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(spec_path, overrides, out_dir, plot_path);
    if (replay->parsed()) return cmd_replay(spec_path, overrides, episode_index, replay_out);
    if (convert->parsed()) return cmd_convert(conv_in, conv_out, layout, frame_dt);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
