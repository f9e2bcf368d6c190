#include "stp/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace stp {

void SimAgentSpec::validate() const {
  if (!(bounds.x_max > bounds.x_min) || !(bounds.y_max > bounds.y_min)) {
    throw std::invalid_argument("sim bounds must have positive extent");
  }
  if (n_agents < 0) throw std::invalid_argument("n_agents must be >= 0");
  if (!(speed_min > 0.0) || !(speed_max >= speed_min)) {
    throw std::invalid_argument("agent speed range must satisfy 0 < min <= max");
  }
  if (speed_noise_sigma < 0.0) throw std::invalid_argument("speed_noise_sigma must be >= 0");
  if (!(agent_radius > 0.0)) throw std::invalid_argument("agent_radius must be > 0");
}

World::World(const SimAgentSpec& spec, std::vector<Agent> agents)
    : spec_(spec), agents_(std::move(agents)), respawn_rng_(spec.rng_seed) {
  spec_.validate();
  for (const Agent& a : agents_) next_id_ = std::max(next_id_, a.id + 1);
}

namespace {

// Fresh agent on the boundary, heading into the interior. The side is picked
// proportionally to its length so entries are uniform along the perimeter.
Agent respawn_on_boundary(const SimAgentSpec& spec, std::mt19937_64& rng, int32_t id) {
  const Rect& b = spec.bounds;
  const double w = b.width();
  const double h = b.height();
  const double perimeter = 2.0 * (w + h);
  std::uniform_real_distribution<double> along(0.0, perimeter);
  std::uniform_real_distribution<double> tilt(-M_PI / 2.0 * 0.98, M_PI / 2.0 * 0.98);
  std::uniform_real_distribution<double> speed(spec.speed_min, spec.speed_max);

  double u = along(rng);
  Agent agent;
  agent.id = id;
  double inward = 0.0;
  if (u < w) {  // bottom edge
    agent.pos = {b.x_min + u, b.y_min};
    inward = M_PI / 2.0;
  } else if (u < w + h) {  // right edge
    agent.pos = {b.x_max, b.y_min + (u - w)};
    inward = M_PI;
  } else if (u < 2.0 * w + h) {  // top edge
    agent.pos = {b.x_min + (u - w - h), b.y_max};
    inward = -M_PI / 2.0;
  } else {  // left edge
    agent.pos = {b.x_min, b.y_min + (u - 2.0 * w - h)};
    inward = 0.0;
  }
  agent.heading = wrap_angle(inward + tilt(rng));
  agent.speed = speed(rng);
  return agent;
}

}  // namespace

World World::spawn(const SimAgentSpec& spec, std::optional<Vec2> keep_clear,
                   double clear_radius) {
  spec.validate();
  std::mt19937_64 rng(spec.rng_seed);
  std::uniform_real_distribution<double> ux(spec.bounds.x_min, spec.bounds.x_max);
  std::uniform_real_distribution<double> uy(spec.bounds.y_min, spec.bounds.y_max);
  std::uniform_real_distribution<double> uh(-M_PI, M_PI);
  std::uniform_real_distribution<double> us(spec.speed_min, spec.speed_max);

  std::vector<Agent> agents;
  agents.reserve(static_cast<size_t>(spec.n_agents));
  for (int i = 0; i < spec.n_agents; ++i) {
    Agent agent;
    agent.id = i;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      agent.pos = {ux(rng), uy(rng)};
      if (!keep_clear || (agent.pos - *keep_clear).norm() >= clear_radius) break;
    }
    agent.heading = uh(rng);
    agent.speed = us(rng);
    agents.push_back(agent);
  }

  World world(spec, std::move(agents));
  // Hand the respawn stream a state decoupled from the spawn draws above.
  world.respawn_rng_.seed(spec.rng_seed ^ 0x9e3779b97f4a7c15ull);
  return world;
}

void World::step(double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("step dt must be >= 0");
  for (Agent& agent : agents_) {
    agent.pos = agent.pos + agent.velocity() * dt;
    if (!spec_.bounds.contains(agent.pos)) {
      agent = respawn_on_boundary(spec_, respawn_rng_, next_id_++);
    }
  }
}

std::vector<Obstacle> World::observe(double t, std::mt19937_64& noise_rng) const {
  std::vector<Obstacle> out;
  out.reserve(agents_.size());
  std::normal_distribution<double> noise(0.0, std::max(spec_.speed_noise_sigma, 1e-30));
  for (const Agent& agent : agents_) {
    double speed = agent.speed;
    if (spec_.speed_noise_sigma > 0.0) {
      speed = std::max(0.0, speed + noise(noise_rng));
    }
    Obstacle obs;
    obs.id = agent.id;
    obs.pos = agent.pos;
    obs.vel = {speed * std::cos(agent.heading), speed * std::sin(agent.heading)};
    obs.radius = spec_.agent_radius;
    obs.t0 = t;
    out.push_back(obs);
  }
  return out;
}

double TrackDataset::t_min() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const TimedTrack& track : tracks) lo = std::min(lo, track.t_first());
  return lo;
}

double TrackDataset::t_max() const {
  double hi = -std::numeric_limits<double>::infinity();
  for (const TimedTrack& track : tracks) hi = std::max(hi, track.t_last());
  return hi;
}

Rect TrackDataset::bbox() const {
  Rect box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const TimedTrack& track : tracks) {
    for (const TrackSample& s : track.samples) {
      box.x_min = std::min(box.x_min, s.pos.x);
      box.y_min = std::min(box.y_min, s.pos.y);
      box.x_max = std::max(box.x_max, s.pos.x);
      box.y_max = std::max(box.y_max, s.pos.y);
    }
  }
  return box;
}

namespace {

struct RawRow {
  long frame = 0;
  Vec2 pos;
};

[[noreturn]] void parse_fail(const std::string& path, int line_no, const std::string& what) {
  std::ostringstream msg;
  msg << path << ":" << line_no << ": " << what;
  throw std::runtime_error(msg.str());
}

// Linear interpolation within one raw track at absolute time t.
Vec2 interpolate(const std::vector<TrackSample>& samples, double t) {
  if (t <= samples.front().t) return samples.front().pos;
  if (t >= samples.back().t) return samples.back().pos;
  // Find the first sample at or beyond t.
  auto hi = std::lower_bound(samples.begin(), samples.end(), t,
                             [](const TrackSample& s, double value) { return s.t < value; });
  if (hi->t == t) return hi->pos;
  auto lo = hi - 1;
  double u = (t - lo->t) / (hi->t - lo->t);
  u = std::clamp(u, 0.0, 1.0);
  return lo->pos + (hi->pos - lo->pos) * u;
}

}  // namespace

TrackDataset load_tracks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open track file: " + path);

  const double out_dt = 0.1;
  double frame_dt = 0.0;
  bool have_header = false;
  std::map<long, std::vector<RawRow>> raw;  // agent id -> rows in file order
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream row(line);
    if (!have_header) {
      std::string tag;
      row >> tag >> frame_dt;
      if (row.fail() || tag != "frame_dt" || !(frame_dt > 0.0)) {
        parse_fail(path, line_no, "expected header 'frame_dt <seconds>'");
      }
      have_header = true;
      continue;
    }
    double frame_value = 0.0;
    long agent_id = 0;
    RawRow entry;
    row >> frame_value >> agent_id >> entry.pos.x >> entry.pos.y;
    if (row.fail()) parse_fail(path, line_no, "expected 'frame agent_id x y'");
    entry.frame = std::lround(frame_value);
    if (std::abs(frame_value - static_cast<double>(entry.frame)) > 1e-9) {
      parse_fail(path, line_no, "frame index must be an integer");
    }
    std::vector<RawRow>& rows = raw[agent_id];
    if (!rows.empty() && entry.frame <= rows.back().frame) {
      parse_fail(path, line_no, "frames must be strictly increasing per agent");
    }
    rows.push_back(entry);
  }
  // A file with no content (or only comments) is an empty recording; any
  // actual data row would have been rejected above while expecting the header.
  TrackDataset dataset;
  dataset.dt = out_dt;
  for (const auto& [agent_id, rows] : raw) {
    std::vector<TrackSample> recorded;
    recorded.reserve(rows.size());
    for (const RawRow& r : rows) {
      recorded.push_back({static_cast<double>(r.frame) * frame_dt, r.pos});
    }
    // Project onto the 10 Hz grid covered by the recording. Tracks shorter
    // than one grid interval may vanish; that is acceptable.
    long k_begin = static_cast<long>(std::ceil(recorded.front().t / out_dt - 1e-9));
    long k_end = static_cast<long>(std::floor(recorded.back().t / out_dt + 1e-9));
    if (k_end < k_begin) continue;
    TimedTrack track;
    track.agent_id = static_cast<int32_t>(agent_id);
    track.samples.reserve(static_cast<size_t>(k_end - k_begin + 1));
    for (long k = k_begin; k <= k_end; ++k) {
      double t = static_cast<double>(k) * out_dt;
      track.samples.push_back({t, interpolate(recorded, t)});
    }
    dataset.tracks.push_back(std::move(track));
  }
  return dataset;
}

void save_tracks(const TrackDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write track file: " + path);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "frame_dt %.17g\n", dataset.dt);
  out << buf;
  for (const TimedTrack& track : dataset.tracks) {
    for (const TrackSample& s : track.samples) {
      long frame = std::lround(s.t / dataset.dt);
      std::snprintf(buf, sizeof(buf), "%ld %d %.17g %.17g\n", frame, track.agent_id,
                    s.pos.x, s.pos.y);
      out << buf;
    }
  }
  if (!out) throw std::runtime_error("short write on track file: " + path);
}

std::vector<Obstacle> replay_observe(const TrackDataset& dataset, double t,
                                     double agent_radius) {
  std::vector<Obstacle> out;
  const double dt = dataset.dt;
  for (const TimedTrack& track : dataset.tracks) {
    if (t < track.t_first() - 1e-9 || t > track.t_last() + 1e-9) continue;
    const std::vector<TrackSample>& s = track.samples;
    // Index of the interval containing t.
    long j = static_cast<long>(std::floor((t - s.front().t) / dt + 1e-9));
    j = std::clamp<long>(j, 0, static_cast<long>(s.size()) - 1);

    Obstacle obs;
    obs.id = track.agent_id;
    obs.t0 = t;
    obs.radius = agent_radius;
    bool at_sample = std::abs(t - s[static_cast<size_t>(j)].t) < 1e-9;
    if (at_sample) {
      obs.pos = s[static_cast<size_t>(j)].pos;
      obs.vel = j > 0 ? (s[static_cast<size_t>(j)].pos - s[static_cast<size_t>(j - 1)].pos) * (1.0 / dt)
                      : Vec2{0.0, 0.0};
    } else {
      size_t a = static_cast<size_t>(j);
      size_t b = std::min(a + 1, s.size() - 1);
      if (a == b) {
        obs.pos = s[a].pos;
        obs.vel = a > 0 ? (s[a].pos - s[a - 1].pos) * (1.0 / dt) : Vec2{0.0, 0.0};
      } else {
        double u = std::clamp((t - s[a].t) / dt, 0.0, 1.0);
        obs.pos = s[a].pos + (s[b].pos - s[a].pos) * u;
        obs.vel = (s[b].pos - s[a].pos) * (1.0 / dt);
      }
    }
    out.push_back(obs);
  }
  return out;
}

}  // namespace stp
