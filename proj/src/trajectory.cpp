#include "urbancover/trajectory.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace urbancover {

namespace {

constexpr double kAltTol = 1e-9;    // "at the optimal altitude" tolerance
constexpr double kJoinTol = 1e-9;   // concat endpoint match
constexpr double kPull = 1e-6;      // climb column offset outside a footprint, meters
constexpr double kMergeGap = 2.5e-6;  // crossing intervals closer than this merge

}  // namespace

double Trajectory::length3d() const {
  double s = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) s += samples[i].p.dist(samples[i - 1].p);
  return s;
}

Vec3 Trajectory::position_at(double t) const {
  if (samples.empty()) throw std::invalid_argument("position_at: empty trajectory");
  const double t0 = samples.front().t;
  const double dur = duration();
  if (cyclic && dur > 0.0) {
    double local = std::fmod(t - t0, dur);
    if (local < 0.0) local += dur;
    t = t0 + local;
  }
  if (t <= t0) return samples.front().p;
  if (t >= samples.back().t) return samples.back().p;
  const auto it = std::upper_bound(samples.begin(), samples.end(), t,
                                   [](double v, const TrajSample& s) { return v < s.t; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double span = b.t - a.t;
  const double u = span > 0.0 ? (t - a.t) / span : 0.0;
  return a.p + (b.p - a.p) * u;
}

Vec3 Trajectory::point_at_arc_length(double s) const {
  if (samples.empty()) throw std::invalid_argument("point_at_arc_length: empty trajectory");
  if (s <= 0.0) return samples.front().p;
  double acc = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double seg = samples[i].p.dist(samples[i - 1].p);
    if (acc + seg >= s && seg > 0.0) {
      const double u = (s - acc) / seg;
      return samples[i - 1].p + (samples[i].p - samples[i - 1].p) * u;
    }
    acc += seg;
  }
  return samples.back().p;
}

std::size_t SweptRegion::marked_count() const {
  return static_cast<std::size_t>(std::count(marked.begin(), marked.end(), std::uint8_t{1}));
}

double SweptRegion::area() const {
  return grid.L1() * grid.L2() * static_cast<double>(marked_count()) /
         static_cast<double>(grid.cell_count());
}

Trajectory observing_subset(const Trajectory& path) {
  Trajectory out;
  out.agent_id = path.agent_id;
  for (const auto& s : path.samples)
    if (s.observing) out.samples.push_back(s);
  return out;
}

SweptRegion swept_area(const MultiPath& mp, const Environment& env, double cell_size) {
  GroundGrid grid(env.L1, env.L2, cell_size);
  const auto obstacles = obstacle_mask(env, grid);
  SweptRegion region{grid, std::vector<std::uint8_t>(grid.cell_count(), 0)};
  const double r = env.sensor_radius;
  const double r_sq = r * r;
  for (const auto& traj : mp.trajectories) {
    for (const auto& s : traj.samples) {
      if (!s.observing) continue;
      const Vec2 c = s.p.ground();
      const auto [ix0, iy0] = grid.cell_of({c.x - r, c.y - r});
      const auto [ix1, iy1] = grid.cell_of({c.x + r, c.y + r});
      for (std::size_t iy = iy0; iy <= iy1; ++iy) {
        for (std::size_t ix = ix0; ix <= ix1; ++ix) {
          const std::size_t flat = grid.index(ix, iy);
          if (region.marked[flat] || obstacles[flat]) continue;
          if ((grid.center(ix, iy) - c).norm_sq() <= r_sq) region.marked[flat] = 1;
        }
      }
    }
  }
  return region;
}

double coverage_fraction(const SweptRegion& region, const Environment& env) {
  const auto obstacles = obstacle_mask(env, region.grid);
  const auto free_cells = static_cast<double>(
      std::count(obstacles.begin(), obstacles.end(), std::uint8_t{0}));
  if (free_cells == 0.0) return 0.0;
  return static_cast<double>(region.marked_count()) / free_cells;
}

namespace {

struct FlySpan {
  double s_in = 0.0;
  double s_out = 0.0;
  double roof = 0.0;
  std::size_t building = 0;  // tallest building in the span
};

}  // namespace

Trajectory fly_over_buildings(const Trajectory& path, const Environment& env, double speed,
                              double clearance) {
  if (path.samples.size() < 1) return path;
  if (speed <= 0.0) throw std::invalid_argument("fly_over_buildings: speed must be positive");
  const double h_opt = env.optimal_altitude;
  for (const auto& s : path.samples)
    if (std::fabs(s.p.z - h_opt) > kAltTol)
      throw std::invalid_argument("fly_over_buildings: input must fly at the optimal altitude");

  const auto& in = path.samples;
  const std::size_t n = in.size();

  // Cumulative 2D arc length per input waypoint.
  std::vector<double> arc(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    arc[i] = arc[i - 1] + in[i].p.ground().dist(in[i - 1].p.ground());
  const double total = arc.back();

  // Crossing intervals in global arc coordinates; only buildings reaching the
  // sweep altitude block the route.
  std::vector<FlySpan> spans;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double seg_len = arc[i + 1] - arc[i];
    if (seg_len <= 0.0) continue;
    for (const auto& c :
         segment_building_crossings(env, in[i].p.ground(), in[i + 1].p.ground())) {
      const auto& b = env.buildings[c.building];
      if (b.height < h_opt) continue;
      spans.push_back({arc[i] + c.t_in * seg_len, arc[i] + c.t_out * seg_len, b.height, c.building});
    }
  }
  std::sort(spans.begin(), spans.end(),
            [](const FlySpan& a, const FlySpan& b) { return a.s_in < b.s_in; });
  std::vector<FlySpan> merged;
  for (const auto& sp : spans) {
    if (!merged.empty() && sp.s_in <= merged.back().s_out + kMergeGap) {
      merged.back().s_out = std::fmax(merged.back().s_out, sp.s_out);
      if (sp.roof > merged.back().roof) {
        merged.back().roof = sp.roof;
        merged.back().building = sp.building;
      }
    } else {
      merged.push_back(sp);
    }
  }
  for (const auto& sp : merged) {
    if (sp.roof + clearance > env.max_altitude + 1e-12)
      throw std::runtime_error("fly_over_buildings: building " + std::to_string(sp.building) +
                               " needs altitude " + std::to_string(sp.roof + clearance) +
                               " above max_altitude");
  }

  Trajectory out;
  out.agent_id = path.agent_id;
  out.cyclic = path.cyclic;
  out.samples.reserve(n + 4 * merged.size());

  double time_shift = 0.0;   // accumulated vertical-transition time
  std::size_t span_idx = 0;  // next span not fully behind us
  double alt = h_opt;        // current flying altitude

  auto emit = [&](const Vec2& g, double h, double t_route) {
    const double t = t_route + time_shift;
    if (!out.samples.empty()) {
      const auto& last = out.samples.back();
      if (t <= last.t + 1e-12 && last.p.ground().dist(g) < 1e-12 &&
          std::fabs(last.p.z - h) < 1e-12)
        return;  // coalesce coincident stations
    }
    out.samples.push_back({t, {g.x, g.y, h}, false});
  };

  auto climb_to = [&](const Vec2& g, double target, double t_route) {
    if (target == alt) return;
    emit(g, alt, t_route);
    time_shift += std::fabs(target - alt) / speed;
    emit(g, target, t_route);
    alt = target;
  };

  emit(in[0].p.ground(), alt, in[0].t);

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double s0 = arc[i];
    const double s1 = arc[i + 1];
    if (s1 > s0) {
      auto ground_at = [&](double s) {
        const double u = clamp((s - s0) / (s1 - s0), 0.0, 1.0);
        return in[i].p.ground() + (in[i + 1].p.ground() - in[i].p.ground()) * u;
      };
      // Route time of arc position s, preserving the leg's own pacing.
      auto leg_time = [&](double s) {
        const double u = clamp((s - s0) / (s1 - s0), 0.0, 1.0);
        return in[i].t + u * (in[i + 1].t - in[i].t);
      };
      while (span_idx < merged.size()) {
        const auto& sp = merged[span_idx];
        const double roof_alt = sp.roof + clearance;
        if (alt == h_opt) {
          const double s_up = std::fmax(sp.s_in - kPull, 0.0);
          if (s_up > s1) break;  // climb belongs to a later leg
          // An s_up behind the leg start means the pull-back landed in a
          // zero-length stretch; climb at the current waypoint instead.
          const double s_climb = std::fmax(s_up, s0);
          climb_to(ground_at(s_climb), roof_alt, leg_time(s_climb));
        }
        if (sp.s_out >= total - kPull) break;  // terminal span: stay up
        const double s_down = sp.s_out + kPull;
        if (s_down > s1) break;  // descends on a later leg
        climb_to(ground_at(s_down), h_opt, leg_time(s_down));
        ++span_idx;
      }
    }
    emit(in[i + 1].p.ground(), alt, in[i + 1].t);
  }

  refresh_observing_flags(out, h_opt);
  return out;
}

Trajectory rotate_cycle(const Trajectory& cycle, double offset) {
  if (cycle.samples.size() < 2) throw std::invalid_argument("rotate_cycle: need a closed cycle");
  if (offset < 0.0) throw std::invalid_argument("rotate_cycle: offset must be non-negative");
  const auto& s = cycle.samples;
  if (s.front().p.dist(s.back().p) > kJoinTol)
    throw std::invalid_argument("rotate_cycle: trajectory is not closed");

  const double len = cycle.length3d();
  const double dur = cycle.duration();
  const double mean_speed = dur > 0.0 ? len / dur : 1.0;

  Trajectory out;
  out.agent_id = cycle.agent_id;
  out.cyclic = true;

  double s_start = len > 0.0 ? std::fmod(offset, len) : 0.0;
  if (len == 0.0 || s_start < 1e-12 || len - s_start < 1e-12) {
    out.samples = s;
    const double t0 = s.front().t;
    for (auto& smp : out.samples) smp.t -= t0;
    return out;
  }

  // Vertex index whose cumulative arc first reaches s_start.
  std::vector<double> arc(s.size(), 0.0);
  for (std::size_t i = 1; i < s.size(); ++i) arc[i] = arc[i - 1] + s[i].p.dist(s[i - 1].p);
  const Vec3 start = cycle.point_at_arc_length(s_start);

  std::vector<Vec3> pts;
  pts.push_back(start);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (arc[i] > s_start) pts.push_back(s[i].p);
  // Wrap: vertices before the cut (the closing vertex duplicates the first).
  for (std::size_t i = 1; i < s.size(); ++i)
    if (arc[i] <= s_start) pts.push_back(s[i].p);
  pts.push_back(start);

  double t = 0.0;
  Vec3 prev = pts.front();
  for (const auto& p : pts) {
    const double d = p.dist(prev);
    if (!out.samples.empty() && d < 1e-12) continue;
    t += d / mean_speed;
    out.samples.push_back({t, p, false});
    prev = p;
  }
  return out;
}

Trajectory concat(const Trajectory& a, const Trajectory& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.samples.back().p.dist(b.samples.front().p) > kJoinTol)
    throw std::invalid_argument("concat: trajectories do not share the junction point");
  Trajectory out = a;
  out.cyclic = false;
  const double shift = a.samples.back().t - b.samples.front().t;
  for (std::size_t i = 1; i < b.samples.size(); ++i) {
    TrajSample s = b.samples[i];
    s.t += shift;
    out.samples.push_back(s);
  }
  return out;
}

void refresh_observing_flags(Trajectory& path, double optimal_altitude) {
  for (auto& s : path.samples) s.observing = std::fabs(s.p.z - optimal_altitude) <= kAltTol;
}

void save_trajectory_csv(const Trajectory& path, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << "t,x,y,h,observing\n";
  char line[160];
  for (const auto& s : path.samples) {
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f,%.6f,%d\n", s.t, s.p.x, s.p.y, s.p.z,
                  s.observing ? 1 : 0);
    out << line;
  }
}

Trajectory load_trajectory_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file);
  Trajectory traj;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TrajSample s;
    int obs = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%d", &s.t, &s.p.x, &s.p.y, &s.p.z, &obs) != 5)
      throw std::runtime_error("bad trajectory row: " + line);
    s.observing = obs != 0;
    traj.samples.push_back(s);
  }
  return traj;
}

}  // namespace urbancover
