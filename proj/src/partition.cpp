#include "urbancover/partition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace urbancover {

Vec2 Partition::centroid(std::size_t i) const {
  double sx = 0.0, sy = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    if (labels[c] == static_cast<int>(i)) {
      const Vec2 p = grid.center(c);
      sx += p.x;
      sy += p.y;
      ++count;
    }
  }
  if (count == 0) return generators.at(i);
  return {sx / static_cast<double>(count), sy / static_cast<double>(count)};
}

std::size_t Partition::cell_count(std::size_t i) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), static_cast<int>(i)));
}

void Partition::save_labels_csv(const std::string& file) const {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      if (ix) out << ",";
      out << labels[grid.index(ix, iy)];
    }
    out << "\n";
  }
}

std::vector<int> voronoi_labels_direct(const std::vector<Vec2>& points, const GroundGrid& grid) {
  if (points.empty()) throw std::invalid_argument("voronoi: need at least one point");
  std::vector<int> labels(grid.cell_count(), 0);
  for (std::size_t c = 0; c < labels.size(); ++c) {
    const Vec2 x = grid.center(c);
    double best = std::numeric_limits<double>::infinity();
    int who = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = (x - points[i]).norm_sq();
      if (d < best) {
        best = d;
        who = static_cast<int>(i);
      }
    }
    labels[c] = who;
  }
  return labels;
}

std::vector<int> voronoi_labels_reflected(const std::vector<Vec2>& points, const GroundGrid& grid) {
  if (points.empty()) throw std::invalid_argument("voronoi: need at least one point");
  const double L1 = grid.L1(), L2 = grid.L2();
  // 5n sites: original first so truncation ties resolve toward it.
  std::vector<Vec2> sites;
  sites.reserve(points.size() * 5);
  std::vector<int> owner;
  owner.reserve(points.size() * 5);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec2& p = points[i];
    const Vec2 mirrors[5] = {p,
                             {-p.x, p.y},
                             {2.0 * L1 - p.x, p.y},
                             {p.x, -p.y},
                             {p.x, 2.0 * L2 - p.y}};
    for (const auto& m : mirrors) {
      sites.push_back(m);
      owner.push_back(static_cast<int>(i));
    }
  }
  std::vector<int> labels(grid.cell_count(), 0);
  for (std::size_t c = 0; c < labels.size(); ++c) {
    const Vec2 x = grid.center(c);
    double best = std::numeric_limits<double>::infinity();
    std::size_t who = 0;
    for (std::size_t s = 0; s < sites.size(); ++s) {
      const double d = (x - sites[s]).norm_sq();
      if (d < best) {
        best = d;
        who = s;
      }
    }
    labels[c] = owner[who];
  }
  return labels;
}

Partition voronoi_partition(const std::vector<Vec2>& points, double L1, double L2,
                            double cell_size) {
  GroundGrid grid(L1, L2, cell_size);
  auto direct = voronoi_labels_direct(points, grid);
  const auto reflected = voronoi_labels_reflected(points, grid);
  if (direct != reflected)
    throw std::logic_error("voronoi_partition: reflected labeling disagrees with direct labeling");
  return {points, grid, std::move(direct)};
}

namespace {

struct Tiling {
  std::size_t rows = 1;
  std::size_t cols = 1;
};

Tiling near_square_tiling(std::size_t n, double L1, double L2) {
  const auto r = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n)))));
  const auto c = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) / static_cast<double>(r) - 1e-12));
  // Put the larger divisor along the longer extent.
  Tiling t;
  if (L1 >= L2) {
    t.cols = std::max(r, c);
    t.rows = std::min(r, c);
  } else {
    t.cols = std::min(r, c);
    t.rows = std::max(r, c);
  }
  return t;
}

}  // namespace

Partition grid_partition(double L1, double L2, std::size_t n, double cell_size) {
  if (n < 1) throw std::invalid_argument("grid_partition: need at least one agent");
  GroundGrid grid(L1, L2, cell_size);
  const Tiling tiling = near_square_tiling(n, L1, L2);
  const double tile_w = L1 / static_cast<double>(tiling.cols);
  const double tile_h = L2 / static_cast<double>(tiling.rows);

  std::vector<int> labels(grid.cell_count(), 0);
  std::vector<Vec2> generators(n);
  for (std::size_t c = 0; c < labels.size(); ++c) {
    const Vec2 x = grid.center(c);
    auto col = std::min(static_cast<std::size_t>(x.x / tile_w), tiling.cols - 1);
    auto row = std::min(static_cast<std::size_t>(x.y / tile_h), tiling.rows - 1);
    std::size_t tile = row * tiling.cols + col;
    // Leftover tiles at the tail of the last row fold into the last agent.
    labels[c] = static_cast<int>(std::min(tile, n - 1));
  }
  Partition part{{}, grid, std::move(labels)};
  part.generators.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t row = i / tiling.cols;
    const std::size_t col = i % tiling.cols;
    Rect tile{col * tile_w, row * tile_h, (col + 1) * tile_w, (row + 1) * tile_h};
    if (i + 1 == n) {
      // Absorbed leftovers widen the final rectangle to the row's end.
      tile.x_max = L1;
      tile.y_max = (row + 1) * tile_h;
    }
    part.generators[i] = tile.center();
  }
  return part;
}

namespace {

Vec2 hold_point(const Environment& env, const GroundGrid& grid, const Vec2& target,
                bool relocate_to_free) {
  if (!relocate_to_free || !point_in_footprint(env, target)) return target;
  const auto obstacles = obstacle_mask(env, grid);
  double best = std::numeric_limits<double>::infinity();
  Vec2 pick = target;
  for (std::size_t c = 0; c < obstacles.size(); ++c) {
    if (obstacles[c]) continue;
    const Vec2 p = grid.center(c);
    const double d = (p - target).norm_sq();
    if (d < best) {
      best = d;
      pick = p;
    }
  }
  return pick;
}

MultiPath repair_routes(const Environment& env, std::vector<std::vector<Vec2>> routes,
                        const CoverParams& params) {
  MultiPath mp;
  mp.trajectories.reserve(routes.size());
  for (std::size_t i = 0; i < routes.size(); ++i) {
    Trajectory traj;
    traj.agent_id = static_cast<int>(i);
    double t = 0.0;
    Vec2 prev = routes[i].front();
    for (const auto& p : routes[i]) {
      const double d = p.dist(prev);
      if (!traj.samples.empty() && d < 1e-12) continue;  // drop pauses; replay holds the end
      t += d / params.u_max;
      traj.samples.push_back({t, {p.x, p.y, env.optimal_altitude}, true});
      prev = p;
    }
    mp.trajectories.push_back(
        fly_over_buildings(traj, env, params.u_max, params.clearance));
  }
  return mp;
}

}  // namespace

MultiPath voronoi_cover(const Environment& env, std::size_t n, std::size_t steps,
                        const CoverParams& params, const std::vector<Vec2>& starts) {
  if (n < 1) throw std::invalid_argument("voronoi_cover: need at least one agent");
  if (starts.size() != n) throw std::invalid_argument("voronoi_cover: one start per agent");
  GroundGrid grid(env.L1, env.L2, params.cell_size);

  std::vector<Vec2> pos = starts;
  std::vector<std::vector<Vec2>> routes(n);
  for (std::size_t i = 0; i < n; ++i) routes[i].push_back(pos[i]);

  std::vector<double> sx(n), sy(n);
  std::vector<std::size_t> cnt(n);
  std::vector<Vec2> two_ago, one_ago;
  for (std::size_t it = 0; it < steps; ++it) {
    const auto labels = voronoi_labels_direct(pos, grid);
    std::fill(sx.begin(), sx.end(), 0.0);
    std::fill(sy.begin(), sy.end(), 0.0);
    std::fill(cnt.begin(), cnt.end(), std::size_t{0});
    for (std::size_t c = 0; c < labels.size(); ++c) {
      const Vec2 p = grid.center(c);
      const auto l = static_cast<std::size_t>(labels[c]);
      sx[l] += p.x;
      sy[l] += p.y;
      ++cnt[l];
    }
    two_ago = std::move(one_ago);
    one_ago = pos;
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 c = cnt[i] ? Vec2{sx[i] / static_cast<double>(cnt[i]),
                                   sy[i] / static_cast<double>(cnt[i])}
                            : pos[i];
      const Vec2 delta = c - pos[i];
      const double dist = delta.norm();
      if (dist > 0.0) {
        const double step = std::fmin(params.step_size, dist);
        pos[i] += delta * (step / dist);
        moved = std::fmax(moved, step);
      }
      routes[i].push_back(pos[i]);
    }
    // A fixed point repeats forever; so does a grid-quantization limit
    // cycle (positions flipping between two labelings). Stop either way.
    if (moved < 1e-9) break;
    if (!two_ago.empty()) {
      bool repeat = true;
      for (std::size_t i = 0; i < n && repeat; ++i)
        repeat = pos[i].dist(two_ago[i]) < 1e-12;
      if (repeat) break;
    }
  }

  if (params.relocate_to_free) {
    for (std::size_t i = 0; i < n; ++i)
      routes[i].push_back(hold_point(env, grid, routes[i].back(), true));
  }
  return repair_routes(env, std::move(routes), params);
}

MultiPath grid_cover(const Environment& env, std::size_t n, const CoverParams& params,
                     const std::vector<Vec2>& starts) {
  if (n < 1) throw std::invalid_argument("grid_cover: need at least one agent");
  if (starts.size() != n) throw std::invalid_argument("grid_cover: one start per agent");
  const Partition part = grid_partition(env.L1, env.L2, n, params.cell_size);
  GroundGrid grid(env.L1, env.L2, params.cell_size);
  std::vector<std::vector<Vec2>> routes(n);
  for (std::size_t i = 0; i < n; ++i) {
    routes[i].push_back(starts[i]);
    routes[i].push_back(hold_point(env, grid, part.centroid(i), params.relocate_to_free));
  }
  return repair_routes(env, std::move(routes), params);
}

}  // namespace urbancover
