#include "urbancover/environment.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace urbancover {

double Environment::max_building_height() const {
  double h = 0.0;
  for (const auto& b : buildings) h = std::fmax(h, b.height);
  return h;
}

std::vector<std::string> Environment::validate() const {
  if (L1 <= 0.0 || L2 <= 0.0) throw std::invalid_argument("environment: extent must be positive");
  if (sensor_radius <= 0.0)
    throw std::invalid_argument("environment: sensor_radius must be positive");
  if (optimal_altitude <= 0.0 || optimal_altitude > max_altitude)
    throw std::invalid_argument("environment: need 0 < optimal_altitude <= max_altitude");
  for (std::size_t i = 0; i < buildings.size(); ++i) {
    const auto& b = buildings[i];
    if (b.footprint.x_min >= b.footprint.x_max || b.footprint.y_min >= b.footprint.y_max ||
        b.height <= 0.0)
      throw std::invalid_argument("environment: degenerate building " + std::to_string(i));
    if (b.footprint.x_min < 0.0 || b.footprint.y_min < 0.0 || b.footprint.x_max > L1 ||
        b.footprint.y_max > L2)
      throw std::invalid_argument("environment: building " + std::to_string(i) +
                                  " outside the ground rectangle");
  }
  std::vector<std::string> warnings;
  if (!buildings.empty() && optimal_altitude >= max_building_height())
    warnings.push_back("optimal_altitude is not below the tallest building; fly-over never occurs");
  return warnings;
}

EnvFamily parse_env_family(const std::string& name) {
  if (name == "tall-high") return EnvFamily::TallHigh;
  if (name == "tall-low") return EnvFamily::TallLow;
  if (name == "short-high") return EnvFamily::ShortHigh;
  if (name == "short-low") return EnvFamily::ShortLow;
  if (name == "mixed") return EnvFamily::Mixed;
  if (name == "custom") return EnvFamily::Custom;
  throw std::invalid_argument("unknown environment family: " + name);
}

std::string env_family_name(EnvFamily family) {
  switch (family) {
    case EnvFamily::TallHigh: return "tall-high";
    case EnvFamily::TallLow: return "tall-low";
    case EnvFamily::ShortHigh: return "short-high";
    case EnvFamily::ShortLow: return "short-low";
    case EnvFamily::Mixed: return "mixed";
    case EnvFamily::Custom: return "custom";
  }
  return "custom";
}

EnvSpec EnvSpec::named(EnvFamily family, std::uint64_t seed) {
  EnvSpec s;
  s.family = family;
  s.seed = seed;
  switch (family) {
    case EnvFamily::TallHigh:
      s.L1 = 50.96;
      s.L2 = 39.33;
      s.building_count = 27;
      s.height_min = 14.75;
      s.height_max = 29.50;
      s.footprint_min = 3.0;
      s.footprint_max = 7.0;
      break;
    case EnvFamily::TallLow:
      s.L1 = 56.25;
      s.L2 = 53.03;
      s.building_count = 16;
      s.height_min = 7.12;
      s.height_max = 14.25;
      s.footprint_min = 3.0;
      s.footprint_max = 7.0;
      break;
    case EnvFamily::ShortHigh:
      s.L1 = 64.26;
      s.L2 = 53.80;
      s.building_count = 79;
      s.height_min = 6.25;
      s.height_max = 12.50;
      s.footprint_min = 2.0;
      s.footprint_max = 5.0;
      break;
    case EnvFamily::ShortLow:
      s.L1 = 96.67;
      s.L2 = 62.92;
      s.building_count = 23;
      s.height_min = 3.6;
      s.height_max = 7.2;
      s.footprint_min = 3.0;
      s.footprint_max = 7.0;
      break;
    case EnvFamily::Mixed:
      // Height and count are not pinned down anywhere; these defaults mix
      // short and tall stock at moderate density and stay configurable.
      s.L1 = 147.0;
      s.L2 = 59.0;
      s.building_count = 40;
      s.height_min = 3.6;
      s.height_max = 29.5;
      s.footprint_min = 2.0;
      s.footprint_max = 7.0;
      break;
    case EnvFamily::Custom: break;
  }
  return s;
}

Environment generate_environment(const EnvSpec& spec) {
  if (spec.L1 <= 0.0 || spec.L2 <= 0.0)
    throw std::invalid_argument("env spec: extent must be positive");
  if (spec.building_count > 0 && (spec.height_min <= 0.0 || spec.height_max < spec.height_min))
    throw std::invalid_argument("env spec: invalid height range");
  if (spec.footprint_min <= 0.0 || spec.footprint_max < spec.footprint_min)
    throw std::invalid_argument("env spec: invalid footprint range");

  double side_lo = spec.footprint_min;
  double side_hi = spec.footprint_max;
  if (spec.target_density > 0.0) {
    // Size footprints so the expected total area hits the requested fraction.
    const double per = spec.target_density * spec.L1 * spec.L2 /
                       static_cast<double>(std::max<std::size_t>(spec.building_count, 1));
    const double side = std::sqrt(per);
    side_lo = 0.8 * side;
    side_hi = 1.2 * side;
  }
  if (side_hi >= std::fmin(spec.L1, spec.L2))
    throw std::invalid_argument("env spec: footprints do not fit inside the extent");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> side_dist(side_lo, side_hi);
  std::uniform_real_distribution<double> height_dist(spec.height_min, spec.height_max);

  Environment env;
  env.L1 = spec.L1;
  env.L2 = spec.L2;
  env.optimal_altitude = spec.optimal_altitude;
  env.sensor_radius = spec.sensor_radius;
  env.buildings.reserve(spec.building_count);

  constexpr int kMaxAttempts = 20000;
  for (std::size_t i = 0; i < spec.building_count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      const double w = side_dist(rng);
      const double h = side_dist(rng);
      std::uniform_real_distribution<double> x_dist(0.0, spec.L1 - w);
      std::uniform_real_distribution<double> y_dist(0.0, spec.L2 - h);
      Rect r;
      r.x_min = x_dist(rng);
      r.y_min = y_dist(rng);
      r.x_max = r.x_min + w;
      r.y_max = r.y_min + h;
      const bool clash = std::any_of(env.buildings.begin(), env.buildings.end(),
                                     [&](const Building& b) { return b.footprint.overlaps(r); });
      if (!clash) {
        env.buildings.push_back({r, height_dist(rng)});
        placed = true;
      }
    }
    if (!placed) {
      double occupied = 0.0;
      for (const auto& b : env.buildings) occupied += b.footprint.area();
      std::ostringstream msg;
      msg << "environment generation: placed " << env.buildings.size() << " of "
          << spec.building_count << " buildings; reached density "
          << occupied / (spec.L1 * spec.L2) << " and could not go denser";
      throw std::runtime_error(msg.str());
    }
  }

  env.max_altitude = (env.buildings.empty() ? spec.optimal_altitude : env.max_building_height()) +
                     spec.clearance;
  env.validate();
  return env;
}

bool point_in_footprint(const Environment& env, const Vec2& p) {
  for (const auto& b : env.buildings)
    if (b.footprint.contains(p)) return true;
  return false;
}

bool point_in_obstacle(const Environment& env, const Vec2& p) {
  if (p.x < 0.0 || p.x > env.L1 || p.y < 0.0 || p.y > env.L2)
    throw std::domain_error("point_in_obstacle: point outside the ground rectangle");
  return point_in_footprint(env, p);
}

std::vector<std::uint8_t> obstacle_mask(const Environment& env, const GroundGrid& grid) {
  std::vector<std::uint8_t> mask(grid.cell_count(), 0);
  for (const auto& b : env.buildings) {
    // Rasterize only the cells the footprint can reach.
    const auto [ix0, iy0] = grid.cell_of({b.footprint.x_min, b.footprint.y_min});
    const auto [ix1, iy1] = grid.cell_of({b.footprint.x_max, b.footprint.y_max});
    for (std::size_t iy = iy0; iy <= iy1; ++iy)
      for (std::size_t ix = ix0; ix <= ix1; ++ix)
        if (b.footprint.contains(grid.center(ix, iy))) mask[grid.index(ix, iy)] = 1;
  }
  return mask;
}

double free_area(const Environment& env, double cell_size) {
  const GroundGrid grid(env.L1, env.L2, cell_size);
  const auto mask = obstacle_mask(env, grid);
  const auto free_cells =
      static_cast<double>(std::count(mask.begin(), mask.end(), std::uint8_t{0}));
  return env.L1 * env.L2 * free_cells / static_cast<double>(grid.cell_count());
}

namespace {

// Parameter interval of segment p + t*(q-p) inside a closed rectangle,
// clipped to [0,1]. Empty optional when the segment misses the rectangle.
std::optional<std::pair<double, double>> clip_segment(const Rect& r, const Vec2& p, const Vec2& q) {
  double t_lo = 0.0, t_hi = 1.0;
  const double d[2] = {q.x - p.x, q.y - p.y};
  const double o[2] = {p.x, p.y};
  const double lo[2] = {r.x_min, r.y_min};
  const double hi[2] = {r.x_max, r.y_max};
  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] == 0.0) {
      if (o[axis] < lo[axis] || o[axis] > hi[axis]) return std::nullopt;
      continue;
    }
    double t0 = (lo[axis] - o[axis]) / d[axis];
    double t1 = (hi[axis] - o[axis]) / d[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_lo = std::fmax(t_lo, t0);
    t_hi = std::fmin(t_hi, t1);
    if (t_lo > t_hi) return std::nullopt;
  }
  return std::make_pair(t_lo, t_hi);
}

}  // namespace

std::vector<Crossing> segment_building_crossings(const Environment& env, const Vec2& p,
                                                 const Vec2& q) {
  std::vector<Crossing> out;
  for (std::size_t i = 0; i < env.buildings.size(); ++i) {
    if (auto span = clip_segment(env.buildings[i].footprint, p, q))
      out.push_back({i, span->first, span->second});
  }
  std::sort(out.begin(), out.end(),
            [](const Crossing& a, const Crossing& b) { return a.t_in < b.t_in; });
  return out;
}

NearestObstacle nearest_obstacle(const Environment& env, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  Vec2 away{0.0, 0.0};
  for (const auto& b : env.buildings) {
    const Vec2 n = b.footprint.nearest_point(p);
    const double d = n.dist(p);
    if (d == 0.0) throw std::invalid_argument("nearest_obstacle: point inside an obstacle");
    if (d < best) {
      best = d;
      away = (p - n) * (1.0 / d);
    }
  }
  return {best, away};
}

std::string environment_to_json(const Environment& env) {
  nlohmann::json j;
  j["extent"] = {env.L1, env.L2};
  j["optimal_altitude"] = env.optimal_altitude;
  j["sensor_radius"] = env.sensor_radius;
  j["max_altitude"] = env.max_altitude;
  j["buildings"] = nlohmann::json::array();
  for (const auto& b : env.buildings) {
    j["buildings"].push_back({{"x_min", b.footprint.x_min},
                              {"y_min", b.footprint.y_min},
                              {"x_max", b.footprint.x_max},
                              {"y_max", b.footprint.y_max},
                              {"height", b.height}});
  }
  return j.dump(2);
}

Environment environment_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Environment env;
  env.L1 = j.at("extent").at(0).get<double>();
  env.L2 = j.at("extent").at(1).get<double>();
  env.optimal_altitude = j.at("optimal_altitude").get<double>();
  env.sensor_radius = j.at("sensor_radius").get<double>();
  env.max_altitude = j.at("max_altitude").get<double>();
  for (const auto& bj : j.at("buildings")) {
    Building b;
    b.footprint.x_min = bj.at("x_min").get<double>();
    b.footprint.y_min = bj.at("y_min").get<double>();
    b.footprint.x_max = bj.at("x_max").get<double>();
    b.footprint.y_max = bj.at("y_max").get<double>();
    b.height = bj.at("height").get<double>();
    env.buildings.push_back(b);
  }
  env.validate();
  return env;
}

void save_environment(const Environment& env, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << environment_to_json(env) << "\n";
}

Environment load_environment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return environment_from_json(ss.str());
}

}  // namespace urbancover
