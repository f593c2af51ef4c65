#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "urbancover/geometry.hpp"

namespace urbancover {

/// Rectangular building prism standing on the ground plane.
struct Building {
  Rect footprint;
  double height = 0.0;
};

/// 3D urban workspace: ground rectangle [0,L1]x[0,L2], building obstacles,
/// and the downward-sensor model (optimal altitude + footprint disc radius).
struct Environment {
  double L1 = 0.0;
  double L2 = 0.0;
  std::vector<Building> buildings;
  double optimal_altitude = 0.0;  ///< sensing altitude; camera works only here
  double sensor_radius = 0.0;     ///< ground footprint disc radius at optimal altitude
  double max_altitude = 0.0;      ///< flight ceiling, above every rooftop

  double max_building_height() const;

  /// Linear altitude-to-footprint-radius map f(h), calibrated so that
  /// f(optimal_altitude) == sensor_radius. Only the optimal-altitude value
  /// feeds the metrics; the map documents how the radius would scale.
  double footprint_radius(double h) const { return sensor_radius * h / optimal_altitude; }

  /// Throws on hard invariant violations; returns human-readable warnings
  /// for soft ones (e.g. sensing altitude above every rooftop).
  std::vector<std::string> validate() const;
};

enum class EnvFamily : std::uint8_t { TallHigh, TallLow, ShortHigh, ShortLow, Mixed, Custom };

EnvFamily parse_env_family(const std::string& name);
std::string env_family_name(EnvFamily family);

/// Random-environment recipe. Named families preset extent, building count
/// and the height range; everything stays overridable.
struct EnvSpec {
  EnvFamily family = EnvFamily::Custom;
  double L1 = 10.0;
  double L2 = 10.0;
  std::size_t building_count = 0;
  double height_min = 0.0;
  double height_max = 0.0;
  double footprint_min = 2.0;  ///< building side length range, meters
  double footprint_max = 6.0;
  double target_density = 0.0;  ///< if > 0, footprint sides are sized to hit this obstacle fraction
  double optimal_altitude = 5.0;
  double sensor_radius = 2.5;
  double clearance = 1.0;  ///< fly-over margin above rooftops; sets max_altitude
  std::uint64_t seed = 0;

  static EnvSpec named(EnvFamily family, std::uint64_t seed);
};

/// Places `building_count` non-overlapping buildings by rejection sampling.
/// Deterministic for a fixed seed. Throws if the requested density cannot be
/// reached within the attempt budget.
Environment generate_environment(const EnvSpec& spec);

/// Closed-footprint obstacle membership. Throws std::domain_error for points
/// outside the ground rectangle.
bool point_in_obstacle(const Environment& env, const Vec2& p);

/// Like point_in_obstacle but without the domain check (any point allowed).
bool point_in_footprint(const Environment& env, const Vec2& p);

/// Free-space area estimated by counting grid cells with free centers.
double free_area(const Environment& env, double cell_size);

/// Per-cell obstacle mask on the given grid (true = obstacle).
std::vector<std::uint8_t> obstacle_mask(const Environment& env, const GroundGrid& grid);

struct Crossing {
  std::size_t building = 0;  ///< index into env.buildings
  double t_in = 0.0;         ///< entry parameter along pq, in [0,1]
  double t_out = 0.0;        ///< exit parameter, >= t_in
};

/// Maximal sub-intervals of segment pq lying inside closed footprints,
/// sorted by entry parameter. Grazing contacts count (closed rectangles).
std::vector<Crossing> segment_building_crossings(const Environment& env, const Vec2& p,
                                                 const Vec2& q);

struct NearestObstacle {
  double distance = 0.0;  ///< infinity when the world has no buildings
  Vec2 away;              ///< unit vector from the nearest footprint point toward the query
};

/// Distance to the nearest building footprint with the outward unit
/// direction. The domain boundary is not an obstacle (clamping handles it).
/// Ties go to the lowest-index building. Throws if the point is inside.
NearestObstacle nearest_obstacle(const Environment& env, const Vec2& p);

/// JSON (de)serialization with the documented field names.
std::string environment_to_json(const Environment& env);
Environment environment_from_json(const std::string& text);
void save_environment(const Environment& env, const std::string& path);
Environment load_environment(const std::string& path);

}  // namespace urbancover
