#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urbancover/environment.hpp"
#include "urbancover/trajectory.hpp"

namespace urbancover {

/// Labeled assignment of ground-grid cells to generator points.
struct Partition {
  std::vector<Vec2> generators;
  GroundGrid grid;
  std::vector<int> labels;  ///< per cell, 0..n-1

  Vec2 centroid(std::size_t i) const;  ///< area centroid; empty cell returns the generator
  std::size_t cell_count(std::size_t i) const;
  void save_labels_csv(const std::string& file) const;
};

/// Nearest-generator label per cell center; ties go to the lowest index.
std::vector<int> voronoi_labels_direct(const std::vector<Vec2>& points, const GroundGrid& grid);

/// The reflected construction: 5n points (originals plus one reflection per
/// boundary edge), nearest-of-all labeling truncated to the originals.
std::vector<int> voronoi_labels_reflected(const std::vector<Vec2>& points, const GroundGrid& grid);

/// Builds the partition both ways and verifies they agree cell by cell.
Partition voronoi_partition(const std::vector<Vec2>& points, double L1, double L2,
                            double cell_size);

/// Near-square r x c tiling with r*c >= n and the leftover tail of the last
/// row merged leftward; first n tiles become the agents' rectangles.
Partition grid_partition(double L1, double L2, std::size_t n, double cell_size);

struct CoverParams {
  double cell_size = 0.5;
  double step_size = 0.1;  ///< per-iteration move toward the centroid
  double u_max = 1.0;      ///< flight speed for the resulting paths
  double clearance = 1.0;
  bool relocate_to_free = false;  ///< move hold points out of footprints
};

/// Lloyd-style coverage: iteratively move each agent toward the centroid of
/// its Voronoi cell, then repair the resulting paths over buildings. Stops
/// early once every agent is stationary.
MultiPath voronoi_cover(const Environment& env, std::size_t n, std::size_t steps,
                        const CoverParams& params, const std::vector<Vec2>& starts);

/// Static grid coverage: one straight flight from the start to the assigned
/// rectangle's centroid, repaired over buildings.
MultiPath grid_cover(const Environment& env, std::size_t n, const CoverParams& params,
                     const std::vector<Vec2>& starts);

}  // namespace urbancover
