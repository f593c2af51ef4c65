#pragma once

#include <string>
#include <vector>

#include "urbancover/environment.hpp"
#include "urbancover/partition.hpp"
#include "urbancover/trajectory.hpp"

namespace urbancover {

/// Ground-plane SVG: gray buildings, one color per agent, fly-over spans red.
std::string render_svg(const Environment& env, const MultiPath& paths);

/// Partition view: cells tinted per label, buildings on top.
std::string render_partition_svg(const Environment& env, const Partition& partition);

void save_svg(const std::string& svg, const std::string& file);

}  // namespace urbancover
