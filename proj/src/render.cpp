#include "urbancover/render.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace urbancover {

namespace {

const char* kPalette[] = {"#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2",
                          "#7f7f7f", "#bcbd22", "#17becf", "#ff7f0e", "#3366cc"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

// SVG y grows downward; flip into the usual ground-plane orientation.
void open_svg(std::ostringstream& out, double L1, double L2) {
  const double scale = 800.0 / std::max(L1, L2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(L1 * scale) << "\" height=\""
      << fmt(L2 * scale) << "\" viewBox=\"0 0 " << fmt(L1) << " " << fmt(L2) << "\">\n";
  out << "<g transform=\"translate(0," << fmt(L2) << ") scale(1,-1)\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << fmt(L1) << "\" height=\"" << fmt(L2)
      << "\" fill=\"#f5f5f0\" stroke=\"#333\" stroke-width=\"" << fmt(L1 / 400.0) << "\"/>\n";
}

void draw_buildings(std::ostringstream& out, const Environment& env) {
  for (const auto& b : env.buildings) {
    out << "<rect x=\"" << fmt(b.footprint.x_min) << "\" y=\"" << fmt(b.footprint.y_min)
        << "\" width=\"" << fmt(b.footprint.width()) << "\" height=\""
        << fmt(b.footprint.height()) << "\" fill=\"#9a9a9a\" stroke=\"#555\" stroke-width=\""
        << fmt(env.L1 / 800.0) << "\"/>\n";
  }
}

}  // namespace

std::string render_svg(const Environment& env, const MultiPath& paths) {
  std::ostringstream out;
  open_svg(out, env.L1, env.L2);
  draw_buildings(out, env);
  const double width = env.L1 / 600.0;
  for (std::size_t i = 0; i < paths.trajectories.size(); ++i) {
    const auto& traj = paths.trajectories[i];
    const char* color = kPalette[i % kPaletteSize];
    // Split the polyline into runs of constant observing state so that
    // fly-over spans render red.
    std::size_t s = 0;
    while (s + 1 < traj.samples.size()) {
      const bool obs = traj.samples[s].observing && traj.samples[s + 1].observing;
      std::size_t e = s + 1;
      while (e + 1 < traj.samples.size() &&
             (traj.samples[e].observing && traj.samples[e + 1].observing) == obs)
        ++e;
      out << "<polyline fill=\"none\" stroke=\"" << (obs ? color : "#d62728")
          << "\" stroke-width=\"" << fmt(width) << "\" points=\"";
      for (std::size_t k = s; k <= e; ++k)
        out << fmt(traj.samples[k].p.x) << "," << fmt(traj.samples[k].p.y) << " ";
      out << "\"/>\n";
      s = e;
    }
    if (!traj.samples.empty()) {
      out << "<circle cx=\"" << fmt(traj.samples.back().p.x) << "\" cy=\""
          << fmt(traj.samples.back().p.y) << "\" r=\"" << fmt(3.0 * width) << "\" fill=\"" << color
          << "\"/>\n";
    }
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string render_partition_svg(const Environment& env, const Partition& partition) {
  std::ostringstream out;
  open_svg(out, env.L1, env.L2);
  const auto& grid = partition.grid;
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      const int label = partition.labels[grid.index(ix, iy)];
      out << "<rect x=\"" << fmt(ix * grid.dx()) << "\" y=\"" << fmt(iy * grid.dy())
          << "\" width=\"" << fmt(grid.dx()) << "\" height=\"" << fmt(grid.dy()) << "\" fill=\""
          << kPalette[static_cast<std::size_t>(label) % kPaletteSize]
          << "\" fill-opacity=\"0.45\"/>\n";
    }
  }
  draw_buildings(out, env);
  for (std::size_t i = 0; i < partition.generators.size(); ++i) {
    out << "<circle cx=\"" << fmt(partition.generators[i].x) << "\" cy=\""
        << fmt(partition.generators[i].y) << "\" r=\"" << fmt(env.L1 / 150.0) << "\" fill=\""
        << kPalette[i % kPaletteSize] << "\" stroke=\"#000\" stroke-width=\""
        << fmt(env.L1 / 1000.0) << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

void save_svg(const std::string& svg, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << svg;
}

}  // namespace urbancover
