// Command-line front end: single runs, experiment grids, environment
// generation, and SVG rendering of saved outputs.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "urbancover/experiment.hpp"
#include "urbancover/render.hpp"

namespace fs = std::filesystem;
using namespace urbancover;

namespace {

struct CommonFlags {
  std::string env = "empty10";
  std::string alg = "lawnmower";
  std::size_t agents = 1;
  std::int64_t steps = -1;
  double dt = -1.0;
  double umax = -1.0;
  std::int64_t seed = -1;
  std::string out = "out";
  std::string config_file;
  double radius = -1.0;
  double altitude = -1.0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--env", flags.env,
                  "environment: tall-high|tall-low|short-high|short-low|mixed|empty<N>|file.json");
  cmd->add_option("--agents", flags.agents, "team size");
  cmd->add_option("--steps", flags.steps, "simulation steps");
  cmd->add_option("--dt", flags.dt, "time step, seconds");
  cmd->add_option("--umax", flags.umax, "max speed, m/s");
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_option("--config", flags.config_file, "TOML config file");
  cmd->add_option("--radius", flags.radius, "sensor footprint radius, m");
  cmd->add_option("--altitude", flags.altitude, "optimal sensing altitude, m");
}

SimConfig build_config(const CommonFlags& flags) {
  SimConfig config;
  if (!flags.config_file.empty()) {
    const TomlDocument doc = parse_toml_file(flags.config_file);
    if (auto it = doc.find("sim"); it != doc.end()) apply_sim_table(config, it->second);
  }
  // Flags override file values.
  config.algorithm = parse_algorithm(flags.alg);
  config.agents = flags.agents;
  if (flags.steps >= 0) config.steps = static_cast<std::size_t>(flags.steps);
  if (flags.dt > 0.0) config.dt = flags.dt;
  if (flags.umax > 0.0) config.u_max = flags.umax;
  if (flags.radius > 0.0) config.env_spec.sensor_radius = flags.radius;
  if (flags.altitude > 0.0) config.env_spec.optimal_altitude = flags.altitude;
  if (flags.seed >= 0) config.seeds = derive_seeds(static_cast<std::uint64_t>(flags.seed));
  resolve_environment(flags.env, config);
  return config;
}

int cmd_run(const CommonFlags& flags) {
  SimConfig config = build_config(flags);
  SimResult result = run(config);
  write_run_outputs(result, flags.out, true);
  std::cout << "run: " << algorithm_name(config.algorithm) << " n=" << config.agents << " steps="
            << config.steps << " -> " << flags.out << "\n";
  std::cout << "coverage " << result.final_report.percent_coverage << "%  visits "
            << result.final_report.mean_visits << "  revisit " << result.final_report.mean_revisit
            << "s  time-spent " << result.final_report.mean_time_spent << "s  ("
            << result.wall_seconds << "s wall)\n";
  return 0;
}

int cmd_grid(const CommonFlags& flags, const std::string& out_dir_flag) {
  ExperimentGrid grid;
  grid.envs = {"tall-high", "tall-low", "short-high", "short-low"};
  grid.algorithms = {"lawnmower", "ergodic", "biased-ergodic", "avoid-ergodic", "voronoi", "grid"};
  grid.team_sizes = {2, 5, 10, 15, 20, 25};
  if (!flags.config_file.empty()) {
    const TomlDocument doc = parse_toml_file(flags.config_file);
    if (auto it = doc.find("sim"); it != doc.end()) apply_sim_table(grid.base, it->second);
    if (auto it = doc.find("grid"); it != doc.end()) apply_grid_table(grid, it->second);
  }
  if (!out_dir_flag.empty()) grid.out_dir = out_dir_flag;
  if (flags.seed >= 0) grid.seed = static_cast<std::uint64_t>(flags.seed);

  const auto records = run_grid(grid);
  std::cout << "grid: " << records.size() << " runs -> " << grid.out_dir << "\n";
  return 0;
}

int cmd_gen_env(const CommonFlags& flags) {
  SimConfig config = build_config(flags);
  const Environment env = make_environment(config);
  for (const auto& w : env.validate()) std::cerr << "warning: " << w << "\n";
  fs::path out(flags.out);
  if (out.extension() != ".json") {
    fs::create_directories(out);
    out /= "env.json";
  }
  save_environment(env, out.string());
  std::cout << "gen-env: " << env.buildings.size() << " buildings -> " << out.string() << "\n";
  return 0;
}

int cmd_render(const std::string& env_file, const std::vector<std::string>& traj_files,
               const std::string& partition_file, const std::string& out_file) {
  const Environment env = load_environment(env_file);
  if (!partition_file.empty()) {
    // Label grid re-read from CSV; generators are not stored, so render
    // the regions only.
    std::ifstream in(partition_file);
    if (!in) throw std::runtime_error("cannot read " + partition_file);
    std::vector<int> labels;
    std::size_t ny = 0, nx = 0;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      ++ny;
      std::size_t count = 0;
      std::stringstream row(line);
      std::string cell;
      while (std::getline(row, cell, ',')) {
        labels.push_back(std::stoi(cell));
        ++count;
      }
      nx = count;
    }
    GroundGrid grid(env.L1, env.L2, std::max(env.L1 / static_cast<double>(nx),
                                             env.L2 / static_cast<double>(ny)));
    if (grid.nx() != nx || grid.ny() != ny)
      throw std::runtime_error("render: partition grid does not match the environment extent");
    Partition part{{}, grid, std::move(labels)};
    save_svg(render_partition_svg(env, part), out_file);
  } else {
    MultiPath mp;
    for (const auto& f : traj_files) mp.trajectories.push_back(load_trajectory_csv(f));
    save_svg(render_svg(env, mp), out_file);
  }
  std::cout << "render -> " << out_file << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-agent aerial coverage simulator"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string grid_out;
  std::string render_env, render_partition, render_out = "render.svg";
  std::vector<std::string> render_trajs;

  auto* run_cmd = app.add_subcommand("run", "run one simulation and write its outputs");
  add_common(run_cmd, flags);
  run_cmd->add_option("--alg", flags.alg,
                      "lawnmower|ergodic|biased-ergodic|avoid-ergodic|voronoi|grid");
  run_cmd->add_option("--out", flags.out, "output directory");

  auto* grid_cmd = app.add_subcommand("grid", "run an experiment grid from a TOML config");
  grid_cmd->add_option("--config", flags.config_file, "TOML config file");
  grid_cmd->add_option("--out", grid_out, "output directory (overrides config)");
  grid_cmd->add_option("--seed", flags.seed, "master seed (overrides config)");

  auto* gen_cmd = app.add_subcommand("gen-env", "generate an environment JSON");
  add_common(gen_cmd, flags);
  gen_cmd->add_option("--out", flags.out, "output file or directory");

  auto* render_cmd = app.add_subcommand("render", "render saved outputs to SVG");
  render_cmd->add_option("--env", render_env, "environment JSON")->required();
  render_cmd->add_option("--traj", render_trajs, "trajectory CSV files");
  render_cmd->add_option("--partition", render_partition, "partition label CSV");
  render_cmd->add_option("--out", render_out, "output SVG file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(flags);
    if (grid_cmd->parsed()) return cmd_grid(flags, grid_out);
    if (gen_cmd->parsed()) return cmd_gen_env(flags);
    if (render_cmd->parsed()) return cmd_render(render_env, render_trajs, render_partition,
                                                render_out);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
