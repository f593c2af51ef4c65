#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "urbancover/engine.hpp"

namespace urbancover {

// ---------------------------------------------------------------------------
// Minimal TOML subset: [tables], key = value with strings, numbers, booleans
// and flat arrays. Enough to mirror the config structs; no nested tables.
// ---------------------------------------------------------------------------

struct TomlValue {
  std::variant<std::string, double, std::int64_t, bool, std::vector<TomlValue>> data;

  const std::string& as_string() const;
  double as_double() const;  ///< accepts integers too
  std::int64_t as_int() const;
  bool as_bool() const;
  const std::vector<TomlValue>& as_array() const;
};

using TomlTable = std::map<std::string, TomlValue>;
using TomlDocument = std::map<std::string, TomlTable>;

TomlDocument parse_toml(const std::string& text);
TomlDocument parse_toml_file(const std::string& path);

// ---------------------------------------------------------------------------
// Experiment grid
// ---------------------------------------------------------------------------

struct ExperimentGrid {
  std::vector<std::string> envs;        ///< family names, emptyN, or JSON paths
  std::vector<std::string> algorithms;  ///< names per the CLI flag values
  std::vector<std::size_t> team_sizes;
  std::size_t trials = 3;
  std::uint64_t seed = 1;
  std::string out_dir = "results";
  std::size_t timeseries_team = 10;  ///< team size whose series is aggregated
  std::size_t workers = 0;           ///< 0 = hardware concurrency
  bool save_trajectories = false;    ///< per-run trajectory CSVs (large)
  SimConfig base;                    ///< shared simulation parameters
};

/// Fills a SimConfig from the [sim] table; unknown keys are an error.
void apply_sim_table(SimConfig& config, const TomlTable& table);
/// Fills the grid from the [grid] table.
void apply_grid_table(ExperimentGrid& grid, const TomlTable& table);

/// Resolves an environment name: a Table family, "empty<N>" for an
/// obstacle-free N x N world, or a path to an environment JSON file.
void resolve_environment(const std::string& name, SimConfig& config);

/// Slim per-run record kept for aggregation.
struct RunRecord {
  std::string env;
  std::string algorithm;
  std::size_t agents = 0;
  std::size_t trial = 0;
  MetricsReport final_report;
  std::vector<MetricsReport> series;  ///< only kept for the designated team size
};

/// summary over trials of one (env, algorithm, team size) cell.
struct SummaryRow {
  std::string env;
  std::string algorithm;
  std::size_t agents = 0;
  std::size_t trials = 0;
  MetricsReport mean;
  MetricsReport stddev;
};

/// Final-step view: mean and std over trials per grid cell.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

/// Writes metrics.csv, env.json, summary.json, render.svg, optional
/// traj_<i>.csv, and a manifest.json with content hashes of all of them.
void write_run_outputs(const SimResult& result, const std::string& dir,
                       bool save_trajectories = true);

/// Runs every (env, algorithm, team size, trial) cell on a bounded worker
/// pool and writes per-run outputs plus the two aggregate views.
std::vector<RunRecord> run_grid(const ExperimentGrid& grid);

/// FNV-1a 64-bit of a file's bytes, as 16 hex digits.
std::string file_hash(const std::string& path);

}  // namespace urbancover
