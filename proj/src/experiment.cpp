#include "urbancover/experiment.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "urbancover/render.hpp"

namespace fs = std::filesystem;

namespace urbancover {

// ---------------------------------------------------------------------------
// TOML subset
// ---------------------------------------------------------------------------

const std::string& TomlValue::as_string() const {
  if (const auto* s = std::get_if<std::string>(&data)) return *s;
  throw std::runtime_error("toml: expected a string");
}

double TomlValue::as_double() const {
  if (const auto* d = std::get_if<double>(&data)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&data)) return static_cast<double>(*i);
  throw std::runtime_error("toml: expected a number");
}

std::int64_t TomlValue::as_int() const {
  if (const auto* i = std::get_if<std::int64_t>(&data)) return *i;
  throw std::runtime_error("toml: expected an integer");
}

bool TomlValue::as_bool() const {
  if (const auto* b = std::get_if<bool>(&data)) return *b;
  throw std::runtime_error("toml: expected a boolean");
}

const std::vector<TomlValue>& TomlValue::as_array() const {
  if (const auto* a = std::get_if<std::vector<TomlValue>>(&data)) return *a;
  throw std::runtime_error("toml: expected an array");
}

namespace {

std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

TomlValue parse_scalar(const std::string& raw) {
  const std::string text = strip(raw);
  if (text.empty()) throw std::runtime_error("toml: empty value");
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"')
      throw std::runtime_error("toml: unterminated string: " + text);
    return {text.substr(1, text.size() - 2)};
  }
  if (text == "true") return {true};
  if (text == "false") return {false};
  if (text.find_first_of(".eE") != std::string::npos) {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::runtime_error("toml: bad number: " + text);
    return {v};
  }
  std::size_t used = 0;
  const std::int64_t v = std::stoll(text, &used, 10);
  if (used != text.size()) throw std::runtime_error("toml: bad integer: " + text);
  return {v};
}

TomlValue parse_value(const std::string& raw) {
  const std::string text = strip(raw);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw std::runtime_error("toml: unterminated array: " + text);
    std::vector<TomlValue> items;
    std::string body = text.substr(1, text.size() - 2);
    std::string item;
    bool in_string = false;
    for (char c : body) {
      if (c == '"') in_string = !in_string;
      if (c == ',' && !in_string) {
        if (!strip(item).empty()) items.push_back(parse_scalar(item));
        item.clear();
      } else {
        item += c;
      }
    }
    if (!strip(item).empty()) items.push_back(parse_scalar(item));
    return {items};
  }
  return parse_scalar(text);
}

// Drops a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

}  // namespace

TomlDocument parse_toml(const std::string& text) {
  TomlDocument doc;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = strip(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw std::runtime_error("toml line " + std::to_string(line_no) + ": bad table header");
      section = strip(s.substr(1, s.size() - 2));
      doc[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("toml line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = strip(s.substr(0, eq));
    doc[section][key] = parse_value(s.substr(eq + 1));
  }
  return doc;
}

TomlDocument parse_toml_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_toml(ss.str());
}

// ---------------------------------------------------------------------------
// Config mapping
// ---------------------------------------------------------------------------

void apply_sim_table(SimConfig& config, const TomlTable& table) {
  for (const auto& [key, value] : table) {
    if (key == "steps") config.steps = static_cast<std::size_t>(value.as_int());
    else if (key == "dt") config.dt = value.as_double();
    else if (key == "u_max") config.u_max = value.as_double();
    else if (key == "cell_size") config.cell_size = value.as_double();
    else if (key == "probe_count") config.probe_count = static_cast<std::size_t>(value.as_int());
    else if (key == "probe_radius") config.probe_radius = value.as_double();
    else if (key == "record_every") config.record_every = static_cast<std::size_t>(value.as_int());
    else if (key == "clearance") config.clearance = value.as_double();
    else if (key == "modes_K") config.modes_K = static_cast<std::size_t>(value.as_int());
    else if (key == "uniform_weights") config.uniform_weights = value.as_bool();
    else if (key == "shared_coefficients") config.shared_coefficients = value.as_bool();
    else if (key == "d_infl") config.d_infl = value.as_double();
    else if (key == "lane_spacing") config.lane_spacing = value.as_double();
    else if (key == "equal_spacing") config.equal_spacing = value.as_bool();
    else if (key == "lloyd_step") config.lloyd_step = value.as_double();
    else if (key == "relocate_to_free") config.relocate_to_free = value.as_bool();
    else if (key == "optimal_altitude") config.env_spec.optimal_altitude = value.as_double();
    else if (key == "sensor_radius") config.env_spec.sensor_radius = value.as_double();
    else throw std::runtime_error("config: unknown [sim] key: " + key);
  }
}

void apply_grid_table(ExperimentGrid& grid, const TomlTable& table) {
  for (const auto& [key, value] : table) {
    if (key == "envs") {
      grid.envs.clear();
      for (const auto& v : value.as_array()) grid.envs.push_back(v.as_string());
    } else if (key == "algorithms") {
      grid.algorithms.clear();
      for (const auto& v : value.as_array()) grid.algorithms.push_back(v.as_string());
    } else if (key == "team_sizes") {
      grid.team_sizes.clear();
      for (const auto& v : value.as_array())
        grid.team_sizes.push_back(static_cast<std::size_t>(v.as_int()));
    } else if (key == "trials") {
      grid.trials = static_cast<std::size_t>(value.as_int());
    } else if (key == "seed") {
      grid.seed = static_cast<std::uint64_t>(value.as_int());
    } else if (key == "out_dir") {
      grid.out_dir = value.as_string();
    } else if (key == "timeseries_team") {
      grid.timeseries_team = static_cast<std::size_t>(value.as_int());
    } else if (key == "workers") {
      grid.workers = static_cast<std::size_t>(value.as_int());
    } else if (key == "save_trajectories") {
      grid.save_trajectories = value.as_bool();
    } else {
      throw std::runtime_error("config: unknown [grid] key: " + key);
    }
  }
}

void resolve_environment(const std::string& name, SimConfig& config) {
  config.env_file.clear();
  if (name.find('/') != std::string::npos ||
      (name.size() > 5 && name.compare(name.size() - 5, 5, ".json") == 0)) {
    config.env_file = name;
    return;
  }
  if (name.rfind("empty", 0) == 0) {
    const std::string size = name.substr(5);
    const double extent = size.empty() ? 10.0 : std::stod(size);
    EnvSpec spec;
    spec.family = EnvFamily::Custom;
    spec.L1 = spec.L2 = extent;
    spec.building_count = 0;
    spec.optimal_altitude = config.env_spec.optimal_altitude;
    spec.sensor_radius = config.env_spec.sensor_radius;
    config.env_spec = spec;
    return;
  }
  EnvSpec spec = EnvSpec::named(parse_env_family(name), config.seeds.env);
  spec.optimal_altitude = config.env_spec.optimal_altitude;
  spec.sensor_radius = config.env_spec.sensor_radius;
  config.env_spec = spec;
}

// ---------------------------------------------------------------------------
// Outputs
// ---------------------------------------------------------------------------

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof(buf));
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

namespace {

nlohmann::json config_json(const SimConfig& c, const Environment& env) {
  nlohmann::json j;
  j["algorithm"] = algorithm_name(c.algorithm);
  j["agents"] = c.agents;
  j["steps"] = c.steps;
  j["dt"] = c.dt;
  j["u_max"] = c.u_max;
  j["cell_size"] = c.cell_size;
  j["probe_count"] = c.probe_count;
  j["probe_radius"] = c.probe_radius > 0.0 ? c.probe_radius : env.sensor_radius / 2.0;
  j["seeds"] = {{"env", c.seeds.env},
                {"starts", c.seeds.starts},
                {"control", c.seeds.control},
                {"probes", c.seeds.probes}};
  j["env_family"] = env_family_name(c.env_spec.family);
  if (!c.env_file.empty()) j["env_file"] = c.env_file;
  return j;
}

nlohmann::json report_json(const MetricsReport& r) {
  return {{"t", r.t},
          {"percent_coverage", r.percent_coverage},
          {"mean_visits", r.mean_visits},
          {"std_visits", r.std_visits},
          {"mean_revisit", r.mean_revisit},
          {"std_revisit", r.std_revisit},
          {"mean_time_spent", r.mean_time_spent},
          {"std_time_spent", r.std_time_spent}};
}

}  // namespace

void write_run_outputs(const SimResult& result, const std::string& dir, bool save_trajectories) {
  fs::create_directories(dir);
  std::vector<std::string> files;

  save_metrics_csv(result.series, dir + "/metrics.csv");
  files.push_back("metrics.csv");

  save_environment(result.env, dir + "/env.json");
  files.push_back("env.json");

  if (save_trajectories) {
    for (std::size_t i = 0; i < result.recorded.trajectories.size(); ++i) {
      const std::string name = "traj_" + std::to_string(i) + ".csv";
      save_trajectory_csv(result.recorded.trajectories[i], dir + "/" + name);
      files.push_back(name);
    }
    save_svg(render_svg(result.env, result.recorded), dir + "/render.svg");
    files.push_back("render.svg");
  }

  nlohmann::json summary;
  summary["config"] = config_json(result.config, result.env);
  summary["final"] = report_json(result.final_report);
  {
    std::ofstream out(dir + "/summary.json");
    out << summary.dump(2) << "\n";
  }
  files.push_back("summary.json");

  nlohmann::json manifest;
  for (const auto& f : files) manifest[f] = file_hash(dir + "/" + f);
  std::ofstream out(dir + "/manifest.json");
  out << manifest.dump(2) << "\n";
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("summarize: no results");
  std::map<std::tuple<std::string, std::string, std::size_t>, std::vector<const RunRecord*>> cells;
  for (const auto& r : records) cells[{r.env, r.algorithm, r.agents}].push_back(&r);

  std::vector<SummaryRow> rows;
  rows.reserve(cells.size());
  for (const auto& [key, group] : cells) {
    SummaryRow row;
    row.env = std::get<0>(key);
    row.algorithm = std::get<1>(key);
    row.agents = std::get<2>(key);
    row.trials = group.size();

    auto fold = [&](auto pick, double& mean_out, double& std_out) {
      double sum = 0.0, sumsq = 0.0;
      for (const auto* r : group) {
        const double v = pick(r->final_report);
        sum += v;
        sumsq += v * v;
      }
      const auto c = static_cast<double>(group.size());
      mean_out = sum / c;
      std_out = std::sqrt(std::fmax(0.0, sumsq / c - mean_out * mean_out));
    };
    fold([](const MetricsReport& r) { return r.percent_coverage; }, row.mean.percent_coverage,
         row.stddev.percent_coverage);
    fold([](const MetricsReport& r) { return r.mean_visits; }, row.mean.mean_visits,
         row.stddev.mean_visits);
    fold([](const MetricsReport& r) { return r.mean_revisit; }, row.mean.mean_revisit,
         row.stddev.mean_revisit);
    fold([](const MetricsReport& r) { return r.mean_time_spent; }, row.mean.mean_time_spent,
         row.stddev.mean_time_spent);
    row.mean.t = group.front()->final_report.t;
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct GridTask {
  std::size_t env_idx, alg_idx, team_idx, trial;
};

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
  std::ofstream out(path);
  out << "env,algorithm,agents,trials,percent_coverage,percent_coverage_std,mean_visits,"
         "mean_visits_std,mean_revisit,mean_revisit_std,mean_time_spent,mean_time_spent_std\n";
  char line[512];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%s,%s,%zu,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                  r.env.c_str(), r.algorithm.c_str(), r.agents, r.trials,
                  r.mean.percent_coverage, r.stddev.percent_coverage, r.mean.mean_visits,
                  r.stddev.mean_visits, r.mean.mean_revisit, r.stddev.mean_revisit,
                  r.mean.mean_time_spent, r.stddev.mean_time_spent);
    out << line;
  }
}

void write_timeseries_csv(const std::vector<RunRecord>& records, std::size_t team,
                          const std::string& path) {
  // Trial-averaged series per (env, algorithm) for the designated team size.
  std::map<std::pair<std::string, std::string>, std::vector<const RunRecord*>> groups;
  for (const auto& r : records)
    if (r.agents == team && !r.series.empty()) groups[{r.env, r.algorithm}].push_back(&r);

  std::ofstream out(path);
  out << "env,algorithm,agents,t,percent_coverage,mean_visits,mean_revisit,mean_time_spent\n";
  char line[512];
  for (const auto& [key, group] : groups) {
    const std::size_t rows = group.front()->series.size();
    for (std::size_t k = 0; k < rows; ++k) {
      double cov = 0.0, vis = 0.0, rev = 0.0, spent = 0.0;
      for (const auto* r : group) {
        cov += r->series[k].percent_coverage;
        vis += r->series[k].mean_visits;
        rev += r->series[k].mean_revisit;
        spent += r->series[k].mean_time_spent;
      }
      const auto c = static_cast<double>(group.size());
      std::snprintf(line, sizeof(line), "%s,%s,%zu,%.6f,%.6f,%.6f,%.6f,%.6f\n", key.first.c_str(),
                    key.second.c_str(), team, group.front()->series[k].t, cov / c, vis / c,
                    rev / c, spent / c);
      out << line;
    }
  }
}

}  // namespace

std::vector<RunRecord> run_grid(const ExperimentGrid& grid) {
  if (grid.envs.empty() || grid.algorithms.empty() || grid.team_sizes.empty())
    throw std::invalid_argument("grid: envs, algorithms and team_sizes must be non-empty");
  if (grid.trials < 1) throw std::invalid_argument("grid: trials must be >= 1");

  std::vector<GridTask> tasks;
  for (std::size_t e = 0; e < grid.envs.size(); ++e)
    for (std::size_t a = 0; a < grid.algorithms.size(); ++a)
      for (std::size_t t = 0; t < grid.team_sizes.size(); ++t)
        for (std::size_t trial = 0; trial < grid.trials; ++trial) tasks.push_back({e, a, t, trial});

  std::vector<RunRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_text;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (!failed.load()) {
      const std::size_t id = next.fetch_add(1);
      if (id >= tasks.size()) return;
      const GridTask& task = tasks[id];
      const std::string& env_name = grid.envs[task.env_idx];
      const std::string& alg_name = grid.algorithms[task.alg_idx];
      const std::size_t team = grid.team_sizes[task.team_idx];
      try {
        SimConfig config = grid.base;
        config.algorithm = parse_algorithm(alg_name);
        config.agents = team;
        // One environment and probe set per env name; starts and control
        // re-randomize per trial and cell.
        config.seeds.env = mix64(grid.seed ^ mix64(task.env_idx + 1));
        config.seeds.probes = mix64(config.seeds.env + 0x9e37);
        const std::uint64_t cell =
            mix64(grid.seed ^ mix64(1 + task.env_idx) ^ mix64(101 + task.alg_idx) ^
                  mix64(10007 + team) ^ mix64(1000003 + task.trial));
        config.seeds.starts = mix64(cell + 1);
        config.seeds.control = mix64(cell + 2);
        resolve_environment(env_name, config);

        SimResult result = run(config);
        const std::string dir = grid.out_dir + "/" + env_name + "/" + alg_name + "/n" +
                                std::to_string(team) + "/trial" + std::to_string(task.trial);
        write_run_outputs(result, dir, grid.save_trajectories);

        RunRecord rec;
        rec.env = env_name;
        rec.algorithm = alg_name;
        rec.agents = team;
        rec.trial = task.trial;
        rec.final_report = result.final_report;
        if (team == grid.timeseries_team) rec.series = std::move(result.series);
        records[id] = std::move(rec);
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lock(error_mutex);
        error_text = std::string("grid cell ") + env_name + "/" + alg_name + "/n" +
                     std::to_string(team) + "/trial" + std::to_string(task.trial) + ": " +
                     ex.what();
        failed.store(true);
      }
    }
  };

  std::size_t pool = grid.workers > 0 ? grid.workers
                                      : std::max(1u, std::thread::hardware_concurrency());
  pool = std::min(pool, tasks.size());
  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (std::size_t i = 0; i < pool; ++i) threads.emplace_back(worker);
  for (auto& th : threads) th.join();
  if (failed.load()) throw std::runtime_error(error_text);

  fs::create_directories(grid.out_dir);
  write_summary_csv(summarize(records), grid.out_dir + "/summary_by_team.csv");
  write_timeseries_csv(records, grid.timeseries_team,
                       grid.out_dir + "/timeseries_n" + std::to_string(grid.timeseries_team) +
                           ".csv");
  return records;
}

}  // namespace urbancover
