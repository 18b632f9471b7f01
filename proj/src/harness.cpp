#include "parsley/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "parsley/rng.hpp"

namespace parsley {

const std::vector<std::uint32_t>& valid_deltas(SizeClass size_class) {
  static const std::vector<std::uint32_t> xs = {0, 1, 2};
  static const std::vector<std::uint32_t> s = {0, 1, 2, 3};
  static const std::vector<std::uint32_t> m = {0, 1, 2, 4, 6};
  static const std::vector<std::uint32_t> l = {0, 1, 2, 4, 6, 8, 10, 12, 14};
  static const std::vector<std::uint32_t> xl = {0,  1,  2,  4,  6,  8,  10, 12, 14,
                                                16, 18, 20, 22, 24, 26, 28, 30};
  switch (size_class) {
    case SizeClass::XS: return xs;
    case SizeClass::S: return s;
    case SizeClass::M: return m;
    case SizeClass::L: return l;
    case SizeClass::XL: return xl;
  }
  return xs;
}

bool is_valid_cell(SizeClass size_class, std::uint32_t delta) {
  const auto& deltas = valid_deltas(size_class);
  return std::find(deltas.begin(), deltas.end(), delta) != deltas.end();
}

SizeConfig size_config_for(SizeClass size_class, std::uint32_t delta) {
  if (!is_valid_cell(size_class, delta)) {
    throw ConfigError("delta " + std::to_string(delta) +
                      " is not a valid column for size class " +
                      to_string(size_class));
  }
  const std::uint32_t h = max_size_of(size_class);
  return validate_size_config(4, 4 + delta, h - delta, h);
}

std::uint64_t run_seed(std::uint64_t seed_base, const CellKey& key,
                       std::uint32_t run_index) {
  std::uint64_t h = splitmix64(seed_base);
  h = mix_seed(h, fnv1a64(to_string(key)));
  h = mix_seed(h, run_index);
  return h;
}

namespace {

std::uint64_t scaled_count(std::uint64_t value, double scale) {
  return std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(std::llround(value * scale)));
}

}  // namespace

SimulationConfig make_run_config(const HarnessConfig& base, const CellKey& key,
                                 std::uint32_t run_index,
                                 std::uint64_t seed_base) {
  SimulationConfig cfg;
  cfg.sizes = size_config_for(key.size_class, key.delta);
  cfg.mode = key.mode;
  cfg.timers = base.timers;
  cfg.maintenance = base.maintenance;

  const double scale = base.scale;
  cfg.data = base.data;
  cfg.data.n_values = scaled_count(base.data.n_values, scale);
  // Keys only shrink as far as the value count requires; more keys per
  // group keeps the per-group load estimates smooth at desk scale.
  cfg.data.n_keys = std::min<std::uint64_t>(base.data.n_keys, cfg.data.n_values);
  cfg.data.value_mean_bytes = base.data.value_mean_bytes * scale;
  cfg.data.value_std_bytes = base.data.value_std_bytes * scale;

  cfg.churn.scenario = key.scenario;
  cfg.churn.c = static_cast<std::uint32_t>(scaled_count(key.churn_c, scale));
  cfg.churn.churn_cycles = base.churn_cycles;
  cfg.churn.hot_ratio = base.hot_ratio;
  cfg.churn.epsilon = base.epsilon;

  cfg.n_peers = static_cast<std::uint32_t>(scaled_count(base.n_peers, scale));
  cfg.bootstrap_joins_per_s = base.bootstrap_joins_per_s * scale;
  cfg.warmup_s = base.warmup_s;
  cfg.quiescence_window_s = base.quiescence_window_s;
  cfg.quiescence_cap_s = base.quiescence_cap_s;
  cfg.seed = run_seed(seed_base, key, run_index);
  return cfg;
}

RunResult run_single(const HarnessConfig& base, const ExperimentCell& cell,
                     std::uint32_t run_index) {
  Simulation sim(make_run_config(base, cell.key, run_index, cell.seed_base));
  return sim.run();
}

std::vector<ExperimentCell> enumerate_cells(const SweepSpec& spec,
                                            const HarnessConfig& base) {
  std::vector<ExperimentCell> cells;
  for (Scenario scenario : spec.scenarios) {
    for (std::uint32_t c : spec.churn_values) {
      for (Mode mode : spec.modes) {
        for (SizeClass size_class : spec.size_classes) {
          const auto& all = valid_deltas(size_class);
          for (std::uint32_t delta : spec.deltas.empty() ? all : spec.deltas) {
            if (!is_valid_cell(size_class, delta)) {
              if (spec.deltas.empty()) continue;
              // An explicit delta list may span size classes; skip the
              // combinations that are not grid columns.
              continue;
            }
            ExperimentCell cell;
            cell.key = CellKey{scenario, c, mode, size_class, delta};
            cell.seed_base = base.seed_base;
            cell.n_runs = base.n_runs;
            cells.push_back(cell);
          }
        }
      }
    }
  }
  std::sort(cells.begin(), cells.end(),
            [](const ExperimentCell& a, const ExperimentCell& b) {
              return a.key < b.key;
            });
  return cells;
}

SweepSpec paper_grid_spec() {
  SweepSpec spec;
  spec.scenarios = {Scenario::ExitOnly, Scenario::EnterExit};
  spec.churn_values = {100, 200, 300};
  spec.modes = {Mode::NPPR, Mode::Push, Mode::Pull, Mode::FPPR};
  spec.size_classes = {SizeClass::XS, SizeClass::S, SizeClass::M, SizeClass::L,
                       SizeClass::XL};
  spec.deltas = {};  // all valid columns per class
  return spec;
}

SweepResult run_sweep(const HarnessConfig& base,
                      const std::vector<ExperimentCell>& cells,
                      std::uint32_t parallelism) {
  struct Job {
    std::size_t cell_idx;
    std::uint32_t run_index;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::uint32_t r = 0; r < cells[i].n_runs; ++r) jobs.push_back({i, r});
  }

  std::vector<std::vector<TaggedRun>> per_cell(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    per_cell[i].resize(cells[i].n_runs);
  }

  std::atomic<std::size_t> next_job{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t j = next_job.fetch_add(1);
      if (j >= jobs.size() || failed.load()) return;
      const Job job = jobs[j];
      try {
        RunResult res = run_single(base, cells[job.cell_idx], job.run_index);
        per_cell[job.cell_idx][job.run_index] =
            TaggedRun{cells[job.cell_idx].key, res.metrics};
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        if (failure.empty()) failure = e.what();
        return;
      }
    }
  };

  const std::uint32_t n_threads = std::max<std::uint32_t>(1, parallelism);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::uint32_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw ConfigError("sweep run failed: " + failure);

  SweepResult result;
  result.cells.reserve(cells.size());
  for (const auto& runs : per_cell) {
    result.cells.push_back(aggregate(runs));
  }
  std::ostringstream cfg;
  cfg << base.data.n_keys << '|' << base.data.n_values << '|'
      << base.data.value_mean_bytes << '|' << base.data.value_std_bytes << '|'
      << base.data.min_value_bytes << '|' << base.timers.maintenance_period_s
      << '|' << base.timers.maintenance_probability << '|'
      << base.timers.size_check_min_s << '|' << base.timers.size_check_max_s
      << '|' << base.timers.relocation_check_period_s << '|'
      << base.timers.relocation_cooldown_s << '|' << base.timers.load_threshold
      << '|' << base.maintenance.control_msg_bytes << '|'
      << base.maintenance.stabilization_period_s << '|'
      << base.maintenance.fingers_per_group << '|'
      << base.maintenance.passive_view_size << '|'
      << base.maintenance.antientropy_fraction << '|' << base.n_peers << '|'
      << base.bootstrap_joins_per_s << '|' << base.warmup_s << '|'
      << base.quiescence_window_s << '|' << base.quiescence_cap_s << '|'
      << base.churn_cycles << '|' << base.hot_ratio << '|' << base.epsilon
      << '|' << base.scale;
  std::ostringstream prov;
  prov << "config_digest=" << std::hex << fnv1a64(cfg.str()) << std::dec
       << " seed_base=" << base.seed_base << " n_runs=" << base.n_runs
       << " scale=" << base.scale << " cells=" << cells.size()
       << " version=parsley-sim-0.1.0";
  result.provenance = prov.str();
  return result;
}

namespace {

// Shortest representation that parses back to the same double.
std::string format_double(double v) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace

std::string csv_header(TotalsMode totals) {
  std::string header = "scenario,c,mode,size_class,delta,n_runs";
  for (const auto& field : metric_fields()) {
    header += ",";
    header += field.name;
    header += "_mean,";
    header += field.name;
    header += "_std";
  }
  if (totals != TotalsMode::None) header += ",bytes_total_mean";
  return header;
}

namespace {

double total_bytes_mean(const CellAggregate& cell, TotalsMode totals) {
  const auto& fields = metric_fields();
  double sum = 0;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const std::string name = fields[f].name;
    const bool paper_category = name == "bytes_merge" ||
                                name == "bytes_relocation" ||
                                name == "bytes_maintenance";
    const bool extra_category = name == "bytes_split" || name == "bytes_join";
    if (paper_category || (totals == TotalsMode::All && extra_category)) {
      sum += cell.mean[f];
    }
  }
  return sum;
}

}  // namespace

std::string csv_row(const CellAggregate& cell, TotalsMode totals) {
  std::ostringstream row;
  row << to_string(cell.cell.scenario) << ',' << cell.cell.churn_c << ','
      << to_string(cell.cell.mode) << ',' << to_string(cell.cell.size_class)
      << ',' << cell.cell.delta << ',' << cell.n_runs;
  for (std::size_t f = 0; f < kMetricFieldCount; ++f) {
    row << ',' << format_double(cell.mean[f]) << ','
        << format_double(cell.stddev[f]);
  }
  if (totals != TotalsMode::None) {
    row << ',' << format_double(total_bytes_mean(cell, totals));
  }
  return row.str();
}

void emit_csv(const SweepResult& result, std::ostream& out, TotalsMode totals) {
  out << csv_header(totals) << '\n';
  for (const auto& cell : result.cells) {
    out << csv_row(cell, totals) << '\n';
  }
  if (!out) throw IoError("failed writing CSV stream");
}

void emit_csv_file(const SweepResult& result, const std::string& path,
                   TotalsMode totals) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  emit_csv(result, out, totals);
  if (!out) throw IoError("failed writing '" + path + "'");
}

void emit_per_second_csv(const std::vector<SecondSample>& samples,
                         std::ostream& out) {
  out << "time_s,live_peers,groups";
  for (const auto& field : metric_fields()) out << ',' << field.name;
  out << '\n';
  for (const auto& s : samples) {
    out << format_double(s.time_s) << ',' << s.live_peers << ',' << s.groups;
    for (const auto& field : metric_fields()) {
      out << ',' << format_double(field.get(s.tallies));
    }
    out << '\n';
  }
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const char* ws = " \t\r\n";
      auto b = s.find_first_not_of(ws);
      if (b == std::string::npos) return std::string{};
      auto e = s.find_last_not_of(ws);
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key");
    }
    kv[key] = value;
  }
  return kv;
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) items.push_back(item.substr(b, e - b + 1));
  }
  return items;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad number '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad integer '" + value + "'");
  }
}

}  // namespace

void apply_config(const std::map<std::string, std::string>& kv,
                  HarnessConfig& config, SweepSpec& sweep) {
  for (const auto& [key, value] : kv) {
    if (key == "data.n_keys") config.data.n_keys = parse_u64(key, value);
    else if (key == "data.n_values") config.data.n_values = parse_u64(key, value);
    else if (key == "data.value_mean_bytes")
      config.data.value_mean_bytes = parse_double(key, value);
    else if (key == "data.value_std_bytes")
      config.data.value_std_bytes = parse_double(key, value);
    else if (key == "data.min_value_bytes")
      config.data.min_value_bytes = parse_u64(key, value);
    else if (key == "timers.maintenance_period_s")
      config.timers.maintenance_period_s = parse_double(key, value);
    else if (key == "timers.maintenance_probability")
      config.timers.maintenance_probability = parse_double(key, value);
    else if (key == "timers.size_check_min_s")
      config.timers.size_check_min_s = parse_double(key, value);
    else if (key == "timers.size_check_max_s")
      config.timers.size_check_max_s = parse_double(key, value);
    else if (key == "timers.relocation_check_period_s")
      config.timers.relocation_check_period_s = parse_double(key, value);
    else if (key == "timers.relocation_cooldown_s")
      config.timers.relocation_cooldown_s = parse_double(key, value);
    else if (key == "timers.load_threshold")
      config.timers.load_threshold = parse_double(key, value);
    else if (key == "maintenance.control_msg_bytes")
      config.maintenance.control_msg_bytes = parse_u64(key, value);
    else if (key == "maintenance.stabilization_period_s")
      config.maintenance.stabilization_period_s = parse_double(key, value);
    else if (key == "maintenance.fingers_per_group")
      config.maintenance.fingers_per_group =
          static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "maintenance.passive_view_size")
      config.maintenance.passive_view_size =
          static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "maintenance.antientropy_fraction")
      config.maintenance.antientropy_fraction = parse_double(key, value);
    else if (key == "run.peers")
      config.n_peers = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "run.bootstrap_joins_per_s")
      config.bootstrap_joins_per_s = parse_double(key, value);
    else if (key == "run.warmup_s") config.warmup_s = parse_double(key, value);
    else if (key == "run.quiescence_window_s")
      config.quiescence_window_s = parse_double(key, value);
    else if (key == "run.quiescence_cap_s")
      config.quiescence_cap_s = parse_double(key, value);
    else if (key == "run.scale") config.scale = parse_double(key, value);
    else if (key == "run.seed") config.seed_base = parse_u64(key, value);
    else if (key == "run.runs")
      config.n_runs = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "run.parallelism")
      config.parallelism = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "churn.cycles")
      config.churn_cycles = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "churn.hot_ratio")
      config.hot_ratio = parse_double(key, value);
    else if (key == "churn.epsilon") config.epsilon = parse_double(key, value);
    else if (key == "sweep.scenarios") {
      sweep.scenarios.clear();
      for (const auto& s : split_list(value))
        sweep.scenarios.push_back(scenario_from_string(s));
    } else if (key == "sweep.churn") {
      sweep.churn_values.clear();
      for (const auto& s : split_list(value))
        sweep.churn_values.push_back(
            static_cast<std::uint32_t>(parse_u64(key, s)));
    } else if (key == "sweep.modes") {
      sweep.modes.clear();
      for (const auto& s : split_list(value))
        sweep.modes.push_back(mode_from_string(s));
    } else if (key == "sweep.size_classes") {
      sweep.size_classes.clear();
      for (const auto& s : split_list(value))
        sweep.size_classes.push_back(size_class_from_string(s));
    } else if (key == "sweep.deltas") {
      sweep.deltas.clear();
      if (value != "all") {
        for (const auto& s : split_list(value))
          sweep.deltas.push_back(static_cast<std::uint32_t>(parse_u64(key, s)));
      }
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

void write_paper_grid_config(std::ostream& out, const HarnessConfig& base) {
  out << "# Full characterization sweep: 2 scenarios x 3 churn levels x\n"
         "# 4 modes x 38 (size class, delta) columns = 912 cells.\n"
         "sweep.scenarios=exit-only,enter-exit\n"
         "sweep.churn=100,200,300\n"
         "sweep.modes=nppr,push,pull,fppr\n"
         "sweep.size_classes=xs,s,m,l,xl\n"
         "sweep.deltas=all\n";
  out << "run.peers=" << base.n_peers << "\n";
  out << "run.runs=" << base.n_runs << "\n";
  out << "run.seed=" << base.seed_base << "\n";
  out << "run.scale=" << base.scale << "\n";
  out << "run.parallelism=" << base.parallelism << "\n";
  out << "data.n_keys=" << base.data.n_keys << "\n";
  out << "data.n_values=" << base.data.n_values << "\n";
}

}  // namespace parsley
