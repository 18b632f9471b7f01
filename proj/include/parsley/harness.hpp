#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "parsley/metrics.hpp"
#include "parsley/simulation.hpp"

namespace parsley {

// Valid delta values for a size class (the columns of the size-parameter
// grid: 3 + 4 + 5 + 9 + 17 = 38 (size, delta) pairs).
const std::vector<std::uint32_t>& valid_deltas(SizeClass size_class);

bool is_valid_cell(SizeClass size_class, std::uint32_t delta);

// l is 4 everywhere; h depends on the size class; the soft limits close
// in symmetrically by delta.
SizeConfig size_config_for(SizeClass size_class, std::uint32_t delta);

struct ExperimentCell {
  CellKey key;
  std::uint64_t seed_base = 1;
  std::uint32_t n_runs = 20;
};

// Base settings shared by every run of a sweep. `scale` shrinks the
// population for desk runs: peers, values, value bytes and churn c scale
// together so the churn percentages are preserved.
struct HarnessConfig {
  DataConfig data;
  TimerConfig timers;
  MaintenanceConfig maintenance;
  std::uint32_t n_peers = 10'000;
  double bootstrap_joins_per_s = 25.0;
  double warmup_s = 60.0;
  double quiescence_window_s = 30.0;
  double quiescence_cap_s = 300.0;
  std::uint32_t churn_cycles = 60;
  double hot_ratio = 0.5;
  double epsilon = 0.8;
  double scale = 1.0;
  std::uint64_t seed_base = 1;
  std::uint32_t n_runs = 20;
  std::uint32_t parallelism = 1;
};

// Sweep axes; the grid is their cross product (deltas restricted to the
// valid columns of each size class).
struct SweepSpec {
  std::vector<Scenario> scenarios;
  std::vector<std::uint32_t> churn_values;
  std::vector<Mode> modes;
  std::vector<SizeClass> size_classes;
  // Empty means "all valid deltas of each size class".
  std::vector<std::uint32_t> deltas;
};

struct SweepResult {
  std::vector<CellAggregate> cells;
  std::string provenance;
};

// Optional trailing bytes_total column: None omits it, Paper sums the
// merge/relocation/maintenance categories (the stacked-bar subset), All
// sums all five.
enum class TotalsMode { None, Paper, All };

// Derives the per-run seed from (seed_base, cell key, run index).
std::uint64_t run_seed(std::uint64_t seed_base, const CellKey& key,
                       std::uint32_t run_index);

// Builds the SimulationConfig for one run of a cell, applying `scale`.
SimulationConfig make_run_config(const HarnessConfig& base,
                                 const CellKey& key, std::uint32_t run_index,
                                 std::uint64_t seed_base);

// Executes one run of one cell.
RunResult run_single(const HarnessConfig& base, const ExperimentCell& cell,
                     std::uint32_t run_index);

// Enumerates the full grid in stable (cell key) order.
std::vector<ExperimentCell> enumerate_cells(const SweepSpec& spec,
                                            const HarnessConfig& base);

// The whole characterization grid: both scenarios x 3 churn levels x
// 4 modes x the 38 (size, delta) columns.
SweepSpec paper_grid_spec();

// Runs every (cell x run_index) job, up to `parallelism` at a time, and
// aggregates per cell. The result does not depend on the parallelism.
SweepResult run_sweep(const HarnessConfig& base,
                      const std::vector<ExperimentCell>& cells,
                      std::uint32_t parallelism);

// CSV: one header row, then one row per cell (mean and sample stddev for
// every metric field). Decimal point, no thousands separators.
void emit_csv(const SweepResult& result, std::ostream& out,
              TotalsMode totals = TotalsMode::None);
void emit_csv_file(const SweepResult& result, const std::string& path,
                   TotalsMode totals = TotalsMode::None);

std::string csv_header(TotalsMode totals = TotalsMode::None);
std::string csv_row(const CellAggregate& cell,
                    TotalsMode totals = TotalsMode::None);

// Per-second debug trace.
void emit_per_second_csv(const std::vector<SecondSample>& samples,
                         std::ostream& out);

// Flat key=value configuration file (lines of `section.key=value`,
// '#' comments). Unknown keys are rejected.
std::map<std::string, std::string> parse_config_file(const std::string& path);
void apply_config(const std::map<std::string, std::string>& kv,
                  HarnessConfig& config, SweepSpec& sweep);

// Writes a config file describing the full characterization sweep.
void write_paper_grid_config(std::ostream& out, const HarnessConfig& base);

}  // namespace parsley
