#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "parsley/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CommonOpts {
  std::string config_path;
  double scale = -1;  // unset
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::uint32_t runs = 0;
  std::uint32_t peers = 0;
  std::uint32_t parallelism = 0;
  std::string out_path;
  std::string totals = "none";
};

parsley::TotalsMode totals_mode(const std::string& s) {
  if (s == "none") return parsley::TotalsMode::None;
  if (s == "paper") return parsley::TotalsMode::Paper;
  if (s == "all") return parsley::TotalsMode::All;
  throw parsley::ConfigError("--totals must be none|paper|all, got '" + s + "'");
}

void load_base(const CommonOpts& opts, parsley::HarnessConfig& base,
               parsley::SweepSpec& sweep) {
  if (!opts.config_path.empty()) {
    auto kv = parsley::parse_config_file(opts.config_path);
    parsley::apply_config(kv, base, sweep);
  }
  if (opts.scale >= 0) base.scale = opts.scale;
  if (opts.seed_set) base.seed_base = opts.seed;
  if (opts.runs > 0) base.n_runs = opts.runs;
  if (opts.peers > 0) base.n_peers = opts.peers;
  if (opts.parallelism > 0) base.parallelism = opts.parallelism;
}

void write_csv(const parsley::SweepResult& result, const CommonOpts& opts) {
  const parsley::TotalsMode totals = totals_mode(opts.totals);
  if (opts.out_path.empty()) {
    parsley::emit_csv(result, std::cout, totals);
  } else {
    parsley::emit_csv_file(result, opts.out_path, totals);
  }
  std::cerr << "# " << result.provenance << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parsley-sim: group-based DHT churn characterization"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string scenario = "exit-only";
  std::uint32_t churn = 100;
  std::string mode = "fppr";
  std::string size_class = "s";
  std::uint32_t delta = 1;
  std::string per_second_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "base config file");
    cmd->add_option("--scale", opts.scale,
                    "population scale factor (0.1 = desk scale)");
    cmd->add_option("--seed", opts.seed, "seed base")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--runs", opts.runs, "runs per cell");
    cmd->add_option("--peers", opts.peers, "initial peer count");
    cmd->add_option("--parallelism", opts.parallelism, "concurrent runs");
    cmd->add_option("--out", opts.out_path, "output CSV path (default stdout)");
    cmd->add_option("--totals", opts.totals,
                    "append a bytes_total column: none | paper | all");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment cell");
  add_common(run_cmd);
  run_cmd->add_option("--scenario", scenario, "exit-only | enter-exit");
  run_cmd->add_option("--churn", churn, "churn parameter c (unscaled)");
  run_cmd->add_option("--mode", mode, "nppr | push | pull | fppr");
  run_cmd->add_option("--size-class", size_class, "xs | s | m | l | xl");
  run_cmd->add_option("--delta", delta, "soft limit band width");
  run_cmd->add_option("--emit-per-second", per_second_path,
                      "write a per-second debug trace to this path");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "run the sweep grid from a config file");
  add_common(sweep_cmd);

  CLI::App* grid_cmd = app.add_subcommand(
      "paper-grid", "write the full characterization grid config");
  add_common(grid_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    parsley::HarnessConfig base;
    parsley::SweepSpec sweep;
    load_base(opts, base, sweep);

    if (app.got_subcommand(run_cmd)) {
      parsley::ExperimentCell cell;
      cell.key.scenario = parsley::scenario_from_string(scenario);
      cell.key.churn_c = churn;
      cell.key.mode = parsley::mode_from_string(mode);
      cell.key.size_class = parsley::size_class_from_string(size_class);
      cell.key.delta = delta;
      cell.seed_base = base.seed_base;
      cell.n_runs = base.n_runs;

      if (!per_second_path.empty()) {
        // Per-second tracing implies a single run.
        parsley::Simulation sim(
            parsley::make_run_config(base, cell.key, 0, cell.seed_base));
        parsley::RunResult res = sim.run(/*sample_per_second=*/true);
        std::ofstream trace(per_second_path);
        if (!trace) throw parsley::IoError("cannot open " + per_second_path);
        parsley::emit_per_second_csv(res.per_second, trace);
        std::vector<parsley::TaggedRun> tagged{{cell.key, res.metrics}};
        parsley::SweepResult result;
        result.cells.push_back(parsley::aggregate(tagged));
        result.provenance = "single run, per-second trace";
        write_csv(result, opts);
      } else {
        parsley::SweepResult result =
            parsley::run_sweep(base, {cell}, base.parallelism);
        write_csv(result, opts);
      }
    } else if (app.got_subcommand(sweep_cmd)) {
      if (opts.config_path.empty()) {
        throw parsley::ConfigError("sweep requires --config");
      }
      if (sweep.scenarios.empty() || sweep.churn_values.empty() ||
          sweep.modes.empty() || sweep.size_classes.empty()) {
        throw parsley::ConfigError(
            "config file must define the sweep.* axes (see paper-grid)");
      }
      auto cells = parsley::enumerate_cells(sweep, base);
      parsley::SweepResult result =
          parsley::run_sweep(base, cells, base.parallelism);
      write_csv(result, opts);
    } else if (app.got_subcommand(grid_cmd)) {
      if (opts.out_path.empty()) {
        parsley::write_paper_grid_config(std::cout, base);
      } else {
        std::ofstream out(opts.out_path);
        if (!out) throw parsley::IoError("cannot open " + opts.out_path);
        parsley::write_paper_grid_config(out, base);
      }
    }
  } catch (const parsley::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
