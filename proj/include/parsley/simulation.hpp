#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "parsley/core.hpp"
#include "parsley/engine.hpp"
#include "parsley/maintenance.hpp"
#include "parsley/metrics.hpp"
#include "parsley/topology.hpp"
#include "parsley/workload.hpp"

namespace parsley {

// Everything one run needs. The harness builds this from an experiment
// cell plus the base configuration file.
struct SimulationConfig {
  SizeConfig sizes;
  Mode mode = Mode::FPPR;
  TimerConfig timers;
  MaintenanceConfig maintenance;
  DataConfig data;
  ChurnConfig churn;
  std::uint32_t n_peers = 10'000;
  double bootstrap_joins_per_s = 25.0;
  double warmup_s = 60.0;
  // Post-churn phase: the run ends once no merge/split/relocation happened
  // for quiescence_window_s, or quiescence_cap_s after churn end at the
  // latest.
  double quiescence_window_s = 30.0;
  double quiescence_cap_s = 300.0;
  std::uint64_t seed = 1;
  // When set, used verbatim instead of generating from `data`.
  std::optional<std::vector<DataObject>> dataset_override;

  void validate() const;
};

// One sampled row of the optional per-second debug trace.
struct SecondSample {
  double time_s = 0;
  std::uint64_t live_peers = 0;
  std::uint64_t groups = 0;
  RunMetrics tallies;
};

struct RunResult {
  RunMetrics metrics;
  // Store digests at warmup end, churn end and run end; all three must be
  // identical (nothing is ever lost or duplicated).
  std::uint64_t digest_warmup_end = 0;
  std::uint64_t digest_churn_end = 0;
  std::uint64_t digest_run_end = 0;
  bool reached_quiescence = false;
  double end_time_s = 0;
  std::vector<SecondSample> per_second;  // filled only when sampling is on
};

// Test/acceptance instrumentation; every hook is optional.
struct SimulationProbe {
  std::function<void(PeerId, SimTime)> on_relocation;
  std::function<void(const SplitOutcome&)> on_split;
  std::function<void(const MergeOutcome&)> on_merge;
};

// Drives one full execution: bootstrap joins one peer at a time with every
// periodic protocol active, warmup, the churn window (heat assignment,
// victim removal, replacement joins), then stabilization to quiescence.
class Simulation {
 public:
  explicit Simulation(SimulationConfig cfg, SimulationProbe probe = {});
  ~Simulation();

  RunResult run(bool sample_per_second = false);

  // Runs only the bootstrap phase and hands the overlay over.
  Overlay take_overlay_after_bootstrap();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Joins n_peers one at a time into a fresh overlay holding `dataset`, with
// size checks and (mode-permitting) relocation running throughout.
Overlay bootstrap_overlay(std::uint32_t n_peers, const SizeConfig& sizes,
                          Mode mode, std::vector<DataObject> dataset,
                          std::uint64_t seed);

}  // namespace parsley
