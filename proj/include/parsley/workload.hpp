#pragma once

#include <cstdint>
#include <vector>

#include "parsley/core.hpp"
#include "parsley/rng.hpp"

namespace parsley {

// Dataset shape: keys drawn uniformly on the ring, values assigned to keys
// uniformly, value sizes normal with resampling below the minimum.
struct DataConfig {
  std::uint64_t n_keys = 10'000;
  std::uint64_t n_values = 50'000;
  double value_mean_bytes = 5'000'000.0;  // 5 MB
  double value_std_bytes = 1'000'000.0;   // 1 MB
  std::uint64_t min_value_bytes = 1'000;  // 1 KB

  void validate() const;
};

struct ChurnConfig {
  Scenario scenario = Scenario::ExitOnly;
  std::uint32_t c = 100;          // peers removed per churn moment
  std::uint32_t churn_cycles = 60;
  double hot_ratio = 0.5;
  double epsilon = 0.8;

  void validate() const;
};

// Removal/addition counts per churn moment, relative to churn start.
struct ChurnMomentPlan {
  std::uint32_t cycle = 0;  // offset within the churn window, in cycles
  std::uint32_t removals = 0;
  std::uint32_t additions = 0;
};

struct ChurnPlan {
  std::vector<ChurnMomentPlan> moments;

  std::uint64_t total_removals() const;
  std::uint64_t total_additions() const;
};

std::vector<DataObject> generate_dataset(const DataConfig& cfg, RngStream& rng);

// Removal moments on every other cycle of the churn window; enter-exit
// moments add the same number of fresh peers.
ChurnPlan build_churn_plan(const ChurnConfig& cfg);

// Marks floor(hot_ratio * #groups) uniformly chosen groups hot, the rest
// cold. Called once when the churn window opens.
void assign_heat(Overlay& overlay, double hot_ratio, RngStream& rng);

// Draws k distinct live peers. Each draw samples the hot side with
// probability epsilon, the cold side otherwise; a side with no fresh
// candidates falls back to the other one.
std::vector<PeerId> pick_victims(const Overlay& overlay, std::size_t k,
                                 double epsilon, RngStream& rng);

}  // namespace parsley
