#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "parsley/core.hpp"
#include "parsley/rng.hpp"
#include "parsley/transfer.hpp"

namespace parsley {

// Knobs for background-traffic accounting. These are calibration values,
// not protocol constants; all of them are exposed in the config file.
struct MaintenanceConfig {
  std::uint64_t control_msg_bytes = 128;
  double stabilization_period_s = 5.0;
  std::uint32_t fingers_per_group = 8;
  std::uint32_t passive_view_size = 8;
  // Fraction of a group's store re-verified (and re-fetched) by the first
  // maintenance firing after a brand-new peer joins. Relocated peers are
  // established members; their sync is fully charged at move time.
  double antientropy_fraction = 0.05;

  void validate() const;
};

// Background traffic is accounted from closed-form per-tick formulas; no
// message objects are simulated and no overlay state is ever mutated here
// (apart from draining the anti-entropy debt counter).
class Maintenance {
 public:
  explicit Maintenance(MaintenanceConfig cfg) : cfg_(cfg) {}

  const MaintenanceConfig& config() const { return cfg_; }

  // Per-group 1 s tick. With probability `timers.maintenance_probability`
  // the group exchanges digests (|members| * control_msg_bytes) and clears
  // any pending anti-entropy debt; otherwise nothing happens.
  std::vector<TransferReport> maintenance_tick(Group& group,
                                               const TimerConfig& timers,
                                               RngStream& rng) const;

  // Global stabilization/fix-fingers/passive-view tick:
  // sum over groups of (2 + fingers + passive_view) * control * |members|.
  TransferReport stabilization_tick(const Overlay& overlay) const;

  // Called when a brand-new peer joins `group`: the next firing tick
  // reconciles a slice of the store with the newcomer.
  void note_join(Group& group) const;

 private:
  MaintenanceConfig cfg_;
};

}  // namespace parsley
