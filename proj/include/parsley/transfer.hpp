#pragma once

#include <cstdint>
#include <optional>

namespace parsley {

enum class TransferCategory { Merge, Relocation, Maintenance, Split, Join };

// SizeLimit: member count above h. Overload: load ratio above the
// threshold with at least 2l members so both halves can satisfy l.
enum class SplitCause { SizeLimit, Overload };

enum class RelocationDirection { Push, Pull };

// Sub-label for the maintenance tally (kept on reports; the metrics
// aggregate folds all three into bytes_maintenance).
enum class MaintenanceComponent { IntraGroup, AntiEntropy, Stabilization };

// One accounted operation. Split reports carry control bytes only; data
// never moves on a split.
struct TransferReport {
  TransferCategory kind = TransferCategory::Maintenance;
  std::uint64_t bytes = 0;
  std::uint32_t count = 1;
  std::optional<RelocationDirection> direction;   // Relocation only
  std::optional<SplitCause> split_cause;          // Split only
  std::optional<MaintenanceComponent> component;  // Maintenance only
};

}  // namespace parsley
