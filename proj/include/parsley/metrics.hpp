#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "parsley/core.hpp"
#include "parsley/engine.hpp"
#include "parsley/errors.hpp"
#include "parsley/transfer.hpp"

namespace parsley {

// End-of-run tallies, windowed from churn start to the end of the run.
struct RunMetrics {
  std::uint64_t merges = 0;
  std::uint64_t splits_size = 0;
  std::uint64_t splits_overload = 0;
  std::uint64_t relocations_push = 0;
  std::uint64_t relocations_pull = 0;
  std::uint64_t bytes_merge = 0;
  std::uint64_t bytes_relocation = 0;
  std::uint64_t bytes_maintenance = 0;
  std::uint64_t bytes_split = 0;
  std::uint64_t bytes_join = 0;
  std::uint64_t final_peers = 0;
  std::uint64_t final_groups = 0;
  double mean_group_state_bytes = 0.0;
  bool window_open = false;
};

// Field table: single source of truth for CSV column order and for the
// per-field aggregation.
struct MetricField {
  const char* name;
  double (*get)(const RunMetrics&);
};

constexpr std::size_t kMetricFieldCount = 14;
const std::array<MetricField, kMetricFieldCount>& metric_fields();

// Collects TransferReports for one run. Reports recorded before the
// window opens are dropped.
class MetricsSink {
 public:
  bool window_open() const { return metrics_.window_open; }

  // Resets every tally and opens the window. Throws MetricsError if the
  // window is already open.
  void open_window();

  void record(const TransferReport& report);

  RunMetrics& metrics() { return metrics_; }
  const RunMetrics& metrics() const { return metrics_; }

 private:
  RunMetrics metrics_;
};

// Identifies one experiment cell of the sweep grid.
enum class SizeClass { XS, S, M, L, XL };

std::string to_string(SizeClass s);
SizeClass size_class_from_string(const std::string& s);
std::uint32_t max_size_of(SizeClass s);

struct CellKey {
  Scenario scenario = Scenario::ExitOnly;
  std::uint32_t churn_c = 100;
  Mode mode = Mode::FPPR;
  SizeClass size_class = SizeClass::S;
  std::uint32_t delta = 1;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

std::string to_string(const CellKey& key);

struct TaggedRun {
  CellKey cell;
  RunMetrics metrics;
};

// Per-cell mean and sample (n-1) standard deviation of every metric field.
struct CellAggregate {
  CellKey cell;
  std::uint32_t n_runs = 0;
  std::array<double, kMetricFieldCount> mean{};
  std::array<double, kMetricFieldCount> stddev{};
};

// Throws MetricsError on an empty input or when runs span several cells.
CellAggregate aggregate(const std::vector<TaggedRun>& runs);

}  // namespace parsley
