#include "parsley/metrics.hpp"

#include <cmath>

namespace parsley {

const std::array<MetricField, kMetricFieldCount>& metric_fields() {
  static const std::array<MetricField, kMetricFieldCount> fields = {{
      {"merges", [](const RunMetrics& m) { return double(m.merges); }},
      {"splits_size", [](const RunMetrics& m) { return double(m.splits_size); }},
      {"splits_overload",
       [](const RunMetrics& m) { return double(m.splits_overload); }},
      {"relocations_push",
       [](const RunMetrics& m) { return double(m.relocations_push); }},
      {"relocations_pull",
       [](const RunMetrics& m) { return double(m.relocations_pull); }},
      {"bytes_merge", [](const RunMetrics& m) { return double(m.bytes_merge); }},
      {"bytes_relocation",
       [](const RunMetrics& m) { return double(m.bytes_relocation); }},
      {"bytes_maintenance",
       [](const RunMetrics& m) { return double(m.bytes_maintenance); }},
      {"bytes_split", [](const RunMetrics& m) { return double(m.bytes_split); }},
      {"bytes_join", [](const RunMetrics& m) { return double(m.bytes_join); }},
      {"final_peers", [](const RunMetrics& m) { return double(m.final_peers); }},
      {"final_groups", [](const RunMetrics& m) { return double(m.final_groups); }},
      {"mean_group_state_bytes",
       [](const RunMetrics& m) { return m.mean_group_state_bytes; }},
      {"window_open",
       [](const RunMetrics& m) { return m.window_open ? 1.0 : 0.0; }},
  }};
  return fields;
}

void MetricsSink::open_window() {
  if (metrics_.window_open) throw MetricsError("metrics window already open");
  metrics_ = RunMetrics{};
  metrics_.window_open = true;
}

void MetricsSink::record(const TransferReport& report) {
  if (!metrics_.window_open) return;
  switch (report.kind) {
    case TransferCategory::Merge:
      metrics_.merges += report.count;
      metrics_.bytes_merge += report.bytes;
      break;
    case TransferCategory::Split:
      if (report.split_cause && *report.split_cause == SplitCause::Overload) {
        metrics_.splits_overload += report.count;
      } else {
        metrics_.splits_size += report.count;
      }
      metrics_.bytes_split += report.bytes;
      break;
    case TransferCategory::Relocation:
      if (report.direction && *report.direction == RelocationDirection::Pull) {
        metrics_.relocations_pull += report.count;
      } else {
        metrics_.relocations_push += report.count;
      }
      metrics_.bytes_relocation += report.bytes;
      break;
    case TransferCategory::Maintenance:
      metrics_.bytes_maintenance += report.bytes;
      break;
    case TransferCategory::Join:
      metrics_.bytes_join += report.bytes;
      break;
  }
}

std::string to_string(SizeClass s) {
  switch (s) {
    case SizeClass::XS: return "xs";
    case SizeClass::S: return "s";
    case SizeClass::M: return "m";
    case SizeClass::L: return "l";
    case SizeClass::XL: return "xl";
  }
  return "?";
}

SizeClass size_class_from_string(const std::string& s) {
  if (s == "xs") return SizeClass::XS;
  if (s == "s") return SizeClass::S;
  if (s == "m") return SizeClass::M;
  if (s == "l") return SizeClass::L;
  if (s == "xl") return SizeClass::XL;
  throw ConfigError("unknown size class '" + s + "' (expected xs|s|m|l|xl)");
}

std::uint32_t max_size_of(SizeClass s) {
  switch (s) {
    case SizeClass::XS: return 8;
    case SizeClass::S: return 11;
    case SizeClass::M: return 16;
    case SizeClass::L: return 32;
    case SizeClass::XL: return 64;
  }
  return 0;
}

std::string to_string(const CellKey& key) {
  return to_string(key.scenario) + ",c=" + std::to_string(key.churn_c) + "," +
         to_string(key.mode) + "," + to_string(key.size_class) +
         ",delta=" + std::to_string(key.delta);
}

CellAggregate aggregate(const std::vector<TaggedRun>& runs) {
  if (runs.empty()) throw MetricsError("aggregate over empty run list");
  CellAggregate agg;
  agg.cell = runs.front().cell;
  agg.n_runs = static_cast<std::uint32_t>(runs.size());
  for (const auto& run : runs) {
    if (run.cell != agg.cell) {
      throw MetricsError("aggregate over mixed cells: " + to_string(agg.cell) +
                         " vs " + to_string(run.cell));
    }
  }
  const auto& fields = metric_fields();
  const double n = static_cast<double>(runs.size());
  for (std::size_t f = 0; f < fields.size(); ++f) {
    double sum = 0;
    for (const auto& run : runs) sum += fields[f].get(run.metrics);
    const double mean = sum / n;
    double ss = 0;
    for (const auto& run : runs) {
      const double d = fields[f].get(run.metrics) - mean;
      ss += d * d;
    }
    agg.mean[f] = mean;
    agg.stddev[f] = runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  return agg;
}

}  // namespace parsley
