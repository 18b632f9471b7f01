#include <doctest.h>

#include <vector>

#include "parsley/metrics.hpp"
#include "parsley/rng.hpp"

using namespace parsley;

namespace {

TransferReport merge_report(std::uint64_t bytes) {
  return TransferReport{TransferCategory::Merge, bytes, 1, {}, {}, {}};
}

}  // namespace

TEST_CASE("records before the window opens are dropped") {
  MetricsSink sink;
  sink.record(merge_report(100));
  CHECK(sink.metrics().merges == 0);
  CHECK(sink.metrics().bytes_merge == 0);

  sink.open_window();
  sink.record(merge_report(5));
  CHECK(sink.metrics().merges == 1);
  CHECK(sink.metrics().bytes_merge == 5);
}

TEST_CASE("opening twice throws") {
  MetricsSink sink;
  sink.open_window();
  CHECK_THROWS_AS(sink.open_window(), MetricsError);
}

TEST_CASE("push and pull relocations are tallied separately") {
  MetricsSink sink;
  sink.open_window();
  sink.record(TransferReport{TransferCategory::Relocation, 100, 1,
                             RelocationDirection::Push, {}, {}});
  sink.record(TransferReport{TransferCategory::Relocation, 40, 1,
                             RelocationDirection::Pull, {}, {}});
  sink.record(TransferReport{TransferCategory::Relocation, 60, 1,
                             RelocationDirection::Pull, {}, {}});
  CHECK(sink.metrics().relocations_push == 1);
  CHECK(sink.metrics().relocations_pull == 2);
  CHECK(sink.metrics().bytes_relocation == 200);
}

TEST_CASE("split causes land in their own counters") {
  MetricsSink sink;
  sink.open_window();
  sink.record(TransferReport{TransferCategory::Split, 10, 1, {},
                             SplitCause::Overload, {}});
  sink.record(TransferReport{TransferCategory::Split, 10, 1, {},
                             SplitCause::SizeLimit, {}});
  CHECK(sink.metrics().splits_overload == 1);
  CHECK(sink.metrics().splits_size == 1);
  CHECK(sink.metrics().bytes_split == 20);
}

TEST_CASE("fold of k merge reports equals the independent sum") {
  RngStream rng(1, "fold");
  MetricsSink sink;
  sink.open_window();
  std::uint64_t expected_bytes = 0;
  const int k = 200;
  for (int i = 0; i < k; ++i) {
    std::uint64_t b = rng.uniform_below(10'000);
    expected_bytes += b;
    sink.record(merge_report(b));
  }
  CHECK(sink.metrics().merges == k);
  CHECK(sink.metrics().bytes_merge == expected_bytes);
}

TEST_CASE("category totality: five byte categories partition the total") {
  MetricsSink sink;
  sink.open_window();
  sink.record(TransferReport{TransferCategory::Merge, 11, 1, {}, {}, {}});
  sink.record(TransferReport{TransferCategory::Relocation, 13, 1,
                             RelocationDirection::Push, {}, {}});
  sink.record(TransferReport{TransferCategory::Maintenance, 17, 1, {}, {},
                             MaintenanceComponent::IntraGroup});
  sink.record(TransferReport{TransferCategory::Split, 19, 1, {},
                             SplitCause::SizeLimit, {}});
  sink.record(TransferReport{TransferCategory::Join, 23, 1, {}, {}, {}});
  const RunMetrics& m = sink.metrics();
  CHECK(m.bytes_merge + m.bytes_relocation + m.bytes_maintenance +
            m.bytes_split + m.bytes_join ==
        11 + 13 + 17 + 19 + 23);
}

TEST_CASE("aggregate: single run has zero stddev") {
  TaggedRun run;
  run.cell = CellKey{};
  run.metrics.merges = 7;
  run.metrics.bytes_merge = 10;
  auto agg = aggregate({run});
  CHECK(agg.n_runs == 1);
  CHECK(agg.mean[0] == 7.0);
  CHECK(agg.stddev[0] == 0.0);
}

TEST_CASE("aggregate: mean of {148, 150} merges is 149") {
  TaggedRun a, b;
  a.metrics.merges = 148;
  b.metrics.merges = 150;
  auto agg = aggregate({a, b});
  CHECK(agg.mean[0] == doctest::Approx(149.0));
  CHECK(agg.stddev[0] == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("aggregate matches an independent two-pass fold over 20 runs") {
  RngStream rng(2, "agg");
  std::vector<TaggedRun> runs;
  for (int i = 0; i < 20; ++i) {
    TaggedRun run;
    run.metrics.merges = rng.uniform_below(1000);
    run.metrics.bytes_merge = rng.uniform_below(1'000'000);
    run.metrics.mean_group_state_bytes = rng.next_double() * 1e9;
    runs.push_back(run);
  }
  auto agg = aggregate(runs);

  const auto& fields = metric_fields();
  for (std::size_t f = 0; f < fields.size(); ++f) {
    // Two-pass reference computed the pedestrian way.
    double sum = 0;
    for (const auto& r : runs) sum += fields[f].get(r.metrics);
    double mean = sum / 20.0;
    double ss = 0;
    for (const auto& r : runs) {
      double d = fields[f].get(r.metrics) - mean;
      ss += d * d;
    }
    double std = std::sqrt(ss / 19.0);
    CHECK(agg.mean[f] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(agg.stddev[f] == doctest::Approx(std).epsilon(1e-12));
  }
}

TEST_CASE("aggregate rejects empty input and mixed cells") {
  CHECK_THROWS_AS(aggregate({}), MetricsError);

  TaggedRun a, b;
  a.cell.delta = 0;
  b.cell.delta = 1;
  CHECK_THROWS_AS(aggregate({a, b}), MetricsError);
}
