#include <doctest.h>

#include <cmath>
#include <set>
#include <unordered_map>

#include "fixtures.hpp"
#include "parsley/simulation.hpp"
#include "parsley/workload.hpp"

using namespace parsley;
using parsley::testutil::GroupSpec;
using parsley::testutil::build_overlay;

TEST_CASE("dataset: full-size totals land around 250 GB") {
  DataConfig cfg;
  RngStream rng(1, "dataset");
  auto objects = generate_dataset(cfg, rng);
  REQUIRE(objects.size() == 50'000);

  long double total = 0;
  std::set<KeyPoint> keys;
  for (const auto& obj : objects) {
    total += obj.size_bytes;
    keys.insert(obj.key);
  }
  // Uniform assignment leaves some of the 10000 keys unused; the expected
  // occupancy is 10000 * (1 - (1 - 1/10000)^50000) ~ 9933.
  CHECK(keys.size() <= 10'000);
  CHECK(keys.size() >= 9'850);
  CHECK(keys.size() <= 9'990);
  CHECK(total >= 235e9L);
  CHECK(total <= 265e9L);
}

TEST_CASE("dataset: one key, one value") {
  DataConfig cfg;
  cfg.n_keys = 1;
  cfg.n_values = 1;
  RngStream rng(2, "dataset");
  auto objects = generate_dataset(cfg, rng);
  REQUIRE(objects.size() == 1);
  CHECK(objects[0].size_bytes >= cfg.min_value_bytes);
}

TEST_CASE("dataset: size distribution has the stated moments") {
  DataConfig cfg;
  cfg.n_keys = 10;
  cfg.n_values = 100'000;
  RngStream rng(3, "dataset");
  auto objects = generate_dataset(cfg, rng);

  long double sum = 0, sum_sq = 0;
  for (const auto& obj : objects) {
    sum += obj.size_bytes;
    sum_sq += static_cast<long double>(obj.size_bytes) * obj.size_bytes;
  }
  const double n = static_cast<double>(objects.size());
  const double mean = static_cast<double>(sum / n);
  const double var = static_cast<double>(sum_sq / n) - mean * mean;
  CHECK(mean == doctest::Approx(5e6).epsilon(0.01));
  CHECK(std::sqrt(var) == doctest::Approx(1e6).epsilon(0.03));
}

TEST_CASE("dataset: sizes never fall below the minimum") {
  DataConfig cfg;
  cfg.n_keys = 5;
  cfg.n_values = 20'000;
  cfg.value_mean_bytes = 2'000;  // close to the floor so resampling kicks in
  cfg.value_std_bytes = 1'000;
  RngStream rng(4, "dataset");
  auto objects = generate_dataset(cfg, rng);
  for (const auto& obj : objects) {
    REQUIRE(obj.size_bytes >= cfg.min_value_bytes);
  }
}

TEST_CASE("dataset: invalid configs are rejected") {
  DataConfig cfg;
  cfg.n_values = 5;
  cfg.n_keys = 10;  // values < keys
  RngStream rng(5, "dataset");
  CHECK_THROWS_AS(generate_dataset(cfg, rng), ConfigError);
}

TEST_CASE("churn plan: c=100 exit-only removes 30% of 10000") {
  ChurnConfig cfg;
  cfg.scenario = Scenario::ExitOnly;
  cfg.c = 100;
  ChurnPlan plan = build_churn_plan(cfg);
  REQUIRE(plan.moments.size() == 30);
  CHECK(plan.total_removals() == 3000);
  CHECK(plan.total_additions() == 0);
  for (std::size_t i = 0; i < plan.moments.size(); ++i) {
    CHECK(plan.moments[i].cycle == 2 * i);
  }
}

TEST_CASE("churn plan: enter-exit adds what it removes, every moment") {
  ChurnConfig cfg;
  cfg.scenario = Scenario::EnterExit;
  cfg.c = 300;
  ChurnPlan plan = build_churn_plan(cfg);
  for (const auto& m : plan.moments) {
    CHECK(m.removals == 300);
    CHECK(m.additions == 300);
  }
}

TEST_CASE("churn plan: c=1 over 60 cycles is 30 removals") {
  ChurnConfig cfg;
  cfg.c = 1;
  ChurnPlan plan = build_churn_plan(cfg);
  CHECK(plan.total_removals() == 30);
}

TEST_CASE("heat: exact floor counts") {
  auto count_hot = [](const Overlay& ov) {
    std::size_t hot = 0;
    for (const auto& [id, grp] : ov.groups()) hot += grp.hot ? 1 : 0;
    return hot;
  };

  RngStream rng(6, "heat");
  std::vector<GroupSpec> specs100(100, GroupSpec{4, {}});
  Overlay ov = build_overlay(specs100);
  assign_heat(ov, 0.5, rng);
  CHECK(count_hot(ov) == 50);

  std::vector<GroupSpec> specs101(101, GroupSpec{4, {}});
  Overlay ov101 = build_overlay(specs101);
  assign_heat(ov101, 0.5, rng);
  CHECK(count_hot(ov101) == 50);  // floor

  Overlay ov1 = build_overlay({GroupSpec{4, {}}});
  assign_heat(ov1, 0.5, rng);
  CHECK(count_hot(ov1) == 0);  // floor of 0.5
}

TEST_CASE("victims: epsilon one draws only hot peers") {
  std::vector<GroupSpec> specs(10, GroupSpec{10, {}});
  Overlay ov = build_overlay(specs);
  RngStream heat_rng(7, "heat");
  assign_heat(ov, 0.5, heat_rng);

  std::set<PeerId> hot_peers;
  for (const auto& [id, grp] : ov.groups()) {
    if (grp.hot) hot_peers.insert(grp.members.begin(), grp.members.end());
  }

  RngStream rng(8, "victims");
  auto victims = pick_victims(ov, 30, 1.0, rng);
  CHECK(victims.size() == 30);
  for (PeerId v : victims) CHECK(hot_peers.count(v) == 1);
}

TEST_CASE("victims: hot fraction tracks epsilon over many draws") {
  // Balanced sides, k=1 draws so no within-moment exclusion skews counts.
  std::vector<GroupSpec> specs(20, GroupSpec{50, {}});
  Overlay ov = build_overlay(specs);
  RngStream heat_rng(9, "heat");
  assign_heat(ov, 0.5, heat_rng);

  std::set<PeerId> hot_peers;
  for (const auto& [id, grp] : ov.groups()) {
    if (grp.hot) hot_peers.insert(grp.members.begin(), grp.members.end());
  }

  RngStream rng(10, "victims");
  const int n = 100'000;
  int hot = 0;
  for (int i = 0; i < n; ++i) {
    auto v = pick_victims(ov, 1, 0.8, rng);
    hot += hot_peers.count(v[0]) != 0 ? 1 : 0;
  }
  CHECK(static_cast<double>(hot) / n == doctest::Approx(0.8).epsilon(0.0125));
}

TEST_CASE("victims: all-cold overlay falls back to the cold side") {
  std::vector<GroupSpec> specs(4, GroupSpec{5, {}});
  Overlay ov = build_overlay(specs);  // nothing marked hot
  RngStream rng(11, "victims");
  auto victims = pick_victims(ov, 10, 0.8, rng);
  CHECK(victims.size() == 10);
  std::set<PeerId> distinct(victims.begin(), victims.end());
  CHECK(distinct.size() == 10);
}

TEST_CASE("victims: asking for more peers than live throws") {
  Overlay ov = build_overlay({GroupSpec{3, {}}});
  RngStream rng(12, "victims");
  CHECK_THROWS_AS(pick_victims(ov, 4, 0.8, rng), NotEnoughPeers);
}

TEST_CASE("bootstrap: n_peers equal to l yields a single group") {
  Overlay ov = bootstrap_overlay(4, SizeConfig{4, 4, 8, 8}, Mode::FPPR, {}, 13);
  CHECK(ov.group_count() == 1);
  CHECK(ov.peer_count() == 4);
  CHECK(ov.groups().begin()->second.size() == 4);
}

TEST_CASE("bootstrap: below l is rejected") {
  CHECK_THROWS_AS(
      bootstrap_overlay(3, SizeConfig{4, 4, 8, 8}, Mode::FPPR, {}, 13),
      InsufficientPeers);
}

TEST_CASE("bootstrap: 2000 peers size S delta 0 stay within the hard limits") {
  DataConfig data;
  data.n_keys = 2000;
  data.n_values = 2000;
  data.value_mean_bytes = 1e5;
  data.value_std_bytes = 1e4;
  RngStream rng(14, "dataset");
  auto dataset = generate_dataset(data, rng);
  const std::uint64_t digest_before = [&] {
    Overlay tmp;
    tmp.init_full_ring(dataset);
    return tmp.store_digest();
  }();

  Overlay ov = bootstrap_overlay(2000, SizeConfig{4, 4, 11, 11}, Mode::FPPR,
                                 dataset, 15);
  CHECK(ov.peer_count() == 2000);

  std::size_t total = 0;
  for (const auto& [id, grp] : ov.groups()) {
    CHECK(grp.size() >= 4);
    CHECK(grp.size() <= 11);
    total += grp.size();
  }
  CHECK(total == 2000);

  // Placement respects ownership and no object was lost in the splits.
  CHECK(ov.store_digest() == digest_before);
  for (const auto& [id, grp] : ov.groups()) {
    KeyPoint end = ov.range_end(id);
    for (const auto& obj : grp.store) {
      if (grp.range_start != end) {
        REQUIRE(ring_contains(grp.range_start, end, obj.key));
      }
    }
  }
}

TEST_CASE("bootstrap: delta 1 grows larger groups than delta 0, same seed") {
  DataConfig data;
  data.n_keys = 1000;
  data.n_values = 1000;
  data.value_mean_bytes = 1e5;
  data.value_std_bytes = 1e4;
  RngStream rng(16, "dataset");
  auto dataset = generate_dataset(data, rng);

  Overlay delta0 = bootstrap_overlay(2000, SizeConfig{4, 4, 11, 11},
                                     Mode::FPPR, dataset, 17);
  Overlay delta1 = bootstrap_overlay(2000, SizeConfig{4, 5, 10, 11},
                                     Mode::FPPR, dataset, 17);
  const double mean0 = 2000.0 / static_cast<double>(delta0.group_count());
  const double mean1 = 2000.0 / static_cast<double>(delta1.group_count());
  CHECK(mean1 > mean0);
}
