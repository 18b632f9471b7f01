#include <doctest.h>

#include <set>
#include <vector>

#include "parsley/core.hpp"
#include "parsley/harness.hpp"
#include "parsley/rng.hpp"

using namespace parsley;

namespace {

// Brute-force ownership: scan every group range linearly.
GroupId scan_owner(const Overlay& ov, KeyPoint key) {
  GroupId found = 0;
  int hits = 0;
  for (const auto& [id, grp] : ov.groups()) {
    KeyPoint end = ov.range_end(id);
    bool inside = (grp.range_start == end)
                      ? true
                      : ring_contains(grp.range_start, end, key);
    if (inside) {
      found = id;
      ++hits;
    }
  }
  REQUIRE(hits == 1);
  return found;
}

// Overlay with the ring cut at the given start points.
Overlay make_overlay(const std::vector<KeyPoint>& starts) {
  Overlay ov;
  GroupId g = ov.init_full_ring({});
  ov.add_peer(g, 1);
  PeerId next_peer = 2;
  for (std::size_t i = 1; i < starts.size(); ++i) {
    GroupId owner = ov.owner_group(starts[i]);
    std::set<PeerId> upper = {next_peer};
    ov.add_peer(owner, next_peer++);
    // Move the newly added peer to the upper side of the cut.
    ov.split_group(owner, starts[i], upper);
  }
  return ov;
}

}  // namespace

TEST_CASE("size config accepts the reference configuration") {
  SizeConfig cfg = validate_size_config(4, 5, 10, 11);
  CHECK(cfg.delta() == 1);
  CHECK(cfg.relocation_enabled());
}

TEST_CASE("size config accepts a zero-delta band") {
  SizeConfig cfg = validate_size_config(4, 4, 8, 8);
  CHECK(cfg.delta() == 0);
  CHECK_FALSE(cfg.relocation_enabled());
}

TEST_CASE("size config rejects broken ordering") {
  CHECK_THROWS_AS(validate_size_config(4, 6, 5, 8), ConfigError);
  CHECK_THROWS_AS(validate_size_config(4, 5, 10, 12), ConfigError);  // asymmetric
  CHECK_THROWS_AS(validate_size_config(0, 1, 2, 3), ConfigError);
  CHECK_THROWS_AS(validate_size_config(5, 4, 8, 8), ConfigError);
}

TEST_CASE("every grid column validates with its advertised delta") {
  for (SizeClass sc : {SizeClass::XS, SizeClass::S, SizeClass::M, SizeClass::L,
                       SizeClass::XL}) {
    for (std::uint32_t delta : valid_deltas(sc)) {
      SizeConfig cfg = size_config_for(sc, delta);
      CHECK(cfg.delta() == delta);
      CHECK(cfg.l == 4);
      CHECK(cfg.h == max_size_of(sc));
    }
  }
}

TEST_CASE("single full-ring group owns every key") {
  Overlay ov = make_overlay({0});
  RngStream rng(3, "keys");
  for (int i = 0; i < 100; ++i) {
    CHECK(ov.owner_group(rng.next_u64()) == 1);
  }
}

TEST_CASE("boundary keys belong to the range start side") {
  const KeyPoint mid = KeyPoint{1} << 63;
  Overlay ov = make_overlay({0, mid});
  GroupId first = ov.owner_group(0);
  GroupId second = ov.owner_group(mid);
  CHECK(first != second);
  CHECK(ov.owner_group(0) == first);
  CHECK(ov.owner_group(mid - 1) == first);
  CHECK(ov.owner_group(mid) == second);
  CHECK(ov.owner_group(~KeyPoint{0}) == second);
}

TEST_CASE("owner lookup agrees with a 16-group linear scan") {
  RngStream rng(17, "starts");
  std::vector<KeyPoint> starts = {0};
  for (int i = 0; i < 15; ++i) starts.push_back(rng.next_u64());
  Overlay ov = make_overlay(starts);
  REQUIRE(ov.group_count() == 16);

  RngStream probe(18, "probe");
  for (int i = 0; i < 1000; ++i) {
    KeyPoint key = probe.next_u64();
    CHECK(ov.owner_group(key) == scan_owner(ov, key));
  }
}

TEST_CASE("ring neighbors of a singleton overlay are itself") {
  Overlay ov = make_overlay({0});
  auto [pred, succ] = ov.ring_neighbors(1);
  CHECK(pred == 1);
  CHECK(succ == 1);
}

TEST_CASE("ring neighbors follow range order and wrap") {
  const KeyPoint third = KeyPoint{1} << 62;
  Overlay ov = make_overlay({0, third, 2 * third});
  GroupId a = ov.owner_group(0);
  GroupId b = ov.owner_group(third);
  GroupId c = ov.owner_group(2 * third);

  auto [b_pred, b_succ] = ov.ring_neighbors(b);
  CHECK(b_pred == a);
  CHECK(b_succ == c);

  auto [c_pred, c_succ] = ov.ring_neighbors(c);
  CHECK(c_pred == b);
  CHECK(c_succ == a);  // wraparound

  CHECK_THROWS_AS(ov.ring_neighbors(999), UnknownGroup);
}

TEST_CASE("random cuts preserve coverage, disjointness and peer uniqueness") {
  RngStream rng(23, "cuts");
  std::vector<KeyPoint> starts = {0};
  for (int i = 0; i < 63; ++i) starts.push_back(rng.next_u64());
  Overlay ov = make_overlay(starts);

  // Range widths sum to 2^64, i.e. 0 modulo 2^64 with more than one group.
  CHECK(ov.coverage_width_mod() == 0);

  // Each probed key has exactly one owner (scan_owner REQUIREs that).
  for (int i = 0; i < 300; ++i) {
    KeyPoint key = rng.next_u64();
    CHECK(ov.owner_group(key) == scan_owner(ov, key));
  }

  // Peers: every member appears in exactly one group and in the index.
  std::set<PeerId> seen;
  std::size_t total = 0;
  for (const auto& [id, grp] : ov.groups()) {
    for (PeerId p : grp.members) {
      CHECK(seen.insert(p).second);
      CHECK(ov.group_of_peer(p) == id);
      ++total;
    }
  }
  CHECK(total == ov.peer_count());
}

TEST_CASE("timer config defaults validate and bad values throw") {
  TimerConfig timers;
  CHECK_NOTHROW(timers.validate());
  TimerConfig bad = timers;
  bad.load_threshold = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = timers;
  bad.maintenance_probability = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
