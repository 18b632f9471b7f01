#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "parsley/engine.hpp"
#include "parsley/errors.hpp"

namespace parsley {

// Peer ids are unique for the whole run; ids of departed peers are never
// reused, including for peers joining during churn.
using PeerId = std::uint64_t;
using GroupId = std::uint64_t;

// Position on the circular key space of size 2^64. All arithmetic is
// modulo 2^64, so wraparound falls out of unsigned overflow.
using KeyPoint = std::uint64_t;

// Half-open ring interval [start, end). start == end denotes the full ring.
constexpr bool ring_contains(KeyPoint start, KeyPoint end, KeyPoint key) {
  if (start == end) return true;
  return (key - start) < (end - start);
}

// Distance travelled clockwise from start to end. Zero for the full ring
// (callers that can see a full-ring interval must special-case it).
constexpr std::uint64_t ring_width(KeyPoint start, KeyPoint end) {
  return end - start;
}

struct DataObject {
  KeyPoint key = 0;
  std::uint64_t object_id = 0;
  std::uint64_t size_bytes = 1;
};

// Hard (l, h) and soft (l', h') group size limits. Soft limits define the
// desired interval; crossing them triggers preemptive relocation rather
// than a forced merge/split.
struct SizeConfig {
  std::uint32_t l = 4;
  std::uint32_t l_soft = 5;
  std::uint32_t h_soft = 10;
  std::uint32_t h = 11;

  std::uint32_t delta() const { return l_soft - l; }
  bool relocation_enabled() const { return delta() > 0; }
};

// Validates ordering (l <= l' <= h' <= h) and the symmetric band width
// l' - l == h - h'. Throws ConfigError otherwise.
SizeConfig validate_size_config(std::uint32_t l, std::uint32_t l_soft,
                                std::uint32_t h_soft, std::uint32_t h);

enum class Mode { NPPR, Push, Pull, FPPR };

constexpr bool push_enabled(Mode m) { return m == Mode::Push || m == Mode::FPPR; }
constexpr bool pull_enabled(Mode m) { return m == Mode::Pull || m == Mode::FPPR; }

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

enum class Scenario { ExitOnly, EnterExit };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

// Protocol timers and the overload threshold.
struct TimerConfig {
  double maintenance_period_s = 1.0;
  double maintenance_probability = 0.10;
  double size_check_min_s = 2.0;
  double size_check_max_s = 4.0;
  double relocation_check_period_s = 20.0;
  double relocation_cooldown_s = 20.0;
  double load_threshold = 1.75;

  void validate() const;
};

// A replication group: the peers, the owned key range and the objects it
// stores. range_end is not stored; it is the successor group's range_start
// (see Overlay::range_end), which keeps coverage and disjointness true by
// construction.
struct Group {
  GroupId id = 0;
  KeyPoint range_start = 0;
  std::set<PeerId> members;
  std::vector<DataObject> store;
  std::uint64_t stored_bytes = 0;
  bool hot = false;
  // Anti-entropy debt: store bytes scheduled for reconciliation at the
  // next maintenance firing (accrued when a peer arrives).
  std::uint64_t pending_antientropy_bytes = 0;

  std::uint32_t size() const { return static_cast<std::uint32_t>(members.size()); }
};

// Ring of groups partitioning the key space plus the peer registry.
// Mutation happens only through the topology operations and the small
// primitive set below; the ring index and byte/object totals are kept
// consistent here.
class Overlay {
 public:
  Overlay() = default;

  // Creates the initial full-ring group (no members yet) holding the whole
  // dataset. Bootstrap joins fill it and splits take it from there.
  GroupId init_full_ring(std::vector<DataObject> dataset);

  bool has_group(GroupId g) const { return groups_.count(g) != 0; }
  const Group& group(GroupId g) const;
  Group& group_mut(GroupId g);

  std::size_t group_count() const { return groups_.size(); }
  std::size_t peer_count() const { return peer_index_.size(); }
  std::uint64_t total_stored_bytes() const { return total_bytes_; }
  std::uint64_t total_object_count() const { return total_objects_; }

  // The unique group whose range contains `key`.
  GroupId owner_group(KeyPoint key) const;

  // Predecessor and successor on the ring; (g, g) for a singleton overlay.
  std::pair<GroupId, GroupId> ring_neighbors(GroupId g) const;

  KeyPoint range_end(GroupId g) const;

  bool has_peer(PeerId p) const { return peer_index_.count(p) != 0; }
  GroupId group_of_peer(PeerId p) const;

  // Uniform live-peer access for join placement (index < peer_count()).
  PeerId live_peer_at(std::size_t index) const { return live_peers_.at(index); }

  void add_peer(GroupId g, PeerId p);
  void remove_peer(GroupId g, PeerId p);
  void move_peer(PeerId p, GroupId from, GroupId to);

  // Topology primitives. These keep ring/index/total consistency; the
  // byte accounting and partner/boundary policies live in topology.cpp.
  void absorb_group(GroupId absorber, GroupId absorbed);
  GroupId split_group(GroupId g, KeyPoint boundary,
                      const std::set<PeerId>& upper_members);

  // Groups in ascending id order (deterministic iteration).
  const std::map<GroupId, Group>& groups() const { return groups_; }

  // Order-independent digest of the multiset of (object_id, size_bytes)
  // over all stores; used to check data conservation.
  std::uint64_t store_digest() const;

  // Sum of all range widths, modulo 2^64 (the full ring sums to 0).
  std::uint64_t coverage_width_mod() const;

 private:
  std::map<GroupId, Group> groups_;
  std::map<KeyPoint, GroupId> ring_;  // range_start -> group id
  std::unordered_map<PeerId, GroupId> peer_index_;
  // Dense live-peer list (swap-remove) for O(1) uniform sampling.
  std::vector<PeerId> live_peers_;
  std::unordered_map<PeerId, std::size_t> live_slot_;
  GroupId next_group_id_ = 1;
  std::uint64_t total_bytes_ = 0;
  std::uint64_t total_objects_ = 0;
};

}  // namespace parsley
