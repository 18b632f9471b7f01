#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "parsley/core.hpp"
#include "parsley/engine.hpp"
#include "parsley/rng.hpp"
#include "parsley/transfer.hpp"

namespace parsley {

enum class SizeAction { None, Merge, SplitSize, SplitOverload };

struct MergeOutcome {
  TransferReport report;
  GroupId absorber = 0;
  GroupId absorbed = 0;
};

struct SplitOutcome {
  TransferReport report;
  GroupId lower_child = 0;  // keeps the parent's id and timers
  GroupId upper_child = 0;  // fresh id; the driver arms its timers
  std::uint32_t parent_size = 0;
  std::uint32_t lower_size = 0;
  std::uint32_t upper_size = 0;
};

struct JoinOutcome {
  TransferReport report;
  GroupId group = 0;
};

struct LeaveOutcome {
  GroupId group = 0;                        // the group the peer left
  std::optional<MergeOutcome> forced_merge; // set when the group emptied
};

struct RelocationEvent {
  TransferReport report;
  PeerId peer = 0;
  GroupId from = 0;
  GroupId to = 0;
};

// Merge/split/relocation/join/leave over one overlay. Pure state machine:
// no event scheduling and no metric recording happens here; callers act on
// the returned outcomes.
class Topology {
 public:
  Topology(Overlay& overlay, SizeConfig sizes, TimerConfig timers, Mode mode,
           std::uint64_t control_msg_bytes, std::uint32_t relocation_view = 8)
      : overlay_(overlay),
        sizes_(sizes),
        timers_(timers),
        mode_(mode),
        control_msg_bytes_(control_msg_bytes),
        relocation_view_(relocation_view) {}

  const SizeConfig& sizes() const { return sizes_; }
  Mode mode() const { return mode_; }

  // Group bytes divided by the mean group bytes; 1.0 when the overlay
  // stores nothing at all.
  double compute_load(GroupId g) const;

  // Periodic size check decision. Hard limits are strict: a group at
  // exactly l or h takes no action.
  SizeAction size_decision(GroupId g) const;

  // Absorbs g into the ring neighbor with the smaller store (tie: the
  // successor). Returns nullopt when g is the only group. Transfer bytes
  // follow the full-replication model: every member of each side fetches
  // the other side's store.
  std::optional<MergeOutcome> merge(GroupId g);

  // Splits g in two. Members split by ascending PeerId, alternating, the
  // even positions forming the lower child. The range boundary balances
  // object count (size splits) or stored bytes (overload splits). Throws
  // TooSmallToSplit below 2l members.
  SplitOutcome split(GroupId g, SplitCause cause);

  // One periodic relocation pass: push (over-full groups shed a peer into
  // the smallest group they can see) and/or pull (under-full groups request
  // a peer from the largest over-full group they can see), per mode. Each
  // initiator examines a sampled view of `relocation_view` other groups, as
  // a decentralized node would. Empty when the mode forbids relocation or
  // delta is zero.
  std::vector<RelocationEvent> relocation_round(SimTime now,
                                                RngStream& view_rng);

  // Adds the peer to `target` (the group of the joiner's bootstrap
  // contact); bytes are that group's store (the newcomer replicates all
  // of it).
  JoinOutcome handle_join(PeerId peer, GroupId target);

  // Removes the peer. An emptied group is immediately absorbed by a ring
  // neighbor; only the data term is transferred.
  LeaveOutcome handle_leave(PeerId peer);

  bool in_cooldown(PeerId p, SimTime now) const;
  const std::unordered_map<PeerId, SimTime>& relocation_times() const {
    return last_relocation_at_;
  }

 private:
  GroupId pick_merge_partner(GroupId g) const;
  KeyPoint split_boundary(const Group& g, KeyPoint end, SplitCause cause) const;
  std::optional<PeerId> eligible_donor_peer(const Group& g, SimTime now) const;
  std::vector<GroupId> sample_view(GroupId self, RngStream& rng) const;

  Overlay& overlay_;
  SizeConfig sizes_;
  TimerConfig timers_;
  Mode mode_;
  std::uint64_t control_msg_bytes_;
  std::uint32_t relocation_view_;
  std::unordered_map<PeerId, SimTime> last_relocation_at_;
};

}  // namespace parsley
