#include "parsley/topology.hpp"

#include <algorithm>
#include <cstdlib>

#include "parsley/rng.hpp"

namespace parsley {

namespace {

// Distinct object keys in ring order from `start`, with per-key object
// count and byte totals. Used to place split boundaries: objects sharing a
// key must land on the same side.
struct KeyBucket {
  std::uint64_t offset;  // key - range_start (mod 2^64)
  KeyPoint key;
  std::uint64_t objects = 0;
  std::uint64_t bytes = 0;
};

std::vector<KeyBucket> bucket_by_key(const Group& g) {
  std::vector<KeyBucket> buckets;
  buckets.reserve(g.store.size());
  for (const auto& obj : g.store) {
    buckets.push_back({obj.key - g.range_start, obj.key, 1, obj.size_bytes});
  }
  std::sort(buckets.begin(), buckets.end(),
            [](const KeyBucket& a, const KeyBucket& b) {
              return a.offset < b.offset;
            });
  std::vector<KeyBucket> merged;
  for (const auto& b : buckets) {
    if (!merged.empty() && merged.back().offset == b.offset) {
      merged.back().objects += b.objects;
      merged.back().bytes += b.bytes;
    } else {
      merged.push_back(b);
    }
  }
  return merged;
}

}  // namespace

double Topology::compute_load(GroupId g) const {
  const Group& grp = overlay_.group(g);
  const std::uint64_t total = overlay_.total_stored_bytes();
  if (total == 0) return 1.0;
  const double mean =
      static_cast<double>(total) / static_cast<double>(overlay_.group_count());
  return static_cast<double>(grp.stored_bytes) / mean;
}

SizeAction Topology::size_decision(GroupId g) const {
  const Group& grp = overlay_.group(g);
  const std::uint32_t size = grp.size();
  if (size < sizes_.l) return SizeAction::Merge;
  if (size > sizes_.h) return SizeAction::SplitSize;
  if (size >= 2 * sizes_.l && compute_load(g) > timers_.load_threshold) {
    return SizeAction::SplitOverload;
  }
  return SizeAction::None;
}

GroupId Topology::pick_merge_partner(GroupId g) const {
  auto [pred, succ] = overlay_.ring_neighbors(g);
  if (pred == succ) return succ;  // two-group overlay (or singleton, caller checks)
  const std::uint64_t pred_bytes = overlay_.group(pred).stored_bytes;
  const std::uint64_t succ_bytes = overlay_.group(succ).stored_bytes;
  return pred_bytes < succ_bytes ? pred : succ;
}

std::optional<MergeOutcome> Topology::merge(GroupId g) {
  if (overlay_.group_count() < 2) return std::nullopt;  // nothing to merge with
  GroupId partner = pick_merge_partner(g);
  const Group& absorbed = overlay_.group(g);
  const Group& absorber = overlay_.group(partner);

  // Full intra-group replication: each absorber member fetches the absorbed
  // store and each absorbed member fetches the absorber's store.
  const std::uint64_t bytes =
      static_cast<std::uint64_t>(absorber.members.size()) * absorbed.stored_bytes +
      static_cast<std::uint64_t>(absorbed.members.size()) * absorber.stored_bytes;

  overlay_.absorb_group(partner, g);

  MergeOutcome out;
  out.report = TransferReport{TransferCategory::Merge, bytes, 1, {}, {}, {}};
  out.absorber = partner;
  out.absorbed = g;
  return out;
}

KeyPoint Topology::split_boundary(const Group& g, KeyPoint end,
                                  SplitCause cause) const {
  const auto buckets = bucket_by_key(g);
  const bool full_ring = (g.range_start == end);
  // Half the range width; for the full ring half of 2^64.
  const std::uint64_t half_width =
      full_ring ? (std::uint64_t{1} << 63) : ring_width(g.range_start, end) / 2;

  if (buckets.size() < 2) {
    // Nothing to balance; cut the range in the middle. With a single key
    // bucket, keep its objects on whichever side the key falls.
    return g.range_start + half_width;
  }

  // Prefix totals over key buckets; candidate boundaries sit at bucket k
  // (lower side = buckets [0, k)). Choose the cut closest to half of the
  // balance quantity; first such cut wins ties.
  std::uint64_t total = 0;
  for (const auto& b : buckets) {
    total += (cause == SplitCause::Overload) ? b.bytes : b.objects;
  }
  const double half = static_cast<double>(total) / 2.0;
  std::uint64_t prefix = 0;
  double best_err = -1.0;
  std::size_t best_k = 1;
  for (std::size_t k = 1; k < buckets.size(); ++k) {
    prefix += (cause == SplitCause::Overload) ? buckets[k - 1].bytes
                                              : buckets[k - 1].objects;
    const double err = std::abs(static_cast<double>(prefix) - half);
    if (best_err < 0 || err < best_err) {
      best_err = err;
      best_k = k;
    }
  }
  return buckets[best_k].key;
}

SplitOutcome Topology::split(GroupId g, SplitCause cause) {
  const Group& grp = overlay_.group(g);
  const std::uint32_t size = grp.size();
  if (size < 2 * sizes_.l) {
    throw TooSmallToSplit("group " + std::to_string(g) + " has " +
                          std::to_string(size) + " members, needs " +
                          std::to_string(2 * sizes_.l));
  }

  // Ascending PeerId, alternating: even positions stay in the lower child.
  std::set<PeerId> upper_members;
  std::size_t idx = 0;
  for (PeerId p : grp.members) {
    if (idx % 2 == 1) upper_members.insert(p);
    ++idx;
  }

  const KeyPoint end = overlay_.range_end(g);
  const KeyPoint boundary = split_boundary(grp, end, cause);
  const std::uint64_t bytes =
      static_cast<std::uint64_t>(size) * control_msg_bytes_;

  GroupId upper = overlay_.split_group(g, boundary, upper_members);

  SplitOutcome out;
  out.report = TransferReport{TransferCategory::Split, bytes, 1, {}, cause, {}};
  out.lower_child = g;
  out.upper_child = upper;
  out.parent_size = size;
  out.lower_size = overlay_.group(g).size();
  out.upper_size = overlay_.group(upper).size();
  return out;
}

bool Topology::in_cooldown(PeerId p, SimTime now) const {
  auto it = last_relocation_at_.find(p);
  if (it == last_relocation_at_.end()) return false;
  return now - it->second < sim_seconds(timers_.relocation_cooldown_s);
}

std::optional<PeerId> Topology::eligible_donor_peer(const Group& g,
                                                    SimTime now) const {
  for (auto it = g.members.rbegin(); it != g.members.rend(); ++it) {
    if (!in_cooldown(*it, now)) return *it;
  }
  return std::nullopt;
}

std::vector<GroupId> Topology::sample_view(GroupId self, RngStream& rng) const {
  std::vector<GroupId> ids;
  ids.reserve(overlay_.group_count());
  for (const auto& [id, grp] : overlay_.groups()) {
    if (id != self) ids.push_back(id);
  }
  if (ids.size() <= relocation_view_) return ids;
  for (std::size_t i = 0; i < relocation_view_; ++i) {
    std::size_t j = i + static_cast<std::size_t>(
                            rng.uniform_below(ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(relocation_view_);
  return ids;
}

std::vector<RelocationEvent> Topology::relocation_round(SimTime now,
                                                        RngStream& view_rng) {
  // Delta 0 turns the whole mechanism off. Above that, groups at or above
  // the upper soft limit shed a peer to groups at or below the lower soft
  // limit; a move must improve the pair's balance (donor at least two
  // larger), and each group donates and receives at most once per round.
  std::vector<RelocationEvent> events;
  if (mode_ == Mode::NPPR || !sizes_.relocation_enabled()) return events;

  // A group receives at most one peer per round; a donor gives at most one
  // peer per pass (so FPPR donors may serve one push and one pull).
  std::set<GroupId> donated, received;

  auto move_one = [&](GroupId from, GroupId to, PeerId peer,
                      RelocationDirection dir) {
    overlay_.move_peer(peer, from, to);
    last_relocation_at_[peer] = now;
    donated.insert(from);
    received.insert(to);
    RelocationEvent ev;
    ev.report = TransferReport{TransferCategory::Relocation,
                               overlay_.group(to).stored_bytes, 1, dir, {}, {}};
    ev.peer = peer;
    ev.from = from;
    ev.to = to;
    events.push_back(ev);
  };

  auto is_donor = [&](const Group& g) {
    return g.size() >= sizes_.h_soft && donated.count(g.id) == 0;
  };
  auto is_recipient = [&](const Group& g) {
    return g.size() <= sizes_.l_soft && received.count(g.id) == 0;
  };
  auto balances = [](std::uint32_t donor_size, std::uint32_t recipient_size) {
    return donor_size >= recipient_size + 2;
  };

  if (push_enabled(mode_)) {
    // Donors iterate in ascending id, shedding one peer each into the
    // currently smallest group that sits at least two below them. Need-
    // driven targeting is the pull side's job; pushes just move load off
    // the over-full groups.
    std::vector<GroupId> donors;
    for (const auto& [id, grp] : overlay_.groups()) {
      if (is_donor(grp)) donors.push_back(id);
    }
    for (GroupId d : donors) {
      const Group& donor = overlay_.group(d);
      std::optional<GroupId> best;
      std::uint32_t best_size = 0;
      for (GroupId id : sample_view(d, view_rng)) {
        const Group& grp = overlay_.group(id);
        if (received.count(id) != 0) continue;
        if (!balances(donor.size(), grp.size())) continue;
        if (!best || grp.size() < best_size) {
          best = id;
          best_size = grp.size();
        }
      }
      if (!best) continue;
      auto peer = eligible_donor_peer(donor, now);
      if (!peer) continue;
      move_one(d, *best, *peer, RelocationDirection::Push);
    }
  }

  donated.clear();

  if (pull_enabled(mode_)) {
    // Requesters iterate in ascending id; each asks the currently largest
    // donor that can spare an out-of-cooldown peer.
    std::vector<GroupId> requesters;
    for (const auto& [id, grp] : overlay_.groups()) {
      if (is_recipient(grp)) requesters.push_back(id);
    }
    for (GroupId r : requesters) {
      const Group& req = overlay_.group(r);
      if (!is_recipient(req)) continue;
      std::vector<std::pair<std::uint32_t, GroupId>> donors;
      for (GroupId id : sample_view(r, view_rng)) {
        const Group& grp = overlay_.group(id);
        if (!is_donor(grp)) continue;
        if (!balances(grp.size(), req.size())) continue;
        donors.emplace_back(grp.size(), id);
      }
      std::sort(donors.begin(), donors.end(),
                [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first > b.first;
                  return a.second < b.second;
                });
      for (const auto& [size, d] : donors) {
        auto peer = eligible_donor_peer(overlay_.group(d), now);
        if (!peer) continue;
        move_one(d, r, *peer, RelocationDirection::Pull);
        break;
      }
    }
  }

  return events;
}

JoinOutcome Topology::handle_join(PeerId peer, GroupId target) {
  if (overlay_.has_peer(peer)) {
    throw DuplicatePeer("peer " + std::to_string(peer) + " already joined");
  }
  overlay_.add_peer(target, peer);
  JoinOutcome out;
  out.report = TransferReport{TransferCategory::Join,
                              overlay_.group(target).stored_bytes, 1, {}, {}, {}};
  out.group = target;
  return out;
}

LeaveOutcome Topology::handle_leave(PeerId peer) {
  GroupId g = overlay_.group_of_peer(peer);
  overlay_.remove_peer(g, peer);

  LeaveOutcome out;
  out.group = g;
  if (overlay_.group(g).members.empty() && overlay_.group_count() > 1) {
    // The emptied group's range and data fold into a neighbor right away;
    // with no members left only the absorber side of the merge formula
    // contributes.
    out.forced_merge = merge(g);
  }
  return out;
}

}  // namespace parsley
