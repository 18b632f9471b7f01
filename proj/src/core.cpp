#include "parsley/core.hpp"

#include <algorithm>

#include "parsley/rng.hpp"

namespace parsley {

SizeConfig validate_size_config(std::uint32_t l, std::uint32_t l_soft,
                                std::uint32_t h_soft, std::uint32_t h) {
  auto fmt = [&] {
    return "(l=" + std::to_string(l) + ", l'=" + std::to_string(l_soft) +
           ", h'=" + std::to_string(h_soft) + ", h=" + std::to_string(h) + ")";
  };
  if (l < 1 || l_soft < 1 || h_soft < 1 || h < 1) {
    throw ConfigError("size limits must be >= 1 " + fmt());
  }
  if (!(l <= l_soft && l_soft <= h_soft && h_soft <= h)) {
    throw ConfigError("size limits must satisfy l <= l' <= h' <= h " + fmt());
  }
  if (l_soft - l != h - h_soft) {
    throw ConfigError("soft limit band must be symmetric: l' - l == h - h' " +
                      fmt());
  }
  return SizeConfig{l, l_soft, h_soft, h};
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::NPPR: return "nppr";
    case Mode::Push: return "push";
    case Mode::Pull: return "pull";
    case Mode::FPPR: return "fppr";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "nppr") return Mode::NPPR;
  if (s == "push") return Mode::Push;
  if (s == "pull") return Mode::Pull;
  if (s == "fppr") return Mode::FPPR;
  throw ConfigError("unknown mode '" + s + "' (expected nppr|push|pull|fppr)");
}

std::string to_string(Scenario s) {
  return s == Scenario::ExitOnly ? "exit-only" : "enter-exit";
}

Scenario scenario_from_string(const std::string& s) {
  if (s == "exit-only") return Scenario::ExitOnly;
  if (s == "enter-exit") return Scenario::EnterExit;
  throw ConfigError("unknown scenario '" + s +
                    "' (expected exit-only|enter-exit)");
}

void TimerConfig::validate() const {
  if (maintenance_period_s <= 0 || size_check_min_s <= 0 ||
      size_check_max_s <= 0 || relocation_check_period_s <= 0 ||
      relocation_cooldown_s < 0) {
    throw ConfigError("timer periods must be positive");
  }
  if (size_check_min_s > size_check_max_s) {
    throw ConfigError("size_check_min_s must be <= size_check_max_s");
  }
  if (maintenance_probability < 0 || maintenance_probability > 1) {
    throw ConfigError("maintenance_probability must be in [0, 1]");
  }
  if (load_threshold <= 1.0) {
    throw ConfigError("load_threshold must be > 1");
  }
}

GroupId Overlay::init_full_ring(std::vector<DataObject> dataset) {
  if (!groups_.empty()) {
    throw ConfigError("overlay already initialized");
  }
  Group g;
  g.id = next_group_id_++;
  g.range_start = 0;
  for (const auto& obj : dataset) {
    g.stored_bytes += obj.size_bytes;
  }
  total_bytes_ = g.stored_bytes;
  total_objects_ = dataset.size();
  g.store = std::move(dataset);
  ring_[g.range_start] = g.id;
  GroupId id = g.id;
  groups_.emplace(id, std::move(g));
  return id;
}

const Group& Overlay::group(GroupId g) const {
  auto it = groups_.find(g);
  if (it == groups_.end()) throw UnknownGroup("group " + std::to_string(g));
  return it->second;
}

Group& Overlay::group_mut(GroupId g) {
  auto it = groups_.find(g);
  if (it == groups_.end()) throw UnknownGroup("group " + std::to_string(g));
  return it->second;
}

GroupId Overlay::owner_group(KeyPoint key) const {
  if (ring_.empty()) throw UnknownGroup("overlay is empty");
  // Greatest range_start <= key; wrap to the last group when key precedes
  // every start.
  auto it = ring_.upper_bound(key);
  if (it == ring_.begin()) {
    return ring_.rbegin()->second;
  }
  --it;
  return it->second;
}

std::pair<GroupId, GroupId> Overlay::ring_neighbors(GroupId g) const {
  const Group& grp = group(g);
  auto it = ring_.find(grp.range_start);
  auto pred = it == ring_.begin() ? std::prev(ring_.end()) : std::prev(it);
  auto succ = std::next(it) == ring_.end() ? ring_.begin() : std::next(it);
  return {pred->second, succ->second};
}

KeyPoint Overlay::range_end(GroupId g) const {
  const Group& grp = group(g);
  auto it = ring_.find(grp.range_start);
  auto succ = std::next(it) == ring_.end() ? ring_.begin() : std::next(it);
  return succ->first;
}

GroupId Overlay::group_of_peer(PeerId p) const {
  auto it = peer_index_.find(p);
  if (it == peer_index_.end()) throw UnknownPeer("peer " + std::to_string(p));
  return it->second;
}

void Overlay::add_peer(GroupId g, PeerId p) {
  if (has_peer(p)) throw DuplicatePeer("peer " + std::to_string(p));
  group_mut(g).members.insert(p);
  peer_index_[p] = g;
  live_slot_[p] = live_peers_.size();
  live_peers_.push_back(p);
}

void Overlay::remove_peer(GroupId g, PeerId p) {
  Group& grp = group_mut(g);
  if (grp.members.erase(p) == 0) {
    throw UnknownPeer("peer " + std::to_string(p) + " not in group " +
                      std::to_string(g));
  }
  peer_index_.erase(p);
  const std::size_t slot = live_slot_.at(p);
  const PeerId last = live_peers_.back();
  live_peers_[slot] = last;
  live_slot_[last] = slot;
  live_peers_.pop_back();
  live_slot_.erase(p);
}

void Overlay::move_peer(PeerId p, GroupId from, GroupId to) {
  Group& src = group_mut(from);
  Group& dst = group_mut(to);
  if (src.members.erase(p) == 0) {
    throw UnknownPeer("peer " + std::to_string(p) + " not in group " +
                      std::to_string(from));
  }
  dst.members.insert(p);
  peer_index_[p] = to;
}

void Overlay::absorb_group(GroupId absorber, GroupId absorbed) {
  if (absorber == absorbed) throw UnknownGroup("cannot absorb self");
  Group& a = group_mut(absorber);
  Group& b = group_mut(absorbed);

  for (PeerId p : b.members) {
    a.members.insert(p);
    peer_index_[p] = absorber;
  }
  a.store.insert(a.store.end(), b.store.begin(), b.store.end());
  a.stored_bytes += b.stored_bytes;

  // The ranges are ring-adjacent. If the absorbed group precedes the
  // absorber, the union starts at the absorbed group's range_start.
  auto [pred, succ] = ring_neighbors(absorber);
  ring_.erase(b.range_start);
  if (pred == absorbed) {
    ring_.erase(a.range_start);
    a.range_start = b.range_start;
    ring_[a.range_start] = absorber;
  } else if (succ != absorbed) {
    throw UnknownGroup("absorb partner is not a ring neighbor");
  }
  groups_.erase(absorbed);
}

GroupId Overlay::split_group(GroupId g, KeyPoint boundary,
                             const std::set<PeerId>& upper_members) {
  Group& lower = group_mut(g);
  KeyPoint start = lower.range_start;
  KeyPoint end = range_end(g);
  bool full_ring = (start == end);
  if (boundary == start || (!full_ring && !ring_contains(start, end, boundary))) {
    throw ConfigError("split boundary outside group range");
  }

  Group upper;
  upper.id = next_group_id_++;
  upper.range_start = boundary;
  upper.hot = lower.hot;

  for (PeerId p : upper_members) {
    if (lower.members.erase(p) == 0) {
      throw UnknownPeer("split member not in group");
    }
    upper.members.insert(p);
    peer_index_[p] = upper.id;
  }

  // Objects follow their key side: the lower child keeps [start, boundary),
  // the upper child takes [boundary, end).
  std::vector<DataObject> keep;
  keep.reserve(lower.store.size());
  for (const auto& obj : lower.store) {
    if (ring_contains(start, boundary, obj.key)) {
      keep.push_back(obj);
    } else {
      upper.store.push_back(obj);
      upper.stored_bytes += obj.size_bytes;
    }
  }
  lower.store = std::move(keep);
  lower.stored_bytes -= upper.stored_bytes;

  ring_[boundary] = upper.id;
  GroupId id = upper.id;
  groups_.emplace(id, std::move(upper));
  return id;
}

std::uint64_t Overlay::store_digest() const {
  std::uint64_t acc = 0;
  for (const auto& [id, grp] : groups_) {
    for (const auto& obj : grp.store) {
      acc += splitmix64(obj.object_id * 0x9e3779b97f4a7c15ULL ^
                        splitmix64(obj.size_bytes));
    }
  }
  return acc;
}

std::uint64_t Overlay::coverage_width_mod() const {
  std::uint64_t sum = 0;
  for (const auto& [start, id] : ring_) {
    sum += ring_width(start, range_end(id));
  }
  return sum;
}

}  // namespace parsley
