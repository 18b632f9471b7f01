#include "parsley/workload.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "parsley/errors.hpp"

namespace parsley {

void DataConfig::validate() const {
  if (n_keys < 1 || n_values < n_keys) {
    throw ConfigError("need n_values >= n_keys >= 1");
  }
  if (!(value_mean_bytes > value_std_bytes) || value_std_bytes < 0) {
    throw ConfigError("need value_mean_bytes > value_std_bytes >= 0");
  }
  if (min_value_bytes < 1) {
    throw ConfigError("min_value_bytes must be >= 1");
  }
}

void ChurnConfig::validate() const {
  if (c < 1) throw ConfigError("churn parameter c must be >= 1");
  if (churn_cycles < 2 || churn_cycles % 2 != 0) {
    throw ConfigError("churn_cycles must be even and >= 2");
  }
  if (hot_ratio < 0 || hot_ratio > 1 || epsilon < 0 || epsilon > 1) {
    throw ConfigError("hot_ratio and epsilon must be in [0, 1]");
  }
}

std::uint64_t ChurnPlan::total_removals() const {
  std::uint64_t n = 0;
  for (const auto& m : moments) n += m.removals;
  return n;
}

std::uint64_t ChurnPlan::total_additions() const {
  std::uint64_t n = 0;
  for (const auto& m : moments) n += m.additions;
  return n;
}

std::vector<DataObject> generate_dataset(const DataConfig& cfg,
                                         RngStream& rng) {
  cfg.validate();

  std::vector<KeyPoint> keys;
  keys.reserve(cfg.n_keys);
  std::unordered_set<KeyPoint> seen;
  while (keys.size() < cfg.n_keys) {
    KeyPoint k = rng.next_u64();
    if (seen.insert(k).second) keys.push_back(k);
  }

  std::vector<DataObject> objects;
  objects.reserve(cfg.n_values);
  for (std::uint64_t i = 0; i < cfg.n_values; ++i) {
    DataObject obj;
    obj.object_id = i;
    obj.key = keys[rng.uniform_below(cfg.n_keys)];
    // Resample (not clamp) below the minimum so the mean stays put.
    double size;
    do {
      size = rng.normal(cfg.value_mean_bytes, cfg.value_std_bytes);
    } while (size < static_cast<double>(cfg.min_value_bytes));
    obj.size_bytes = static_cast<std::uint64_t>(size + 0.5);
    objects.push_back(obj);
  }
  return objects;
}

ChurnPlan build_churn_plan(const ChurnConfig& cfg) {
  cfg.validate();
  ChurnPlan plan;
  for (std::uint32_t cycle = 0; cycle < cfg.churn_cycles; cycle += 2) {
    ChurnMomentPlan m;
    m.cycle = cycle;
    m.removals = cfg.c;
    m.additions = cfg.scenario == Scenario::EnterExit ? cfg.c : 0;
    plan.moments.push_back(m);
  }
  return plan;
}

void assign_heat(Overlay& overlay, double hot_ratio, RngStream& rng) {
  std::vector<GroupId> ids;
  ids.reserve(overlay.group_count());
  for (const auto& [id, grp] : overlay.groups()) ids.push_back(id);

  const std::size_t n_hot =
      static_cast<std::size_t>(hot_ratio * static_cast<double>(ids.size()));
  // Partial Fisher-Yates: the first n_hot slots become the hot set.
  for (std::size_t i = 0; i < n_hot; ++i) {
    std::size_t j = i + static_cast<std::size_t>(
                            rng.uniform_below(ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    overlay.group_mut(ids[i]).hot = i < n_hot;
  }
}

std::vector<PeerId> pick_victims(const Overlay& overlay, std::size_t k,
                                 double epsilon, RngStream& rng) {
  if (overlay.group_count() == 0) throw NotEnoughPeers("overlay is empty");
  if (k > overlay.peer_count()) {
    throw NotEnoughPeers("asked for " + std::to_string(k) + " victims among " +
                         std::to_string(overlay.peer_count()) + " peers");
  }

  std::vector<PeerId> hot_peers, cold_peers;
  for (const auto& [id, grp] : overlay.groups()) {
    auto& side = grp.hot ? hot_peers : cold_peers;
    side.insert(side.end(), grp.members.begin(), grp.members.end());
  }

  std::unordered_set<PeerId> chosen;
  std::size_t chosen_hot = 0, chosen_cold = 0;
  std::vector<PeerId> victims;
  victims.reserve(k);
  while (victims.size() < k) {
    bool want_hot = rng.bernoulli(epsilon);
    // Fall back when the wanted side has no fresh candidate left.
    bool hot_avail = chosen_hot < hot_peers.size();
    bool cold_avail = chosen_cold < cold_peers.size();
    bool use_hot = want_hot ? (hot_avail || !cold_avail)
                            : (!cold_avail && hot_avail);
    const auto& side = use_hot ? hot_peers : cold_peers;
    PeerId p;
    do {
      p = side[rng.uniform_below(side.size())];
    } while (chosen.count(p) != 0);
    chosen.insert(p);
    (use_hot ? chosen_hot : chosen_cold)++;
    victims.push_back(p);
  }
  return victims;
}

}  // namespace parsley
