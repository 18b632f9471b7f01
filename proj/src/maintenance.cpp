#include "parsley/maintenance.hpp"

#include <cmath>

#include "parsley/errors.hpp"

namespace parsley {

void MaintenanceConfig::validate() const {
  if (stabilization_period_s <= 0) {
    throw ConfigError("stabilization_period_s must be positive");
  }
  if (antientropy_fraction < 0 || antientropy_fraction > 1) {
    throw ConfigError("antientropy_fraction must be in [0, 1]");
  }
}

std::vector<TransferReport> Maintenance::maintenance_tick(
    Group& group, const TimerConfig& timers, RngStream& rng) const {
  std::vector<TransferReport> reports;
  if (!rng.bernoulli(timers.maintenance_probability)) return reports;

  const std::uint64_t digest_bytes =
      static_cast<std::uint64_t>(group.members.size()) * cfg_.control_msg_bytes;
  reports.push_back(TransferReport{TransferCategory::Maintenance, digest_bytes,
                                   1, {}, {},
                                   MaintenanceComponent::IntraGroup});
  if (group.pending_antientropy_bytes > 0) {
    reports.push_back(TransferReport{TransferCategory::Maintenance,
                                     group.pending_antientropy_bytes, 1, {}, {},
                                     MaintenanceComponent::AntiEntropy});
    group.pending_antientropy_bytes = 0;
  }
  return reports;
}

TransferReport Maintenance::stabilization_tick(const Overlay& overlay) const {
  const std::uint64_t per_member =
      (2 + cfg_.fingers_per_group + cfg_.passive_view_size) *
      cfg_.control_msg_bytes;
  std::uint64_t bytes = 0;
  for (const auto& [id, grp] : overlay.groups()) {
    bytes += per_member * grp.members.size();
  }
  return TransferReport{TransferCategory::Maintenance, bytes, 1, {}, {},
                        MaintenanceComponent::Stabilization};
}

void Maintenance::note_join(Group& group) const {
  group.pending_antientropy_bytes += static_cast<std::uint64_t>(
      cfg_.antientropy_fraction * static_cast<double>(group.stored_bytes));
}

}  // namespace parsley
