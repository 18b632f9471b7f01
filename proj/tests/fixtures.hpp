#pragma once

#include <cstdint>
#include <vector>

#include "parsley/core.hpp"

namespace parsley::testutil {

struct GroupSpec {
  std::size_t n_peers = 0;
  std::vector<std::uint64_t> object_bytes;
};

// Overlay with one group per spec, ranges of equal width in spec order
// starting at 0. Group i stores its object_bytes at distinct keys inside
// its range; peers get sequential ids. Returned group ids are 1..n in
// range order.
inline Overlay build_overlay(const std::vector<GroupSpec>& specs) {
  const std::uint64_t n = specs.size();
  const KeyPoint width = n == 0 ? 0 : (~KeyPoint{0} / n) + 1;

  std::vector<DataObject> dataset;
  std::uint64_t next_object = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < specs[i].object_bytes.size(); ++j) {
      DataObject obj;
      obj.key = i * width + static_cast<KeyPoint>(j) + 1;
      obj.object_id = next_object++;
      obj.size_bytes = specs[i].object_bytes[j];
      dataset.push_back(obj);
    }
  }

  Overlay ov;
  ov.init_full_ring(std::move(dataset));
  for (std::uint64_t i = 1; i < n; ++i) {
    ov.split_group(ov.owner_group(i * width), i * width, {});
  }
  PeerId next_peer = 1;
  for (std::uint64_t i = 0; i < n; ++i) {
    GroupId g = ov.owner_group(i * width);
    for (std::size_t p = 0; p < specs[i].n_peers; ++p) {
      ov.add_peer(g, next_peer++);
    }
  }
  return ov;
}

}  // namespace parsley::testutil
