#include "fedrec/synthetic.hpp"

#include <stdexcept>
#include <vector>

namespace fedrec {

std::uint32_t user_block(const BlockDatasetSpec& spec, std::uint32_t user) {
  return user % spec.n_blocks;
}

std::uint32_t item_block(const BlockDatasetSpec& spec, std::uint32_t item) {
  return item % spec.n_blocks;
}

Dataset make_block_dataset(const BlockDatasetSpec& spec) {
  if (spec.n_blocks == 0 || spec.n_users == 0 || spec.n_items == 0) {
    throw std::invalid_argument("make_block_dataset: counts must be positive");
  }
  if (spec.min_interactions < 3 || spec.max_interactions < spec.min_interactions) {
    throw std::invalid_argument("make_block_dataset: need 3 <= min <= max interactions");
  }
  if (spec.n_items < spec.max_interactions) {
    throw std::invalid_argument("make_block_dataset: too few items for the history length");
  }
  RandomStream master(spec.seed);

  // items of each block, round-robin partition
  std::vector<std::vector<std::uint32_t>> block_items(spec.n_blocks);
  for (std::uint32_t i = 0; i < spec.n_items; ++i) {
    block_items[item_block(spec, i)].push_back(i);
  }

  Dataset d;
  d.n_users = spec.n_users;
  d.n_items = spec.n_items;
  for (std::uint32_t u = 0; u < spec.n_users; ++u) {
    RandomStream rng = master.substream(0x5E1EC7).substream(u);
    const auto& own = block_items[user_block(spec, u)];
    const std::uint32_t span = spec.max_interactions - spec.min_interactions + 1;
    const std::uint32_t history =
        spec.min_interactions + static_cast<std::uint32_t>(rng.next_below(span));
    std::vector<bool> taken(spec.n_items, false);
    std::uint32_t placed = 0;
    std::int64_t ts = 1;
    while (placed < history) {
      std::uint32_t item;
      if (!own.empty() && rng.next_double() < spec.in_block_prob) {
        item = own[rng.next_below(own.size())];
      } else {
        item = static_cast<std::uint32_t>(rng.next_below(spec.n_items));
      }
      if (taken[item]) continue;
      taken[item] = true;
      d.interactions.push_back({u, item, 1.0, ts++});
      ++placed;
    }
  }

  d.user_original_ids.resize(d.n_users);
  d.item_original_ids.resize(d.n_items);
  for (std::uint32_t u = 0; u < d.n_users; ++u) {
    d.user_original_ids[u] = u;
    d.user_index[u] = u;
  }
  for (std::uint32_t i = 0; i < d.n_items; ++i) {
    d.item_original_ids[i] = i;
    d.item_index[i] = i;
  }

  if (spec.block_attributes) {
    RandomStream arng = master.substream(0xA77B);
    d.user_attributes = DenseMatrix(d.n_users, spec.n_blocks);
    for (std::uint32_t u = 0; u < d.n_users; ++u) {
      for (std::uint32_t b = 0; b < spec.n_blocks; ++b) {
        d.user_attributes.at(u, b) =
            (b == user_block(spec, u) ? 1.0 : 0.0) + 0.05 * arng.next_normal();
      }
    }
    d.item_attributes = DenseMatrix(d.n_items, spec.n_blocks);
    for (std::uint32_t i = 0; i < d.n_items; ++i) {
      for (std::uint32_t b = 0; b < spec.n_blocks; ++b) {
        d.item_attributes.at(i, b) =
            (b == item_block(spec, i) ? 1.0 : 0.0) + 0.05 * arng.next_normal();
      }
    }
  } else {
    d.user_attributes = ones_attributes(d.n_users);
    d.item_attributes = ones_attributes(d.n_items);
  }
  return d;
}

}  // namespace fedrec
