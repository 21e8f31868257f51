#pragma once

#include <cstdint>

#include "fedrec/dataset.hpp"

namespace fedrec {

/// Synthetic implicit-feedback dataset with planted preference blocks: users
/// and items are partitioned into `n_blocks` groups and each user draws most
/// of its interactions from its own block. Block structure makes user
/// clustering informative, which is what the personalization-benefit checks
/// exercise.
struct BlockDatasetSpec {
  std::uint32_t n_users = 200;
  std::uint32_t n_items = 300;
  std::uint32_t n_blocks = 4;
  std::uint32_t min_interactions = 8;   // per user; must be >= 3 for the split
  std::uint32_t max_interactions = 20;  // inclusive
  double in_block_prob = 0.9;           // chance a draw stays in the user's block
  bool block_attributes = true;         // one-hot block attrs on users and items
  std::uint64_t seed = 1;
};

Dataset make_block_dataset(const BlockDatasetSpec& spec);

/// Block id of a user / item under the spec's round-robin partition.
std::uint32_t user_block(const BlockDatasetSpec& spec, std::uint32_t user);
std::uint32_t item_block(const BlockDatasetSpec& spec, std::uint32_t item);

}  // namespace fedrec
