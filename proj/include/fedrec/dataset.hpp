#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "fedrec/linalg.hpp"
#include "fedrec/rng.hpp"

namespace fedrec {

struct InteractionRecord {
  std::uint32_t user = 0;  // dense index in [0, n_users)
  std::uint32_t item = 0;  // dense index in [0, n_items)
  double rating = 0.0;     // kept for the data model; training is implicit-feedback
  std::int64_t timestamp = 0;
};

/// Interaction log plus optional attribute tables, re-indexed to dense ids.
/// Users with fewer than 3 interactions are dropped at load time (the
/// leave-one-out split needs test + validation + at least one train record),
/// then ids are re-densified, so any item seen only through dropped users
/// disappears as well.
struct Dataset {
  std::uint32_t n_users = 0;
  std::uint32_t n_items = 0;
  std::vector<InteractionRecord> interactions;  // retained records, file order

  // N x d_ua / M x d_ia; defaults to the all-ones 1-dim table when no
  // attribute file is supplied so one code path serves every dataset.
  DenseMatrix user_attributes;
  DenseMatrix item_attributes;

  std::vector<std::int64_t> user_original_ids;  // dense -> original
  std::vector<std::int64_t> item_original_ids;
  std::unordered_map<std::int64_t, std::uint32_t> user_index;  // original -> dense
  std::unordered_map<std::int64_t, std::uint32_t> item_index;

  std::uint32_t dropped_users = 0;  // filtered for having < 3 interactions
};

struct SplitDataset {
  // indexed by dense user id
  std::vector<std::vector<InteractionRecord>> train;
  std::vector<InteractionRecord> validation;
  std::vector<InteractionRecord> test;

  std::size_t n_users() const { return train.size(); }
};

enum class InteractionFormat { tsv_rating };

/// Load a user<TAB>item<TAB>rating<TAB>timestamp file (MovieLens u.data
/// layout), assign dense contiguous ids in first-appearance order over the
/// retained records, and synthesize all-ones attribute tables.
Dataset load_interactions(const std::string& path,
                          InteractionFormat format = InteractionFormat::tsv_rating);

/// Attach a headerless CSV attribute table (row i = dense id i) to either
/// side. Throws DataError when the row count does not match.
DenseMatrix load_attributes(const std::string& path, std::uint32_t expected_rows);

/// N x 1 all-ones table: the degenerate attribute pathway used when a
/// dataset carries no side information.
DenseMatrix ones_attributes(std::uint32_t rows);

/// Chronological leave-one-out: per user, ascending timestamp with ties
/// broken by file order; last record -> test, second-to-last -> validation,
/// remainder -> train.
SplitDataset leave_one_out_split(const Dataset& d);

/// n distinct items the user never interacted with (train, validation and
/// test all excluded), uniform without replacement, deterministic under rng.
std::vector<std::uint32_t> sample_eval_negatives(std::uint32_t user, const Dataset& d,
                                                 const SplitDataset& split, std::uint32_t n,
                                                 RandomStream& rng);

/// Distinct train items of a user in first-occurrence order.
std::vector<std::uint32_t> distinct_train_items(const SplitDataset& split, std::uint32_t user);

// plain-file writers shared by the synthetic generator and tests
void write_interactions_tsv(const Dataset& d, const std::string& path);
void write_attributes_csv(const DenseMatrix& table, const std::string& path);

}  // namespace fedrec
