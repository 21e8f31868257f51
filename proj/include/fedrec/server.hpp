#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedrec/client.hpp"
#include "fedrec/linalg.hpp"
#include "fedrec/params.hpp"
#include "fedrec/rng.hpp"

namespace fedrec {

/// Server-side view of the user population after clustering.
struct ClusterAssignment {
  std::vector<std::uint32_t> assignment;  // user -> cluster id in [0,K)
  DenseMatrix centroids;                  // K x dim
  double objective = 0.0;                 // within-cluster sum of squared distances
  unsigned iterations = 0;

  std::uint32_t n_clusters() const { return static_cast<std::uint32_t>(centroids.rows); }
  std::vector<std::vector<std::uint32_t>> members() const;
  std::vector<std::size_t> sizes() const;
};

/// Single-cluster assignment (round 1, and the non-clustered modes).
ClusterAssignment single_cluster(std::uint32_t n_users, std::size_t dim);

/// k-means++ seeded Lloyd iterations until the assignment reaches a fixpoint
/// or max_iter passes. Empty clusters are repaired by reseeding to the point
/// farthest from its assigned centroid. The WCSS objective is checked to be
/// non-increasing every iteration.
ClusterAssignment kmeans_cluster(const DenseMatrix& points, std::uint32_t k, unsigned max_iter,
                                 RandomStream& rng);

/// Pick `budget` users: per-cluster quotas by largest-remainder apportionment
/// of cluster sizes (every nonempty cluster gets at least one slot when the
/// budget allows), then uniform sampling without replacement inside each
/// cluster. The result is sorted ascending. Quotas always sum to budget.
std::vector<std::uint32_t> select_participants(const ClusterAssignment& clusters,
                                               std::uint32_t budget, RandomStream& rng);

/// Weighted average of the updates' parameters: sum w_i theta_i / sum w_i,
/// elementwise over every group, summed in list order.
SharedParams aggregate(std::span<const ClientUpdate> updates);

/// The anonymized exchange table: per item hash, the registered
/// (token, embedding) pairs. Tokens are drawn fresh each round.
struct NeighborIndex {
  struct Entry {
    std::uint64_t token;
    const DenseVector* embedding;  // borrowed from the requests
    std::uint32_t client;          // internal bookkeeping, never serialized
  };
  std::vector<std::uint64_t> tokens;  // per client, this round
  std::vector<std::pair<std::uint64_t, std::vector<Entry>>> by_hash;
};

struct ExchangeResult {
  NeighborIndex index;
  std::vector<NeighborResponse> responses;  // aligned with the requests
};

/// Match all requests through the hash index and answer each client with the
/// other registrants under each of its item hashes, excluding itself, capped
/// per item (uniform subsample when over the cap).
ExchangeResult build_neighbor_index(std::span<const NeighborRequest> requests, std::size_t cap,
                                    RandomStream& rng);

}  // namespace fedrec
