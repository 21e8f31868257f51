#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fedrec/dataset.hpp"
#include "fedrec/loss.hpp"
#include "fedrec/params.hpp"
#include "fedrec/rng.hpp"

namespace fedrec {

/// Convex mixing weights for (local, cluster, global). Must be nonnegative
/// and sum to 1 within 1e-12.
struct PersonalizationWeights {
  double local = 1.0 / 3.0;
  double cluster = 1.0 / 3.0;
  double global = 1.0 / 3.0;

  void validate() const;
};

/// One participant's round output. The user id embedding itself never
/// appears here; only the derived raw embedding, noised, rides along in the
/// designated slot.
struct ClientUpdate {
  SharedParams params;
  DenseVector noised_user_embedding;  // 4d raw embedding + optional Laplace noise
  double weight = 0.0;                // aggregation mass: train-interaction count
  std::uint32_t client_cluster = 0;   // cluster id echo
  double last_epoch_loss = 0.0;       // per-pair loss of the final local epoch
};

/// An anonymous co-interacting user discovered through the exchange.
struct NeighborInfo {
  std::uint64_t token = 0;                // per-round, unlinkable across rounds
  DenseVector embedding;                  // their noised 4d raw embedding
  std::vector<std::uint32_t> shared_items;  // this client's dense item ids
};

/// What a client sends to the exchange: keyed hashes of its train items plus
/// its noised raw embedding. Raw ids never cross this boundary.
struct NeighborRequest {
  std::vector<std::uint64_t> item_hashes;  // aligned with the client's train items
  DenseVector noised_embedding;
};

/// What comes back: per requested hash, the other registrants under it.
struct NeighborResponse {
  struct PerItem {
    std::uint64_t item_hash = 0;
    std::vector<std::pair<std::uint64_t, DenseVector>> neighbors;  // (token, embedding)
  };
  std::vector<PerItem> items;
};

/// One user's private state. The model copy is lazily materialized: a user
/// that never trained implicitly holds the run's initial parameters.
struct LocalState {
  DenseVector user_id_embedding;  // d, never uploaded raw
  std::optional<SharedParams> model;
  std::vector<NeighborInfo> neighbors;  // from the latest exchange
};

/// The local interaction graph: node 0 is the center user, then one node per
/// train item, then one per anonymous neighbor.
struct LocalGraph {
  std::vector<std::uint32_t> item_ids;     // dense ids; node index = 1 + position
  std::vector<NeighborInfo> neighbors;     // node index = 1 + items + position
  BipartiteGraph adj;

  std::uint32_t item_node(std::size_t pos) const { return 1 + static_cast<std::uint32_t>(pos); }
};

/// theta = a1*local + a2*cluster + a3*global, elementwise over every group
/// including the item embedding table.
SharedParams mix_personalized(const SharedParams& local, const SharedParams& cluster,
                              const SharedParams& global, const PersonalizationWeights& w);
PathwayParams mix_pathway(const PathwayParams& local, const PathwayParams& cluster,
                          const PathwayParams& global, const PersonalizationWeights& w);

/// Hash the train items under the run key and noise the raw embedding
/// (zero-mean Laplace per coordinate; scale 0 leaves it untouched).
NeighborRequest prepare_neighbor_request(const DenseVector& raw_user_embedding,
                                         std::span<const std::uint32_t> train_items,
                                         std::uint64_t hash_key, RandomStream& rng,
                                         double noise_scale);

/// Translate a response into neighbor records: tokens are deduplicated (one
/// node per anonymous user, possibly sharing several items) and the neighbor
/// list is capped in response order.
std::vector<NeighborInfo> collect_neighbors(std::span<const std::uint32_t> train_items,
                                            const NeighborRequest& request,
                                            const NeighborResponse& response,
                                            std::size_t neighbor_cap);

/// Bipartite graph of the center user, its train items, and the neighbors
/// attached to the shared items they co-interacted with.
LocalGraph build_local_graph(std::span<const std::uint32_t> train_items,
                             std::span<const NeighborInfo> neighbors);

struct ClientContext {
  const Dataset* data = nullptr;
  std::uint32_t user = 0;
  double lambda = 1e-4;
  unsigned gnn_layers = 2;
  double noise_scale = 0.0;
};

/// The spec'd per-client objective evaluation: sample one negative per
/// positive, run the batch, return loss and gradients (shared params plus
/// the user id embedding).
struct LossAndGrads {
  double loss = 0.0;
  std::size_t n_pairs = 0;
  SharedParams param_grads;
  DenseVector user_embedding_grad;
};
LossAndGrads bpr_loss_and_grads(const SharedParams& params, const LocalState& state,
                                const LocalGraph& graph, const ClientContext& ctx,
                                RandomStream& rng);

/// `epochs` rounds of bpr_loss_and_grads + plain SGD on the shared params
/// and the private user embedding, then package the update. Mutates `state`
/// (trained model copy, updated user embedding).
ClientUpdate local_train(const SharedParams& start, LocalState& state, const LocalGraph& graph,
                         const ClientContext& ctx, unsigned epochs, double lr,
                         std::uint32_t cluster_id, double aggregation_weight,
                         RandomStream& rng);

}  // namespace fedrec
