#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedrec/model.hpp"
#include "fedrec/params.hpp"
#include "fedrec/rng.hpp"

namespace fedrec {

enum class NodeKind : std::uint8_t { user, item, constant };

/// How one graph node gets its raw embedding.
///  - user:     the user pathway over `attr` and row `entity` of the user
///              embedding table passed to the batch.
///  - item:     the item pathway over `attr` and row `entity` of
///              params.item_id_embeddings.
///  - constant: `constant_raw` is used verbatim (anonymous neighbors whose
///              embeddings arrived over the exchange); no gradient flows in.
struct NodeDesc {
  NodeKind kind = NodeKind::constant;
  std::uint32_t entity = 0;
  std::span<const double> attr;
  std::span<const double> constant_raw;
};

/// One ranking pair: score(user, pos) should exceed score(user, neg).
/// Indices refer to graph nodes; user_node must be a user node and
/// pos/neg item nodes.
struct ScoredTriple {
  std::uint32_t user_node = 0;
  std::uint32_t pos_node = 0;
  std::uint32_t neg_node = 0;
};

struct BprBatchResult {
  double loss = 0.0;
  std::size_t n_pairs = 0;
  // engaged only when gradients were requested
  SharedParams grads;
  DenseMatrix user_emb_grads;  // same shape as the user embedding table
};

/// Pairwise ranking loss over one propagated graph:
///   loss = sum_pairs -ln sigmoid(s_pos - s_neg)
///          + lambda * (|e_user|^2 + |e_pos|^2 + |e_neg|^2)   per pair,
/// where the regularized embeddings are the id embeddings of the pair's
/// endpoints. Scores are dot products of the layer-averaged propagated
/// embeddings. When want_grads is set the result carries full reverse-mode
/// gradients for every shared parameter group and for the user embedding
/// table; they are certified against central finite differences in the test
/// suite, so any change here must keep that check green.
BprBatchResult bpr_batch(const SharedParams& params, const DenseMatrix& user_embeddings,
                         const BipartiteGraph& graph, std::span<const NodeDesc> nodes,
                         std::span<const ScoredTriple> triples, double lambda,
                         unsigned gnn_layers, bool want_grads);

/// Loss-only evaluation (identical arithmetic, no gradient buffers); this is
/// what the finite-difference oracle probes.
double bpr_loss(const SharedParams& params, const DenseMatrix& user_embeddings,
                const BipartiteGraph& graph, std::span<const NodeDesc> nodes,
                std::span<const ScoredTriple> triples, double lambda, unsigned gnn_layers);

/// One uniform negative per positive, rejected against the user's train
/// items. Throws DataError when no negative item exists at all.
std::vector<std::uint32_t> sample_bpr_negatives(std::span<const std::uint32_t> train_items,
                                                std::uint32_t n_items, std::size_t count,
                                                RandomStream& rng);

}  // namespace fedrec
