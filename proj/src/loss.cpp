#include "fedrec/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fedrec/errors.hpp"

namespace fedrec {

namespace {

// -ln sigmoid(x) = softplus(-x), computed without overflow on either tail
double neg_log_sigmoid(double x) {
  if (x >= 0.0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

BprBatchResult bpr_batch(const SharedParams& params, const DenseMatrix& user_embeddings,
                         const BipartiteGraph& graph, std::span<const NodeDesc> nodes,
                         std::span<const ScoredTriple> triples, double lambda,
                         unsigned gnn_layers, bool want_grads) {
  if (nodes.size() != graph.size()) {
    throw std::invalid_argument("bpr_batch: node/graph size mismatch");
  }
  const ModelDims dims = dims_of(params);
  const std::size_t d = dims.d;

  // forward: raw bundles per node (with caches if we will run backward)
  std::vector<PathwayCache> caches(want_grads ? nodes.size() : 0);
  std::vector<DenseVector> raws(nodes.size());
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const NodeDesc& nd = nodes[v];
    switch (nd.kind) {
      case NodeKind::user: {
        const auto id_emb = user_embeddings.row(nd.entity);
        if (want_grads) {
          caches[v] = raw_embedding_cached(params.user_pathway, nd.attr, id_emb);
          raws[v] = caches[v].bundle.e_raw;
        } else {
          raws[v] = raw_embedding(params.user_pathway, nd.attr, id_emb).e_raw;
        }
        break;
      }
      case NodeKind::item: {
        const auto id_emb = params.item_id_embeddings.row(nd.entity);
        if (want_grads) {
          caches[v] = raw_embedding_cached(params.item_pathway, nd.attr, id_emb);
          raws[v] = caches[v].bundle.e_raw;
        } else {
          raws[v] = raw_embedding(params.item_pathway, nd.attr, id_emb).e_raw;
        }
        break;
      }
      case NodeKind::constant: {
        if (nd.constant_raw.size() != 4 * d) {
          throw std::invalid_argument("bpr_batch: constant node has wrong dimension");
        }
        raws[v] = DenseVector(4 * d);
        std::copy(nd.constant_raw.begin(), nd.constant_raw.end(), raws[v].values.begin());
        break;
      }
    }
  }

  const std::vector<DenseVector> finals = lightgcn_propagate(graph, raws, gnn_layers);

  BprBatchResult result;
  result.n_pairs = triples.size();
  std::vector<DenseVector> g_final;
  if (want_grads) {
    result.grads = zero_params(dims);
    result.user_emb_grads = DenseMatrix(user_embeddings.rows, user_embeddings.cols);
    g_final.assign(nodes.size(), DenseVector(4 * d));
  }

  for (const ScoredTriple& t : triples) {
    const NodeDesc& nu = nodes[t.user_node];
    const NodeDesc& np = nodes[t.pos_node];
    const NodeDesc& nn = nodes[t.neg_node];
    if (nu.kind != NodeKind::user || np.kind != NodeKind::item || nn.kind != NodeKind::item) {
      throw std::invalid_argument("bpr_batch: triple endpoints have wrong node kinds");
    }
    const double s_pos = dot(finals[t.user_node], finals[t.pos_node]);
    const double s_neg = dot(finals[t.user_node], finals[t.neg_node]);
    const double x = s_pos - s_neg;
    result.loss += neg_log_sigmoid(x);
    result.loss += lambda * (squared_norm(user_embeddings.row(nu.entity)) +
                             squared_norm(params.item_id_embeddings.row(np.entity)) +
                             squared_norm(params.item_id_embeddings.row(nn.entity)));
    if (!want_grads) continue;

    const double g_x = -sigmoid(-x);  // d loss / d (s_pos - s_neg)
    axpy(g_x, finals[t.pos_node].span(), g_final[t.user_node].span());
    axpy(-g_x, finals[t.neg_node].span(), g_final[t.user_node].span());
    axpy(g_x, finals[t.user_node].span(), g_final[t.pos_node].span());
    axpy(-g_x, finals[t.user_node].span(), g_final[t.neg_node].span());

    axpy(2.0 * lambda, user_embeddings.row(nu.entity),
         result.user_emb_grads.row(nu.entity));
    axpy(2.0 * lambda, params.item_id_embeddings.row(np.entity),
         result.grads.item_id_embeddings.row(np.entity));
    axpy(2.0 * lambda, params.item_id_embeddings.row(nn.entity),
         result.grads.item_id_embeddings.row(nn.entity));
  }

  if (!std::isfinite(result.loss)) {
    throw NumericError("bpr_batch: non-finite loss");
  }
  if (!want_grads) return result;

  // pull gradients back through propagation, then through each node pipeline
  const std::vector<DenseVector> g_raw = lightgcn_propagate_adjoint(graph, g_final, gnn_layers);
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const NodeDesc& nd = nodes[v];
    switch (nd.kind) {
      case NodeKind::user:
        raw_embedding_backward(params.user_pathway, caches[v], g_raw[v].span(),
                               result.grads.user_pathway,
                               result.user_emb_grads.row(nd.entity));
        break;
      case NodeKind::item:
        raw_embedding_backward(params.item_pathway, caches[v], g_raw[v].span(),
                               result.grads.item_pathway,
                               result.grads.item_id_embeddings.row(nd.entity));
        break;
      case NodeKind::constant:
        break;  // received embeddings are opaque inputs
    }
  }
  return result;
}

double bpr_loss(const SharedParams& params, const DenseMatrix& user_embeddings,
                const BipartiteGraph& graph, std::span<const NodeDesc> nodes,
                std::span<const ScoredTriple> triples, double lambda, unsigned gnn_layers) {
  return bpr_batch(params, user_embeddings, graph, nodes, triples, lambda, gnn_layers,
                   /*want_grads=*/false)
      .loss;
}

std::vector<std::uint32_t> sample_bpr_negatives(std::span<const std::uint32_t> train_items,
                                                std::uint32_t n_items, std::size_t count,
                                                RandomStream& rng) {
  if (train_items.size() >= n_items) {
    throw DataError("sample_bpr_negatives: user interacted with every item, no negative exists");
  }
  std::vector<std::uint32_t> sorted(train_items.begin(), train_items.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::uint32_t> negs(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t candidate;
    do {
      candidate = static_cast<std::uint32_t>(rng.next_below(n_items));
    } while (std::binary_search(sorted.begin(), sorted.end(), candidate));
    negs[i] = candidate;
  }
  return negs;
}

}  // namespace fedrec
