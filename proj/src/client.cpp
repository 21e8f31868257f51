#include "fedrec/client.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "fedrec/errors.hpp"

namespace fedrec {

void PersonalizationWeights::validate() const {
  if (local < 0.0 || cluster < 0.0 || global < 0.0) {
    throw ConfigError("personalization weights must be nonnegative");
  }
  const double sum = local + cluster + global;
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ConfigError("personalization weights must sum to 1 (got " + std::to_string(sum) + ")");
  }
}

namespace {

template <class Spans>
void mix3_spans(const Spans& a, const Spans& b, const Spans& c,
                std::vector<std::span<double>>& out, const PersonalizationWeights& w) {
  if (a.size() != out.size() || b.size() != out.size() || c.size() != out.size()) {
    throw std::invalid_argument("mix_personalized: parameter group shape mismatch");
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    if (a[g].size() != out[g].size() || b[g].size() != out[g].size() ||
        c[g].size() != out[g].size()) {
      throw std::invalid_argument("mix_personalized: parameter array shape mismatch");
    }
    for (std::size_t i = 0; i < out[g].size(); ++i) {
      out[g][i] = w.local * a[g][i] + w.cluster * b[g][i] + w.global * c[g][i];
    }
  }
}

}  // namespace

SharedParams mix_personalized(const SharedParams& local, const SharedParams& cluster,
                              const SharedParams& global, const PersonalizationWeights& w) {
  w.validate();
  SharedParams out = local;  // shape template
  auto spans = param_arrays(out);
  mix3_spans(param_arrays(local), param_arrays(cluster), param_arrays(global), spans, w);
  return out;
}

PathwayParams mix_pathway(const PathwayParams& local, const PathwayParams& cluster,
                          const PathwayParams& global, const PersonalizationWeights& w) {
  w.validate();
  PathwayParams out = local;
  auto spans = pathway_arrays(out);
  mix3_spans(pathway_arrays(local), pathway_arrays(cluster), pathway_arrays(global), spans, w);
  return out;
}

NeighborRequest prepare_neighbor_request(const DenseVector& raw_user_embedding,
                                         std::span<const std::uint32_t> train_items,
                                         std::uint64_t hash_key, RandomStream& rng,
                                         double noise_scale) {
  NeighborRequest req;
  req.item_hashes.reserve(train_items.size());
  for (std::uint32_t item : train_items) {
    req.item_hashes.push_back(keyed_hash64(hash_key, item));
  }
  req.noised_embedding = raw_user_embedding;
  if (noise_scale != 0.0) {
    for (double& v : req.noised_embedding.values) v += rng.next_laplace(noise_scale);
  }
  return req;
}

std::vector<NeighborInfo> collect_neighbors(std::span<const std::uint32_t> train_items,
                                            const NeighborRequest& request,
                                            const NeighborResponse& response,
                                            std::size_t neighbor_cap) {
  if (request.item_hashes.size() != train_items.size()) {
    throw std::invalid_argument("collect_neighbors: request/item count mismatch");
  }
  std::unordered_map<std::uint64_t, std::uint32_t> hash_to_item;
  for (std::size_t i = 0; i < train_items.size(); ++i) {
    hash_to_item[request.item_hashes[i]] = train_items[i];
  }

  std::vector<NeighborInfo> neighbors;
  std::unordered_map<std::uint64_t, std::size_t> by_token;
  for (const auto& per_item : response.items) {
    const auto it = hash_to_item.find(per_item.item_hash);
    if (it == hash_to_item.end()) continue;  // not one of ours
    for (const auto& [token, embedding] : per_item.neighbors) {
      auto found = by_token.find(token);
      if (found == by_token.end()) {
        if (neighbors.size() >= neighbor_cap) continue;  // first by response order wins
        by_token.emplace(token, neighbors.size());
        neighbors.push_back({token, embedding, {it->second}});
      } else {
        auto& shared = neighbors[found->second].shared_items;
        if (std::find(shared.begin(), shared.end(), it->second) == shared.end()) {
          shared.push_back(it->second);
        }
      }
    }
  }
  return neighbors;
}

LocalGraph build_local_graph(std::span<const std::uint32_t> train_items,
                             std::span<const NeighborInfo> neighbors) {
  if (train_items.empty()) {
    throw std::invalid_argument("build_local_graph: center user has no train items");
  }
  LocalGraph g;
  g.item_ids.assign(train_items.begin(), train_items.end());
  g.neighbors.assign(neighbors.begin(), neighbors.end());
  const std::size_t n_nodes = 1 + g.item_ids.size() + g.neighbors.size();
  g.adj.adj.resize(n_nodes);

  std::unordered_map<std::uint32_t, std::uint32_t> item_node;
  for (std::size_t i = 0; i < g.item_ids.size(); ++i) {
    item_node[g.item_ids[i]] = g.item_node(i);
    g.adj.add_edge(0, g.item_node(i));
  }
  for (std::size_t j = 0; j < g.neighbors.size(); ++j) {
    const auto node = static_cast<std::uint32_t>(1 + g.item_ids.size() + j);
    for (std::uint32_t item : g.neighbors[j].shared_items) {
      const auto it = item_node.find(item);
      if (it != item_node.end()) g.adj.add_edge(node, it->second);
    }
  }
  return g;
}

namespace {

// descriptors for the local graph's nodes plus one isolated node per
// sampled negative; node order: center, items, neighbors, negatives
struct BatchLayout {
  std::vector<NodeDesc> nodes;
  BipartiteGraph graph;
  std::vector<ScoredTriple> triples;
};

BatchLayout layout_batch(const LocalGraph& g, const ClientContext& ctx,
                         std::span<const std::uint32_t> negatives) {
  BatchLayout out;
  const Dataset& data = *ctx.data;
  const std::size_t base = g.adj.size();
  out.graph = g.adj;
  out.graph.adj.resize(base + negatives.size());

  out.nodes.resize(base + negatives.size());
  out.nodes[0] = {NodeKind::user, 0, data.user_attributes.row(ctx.user), {}};
  for (std::size_t i = 0; i < g.item_ids.size(); ++i) {
    out.nodes[g.item_node(i)] = {NodeKind::item, g.item_ids[i],
                                 data.item_attributes.row(g.item_ids[i]), {}};
  }
  for (std::size_t j = 0; j < g.neighbors.size(); ++j) {
    out.nodes[1 + g.item_ids.size() + j] = {NodeKind::constant, 0, {},
                                            g.neighbors[j].embedding.span()};
  }
  out.triples.resize(negatives.size());
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    const auto neg_node = static_cast<std::uint32_t>(base + i);
    out.nodes[neg_node] = {NodeKind::item, negatives[i],
                           data.item_attributes.row(negatives[i]), {}};
    out.triples[i] = {0, g.item_node(i), neg_node};
  }
  return out;
}

}  // namespace

LossAndGrads bpr_loss_and_grads(const SharedParams& params, const LocalState& state,
                                const LocalGraph& graph, const ClientContext& ctx,
                                RandomStream& rng) {
  const auto negatives = sample_bpr_negatives(graph.item_ids, ctx.data->n_items,
                                              graph.item_ids.size(), rng);
  const BatchLayout batch = layout_batch(graph, ctx, negatives);

  DenseMatrix user_embs(1, state.user_id_embedding.dim());
  std::copy(state.user_id_embedding.values.begin(), state.user_id_embedding.values.end(),
            user_embs.row(0).begin());

  BprBatchResult r = bpr_batch(params, user_embs, batch.graph, batch.nodes, batch.triples,
                               ctx.lambda, ctx.gnn_layers, /*want_grads=*/true);
  LossAndGrads out;
  out.loss = r.loss;
  out.n_pairs = r.n_pairs;
  out.param_grads = std::move(r.grads);
  out.user_embedding_grad = DenseVector(state.user_id_embedding.dim());
  std::copy(r.user_emb_grads.row(0).begin(), r.user_emb_grads.row(0).end(),
            out.user_embedding_grad.values.begin());
  return out;
}

ClientUpdate local_train(const SharedParams& start, LocalState& state, const LocalGraph& graph,
                         const ClientContext& ctx, unsigned epochs, double lr,
                         std::uint32_t cluster_id, double aggregation_weight,
                         RandomStream& rng) {
  if (aggregation_weight <= 0.0) {
    throw std::invalid_argument("local_train: aggregation weight must be positive");
  }
  SharedParams params = start;
  double last_loss = 0.0;
  for (unsigned epoch = 0; epoch < epochs; ++epoch) {
    LossAndGrads lg = bpr_loss_and_grads(params, state, graph, ctx, rng);
    last_loss = lg.n_pairs > 0 ? lg.loss / static_cast<double>(lg.n_pairs) : 0.0;
    auto dst = param_arrays(params);
    const auto src = param_arrays(lg.param_grads);
    for (std::size_t g = 0; g < dst.size(); ++g) {
      for (std::size_t i = 0; i < dst[g].size(); ++i) dst[g][i] -= lr * src[g][i];
    }
    for (std::size_t i = 0; i < state.user_id_embedding.dim(); ++i) {
      state.user_id_embedding[i] -= lr * lg.user_embedding_grad[i];
    }
  }

  ClientUpdate update;
  update.noised_user_embedding =
      raw_embedding(params.user_pathway, ctx.data->user_attributes.row(ctx.user),
                    state.user_id_embedding.span())
          .e_raw;
  if (ctx.noise_scale != 0.0) {
    for (double& v : update.noised_user_embedding.values) {
      v += rng.next_laplace(ctx.noise_scale);
    }
  }
  update.weight = aggregation_weight;
  update.client_cluster = cluster_id;
  update.last_epoch_loss = last_loss;
  state.model = params;
  update.params = std::move(params);
  return update;
}

}  // namespace fedrec
