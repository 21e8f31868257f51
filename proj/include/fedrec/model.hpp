#pragma once

#include <array>
#include <span>
#include <vector>

#include "fedrec/linalg.hpp"
#include "fedrec/params.hpp"

namespace fedrec {

/// The four embeddings one node carries before propagation, plus their
/// concatenation. e_raw is always the ordered concatenation
/// [E_f | E_fc | E_id | E_att], dimension 4d.
struct EmbeddingBundle {
  DenseVector e_f;
  DenseVector e_fc;
  DenseVector e_id;
  DenseVector e_att;
  DenseVector e_raw;
};

/// W * attr + b.
DenseVector attr_embed(const DenseVector& attr, const LinearLayer& linear);

/// L crossing layers applied to x0. Each layer computes
///   x_{l+1} = x0 * dot(x_l, w_l) + b_l + x_l
/// (the rank-1 term x0 x_l^T w_l collapses to x0 scaled by a dot product).
/// With all-zero layers this is exactly the identity on x0.
DenseVector feature_crossing(const DenseVector& x0, std::span<const CrossLayer> layers);

/// Softmax-over-tanh-gated convex combination of the three branches:
///   logit_i = tanh(dot(w_i, x_i) + b_i),  weight_i = softmax(logit)_i,
///   out = sum_i weight_i * x_i.
DenseVector attention_combine(const std::array<const DenseVector*, 3>& branches,
                              std::span<const AttentionGate> gates);

/// Forward intermediates for one node, kept for the manual backward pass.
struct PathwayCache {
  std::span<const double> attr;        // borrowed; caller keeps it alive
  std::vector<DenseVector> cross_xs;   // x_0 .. x_L (x_0 == e_f)
  std::array<double, 3> gate_logits;   // tanh values t_i
  std::array<double, 3> gate_weights;  // softmax weights
  EmbeddingBundle bundle;
};

/// Gradients flowing out of one node's pipeline.
struct PathwayGrads {
  DenseMatrix d_linear_weight;
  DenseVector d_linear_bias;
  std::vector<CrossLayer> d_cross;           // same shapes as the layers
  std::array<AttentionGate, 3> d_gates;
  DenseVector d_id;                          // gradient into the id embedding
};

/// Run the raw-embedding pipeline for one node: attr projection, feature
/// crossing, attention fusion, concatenation.
EmbeddingBundle raw_embedding(const PathwayParams& pathway, std::span<const double> attr,
                              std::span<const double> id_embedding);
PathwayCache raw_embedding_cached(const PathwayParams& pathway, std::span<const double> attr,
                                  std::span<const double> id_embedding);

/// Reverse-mode through the pipeline. g_raw is the 4d gradient on e_raw;
/// contributions accumulate into `grads` (which must be shaped like the
/// pathway).
void raw_embedding_backward(const PathwayParams& pathway, const PathwayCache& cache,
                            std::span<const double> g_raw, PathwayParams& grads,
                            std::span<double> g_id);

/// Rating prediction is the dot product of the final embeddings.
double predict_score(const DenseVector& user_final, const DenseVector& item_final);

/// Undirected bipartite interaction graph; node ids are caller-defined.
/// Builders only ever connect user-type to item-type nodes.
struct BipartiteGraph {
  std::vector<std::vector<std::uint32_t>> adj;

  std::size_t size() const { return adj.size(); }
  void add_edge(std::uint32_t a, std::uint32_t b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::size_t degree(std::uint32_t v) const { return adj[v].size(); }
};

/// Symmetric-normalized neighborhood averaging with no transforms and no
/// self-loops:
///   e^{(l+1)}_v = sum_{w in N(v)} e^{(l)}_w / sqrt(|N(v)| |N(w)|)
/// run n_layers times; the final embedding is the mean of layers 0..n_layers.
/// Degree-0 nodes keep their layer-0 embedding unchanged.
std::vector<DenseVector> lightgcn_propagate(const BipartiteGraph& g,
                                            std::span<const DenseVector> raw,
                                            unsigned n_layers);

/// Adjoint of lightgcn_propagate: maps gradients on the final embeddings to
/// gradients on the layer-0 embeddings. Because the propagation operator is
/// symmetric this is the same averaged power series applied to the incoming
/// gradients.
std::vector<DenseVector> lightgcn_propagate_adjoint(const BipartiteGraph& g,
                                                    std::span<const DenseVector> g_final,
                                                    unsigned n_layers);

}  // namespace fedrec
