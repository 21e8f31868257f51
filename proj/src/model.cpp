#include "fedrec/model.hpp"

#include <cmath>
#include <stdexcept>

namespace fedrec {

namespace {

void check_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

// logits are tanh-bounded so the plain exp is safe; max-shift kept anyway so
// the uniform-gate case yields exactly 1/3 per weight
std::array<double, 3> softmax3(const std::array<double, 3>& t) {
  const double m = std::max(t[0], std::max(t[1], t[2]));
  std::array<double, 3> e{std::exp(t[0] - m), std::exp(t[1] - m), std::exp(t[2] - m)};
  const double sum = e[0] + e[1] + e[2];
  return {e[0] / sum, e[1] / sum, e[2] / sum};
}

}  // namespace

DenseVector attr_embed(const DenseVector& attr, const LinearLayer& linear) {
  check_dim(linear.weight.cols, attr.dim(), "attr_embed");
  DenseVector out = matvec(linear.weight, attr);
  for (std::size_t i = 0; i < out.dim(); ++i) out[i] += linear.bias[i];
  return out;
}

DenseVector feature_crossing(const DenseVector& x0, std::span<const CrossLayer> layers) {
  DenseVector x = x0;
  for (const CrossLayer& layer : layers) {
    check_dim(layer.w.dim(), x0.dim(), "feature_crossing");
    const double c = dot(x, layer.w);
    DenseVector next(x0.dim());
    for (std::size_t i = 0; i < x0.dim(); ++i) next[i] = x0[i] * c + layer.b[i] + x[i];
    x = std::move(next);
  }
  return x;
}

DenseVector attention_combine(const std::array<const DenseVector*, 3>& branches,
                              std::span<const AttentionGate> gates) {
  if (gates.size() != 3) throw std::invalid_argument("attention_combine: need 3 gates");
  std::array<double, 3> logits;
  for (int i = 0; i < 3; ++i) {
    check_dim(gates[i].w.dim(), branches[i]->dim(), "attention_combine");
    logits[i] = std::tanh(dot(gates[i].w, *branches[i]) + gates[i].bias);
  }
  const auto weights = softmax3(logits);
  DenseVector out(branches[0]->dim());
  for (int i = 0; i < 3; ++i) axpy(weights[i], branches[i]->span(), out.span());
  return out;
}

namespace {

PathwayCache run_pathway(const PathwayParams& pathway, std::span<const double> attr,
                         std::span<const double> id_embedding) {
  PathwayCache cache;
  cache.attr = attr;
  const std::size_t d = pathway.attr_linear.bias.dim();
  check_dim(pathway.attr_linear.weight.cols, attr.size(), "raw_embedding attr");
  check_dim(id_embedding.size(), d, "raw_embedding id");

  EmbeddingBundle& b = cache.bundle;
  b.e_f = DenseVector(d);
  for (std::size_t r = 0; r < d; ++r) {
    b.e_f[r] = dot(pathway.attr_linear.weight.row(r), attr) + pathway.attr_linear.bias[r];
  }

  // crossing, keeping every x_l for the backward pass
  cache.cross_xs.reserve(pathway.cross_layers.size() + 1);
  cache.cross_xs.push_back(b.e_f);
  for (const CrossLayer& layer : pathway.cross_layers) {
    const DenseVector& x = cache.cross_xs.back();
    const double c = dot(x, layer.w);
    DenseVector next(d);
    for (std::size_t i = 0; i < d; ++i) next[i] = b.e_f[i] * c + layer.b[i] + x[i];
    cache.cross_xs.push_back(std::move(next));
  }
  b.e_fc = cache.cross_xs.back();

  b.e_id = DenseVector(d);
  for (std::size_t i = 0; i < d; ++i) b.e_id[i] = id_embedding[i];

  const std::array<const DenseVector*, 3> branches{&b.e_f, &b.e_fc, &b.e_id};
  for (int i = 0; i < 3; ++i) {
    cache.gate_logits[i] =
        std::tanh(dot(pathway.attention_gates[i].w, *branches[i]) +
                  pathway.attention_gates[i].bias);
  }
  cache.gate_weights = softmax3(cache.gate_logits);
  b.e_att = DenseVector(d);
  for (int i = 0; i < 3; ++i) axpy(cache.gate_weights[i], branches[i]->span(), b.e_att.span());

  b.e_raw = DenseVector(4 * d);
  for (std::size_t i = 0; i < d; ++i) {
    b.e_raw[i] = b.e_f[i];
    b.e_raw[d + i] = b.e_fc[i];
    b.e_raw[2 * d + i] = b.e_id[i];
    b.e_raw[3 * d + i] = b.e_att[i];
  }
  return cache;
}

}  // namespace

EmbeddingBundle raw_embedding(const PathwayParams& pathway, std::span<const double> attr,
                              std::span<const double> id_embedding) {
  return run_pathway(pathway, attr, id_embedding).bundle;
}

PathwayCache raw_embedding_cached(const PathwayParams& pathway, std::span<const double> attr,
                                  std::span<const double> id_embedding) {
  return run_pathway(pathway, attr, id_embedding);
}

void raw_embedding_backward(const PathwayParams& pathway, const PathwayCache& cache,
                            std::span<const double> g_raw, PathwayParams& grads,
                            std::span<double> g_id_out) {
  const std::size_t d = pathway.attr_linear.bias.dim();
  check_dim(g_raw.size(), 4 * d, "raw_embedding_backward");

  DenseVector g_f(d), g_fc(d), g_id(d);
  std::span<const double> g_att = g_raw.subspan(3 * d, d);
  for (std::size_t i = 0; i < d; ++i) {
    g_f[i] = g_raw[i];
    g_fc[i] = g_raw[d + i];
    g_id[i] = g_raw[2 * d + i];
  }

  // attention: E_att = sum_i w_i x_i with w = softmax(tanh(z)), z_i scalar.
  // dL/dt_i = w_i (s_i - sum_j w_j s_j) where s_i = dot(g_att, x_i).
  const std::array<const DenseVector*, 3> branches{&cache.bundle.e_f, &cache.bundle.e_fc,
                                                   &cache.bundle.e_id};
  std::array<double, 3> s;
  for (int i = 0; i < 3; ++i) s[i] = dot(g_att, branches[i]->span());
  const double s_bar = cache.gate_weights[0] * s[0] + cache.gate_weights[1] * s[1] +
                       cache.gate_weights[2] * s[2];
  std::array<DenseVector*, 3> branch_grads{&g_f, &g_fc, &g_id};
  for (int i = 0; i < 3; ++i) {
    const double dt = cache.gate_weights[i] * (s[i] - s_bar);
    const double dz = dt * (1.0 - cache.gate_logits[i] * cache.gate_logits[i]);
    axpy(dz, branches[i]->span(), grads.attention_gates[i].w.span());
    grads.attention_gates[i].bias += dz;
    // direct convex-combination path plus the gate path
    axpy(cache.gate_weights[i], g_att, branch_grads[i]->span());
    axpy(dz, pathway.attention_gates[i].w.span(), branch_grads[i]->span());
  }

  // crossing: walk layers backwards; x0 feeds every layer's rank-1 term as
  // well as being the chain's head, so its contributions accumulate.
  DenseVector g_cur = g_fc;
  DenseVector g_x0_extra(d);
  for (std::size_t l = pathway.cross_layers.size(); l-- > 0;) {
    const CrossLayer& layer = pathway.cross_layers[l];
    const DenseVector& x_l = cache.cross_xs[l];
    const DenseVector& x0 = cache.cross_xs[0];
    axpy(1.0, g_cur.span(), grads.cross_layers[l].b.span());
    const double c = dot(x_l, layer.w);
    const double gc = dot(g_cur, x0);
    axpy(gc, x_l.span(), grads.cross_layers[l].w.span());
    axpy(c, g_cur.span(), g_x0_extra.span());
    // into x_l: identity path + w_l * dot(g, x0)
    axpy(gc, layer.w.span(), g_cur.span());
  }
  axpy(1.0, g_x0_extra.span(), g_cur.span());
  axpy(1.0, g_cur.span(), g_f.span());

  // linear: E_f = W a + b
  for (std::size_t r = 0; r < d; ++r) {
    axpy(g_f[r], cache.attr, grads.attr_linear.weight.row(r));
  }
  axpy(1.0, g_f.span(), grads.attr_linear.bias.span());

  axpy(1.0, g_id.span(), g_id_out);
}

double predict_score(const DenseVector& user_final, const DenseVector& item_final) {
  return dot(user_final, item_final);
}

namespace {

// one application of the symmetric-normalized adjacency
void apply_norm_adj(const BipartiteGraph& g, std::span<const double> inv_sqrt_deg,
                    std::span<const DenseVector> in, std::vector<DenseVector>& out) {
  for (std::size_t v = 0; v < g.size(); ++v) {
    DenseVector& acc = out[v];
    fill(acc.span(), 0.0);
    for (std::uint32_t w : g.adj[v]) {
      axpy(inv_sqrt_deg[v] * inv_sqrt_deg[w], in[w].span(), acc.span());
    }
  }
}

std::vector<DenseVector> averaged_power_series(const BipartiteGraph& g,
                                               std::span<const DenseVector> layer0,
                                               unsigned n_layers, bool adjoint_scaling,
                                               std::span<const DenseVector> original) {
  const std::size_t n = g.size();
  std::vector<double> inv_sqrt_deg(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    if (!g.adj[v].empty()) inv_sqrt_deg[v] = 1.0 / std::sqrt(static_cast<double>(g.adj[v].size()));
  }

  std::vector<DenseVector> acc(layer0.begin(), layer0.end());
  std::vector<DenseVector> cur(layer0.begin(), layer0.end());
  std::vector<DenseVector> next(n);
  const std::size_t dim = n == 0 ? 0 : layer0[0].dim();
  for (std::size_t v = 0; v < n; ++v) next[v] = DenseVector(dim);
  for (unsigned l = 0; l < n_layers; ++l) {
    apply_norm_adj(g, inv_sqrt_deg, cur, next);
    for (std::size_t v = 0; v < n; ++v) axpy(1.0, next[v].span(), acc[v].span());
    std::swap(cur, next);
  }
  const double inv_layers = 1.0 / static_cast<double>(n_layers + 1);
  for (std::size_t v = 0; v < n; ++v) {
    if (g.adj[v].empty()) {
      // isolated nodes keep only the layer-0 term
      acc[v].values = original[v].values;
    } else if (!adjoint_scaling) {
      scale(inv_layers, acc[v].span());
    }
  }
  return acc;
}

}  // namespace

std::vector<DenseVector> lightgcn_propagate(const BipartiteGraph& g,
                                            std::span<const DenseVector> raw,
                                            unsigned n_layers) {
  if (raw.size() != g.size()) {
    throw std::invalid_argument("lightgcn_propagate: node count mismatch");
  }
  if (n_layers == 0) return {raw.begin(), raw.end()};
  return averaged_power_series(g, raw, n_layers, /*adjoint_scaling=*/false, raw);
}

std::vector<DenseVector> lightgcn_propagate_adjoint(const BipartiteGraph& g,
                                                    std::span<const DenseVector> g_final,
                                                    unsigned n_layers) {
  if (g_final.size() != g.size()) {
    throw std::invalid_argument("lightgcn_propagate_adjoint: node count mismatch");
  }
  if (n_layers == 0) return {g_final.begin(), g_final.end()};
  // connected nodes: grad0 = (1/(T+1)) sum_l P^l g; isolated nodes pass through
  const double inv_layers = 1.0 / static_cast<double>(n_layers + 1);
  std::vector<DenseVector> seeded(g_final.begin(), g_final.end());
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (!g.adj[v].empty()) scale(inv_layers, seeded[v].span());
  }
  return averaged_power_series(g, seeded, n_layers, /*adjoint_scaling=*/true, g_final);
}

}  // namespace fedrec
