#include "fedrec/params.hpp"

#include <cmath>
#include <stdexcept>

namespace fedrec {

namespace {

PathwayParams zero_pathway(std::uint32_t d, std::uint32_t attr_dim, std::uint32_t layers) {
  PathwayParams p;
  p.attr_linear.weight = DenseMatrix(d, attr_dim);
  p.attr_linear.bias = DenseVector(d);
  p.cross_layers.resize(layers);
  for (CrossLayer& layer : p.cross_layers) {
    layer.w = DenseVector(d);
    layer.b = DenseVector(d);
  }
  for (AttentionGate& gate : p.attention_gates) {
    gate.w = DenseVector(d);
    gate.bias = 0.0;
  }
  return p;
}

template <class Span, class Pathway>
void append_pathway_arrays(Pathway& side, std::vector<Span>& out) {
  out.push_back(Span(side.attr_linear.weight.values));
  out.push_back(Span(side.attr_linear.bias.values));
  for (auto& layer : side.cross_layers) {
    out.push_back(Span(layer.w.values));
    out.push_back(Span(layer.b.values));
  }
  for (auto& gate : side.attention_gates) {
    out.push_back(Span(gate.w.values));
    out.push_back(Span(&gate.bias, 1));
  }
}

template <class Params, class Span>
std::vector<Span> collect_arrays(Params& p) {
  std::vector<Span> out;
  out.reserve(8 + 4 * p.user_pathway.cross_layers.size() + 12);
  append_pathway_arrays<Span>(p.user_pathway, out);
  append_pathway_arrays<Span>(p.item_pathway, out);
  out.push_back(Span(p.item_id_embeddings.values));
  return out;
}

}  // namespace

SharedParams zero_params(const ModelDims& dims) {
  SharedParams p;
  p.user_pathway = zero_pathway(dims.d, dims.d_ua, dims.cross_layers);
  p.item_pathway = zero_pathway(dims.d, dims.d_ia, dims.cross_layers);
  p.item_id_embeddings = DenseMatrix(dims.n_items, dims.d);
  return p;
}

SharedParams init_shared_params(const ModelDims& dims, RandomStream rng) {
  SharedParams p = zero_params(dims);
  constexpr double kScale = 0.1;
  for (double& v : p.user_pathway.attr_linear.weight.values) v = kScale * rng.next_normal();
  for (double& v : p.item_pathway.attr_linear.weight.values) v = kScale * rng.next_normal();
  for (double& v : p.item_id_embeddings.values) v = kScale * rng.next_normal();
  return p;
}

ModelDims dims_of(const SharedParams& p) {
  ModelDims dims;
  dims.d = static_cast<std::uint32_t>(p.user_pathway.attr_linear.bias.dim());
  dims.d_ua = static_cast<std::uint32_t>(p.user_pathway.attr_linear.weight.cols);
  dims.d_ia = static_cast<std::uint32_t>(p.item_pathway.attr_linear.weight.cols);
  dims.cross_layers = static_cast<std::uint32_t>(p.user_pathway.cross_layers.size());
  dims.n_items = static_cast<std::uint32_t>(p.item_id_embeddings.rows);
  return dims;
}

std::vector<std::span<double>> param_arrays(SharedParams& p) {
  return collect_arrays<SharedParams, std::span<double>>(p);
}

std::vector<std::span<const double>> param_arrays(const SharedParams& p) {
  return collect_arrays<const SharedParams, std::span<const double>>(p);
}

std::vector<std::span<double>> pathway_arrays(PathwayParams& p) {
  std::vector<std::span<double>> out;
  append_pathway_arrays<std::span<double>>(p, out);
  return out;
}

std::vector<std::span<const double>> pathway_arrays(const PathwayParams& p) {
  std::vector<std::span<const double>> out;
  append_pathway_arrays<std::span<const double>>(p, out);
  return out;
}

bool same_shape(const SharedParams& a, const SharedParams& b) {
  const auto sa = param_arrays(a);
  const auto sb = param_arrays(b);
  if (sa.size() != sb.size()) return false;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (sa[i].size() != sb[i].size()) return false;
  }
  return a.item_id_embeddings.cols == b.item_id_embeddings.cols;
}

bool params_finite(const SharedParams& p) {
  for (auto arr : param_arrays(p)) {
    for (double v : arr) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::size_t param_count(const SharedParams& p) {
  std::size_t n = 0;
  for (auto arr : param_arrays(p)) n += arr.size();
  return n;
}

DenseVector flatten_params(const SharedParams& p) {
  DenseVector flat(param_count(p));
  std::size_t at = 0;
  for (auto arr : param_arrays(p)) {
    for (double v : arr) flat[at++] = v;
  }
  return flat;
}

void unflatten_params(const DenseVector& flat, SharedParams& into) {
  if (flat.dim() != param_count(into)) {
    throw std::invalid_argument("unflatten_params: size mismatch");
  }
  std::size_t at = 0;
  for (auto arr : param_arrays(into)) {
    for (double& v : arr) v = flat[at++];
  }
}

}  // namespace fedrec
