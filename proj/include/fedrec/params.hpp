#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fedrec/linalg.hpp"
#include "fedrec/rng.hpp"

namespace fedrec {

/// One affine layer projecting an attribute vector into model space.
struct LinearLayer {
  DenseMatrix weight;  // d x attr_dim
  DenseVector bias;    // d
};

/// One feature-crossing layer: x_{l+1} = x_0 * dot(x_l, w) + b + x_l.
struct CrossLayer {
  DenseVector w;  // d
  DenseVector b;  // d
};

/// One attention gate producing a scalar logit tanh(dot(w, x) + b). The gate
/// is a 1 x d map; a d x d gate would make the softmax vector-valued.
struct AttentionGate {
  DenseVector w;    // d
  double bias = 0.0;
};

/// Everything one pathway (user side or item side) needs to turn an
/// attribute vector plus an id embedding into a raw embedding bundle.
struct PathwayParams {
  LinearLayer attr_linear;
  std::vector<CrossLayer> cross_layers;
  std::array<AttentionGate, 3> attention_gates;  // one per branch: E_f, E_fc, E_id
};

/// The federated parameter set: every group that travels between clients and
/// the server. User id embeddings deliberately live elsewhere (LocalState) —
/// keeping them out of this type is what makes "the server never sees a raw
/// user embedding" a property of the type system rather than of discipline.
struct SharedParams {
  PathwayParams user_pathway;
  PathwayParams item_pathway;
  DenseMatrix item_id_embeddings;  // M x d
};

struct ModelDims {
  std::uint32_t d = 64;        // embedding width
  std::uint32_t d_ua = 1;      // user attribute width
  std::uint32_t d_ia = 1;      // item attribute width
  std::uint32_t cross_layers = 2;
  std::uint32_t n_items = 0;

  std::uint32_t raw_dim() const { return 4 * d; }  // [E_f | E_fc | E_id | E_att]
};

/// Zero-shaped params for the given dimensions (also the gradient container).
SharedParams zero_params(const ModelDims& dims);

/// Seeded initialization: attribute projections and id embeddings are small
/// gaussians, crossing layers and attention gates start at zero so the
/// crossing is the identity and attention starts uniform.
SharedParams init_shared_params(const ModelDims& dims, RandomStream rng);

ModelDims dims_of(const SharedParams& p);

/// Fixed-order list of every underlying array, gate biases included. All
/// elementwise operations (mix, aggregate, SGD, flatten) walk this list so
/// they agree on ordering and shapes.
std::vector<std::span<double>> param_arrays(SharedParams& p);
std::vector<std::span<const double>> param_arrays(const SharedParams& p);
std::vector<std::span<double>> pathway_arrays(PathwayParams& p);
std::vector<std::span<const double>> pathway_arrays(const PathwayParams& p);

bool same_shape(const SharedParams& a, const SharedParams& b);
bool params_finite(const SharedParams& p);
std::size_t param_count(const SharedParams& p);

/// Concatenation of param_arrays into one vector and back; the test harness
/// uses this to drive finite-difference checks over the whole model.
DenseVector flatten_params(const SharedParams& p);
void unflatten_params(const DenseVector& flat, SharedParams& into);

}  // namespace fedrec
