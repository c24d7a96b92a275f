#pragma once

// Multi-branch hyperbolic graph embedding network.
//
// Every proximity branch (4K of them) runs its own stack of hyperbolic
// layers with private weights and biases. Curvatures are per layer and shared
// by all branches: c^0 lifts the input features, c^l is the curvature of the
// final embedding space. Branch outputs are fused by a Mobius average plus an
// equal-weight tangent aggregation.

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dhypr/proximity.hpp"
#include "dhypr/rng.hpp"
#include "dhypr/tensor.hpp"

namespace dhypr {

enum class Activation { relu, identity };

struct ModelConfig {
  std::size_t input_dim = 0;
  // Output width of each layer; the last entry is the embedding dimension d'.
  std::vector<std::size_t> dims{64, 32};
  int K = 2;
  // 0 disables the classifier head.
  std::size_t num_classes = 0;
  // Classifier input width: d' for node classification, 2 d' for sign prediction.
  std::size_t classifier_input = 0;

  std::size_t num_layers() const noexcept { return dims.size(); }
  std::size_t num_branches() const noexcept { return 4 * static_cast<std::size_t>(K); }
  std::size_t embedding_dim() const { return dims.back(); }
  void validate() const;
};

struct LayerParams {
  ad::Matrix weight;  // out x in
  ad::Matrix bias;    // 1 x out, tangent vector at the origin
};

struct ModelParams {
  ModelConfig config;
  // branches[b][layer]
  std::vector<std::vector<LayerParams>> branches;
  // Unconstrained scalars; c^layer = softplus(raw). One per layer plus the input.
  std::vector<ad::Matrix> raw_curvatures;
  ad::Matrix mass_weight;  // d' x 1
  ad::Matrix mass_bias;    // 1 x 1
  ad::Matrix class_weight;  // classes x classifier_input (empty without head)
  ad::Matrix class_bias;    // 1 x classes

  // Every trainable tensor with a stable name, in a fixed order.
  std::vector<std::pair<std::string, ad::Matrix*>> named();
  std::vector<std::pair<std::string, const ad::Matrix*>> named() const;
  std::vector<double> curvatures() const;

  friend bool operator==(const ModelParams& a, const ModelParams& b);
};

// Glorot-uniform weights, zero biases, every curvature initialised to 1.
ModelParams init_params(const ModelConfig& config, Rng& rng);

// ModelParams registered on a tape, mirroring its layout.
struct BoundParams {
  struct Layer {
    ad::Tensor weight;
    ad::Tensor bias;
  };
  std::vector<std::vector<Layer>> branches;
  std::vector<ad::Tensor> curvatures;  // already softplus-ed
  ad::Tensor mass_weight;
  ad::Tensor mass_bias;
  ad::Tensor class_weight;
  ad::Tensor class_bias;
  // Same order as ModelParams::named().
  std::vector<ad::Tensor> flat;
};

// trainable = false registers constants (evaluation passes).
BoundParams bind(ad::Tape& tape, const ModelParams& params, bool trainable);

struct Dropout {
  double rate = 0.0;
  Rng* rng = nullptr;
  bool active() const noexcept { return rate > 0.0 && rng != nullptr; }
};

struct EmbeddingOutput {
  ad::Tensor z_hyper;    // n x d' on the ball of curvature c^l
  ad::Tensor z_tangent;  // log map of z_hyper at the origin
  ad::Tensor mass;       // n x 1
  ad::Tensor curvature;  // c^l, 1 x 1
};

// Row-wise exp map of Euclidean features onto the ball of curvature c0.
ad::Tensor lift_features(const ad::Tensor& x, const ad::Tensor& c0);

// One hyperbolic layer: Mobius feature transform with bias, tangent-space
// neighbour aggregation with row-stochastic weights, activation while moving
// from curvature c_prev to c_next.
ad::Tensor hyp_layer(const ad::Tensor& x_in, const ad::Tensor& weight, const ad::Tensor& bias,
                     const std::shared_ptr<const ad::SparseOperand>& agg_weights,
                     const ad::Tensor& c_prev, const ad::Tensor& c_next, Activation act,
                     const Dropout& dropout = {});

// 4K outputs in canonical branch order, all on the ball of curvature c^l.
std::vector<ad::Tensor> forward_branches(const ad::Tensor& lifted, const ProximityStack& stack,
                                         const BoundParams& params, const Dropout& dropout = {});

// z_fuse = (1/4K) (x) (v_1 (+) v_2 (+) ... (+) v_4K), left-folded in branch
// order; the result is the tangent average of {z_fuse, v_1..v_4K} with equal
// weights 1/(4K+1), mapped back to the ball. Fills z_hyper and z_tangent.
EmbeddingOutput collaborate(const std::vector<ad::Tensor>& branch_outputs, const ad::Tensor& c_l);

ad::Tensor node_mass(const ad::Tensor& z_tangent, const ad::Tensor& weight, const ad::Tensor& bias);

// Full forward pass: lift, branches, collaboration and mass head.
EmbeddingOutput forward(const ad::Tensor& features, const ProximityStack& stack,
                        const BoundParams& params, const Dropout& dropout = {});

}  // namespace dhypr
