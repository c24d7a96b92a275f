#include "dhypr/model.hpp"

#include <cmath>

#include "dhypr/geometry.hpp"
#include "dhypr/hyperbolic.hpp"

namespace dhypr {

namespace {

ad::Matrix glorot(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  ad::Matrix m(rows, cols);
  for (auto& v : m.data()) v = rng.uniform(-bound, bound);
  return m;
}

ad::Tensor apply_dropout(const ad::Tensor& x, const Dropout& dropout) {
  if (!dropout.active()) return x;
  const double keep = 1.0 - dropout.rate;
  ad::Matrix mask(x.rows(), x.cols());
  for (auto& v : mask.data()) v = dropout.rng->uniform() < keep ? 1.0 / keep : 0.0;
  return x * x.tape().constant(std::move(mask));
}

}  // namespace

void ModelConfig::validate() const {
  if (input_dim == 0) throw ContractViolation("model: input_dim must be positive");
  if (dims.empty()) throw ContractViolation("model: at least one layer is required");
  for (auto d : dims) {
    if (d == 0) throw ContractViolation("model: layer dimensions must be positive");
  }
  if (K < 1) throw ContractViolation("model: K must be >= 1");
  if (num_classes > 0 && classifier_input == 0) {
    throw ContractViolation("model: classifier head needs a positive input width");
  }
}

std::vector<std::pair<std::string, ad::Matrix*>> ModelParams::named() {
  std::vector<std::pair<std::string, ad::Matrix*>> out;
  for (std::size_t b = 0; b < branches.size(); ++b) {
    for (std::size_t l = 0; l < branches[b].size(); ++l) {
      const std::string prefix = "branch" + std::to_string(b) + ".layer" + std::to_string(l + 1);
      out.emplace_back(prefix + ".weight", &branches[b][l].weight);
      out.emplace_back(prefix + ".bias", &branches[b][l].bias);
    }
  }
  for (std::size_t l = 0; l < raw_curvatures.size(); ++l) {
    out.emplace_back("curvature" + std::to_string(l) + ".raw", &raw_curvatures[l]);
  }
  out.emplace_back("mass.weight", &mass_weight);
  out.emplace_back("mass.bias", &mass_bias);
  if (!class_weight.empty()) {
    out.emplace_back("classifier.weight", &class_weight);
    out.emplace_back("classifier.bias", &class_bias);
  }
  return out;
}

std::vector<std::pair<std::string, const ad::Matrix*>> ModelParams::named() const {
  std::vector<std::pair<std::string, const ad::Matrix*>> out;
  for (auto& [name, m] : const_cast<ModelParams*>(this)->named()) out.emplace_back(name, m);
  return out;
}

std::vector<double> ModelParams::curvatures() const {
  std::vector<double> c;
  for (const auto& raw : raw_curvatures) c.push_back(geometry::softplus(raw[0]));
  return c;
}

bool operator==(const ModelParams& a, const ModelParams& b) {
  const auto na = a.named();
  const auto nb = b.named();
  if (na.size() != nb.size()) return false;
  for (std::size_t i = 0; i < na.size(); ++i) {
    if (na[i].first != nb[i].first || !(*na[i].second == *nb[i].second)) return false;
  }
  return true;
}

ModelParams init_params(const ModelConfig& config, Rng& rng) {
  config.validate();
  ModelParams p;
  p.config = config;
  p.branches.resize(config.num_branches());
  for (auto& branch : p.branches) {
    std::size_t in = config.input_dim;
    for (auto out : config.dims) {
      branch.push_back({glorot(out, in, rng), ad::Matrix(1, out)});
      in = out;
    }
  }
  const double raw_one = geometry::softplus_inverse(1.0);
  p.raw_curvatures.assign(config.num_layers() + 1, ad::Matrix::scalar(raw_one));
  p.mass_weight = glorot(config.embedding_dim(), 1, rng);
  p.mass_bias = ad::Matrix(1, 1);
  if (config.num_classes > 0) {
    p.class_weight = glorot(config.num_classes, config.classifier_input, rng);
    p.class_bias = ad::Matrix(1, config.num_classes);
  }
  return p;
}

BoundParams bind(ad::Tape& tape, const ModelParams& params, bool trainable) {
  auto reg = [&](const ad::Matrix& m) { return trainable ? tape.variable(m) : tape.constant(m); };
  BoundParams bp;
  bp.branches.resize(params.branches.size());
  for (std::size_t b = 0; b < params.branches.size(); ++b) {
    for (const auto& layer : params.branches[b]) {
      bp.branches[b].push_back({reg(layer.weight), reg(layer.bias)});
      bp.flat.push_back(bp.branches[b].back().weight);
      bp.flat.push_back(bp.branches[b].back().bias);
    }
  }
  for (const auto& raw : params.raw_curvatures) {
    const ad::Tensor r = reg(raw);
    bp.flat.push_back(r);
    bp.curvatures.push_back(ad::softplus(r));
  }
  bp.mass_weight = reg(params.mass_weight);
  bp.mass_bias = reg(params.mass_bias);
  bp.flat.push_back(bp.mass_weight);
  bp.flat.push_back(bp.mass_bias);
  if (!params.class_weight.empty()) {
    bp.class_weight = reg(params.class_weight);
    bp.class_bias = reg(params.class_bias);
    bp.flat.push_back(bp.class_weight);
    bp.flat.push_back(bp.class_bias);
  }
  return bp;
}

ad::Tensor lift_features(const ad::Tensor& x, const ad::Tensor& c0) {
  return hyp::exp_map_origin(x, c0);
}

ad::Tensor hyp_layer(const ad::Tensor& x_in, const ad::Tensor& weight, const ad::Tensor& bias,
                     const std::shared_ptr<const ad::SparseOperand>& agg_weights,
                     const ad::Tensor& c_prev, const ad::Tensor& c_next, Activation act,
                     const Dropout& dropout) {
  // Feature transformation: (W (x) x) (+) b, the bias realised on the ball.
  const ad::Tensor bias_point = hyp::exp_map_origin(bias, c_prev);
  const ad::Tensor transformed = hyp::mobius_add(hyp::mobius_matvec(weight, x_in, c_prev), bias_point, c_prev);

  // Neighbour aggregation in the tangent space at the origin.
  const ad::Tensor messages = hyp::log_map_origin(transformed, c_prev);
  const ad::Tensor aggregated = hyp::exp_map_origin(ad::sparse_matmul(agg_weights, messages), c_prev);

  // Activation while switching curvature.
  ad::Tensor u = hyp::log_map_origin(aggregated, c_prev);
  if (act == Activation::relu) u = ad::relu(u);
  u = apply_dropout(u, dropout);
  return hyp::exp_map_origin(u, c_next);
}

std::vector<ad::Tensor> forward_branches(const ad::Tensor& lifted, const ProximityStack& stack,
                                         const BoundParams& params, const Dropout& dropout) {
  if (stack.num_branches() != params.branches.size()) {
    throw ContractViolation("forward_branches: stack has " + std::to_string(stack.num_branches()) +
                            " branches, parameters have " + std::to_string(params.branches.size()));
  }
  if (stack.num_nodes() != lifted.rows()) {
    throw ContractViolation("forward_branches: stack is built for " + std::to_string(stack.num_nodes()) +
                            " nodes, features have " + std::to_string(lifted.rows()) + " rows");
  }
  std::vector<ad::Tensor> outputs;
  outputs.reserve(params.branches.size());
  for (std::size_t b = 0; b < params.branches.size(); ++b) {
    const auto& layers = params.branches[b];
    ad::Tensor x = lifted;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const Activation act = l + 1 < layers.size() ? Activation::relu : Activation::identity;
      x = hyp_layer(x, layers[l].weight, layers[l].bias, stack.weights(b), params.curvatures[l],
                    params.curvatures[l + 1], act, dropout);
    }
    outputs.push_back(x);
  }
  return outputs;
}

EmbeddingOutput collaborate(const std::vector<ad::Tensor>& branch_outputs, const ad::Tensor& c_l) {
  if (branch_outputs.empty()) throw ContractViolation("collaborate: no branch outputs");
  const std::size_t count = branch_outputs.size();
  ad::Tensor folded = branch_outputs.front();
  for (std::size_t b = 1; b < count; ++b) folded = hyp::mobius_add(folded, branch_outputs[b], c_l);
  const ad::Tensor fuse = hyp::mobius_scalar_mul(1.0 / static_cast<double>(count), folded, c_l);

  ad::Tensor tangent_sum = hyp::log_map_origin(fuse, c_l);
  for (const auto& v : branch_outputs) tangent_sum = tangent_sum + hyp::log_map_origin(v, c_l);
  const ad::Tensor tangent_mean = tangent_sum / static_cast<double>(count + 1);

  EmbeddingOutput out;
  out.curvature = c_l;
  out.z_hyper = hyp::exp_map_origin(tangent_mean, c_l);
  out.z_tangent = hyp::log_map_origin(out.z_hyper, c_l);
  return out;
}

ad::Tensor node_mass(const ad::Tensor& z_tangent, const ad::Tensor& weight, const ad::Tensor& bias) {
  return ad::matmul(z_tangent, weight) + bias;
}

EmbeddingOutput forward(const ad::Tensor& features, const ProximityStack& stack,
                        const BoundParams& params, const Dropout& dropout) {
  const ad::Tensor lifted = lift_features(features, params.curvatures.front());
  const auto branches = forward_branches(lifted, stack, params, dropout);
  EmbeddingOutput out = collaborate(branches, params.curvatures.back());
  out.mass = node_mass(out.z_tangent, params.mass_weight, params.mass_bias);
  return out;
}

}  // namespace dhypr
