#include "dhypr/train.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "dhypr/adam.hpp"
#include "dhypr/errors.hpp"
#include "dhypr/geometry.hpp"
#include "dhypr/metrics.hpp"

namespace dhypr {

namespace {

using LossFn = std::function<ad::Tensor(const EmbeddingOutput&, const BoundParams&, Rng&)>;
using ValFn = std::function<double(const Embeddings&, const ModelParams&)>;

std::size_t negatives_for(std::size_t positives, double ratio) {
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(positives)));
}

void check_inputs(const Digraph& g, const ProximityStack& stack, const TrainConfig& cfg) {
  cfg.validate();
  if (stack.num_nodes() != g.num_nodes()) {
    throw ContractViolation("proximity stack has " + std::to_string(stack.num_nodes()) +
                            " nodes, graph has " + std::to_string(g.num_nodes()));
  }
  if (stack.K() != cfg.K) {
    throw ContractViolation("proximity stack was built with K=" + std::to_string(stack.K()) +
                            ", config asks for K=" + std::to_string(cfg.K));
  }
  if (g.features.rows() != g.num_nodes()) {
    throw ContractViolation("feature matrix has " + std::to_string(g.features.rows()) + " rows for " +
                            std::to_string(g.num_nodes()) + " nodes");
  }
}

// Shared epoch loop: step on the training loss, score the validation set
// with the updated parameters, keep the best, stop after `patience` epochs
// without a strict improvement.
TrainResult run(const Digraph& g, const ProximityStack& stack, const TrainConfig& cfg,
                const LossFn& loss_fn, const ValFn& val_fn, const EpochCallback& on_epoch) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(cfg.seed);
  ModelParams params = init_params(model_config(g, cfg), rng);
  TrainResult result{params, {}};
  AdamState state;
  const AdamConfig adam{.lr = cfg.lr, .weight_decay = cfg.weight_decay};
  double best = -std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= cfg.epochs_max; ++epoch) {
    double loss_value = 0.0;
    std::vector<ad::Matrix> grads;
    try {
      ad::Tape tape;
      const BoundParams bound = bind(tape, params, true);
      const ad::Tensor x = tape.constant(g.features);
      const EmbeddingOutput emb = forward(x, stack, bound, Dropout{cfg.dropout, &rng});
      const ad::Tensor loss = loss_fn(emb, bound, rng);
      loss_value = loss.item();
      tape.backward(loss);
      grads.reserve(bound.flat.size());
      for (const auto& t : bound.flat) grads.push_back(tape.grad(t));
    } catch (const NumericError& e) {
      throw TrainingError(epoch, "training diverged at epoch " + std::to_string(epoch) + " in " + e.op() +
                                     ": " + e.what());
    }
    for (const auto& gm : grads) {
      if (!gm.all_finite()) {
        throw TrainingError(epoch, "non-finite gradient at epoch " + std::to_string(epoch));
      }
    }
    std::vector<ad::Matrix*> slots;
    for (auto& [name, m] : params.named()) slots.push_back(m);
    adam_step(slots, grads, state, adam);

    double val = 0.0;
    try {
      val = val_fn(embed(g, stack, params), params);
    } catch (const NumericError& e) {
      throw TrainingError(epoch, "evaluation diverged at epoch " + std::to_string(epoch) + ": " + e.what());
    }
    const EpochRecord record{epoch, loss_value, val};
    result.report.history.push_back(record);
    if (on_epoch) on_epoch(record);

    if (val > best) {
      best = val;
      result.report.best_epoch = epoch;
      result.params = params;
    } else if (epoch - result.report.best_epoch >= cfg.patience) {
      break;
    }
  }
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<std::uint32_t> class_targets(const Digraph& g, const std::vector<std::uint32_t>& nodes) {
  std::vector<std::uint32_t> out;
  out.reserve(nodes.size());
  for (auto i : nodes) out.push_back(static_cast<std::uint32_t>((*g.labels)[i]));
  return out;
}

std::vector<Edge> edges_at(const Digraph& g, const std::vector<std::uint32_t>& ids) {
  std::vector<Edge> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(g.edges()[id]);
  return out;
}

std::vector<std::uint32_t> sign_targets(const Digraph& g, const std::vector<std::uint32_t>& ids) {
  std::vector<std::uint32_t> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(static_cast<std::uint32_t>((*g.edge_signs)[id]));
  return out;
}

// Argmax of the affine head per row of `inputs`; the first maximum wins.
std::vector<std::int32_t> predict(const ad::Matrix& inputs, const ModelParams& params) {
  const ad::Matrix& w = params.class_weight;
  const ad::Matrix& b = params.class_bias;
  std::vector<std::int32_t> out(inputs.rows());
  for (std::size_t i = 0; i < inputs.rows(); ++i) {
    const auto x = inputs.row(i);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < w.rows(); ++c) {
      const auto wc = w.row(c);
      double s = b[c];
      for (std::size_t k = 0; k < x.size(); ++k) s += wc[k] * x[k];
      if (s > best) {
        best = s;
        out[i] = static_cast<std::int32_t>(c);
      }
    }
  }
  return out;
}

// Self-supervised LP term over every edge of `g`, fresh negatives each call.
ad::Tensor with_regularizer(const ad::Tensor& class_loss, const EmbeddingOutput& emb, const Digraph& g,
                            const TrainConfig& cfg, Rng& rng) {
  if (cfg.decoder.w_r == 0.0 || g.num_edges() == 0) return class_loss;
  const auto neg = sample_non_edges(g, negatives_for(g.num_edges(), cfg.negative_ratio), rng);
  return nc_sp_loss(class_loss, emb, g.edges(), neg, cfg.decoder);
}

}  // namespace

std::string to_string(Task task) {
  switch (task) {
    case Task::lp: return "lp";
    case Task::nc: return "nc";
    case Task::sp: return "sp";
  }
  return "?";
}

Task parse_task(const std::string& name) {
  if (name == "lp") return Task::lp;
  if (name == "nc") return Task::nc;
  if (name == "sp") return Task::sp;
  throw ConfigError("unknown task '" + name + "' (expected lp, nc or sp)");
}

std::string to_string(LinkScore score) {
  return score == LinkScore::gravity ? "gravity" : "fermi_dirac";
}

LinkScore parse_link_score(const std::string& name) {
  if (name == "gravity") return LinkScore::gravity;
  if (name == "fermi_dirac") return LinkScore::fermi_dirac;
  throw ConfigError("unknown lp_score '" + name + "' (expected gravity or fermi_dirac)");
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be nonnegative");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (epochs_max < 1) throw ConfigError("epochs_max must be at least 1");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (K < 1) throw ConfigError("K must be at least 1");
  if (dims.empty()) throw ConfigError("dims must name at least one layer");
  for (auto d : dims) {
    if (d == 0) throw ConfigError("dims entries must be positive");
  }
  if (!(negative_ratio >= 0.0)) throw ConfigError("negative_ratio must be nonnegative");
  decoder.validate();
}

bool same_results(const EvalReport& a, const EvalReport& b) {
  return a.metrics == b.metrics && a.history == b.history && a.best_epoch == b.best_epoch;
}

ModelConfig model_config(const Digraph& g, const TrainConfig& cfg) {
  ModelConfig mc;
  mc.input_dim = g.features.cols();
  mc.dims = cfg.dims;
  mc.K = cfg.K;
  if (cfg.task == Task::nc) {
    mc.num_classes = g.num_classes();
    mc.classifier_input = mc.embedding_dim();
  } else if (cfg.task == Task::sp) {
    mc.num_classes = kSignClasses;
    mc.classifier_input = 2 * mc.embedding_dim();
  }
  return mc;
}

Digraph training_graph(const Digraph& g, const LinkSplit& split) { return g.with_edges(split.train); }

Embeddings embed(const Digraph& g, const ProximityStack& stack, const ModelParams& params) {
  ad::Tape tape;
  const BoundParams bound = bind(tape, params, false);
  const EmbeddingOutput out = forward(tape.constant(g.features), stack, bound);
  return {out.z_hyper.value(), out.z_tangent.value(), out.mass.value(), out.curvature.item()};
}

LinkMetrics evaluate_links(const Embeddings& emb, const std::vector<Edge>& pos, const std::vector<Edge>& neg,
                           const TrainConfig& cfg) {
  const geometry::Curvature c(emb.curvature);
  std::vector<std::uint8_t> labels;
  std::vector<double> scores;
  auto score = [&](const Edge& e, std::uint8_t label) {
    const double d = geometry::distance(emb.z_hyper.row(e.src), emb.z_hyper.row(e.dst), c);
    scores.push_back(cfg.lp_score == LinkScore::gravity
                         ? gravity_probability(d, emb.mass[e.dst], cfg.decoder)
                         : fermi_dirac_probability(d, cfg.decoder));
    labels.push_back(label);
  };
  for (const auto& e : pos) score(e, 1);
  for (const auto& e : neg) score(e, 0);
  return {auc(labels, scores), average_precision(labels, scores)};
}

double evaluate_nodes(const Embeddings& emb, const ModelParams& params, const Digraph& g,
                      const std::vector<std::uint32_t>& nodes) {
  ad::Matrix inputs(nodes.size(), emb.z_tangent.cols());
  std::vector<std::int32_t> truth;
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    const auto src = emb.z_tangent.row(nodes[r]);
    std::copy(src.begin(), src.end(), inputs.row(r).begin());
    truth.push_back((*g.labels)[nodes[r]]);
  }
  const auto predicted = predict(inputs, params);
  return accuracy(truth, predicted);
}

double evaluate_signs(const Embeddings& emb, const ModelParams& params, const Digraph& g,
                      const std::vector<std::uint32_t>& edge_ids) {
  const std::size_t d = emb.z_tangent.cols();
  ad::Matrix inputs(edge_ids.size(), 2 * d);
  std::vector<std::int32_t> truth;
  for (std::size_t r = 0; r < edge_ids.size(); ++r) {
    const Edge e = g.edges()[edge_ids[r]];
    const auto a = emb.z_tangent.row(e.src);
    const auto b = emb.z_tangent.row(e.dst);
    auto dst = inputs.row(r);
    std::copy(a.begin(), a.end(), dst.begin());
    std::copy(b.begin(), b.end(), dst.begin() + static_cast<std::ptrdiff_t>(d));
    truth.push_back(static_cast<std::int32_t>((*g.edge_signs)[edge_ids[r]]));
  }
  const auto predicted = predict(inputs, params);
  return accuracy(truth, predicted);
}

TrainResult train(const Digraph& g, const ProximityStack& stack, const LinkSplit& split,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  if (cfg.task != Task::lp) throw ConfigError("a link split needs task lp");
  check_inputs(g, stack, cfg);
  if (split.train.empty() || split.val_pos.empty() || split.val_neg.empty()) {
    throw ContractViolation("link split has an empty training or validation set");
  }
  const Digraph train_g = training_graph(g, split);
  const std::size_t n_neg = negatives_for(split.train.size(), cfg.negative_ratio);

  const LossFn loss = [&](const EmbeddingOutput& emb, const BoundParams&, Rng& rng) {
    const auto neg = sample_non_edges(train_g, n_neg, rng);
    return lp_loss(emb, split.train, neg, cfg.decoder);
  };
  const ValFn val = [&](const Embeddings& emb, const ModelParams&) {
    return evaluate_links(emb, split.val_pos, split.val_neg, cfg).auc;
  };
  TrainResult result = run(g, stack, cfg, loss, val, on_epoch);

  const Embeddings emb = embed(g, stack, result.params);
  const LinkMetrics v = evaluate_links(emb, split.val_pos, split.val_neg, cfg);
  result.report.metrics["val_auc"] = v.auc;
  result.report.metrics["val_ap"] = v.ap;
  if (!split.test_pos.empty()) {
    const LinkMetrics t = evaluate_links(emb, split.test_pos, split.test_neg, cfg);
    result.report.metrics["auc"] = t.auc;
    result.report.metrics["ap"] = t.ap;
  }
  return result;
}

TrainResult train(const Digraph& g, const ProximityStack& stack, const NodeSplit& split,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  if (cfg.task != Task::nc) throw ConfigError("a node split needs task nc");
  check_inputs(g, stack, cfg);
  if (!g.labels) throw ConfigError("node classification requires node labels");
  if (split.train.empty() || split.val.empty()) {
    throw ContractViolation("node split has an empty training or validation set");
  }
  const auto targets = class_targets(g, split.train);

  const LossFn loss = [&](const EmbeddingOutput& emb, const BoundParams& bound, Rng& rng) {
    const ad::Tensor log_probs =
        classifier_head(ad::gather_rows(emb.z_tangent, split.train), bound.class_weight, bound.class_bias);
    return with_regularizer(nll_loss(log_probs, targets), emb, g, cfg, rng);
  };
  const ValFn val = [&](const Embeddings& emb, const ModelParams& params) {
    return evaluate_nodes(emb, params, g, split.val);
  };
  TrainResult result = run(g, stack, cfg, loss, val, on_epoch);

  const Embeddings emb = embed(g, stack, result.params);
  result.report.metrics["val_accuracy"] = evaluate_nodes(emb, result.params, g, split.val);
  if (!split.test.empty()) result.report.metrics["accuracy"] = evaluate_nodes(emb, result.params, g, split.test);
  return result;
}

TrainResult train(const Digraph& g, const ProximityStack& stack, const SignSplit& split,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  if (cfg.task != Task::sp) throw ConfigError("a sign split needs task sp");
  check_inputs(g, stack, cfg);
  if (!g.edge_signs) throw ConfigError("sign prediction requires signed edges");
  if (split.train.empty() || split.val.empty()) {
    throw ContractViolation("sign split has an empty training or validation set");
  }
  const auto train_edges = edges_at(g, split.train);
  const auto targets = sign_targets(g, split.train);

  const LossFn loss = [&](const EmbeddingOutput& emb, const BoundParams& bound, Rng& rng) {
    const ad::Tensor log_probs =
        classifier_head(edge_features(emb.z_tangent, train_edges), bound.class_weight, bound.class_bias);
    return with_regularizer(nll_loss(log_probs, targets), emb, g, cfg, rng);
  };
  const ValFn val = [&](const Embeddings& emb, const ModelParams& params) {
    return evaluate_signs(emb, params, g, split.val);
  };
  TrainResult result = run(g, stack, cfg, loss, val, on_epoch);

  const Embeddings emb = embed(g, stack, result.params);
  result.report.metrics["val_accuracy"] = evaluate_signs(emb, result.params, g, split.val);
  if (!split.test.empty()) result.report.metrics["accuracy"] = evaluate_signs(emb, result.params, g, split.test);
  return result;
}

}  // namespace dhypr
