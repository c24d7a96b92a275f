#pragma once

// Training loop with early stopping for link prediction (LP), node
// classification (NC) and sign prediction (SP).

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dhypr/decode.hpp"
#include "dhypr/digraph.hpp"
#include "dhypr/model.hpp"
#include "dhypr/proximity.hpp"
#include "dhypr/split.hpp"

namespace dhypr {

enum class Task { lp, nc, sp };
std::string to_string(Task task);
Task parse_task(const std::string& name);

// Decoder used to rank candidate edges when evaluating LP.
enum class LinkScore { fermi_dirac, gravity };
std::string to_string(LinkScore score);
LinkScore parse_link_score(const std::string& name);

struct TrainConfig {
  Task task = Task::lp;
  double lr = 0.01;
  double weight_decay = 0.0;
  double dropout = 0.05;
  int epochs_max = 500;
  int patience = 50;
  std::uint64_t seed = 0;
  int K = 2;
  std::vector<std::size_t> dims{64, 32};
  DecoderConfig decoder;
  // Training negatives per positive edge, resampled every epoch.
  double negative_ratio = 1.0;
  LinkScore lp_score = LinkScore::gravity;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double val_metric = 0.0;
  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct EvalReport {
  // LP: auc, ap, val_auc, val_ap. NC / SP: accuracy, val_accuracy.
  std::map<std::string, double> metrics;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double wall_seconds = 0.0;
};

// Everything but the wall-clock time.
bool same_results(const EvalReport& a, const EvalReport& b);

struct TrainResult {
  ModelParams params;
  EvalReport report;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// `g` is the full graph. For LP the stack must be built from the training
// edges only (see training_graph). Returns the parameters of the epoch with
// the best validation metric (AUC for LP, accuracy otherwise).
TrainResult train(const Digraph& g, const ProximityStack& stack, const LinkSplit& split,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});
TrainResult train(const Digraph& g, const ProximityStack& stack, const NodeSplit& split,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});
TrainResult train(const Digraph& g, const ProximityStack& stack, const SignSplit& split,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});

Digraph training_graph(const Digraph& g, const LinkSplit& split);

ModelConfig model_config(const Digraph& g, const TrainConfig& cfg);

// Deterministic (dropout-free) embeddings of a trained model.
struct Embeddings {
  ad::Matrix z_hyper;
  ad::Matrix z_tangent;
  ad::Matrix mass;
  double curvature = 0.0;
};
Embeddings embed(const Digraph& g, const ProximityStack& stack, const ModelParams& params);

struct LinkMetrics {
  double auc = 0.0;
  double ap = 0.0;
};
LinkMetrics evaluate_links(const Embeddings& emb, const std::vector<Edge>& pos, const std::vector<Edge>& neg,
                           const TrainConfig& cfg);
double evaluate_nodes(const Embeddings& emb, const ModelParams& params, const Digraph& g,
                      const std::vector<std::uint32_t>& nodes);
double evaluate_signs(const Embeddings& emb, const ModelParams& params, const Digraph& g,
                      const std::vector<std::uint32_t>& edge_ids);

}  // namespace dhypr
