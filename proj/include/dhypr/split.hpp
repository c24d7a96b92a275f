#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dhypr/digraph.hpp"
#include "dhypr/rng.hpp"

namespace dhypr {

// Link prediction: 20% of edges become validation positives, 20% test
// positives, the rest stay in the training graph. Validation and test each
// get as many negatives as positives, drawn disjointly and uniformly from
// ordered pairs (i != j) that are not edges of the full graph.
struct LinkSplit {
  std::vector<Edge> train;
  std::vector<Edge> val_pos;
  std::vector<Edge> val_neg;
  std::vector<Edge> test_pos;
  std::vector<Edge> test_neg;
  std::uint64_t seed = 0;
};

struct NodeSplit {
  std::vector<std::uint32_t> train;
  std::vector<std::uint32_t> val;
  std::vector<std::uint32_t> test;
  std::uint64_t seed = 0;
};

// Indices into Digraph::edges().
struct SignSplit {
  std::vector<std::uint32_t> train;
  std::vector<std::uint32_t> val;
  std::vector<std::uint32_t> test;
  std::uint64_t seed = 0;
};

struct NodeSplitOptions {
  std::size_t labeled_per_class = 20;
  std::size_t val_size = 500;
  // When set, the training set is a uniform sample of round(rate * n) nodes
  // instead of a per-class quota.
  std::optional<double> label_rate;
};

LinkSplit split_link_prediction(const Digraph& g, std::uint64_t seed);
NodeSplit split_node_classification(const Digraph& g, const NodeSplitOptions& options, std::uint64_t seed);
SignSplit split_sign_prediction(const Digraph& g, std::uint64_t seed);

// `count` distinct ordered pairs (i != j) that are not edges of `g` and not
// in `exclude`. Throws ConfigError if the graph has too few non-edges.
std::vector<Edge> sample_non_edges(const Digraph& g, std::size_t count, Rng& rng,
                                   const std::vector<Edge>& exclude = {});

}  // namespace dhypr
