#include "dhypr/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "dhypr/errors.hpp"

namespace dhypr {

std::vector<Edge> sample_non_edges(const Digraph& g, std::size_t count, Rng& rng,
                                   const std::vector<Edge>& exclude) {
  const std::uint64_t n = g.num_nodes();
  const std::uint64_t ordered_pairs = n * (n > 0 ? n - 1 : 0);
  std::set<Edge> taken(exclude.begin(), exclude.end());
  std::size_t excluded_non_edges = 0;
  for (const auto& e : taken) excluded_non_edges += g.has_edge(e.src, e.dst) ? 0 : 1;
  if (ordered_pairs < g.num_edges() + excluded_non_edges + count) {
    throw ConfigError("graph has too few non-edges to draw " + std::to_string(count) + " negatives");
  }
  std::vector<Edge> out;
  out.reserve(count);
  while (out.size() < count) {
    const auto i = static_cast<std::uint32_t>(rng.uniform_index(n));
    const auto j = static_cast<std::uint32_t>(rng.uniform_index(n));
    if (i == j || g.has_edge(i, j)) continue;
    if (!taken.insert({i, j}).second) continue;
    out.push_back({i, j});
  }
  return out;
}

LinkSplit split_link_prediction(const Digraph& g, std::uint64_t seed) {
  const std::size_t m = g.num_edges();
  if (m < 10) throw ConfigError("link prediction split needs at least 10 edges, got " + std::to_string(m));
  Rng rng(seed);
  std::vector<std::uint32_t> order(m);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(std::span(order));

  const std::size_t n_val = m * 20 / 100;
  const std::size_t n_test = m * 20 / 100;
  LinkSplit s;
  s.seed = seed;
  for (std::size_t k = 0; k < m; ++k) {
    const Edge e = g.edges()[order[k]];
    if (k < n_val) {
      s.val_pos.push_back(e);
    } else if (k < n_val + n_test) {
      s.test_pos.push_back(e);
    } else {
      s.train.push_back(e);
    }
  }
  s.val_neg = sample_non_edges(g, n_val, rng);
  s.test_neg = sample_non_edges(g, n_test, rng, s.val_neg);
  return s;
}

NodeSplit split_node_classification(const Digraph& g, const NodeSplitOptions& options,
                                    std::uint64_t seed) {
  if (!g.labels) throw ConfigError("node classification requires node labels");
  const auto& labels = *g.labels;
  const std::size_t n = g.num_nodes();
  if (labels.size() != n) throw ConfigError("label count does not match node count");
  Rng rng(seed);
  NodeSplit s;
  s.seed = seed;
  std::vector<char> used(n, 0);

  if (options.label_rate) {
    const double rate = *options.label_rate;
    if (!(rate > 0.0 && rate < 1.0)) throw ConfigError("label_rate must lie in (0, 1)");
    const auto count = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
    std::vector<std::uint32_t> all(n);
    std::iota(all.begin(), all.end(), 0u);
    rng.shuffle(std::span(all));
    s.train.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    const std::size_t classes = g.num_classes();
    std::vector<std::vector<std::uint32_t>> by_class(classes);
    for (std::uint32_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    for (std::size_t c = 0; c < classes; ++c) {
      auto& members = by_class[c];
      if (members.size() < options.labeled_per_class) {
        throw ConfigError("class " + std::to_string(c) + " has " + std::to_string(members.size()) +
                          " nodes, fewer than the quota of " + std::to_string(options.labeled_per_class));
      }
      rng.shuffle(std::span(members));
      s.train.insert(s.train.end(), members.begin(),
                     members.begin() + static_cast<std::ptrdiff_t>(options.labeled_per_class));
    }
  }
  for (auto i : s.train) used[i] = 1;

  std::vector<std::uint32_t> rest;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!used[i]) rest.push_back(i);
  }
  if (rest.size() < options.val_size) {
    throw ConfigError("only " + std::to_string(rest.size()) + " unlabeled nodes for a validation set of " +
                      std::to_string(options.val_size));
  }
  rng.shuffle(std::span(rest));
  s.val.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(options.val_size));
  s.test.assign(rest.begin() + static_cast<std::ptrdiff_t>(options.val_size), rest.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

SignSplit split_sign_prediction(const Digraph& g, std::uint64_t seed) {
  if (!g.edge_signs) throw ConfigError("sign prediction requires signed edges");
  const std::size_t m = g.num_edges();
  const std::size_t n_train = m * 5 / 100;
  const std::size_t n_val = m * 5 / 100;
  if (n_train == 0) throw ConfigError("too few signed edges for a 5/5/90 split");
  Rng rng(seed);
  std::vector<std::uint32_t> order(m);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(std::span(order));
  SignSplit s;
  s.seed = seed;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
               order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return s;
}

}  // namespace dhypr
