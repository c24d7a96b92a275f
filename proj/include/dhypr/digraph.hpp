#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "dhypr/sparse.hpp"
#include "dhypr/tensor.hpp"

namespace dhypr {

struct Edge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Edge sign classes for sign prediction. File values -1/0/1 map to these.
enum class Sign : std::uint8_t { oppose = 0, neutral = 1, support = 2 };
inline constexpr std::size_t kSignClasses = 3;

class Digraph {
 public:
  Digraph() = default;
  // Validates indices, rejects self-loops and duplicate edges.
  Digraph(std::size_t n, std::vector<Edge> edges);

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  bool has_edge(std::uint32_t src, std::uint32_t dst) const;
  // Binary adjacency A with A(i,j) = 1 iff (i,j) is an edge.
  const SparseMatrix& adjacency() const noexcept { return adjacency_; }

  // Same nodes and features, different edge set (used by the LP split).
  Digraph with_edges(std::vector<Edge> edges) const;
  // Every edge flipped.
  Digraph reversed() const;

  // Fraction of edges whose reverse edge also exists.
  double reciprocity() const;

  // n x d node features. Defaults to the n x n identity (one-hot node ids).
  ad::Matrix features;
  std::optional<std::vector<std::int32_t>> labels;
  // One per edge, aligned with edges().
  std::optional<std::vector<Sign>> edge_signs;
  // original_ids[i] is the id node i carried in the input file.
  std::vector<std::int64_t> original_ids;

  std::size_t num_classes() const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  SparseMatrix adjacency_;
};

struct LoadOptions {
  // When false, a repeated edge is an ingestion error; otherwise it is dropped.
  bool allow_duplicate_edges = false;
};

// Edge list: "src dst [sign]" per line, whitespace separated; blank lines and
// lines starting with '#' are ignored. Features: CSV without header, row i is
// node i. Labels: one integer per line.
//
// With a feature or label file, node ids are row indices and must lie in
// [0, n). Without either, ids are remapped densely in ascending id order.
Digraph load_digraph(const std::filesystem::path& edge_path,
                     const std::optional<std::filesystem::path>& feature_path = std::nullopt,
                     const std::optional<std::filesystem::path>& label_path = std::nullopt,
                     LoadOptions options = {});

ad::Matrix load_features_csv(const std::filesystem::path& path);
std::vector<std::int32_t> load_labels(const std::filesystem::path& path);

}  // namespace dhypr
