#pragma once

// The four families of k-order proximity matrices and their aggregation
// weights. All matrices are binary and n x n.

#include <array>
#include <filesystem>
#include <memory>
#include <string_view>
#include <vector>

#include "dhypr/digraph.hpp"
#include "dhypr/sparse.hpp"
#include "dhypr/tensor.hpp"

namespace dhypr {

enum class Neighborhood { diffusion_in = 0, diffusion_out = 1, common_in = 2, common_out = 3 };
inline constexpr std::array<Neighborhood, 4> kNeighborhoods = {
    Neighborhood::diffusion_in, Neighborhood::diffusion_out, Neighborhood::common_in,
    Neighborhood::common_out};

std::string_view to_string(Neighborhood kind);

// (i,j) set iff a directed path j -> ... -> i of length exactly k exists.
SparseMatrix diffusion_in(const SparseMatrix& adjacency, int k);
// (i,j) set iff a directed path i -> ... -> j of length exactly k exists.
SparseMatrix diffusion_out(const SparseMatrix& adjacency, int k);
// (i,j), i != j, set iff some p outside {i,j} reaches both i and j in exactly k hops.
SparseMatrix common_in(const SparseMatrix& adjacency, int k);
// (i,j), i != j, set iff i and j both reach some p outside {i,j} in exactly k hops.
SparseMatrix common_out(const SparseMatrix& adjacency, int k);

// Row-stochastic D^-1 (M + I), where D(i,i) is the row sum of M plus one.
SparseMatrix aggregation_weights(const SparseMatrix& m);

class ProximityStack {
 public:
  ProximityStack() = default;
  // `matrices` in canonical branch order (see branch_index).
  ProximityStack(std::size_t n, int K, std::vector<SparseMatrix> matrices);

  std::size_t num_nodes() const noexcept { return n_; }
  int K() const noexcept { return K_; }
  std::size_t num_branches() const noexcept { return matrices_.size(); }

  // Canonical order: diffusion_in k=1..K, diffusion_out k=1..K, common_in
  // k=1..K, common_out k=1..K.
  static std::size_t branch_index(Neighborhood kind, int k, int K) {
    return static_cast<std::size_t>(kind) * static_cast<std::size_t>(K) + static_cast<std::size_t>(k - 1);
  }

  const SparseMatrix& matrix(std::size_t branch) const { return matrices_.at(branch); }
  const SparseMatrix& matrix(Neighborhood kind, int k) const { return matrix(branch_index(kind, k, K_)); }
  const std::shared_ptr<const ad::SparseOperand>& weights(std::size_t branch) const {
    return weights_.at(branch);
  }
  const std::vector<SparseMatrix>& matrices() const noexcept { return matrices_; }

 private:
  std::size_t n_ = 0;
  int K_ = 0;
  std::vector<SparseMatrix> matrices_;
  std::vector<std::shared_ptr<const ad::SparseOperand>> weights_;
};

ProximityStack build_stack(const Digraph& g, int K);

// Binary cache: header (magic, format version, n, K) followed by all 4K
// matrices in canonical order. Reload is bit-exact.
inline constexpr std::uint32_t kStackFormatVersion = 1;
void save_stack(const ProximityStack& stack, const std::filesystem::path& path);
ProximityStack load_stack(const std::filesystem::path& path);

}  // namespace dhypr
