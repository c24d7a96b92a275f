#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace dhypr {

// Compressed-row sparse matrix. Column indices within a row are strictly
// increasing. An empty `values` array means the matrix is binary (every
// stored entry is 1).
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col_idx;
  std::vector<double> values;

  SparseMatrix() = default;
  SparseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), row_ptr(r + 1, 0) {}

  // Builds a binary matrix from (row, col) pairs; duplicates collapse.
  static SparseMatrix from_pairs(std::size_t r, std::size_t c,
                                 std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs);
  // Builds a matrix from per-row sorted column lists.
  static SparseMatrix from_rows(std::size_t c, const std::vector<std::vector<std::uint32_t>>& rows);

  std::size_t nnz() const noexcept { return col_idx.size(); }
  bool binary() const noexcept { return values.empty(); }
  bool contains(std::size_t r, std::size_t c) const;
  double value_at(std::size_t p) const noexcept { return values.empty() ? 1.0 : values[p]; }
  std::size_t row_size(std::size_t r) const noexcept { return row_ptr[r + 1] - row_ptr[r]; }

  SparseMatrix transpose() const;
  // Dense row-major copy, mostly for tests.
  std::vector<double> to_dense() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;
};

}  // namespace dhypr
