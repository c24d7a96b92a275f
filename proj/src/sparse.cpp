#include "dhypr/sparse.hpp"

#include <algorithm>

#include "dhypr/errors.hpp"

namespace dhypr {

SparseMatrix SparseMatrix::from_pairs(std::size_t r, std::size_t c,
                                      std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  SparseMatrix m(r, c);
  m.col_idx.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    if (i >= r || j >= c) throw ContractViolation("SparseMatrix::from_pairs: index out of range");
    ++m.row_ptr[i + 1];
    m.col_idx.push_back(j);
  }
  for (std::size_t i = 0; i < r; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  return m;
}

SparseMatrix SparseMatrix::from_rows(std::size_t c,
                                     const std::vector<std::vector<std::uint32_t>>& rows) {
  SparseMatrix m(rows.size(), c);
  std::size_t total = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    total += rows[i].size();
    m.row_ptr[i + 1] = total;
  }
  m.col_idx.reserve(total);
  for (const auto& row : rows) m.col_idx.insert(m.col_idx.end(), row.begin(), row.end());
  return m;
}

bool SparseMatrix::contains(std::size_t r, std::size_t c) const {
  const auto first = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
  const auto last = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
  return std::binary_search(first, last, static_cast<std::uint32_t>(c));
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols, rows);
  for (auto j : col_idx) ++t.row_ptr[j + 1];
  for (std::size_t i = 0; i < cols; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
  t.col_idx.resize(nnz());
  if (!binary()) t.values.resize(nnz());
  std::vector<std::size_t> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
  // Visiting source rows in order keeps destination columns sorted.
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      const std::size_t dst = cursor[col_idx[p]]++;
      t.col_idx[dst] = static_cast<std::uint32_t>(i);
      if (!binary()) t.values[dst] = values[p];
    }
  }
  return t;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> d(rows * cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) d[i * cols + col_idx[p]] = value_at(p);
  }
  return d;
}

}  // namespace dhypr
