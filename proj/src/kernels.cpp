#include "dhypr/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <vector>

namespace dhypr::kernels {

namespace {

std::atomic<int> g_thread_limit{0};

int workers() {
  const int cap = g_thread_limit.load(std::memory_order_relaxed);
  return cap > 0 ? cap : omp_get_max_threads();
}

// Row kernels shared by the serial and OpenMP drivers. Each writes exactly one
// output row, so the drivers only differ in how rows are scheduled.

inline void gemm_row(ConstView a, ConstView b, MutView out, std::size_t i) {
  double* dst = out.data + i * out.cols;
  for (std::size_t k = 0; k < a.cols; ++k) {
    const double aik = a.at(i, k);
    if (aik == 0.0) continue;
    const double* src = b.data + k * b.cols;
    for (std::size_t j = 0; j < b.cols; ++j) dst[j] += aik * src[j];
  }
}

inline void gemm_tn_row(ConstView a, ConstView b, MutView out, std::size_t k) {
  double* dst = out.data + k * out.cols;
  std::fill(dst, dst + out.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double aik = a.at(i, k);
    if (aik == 0.0) continue;
    const double* src = b.data + i * b.cols;
    for (std::size_t j = 0; j < b.cols; ++j) dst[j] += aik * src[j];
  }
}

inline void gemm_nt_row(ConstView a, ConstView b, MutView out, std::size_t i) {
  const double* lhs = a.data + i * a.cols;
  double* dst = out.data + i * out.cols;
  for (std::size_t j = 0; j < b.rows; ++j) {
    const double* rhs = b.data + j * b.cols;
    double s = 0.0;
    for (std::size_t k = 0; k < a.cols; ++k) s += lhs[k] * rhs[k];
    dst[j] = s;
  }
}

inline void spmm_row(const SparseMatrix& s, ConstView b, MutView out, std::size_t i) {
  double* dst = out.data + i * out.cols;
  for (std::size_t p = s.row_ptr[i]; p < s.row_ptr[i + 1]; ++p) {
    const double w = s.value_at(p);
    const double* src = b.data + static_cast<std::size_t>(s.col_idx[p]) * b.cols;
    for (std::size_t j = 0; j < b.cols; ++j) dst[j] += w * src[j];
  }
}

// `mark` is scratch of size b.cols, all false on entry and on exit.
inline std::vector<std::uint32_t> bool_row(const SparseMatrix& a, const SparseMatrix& b,
                                           std::size_t i, std::vector<char>& mark) {
  std::vector<std::uint32_t> row;
  for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
    const std::uint32_t mid = a.col_idx[p];
    for (std::size_t q = b.row_ptr[mid]; q < b.row_ptr[mid + 1]; ++q) {
      const std::uint32_t j = b.col_idx[q];
      if (!mark[j]) {
        mark[j] = 1;
        row.push_back(j);
      }
    }
  }
  for (auto j : row) mark[j] = 0;
  std::sort(row.begin(), row.end());
  return row;
}

inline std::vector<std::uint32_t> witness_row(const SparseMatrix& a, const SparseMatrix& b,
                                              std::size_t i, std::vector<char>& mark) {
  std::vector<std::uint32_t> row;
  for (std::size_t p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p) {
    const std::uint32_t mid = a.col_idx[p];
    if (mid == i) continue;
    for (std::size_t q = b.row_ptr[mid]; q < b.row_ptr[mid + 1]; ++q) {
      const std::uint32_t j = b.col_idx[q];
      if (j == i || j == mid || mark[j]) continue;
      mark[j] = 1;
      row.push_back(j);
    }
  }
  for (auto j : row) mark[j] = 0;
  std::sort(row.begin(), row.end());
  return row;
}

template <typename RowFn>
SparseMatrix row_product_serial(const SparseMatrix& a, const SparseMatrix& b, RowFn fn) {
  std::vector<std::vector<std::uint32_t>> rows(a.rows);
  std::vector<char> mark(b.cols, 0);
  for (std::size_t i = 0; i < a.rows; ++i) rows[i] = fn(a, b, i, mark);
  return SparseMatrix::from_rows(b.cols, rows);
}

template <typename RowFn>
SparseMatrix row_product_omp(const SparseMatrix& a, const SparseMatrix& b, RowFn fn) {
  std::vector<std::vector<std::uint32_t>> rows(a.rows);
  const auto n = static_cast<std::int64_t>(a.rows);
#pragma omp parallel num_threads(workers())
  {
    std::vector<char> mark(b.cols, 0);
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < n; ++i) {
      rows[static_cast<std::size_t>(i)] = fn(a, b, static_cast<std::size_t>(i), mark);
    }
  }
  return SparseMatrix::from_rows(b.cols, rows);
}

}  // namespace

void set_thread_limit(int threads) { g_thread_limit.store(std::max(threads, 0)); }

int thread_limit() { return workers(); }

namespace serial {

void gemm(ConstView a, ConstView b, MutView out) {
  for (std::size_t i = 0; i < a.rows; ++i) gemm_row(a, b, out, i);
}

void gemm_tn(ConstView a, ConstView b, MutView out) {
  for (std::size_t k = 0; k < a.cols; ++k) gemm_tn_row(a, b, out, k);
}

void gemm_nt(ConstView a, ConstView b, MutView out) {
  for (std::size_t i = 0; i < a.rows; ++i) gemm_nt_row(a, b, out, i);
}

void spmm(const SparseMatrix& s, ConstView b, MutView out) {
  for (std::size_t i = 0; i < s.rows; ++i) spmm_row(s, b, out, i);
}

SparseMatrix bool_product(const SparseMatrix& a, const SparseMatrix& b) {
  return row_product_serial(a, b, bool_row);
}

SparseMatrix witness_product(const SparseMatrix& a, const SparseMatrix& b) {
  return row_product_serial(a, b, witness_row);
}

}  // namespace serial

namespace omp {

// Small problems are not worth a parallel region.
constexpr std::size_t kMinParallelWork = 1 << 14;

void gemm(ConstView a, ConstView b, MutView out) {
  const auto n = static_cast<std::int64_t>(a.rows);
  const bool par = a.rows * a.cols * b.cols >= kMinParallelWork;
#pragma omp parallel for schedule(static) num_threads(workers()) if (par)
  for (std::int64_t i = 0; i < n; ++i) gemm_row(a, b, out, static_cast<std::size_t>(i));
}

void gemm_tn(ConstView a, ConstView b, MutView out) {
  const auto n = static_cast<std::int64_t>(a.cols);
  const bool par = a.rows * a.cols * b.cols >= kMinParallelWork;
#pragma omp parallel for schedule(static) num_threads(workers()) if (par)
  for (std::int64_t k = 0; k < n; ++k) gemm_tn_row(a, b, out, static_cast<std::size_t>(k));
}

void gemm_nt(ConstView a, ConstView b, MutView out) {
  const auto n = static_cast<std::int64_t>(a.rows);
  const bool par = a.rows * a.cols * b.rows >= kMinParallelWork;
#pragma omp parallel for schedule(static) num_threads(workers()) if (par)
  for (std::int64_t i = 0; i < n; ++i) gemm_nt_row(a, b, out, static_cast<std::size_t>(i));
}

void spmm(const SparseMatrix& s, ConstView b, MutView out) {
  const auto n = static_cast<std::int64_t>(s.rows);
  const bool par = s.nnz() * b.cols >= kMinParallelWork;
#pragma omp parallel for schedule(dynamic, 64) num_threads(workers()) if (par)
  for (std::int64_t i = 0; i < n; ++i) spmm_row(s, b, out, static_cast<std::size_t>(i));
}

SparseMatrix bool_product(const SparseMatrix& a, const SparseMatrix& b) {
  return row_product_omp(a, b, bool_row);
}

SparseMatrix witness_product(const SparseMatrix& a, const SparseMatrix& b) {
  return row_product_omp(a, b, witness_row);
}

}  // namespace omp

}  // namespace dhypr::kernels
