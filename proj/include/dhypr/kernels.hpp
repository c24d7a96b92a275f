#pragma once

// Data-parallel inner loops.
//
// Every kernel exists twice: `serial` is the straight-line reference kept for
// testing and benchmarking, `omp` distributes output rows over OpenMP threads.
// Each output row is computed by a single thread in the same order as the
// serial version, so both produce bit-identical results for any thread count.

#include <cstddef>
#include <span>

#include "dhypr/sparse.hpp"

namespace dhypr::kernels {

// Dense row-major operand views.
struct ConstView {
  const double* data;
  std::size_t rows;
  std::size_t cols;
  double at(std::size_t r, std::size_t c) const noexcept { return data[r * cols + c]; }
};

struct MutView {
  double* data;
  std::size_t rows;
  std::size_t cols;
};

namespace serial {

// out = a * b; zero entries of `a` are skipped. out must be zero-initialised.
void gemm(ConstView a, ConstView b, MutView out);
// out = a^T * b.
void gemm_tn(ConstView a, ConstView b, MutView out);
// out = a * b^T.
void gemm_nt(ConstView a, ConstView b, MutView out);
// out = s * b. out must be zero-initialised.
void spmm(const SparseMatrix& s, ConstView b, MutView out);
// Binarized boolean product: (i,j) is set iff some p has a(i,p) and b(p,j).
SparseMatrix bool_product(const SparseMatrix& a, const SparseMatrix& b);
// (i,j) with i != j is set iff some witness p outside {i,j} has a(i,p) and b(p,j).
SparseMatrix witness_product(const SparseMatrix& a, const SparseMatrix& b);

}  // namespace serial

namespace omp {

void gemm(ConstView a, ConstView b, MutView out);
void gemm_tn(ConstView a, ConstView b, MutView out);
void gemm_nt(ConstView a, ConstView b, MutView out);
void spmm(const SparseMatrix& s, ConstView b, MutView out);
SparseMatrix bool_product(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix witness_product(const SparseMatrix& a, const SparseMatrix& b);

}  // namespace omp

// Caps the worker count used by the omp kernels. 0 restores the runtime default.
void set_thread_limit(int threads);
int thread_limit();

}  // namespace dhypr::kernels
