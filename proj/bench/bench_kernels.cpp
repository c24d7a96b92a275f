// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "dhypr/kernels.hpp"
#include "dhypr/rng.hpp"
#include "dhypr/sparse.hpp"

namespace {

using namespace dhypr;
using namespace dhypr::kernels;

std::vector<double> random_dense(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// Random binary n x n matrix with about `degree` entries per row.
SparseMatrix random_sparse(std::size_t n, std::size_t degree, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < degree; ++k) {
      pairs.emplace_back(i, static_cast<std::uint32_t>(rng.uniform_index(n)));
    }
  }
  return SparseMatrix::from_pairs(n, n, pairs);
}

template <void (*Kernel)(ConstView, ConstView, MutView)>
void BM_gemm_nt(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t in = 64, out = 32;
  const auto a = random_dense(n, in, 1);
  const auto b = random_dense(out, in, 2);
  std::vector<double> c(n * out);
  for (auto _ : state) {
    Kernel({a.data(), n, in}, {b.data(), out, in}, {c.data(), n, out});
    benchmark::DoNotOptimize(c.data());
  }
}

template <void (*Kernel)(const SparseMatrix&, ConstView, MutView)>
void BM_spmm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 32;
  const SparseMatrix s = random_sparse(n, 8, 3);
  const auto b = random_dense(n, d, 4);
  std::vector<double> c(n * d);
  for (auto _ : state) {
    std::fill(c.begin(), c.end(), 0.0);
    Kernel(s, {b.data(), n, d}, {c.data(), n, d});
    benchmark::DoNotOptimize(c.data());
  }
}

template <SparseMatrix (*Kernel)(const SparseMatrix&, const SparseMatrix&)>
void BM_row_product(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SparseMatrix a = random_sparse(n, 6, 5);
  const SparseMatrix at = a.transpose();
  for (auto _ : state) {
    SparseMatrix p = Kernel(a, at);
    benchmark::DoNotOptimize(p.col_idx.data());
  }
}

}  // namespace

BENCHMARK(BM_gemm_nt<serial::gemm_nt>)->Name("gemm_nt/serial")->Arg(2048)->Arg(16384);
BENCHMARK(BM_gemm_nt<omp::gemm_nt>)->Name("gemm_nt/omp")->Arg(2048)->Arg(16384);
BENCHMARK(BM_spmm<serial::spmm>)->Name("spmm/serial")->Arg(4096)->Arg(65536);
BENCHMARK(BM_spmm<omp::spmm>)->Name("spmm/omp")->Arg(4096)->Arg(65536);
BENCHMARK(BM_row_product<serial::bool_product>)->Name("bool_product/serial")->Arg(4096)->Arg(32768);
BENCHMARK(BM_row_product<omp::bool_product>)->Name("bool_product/omp")->Arg(4096)->Arg(32768);
BENCHMARK(BM_row_product<serial::witness_product>)->Name("witness_product/serial")->Arg(4096)->Arg(32768);
BENCHMARK(BM_row_product<omp::witness_product>)->Name("witness_product/omp")->Arg(4096)->Arg(32768);

BENCHMARK_MAIN();
