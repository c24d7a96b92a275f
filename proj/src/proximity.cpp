#include "dhypr/proximity.hpp"

#include <cstring>
#include <fstream>

#include "dhypr/errors.hpp"
#include "dhypr/kernels.hpp"

namespace dhypr {

namespace {

void require_order(int k, const char* op) {
  if (k < 1) throw ContractViolation(std::string(op) + ": order k must be >= 1");
}

// d^k = 1(d^(k-1) d^1), binarized at every step.
SparseMatrix power(const SparseMatrix& first, int k) {
  SparseMatrix acc = first;
  for (int step = 2; step <= k; ++step) acc = kernels::omp::bool_product(acc, first);
  return acc;
}

constexpr char kMagic[8] = {'D', 'H', 'Y', 'P', 'R', 'S', 'T', 'K'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("stack cache: unexpected end of file");
}

}  // namespace

std::string_view to_string(Neighborhood kind) {
  switch (kind) {
    case Neighborhood::diffusion_in: return "diffusion_in";
    case Neighborhood::diffusion_out: return "diffusion_out";
    case Neighborhood::common_in: return "common_in";
    case Neighborhood::common_out: return "common_out";
  }
  return "unknown";
}

SparseMatrix diffusion_in(const SparseMatrix& adjacency, int k) {
  require_order(k, "diffusion_in");
  return power(adjacency.transpose(), k);
}

SparseMatrix diffusion_out(const SparseMatrix& adjacency, int k) {
  require_order(k, "diffusion_out");
  return power(adjacency, k);
}

SparseMatrix common_in(const SparseMatrix& adjacency, int k) {
  require_order(k, "common_in");
  return kernels::omp::witness_product(diffusion_in(adjacency, k), diffusion_out(adjacency, k));
}

SparseMatrix common_out(const SparseMatrix& adjacency, int k) {
  require_order(k, "common_out");
  return kernels::omp::witness_product(diffusion_out(adjacency, k), diffusion_in(adjacency, k));
}

SparseMatrix aggregation_weights(const SparseMatrix& m) {
  if (m.rows != m.cols) throw ContractViolation("aggregation_weights: matrix must be square");
  SparseMatrix w(m.rows, m.cols);
  w.col_idx.reserve(m.nnz() + m.rows);
  w.values.reserve(m.nnz() + m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double row_sum = 1.0;
    for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) row_sum += m.value_at(p);
    bool self_done = false;
    auto emit = [&](std::uint32_t j, double v) {
      w.col_idx.push_back(j);
      w.values.push_back(v / row_sum);
    };
    for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
      const std::uint32_t j = m.col_idx[p];
      if (!self_done && j >= i) {
        // M + I: the identity lands on an existing diagonal entry or becomes its own.
        if (j == i) {
          emit(j, m.value_at(p) + 1.0);
          self_done = true;
          continue;
        }
        emit(static_cast<std::uint32_t>(i), 1.0);
        self_done = true;
      }
      emit(j, m.value_at(p));
    }
    if (!self_done) emit(static_cast<std::uint32_t>(i), 1.0);
    w.row_ptr[i + 1] = w.col_idx.size();
  }
  return w;
}

ProximityStack::ProximityStack(std::size_t n, int K, std::vector<SparseMatrix> matrices)
    : n_(n), K_(K), matrices_(std::move(matrices)) {
  if (K < 1) throw ContractViolation("ProximityStack: K must be >= 1");
  if (matrices_.size() != 4 * static_cast<std::size_t>(K)) {
    throw ContractViolation("ProximityStack: expected " + std::to_string(4 * K) + " matrices, got " +
                            std::to_string(matrices_.size()));
  }
  weights_.reserve(matrices_.size());
  for (const auto& m : matrices_) {
    if (m.rows != n || m.cols != n) throw ContractViolation("ProximityStack: matrix is not n x n");
    weights_.push_back(std::make_shared<const ad::SparseOperand>(aggregation_weights(m)));
  }
}

ProximityStack build_stack(const Digraph& g, int K) {
  if (K < 1) throw ContractViolation("build_stack: K must be >= 1");
  const SparseMatrix& a = g.adjacency();
  const SparseMatrix a_t = a.transpose();
  std::vector<SparseMatrix> d_in{a_t}, d_out{a};
  for (int k = 2; k <= K; ++k) {
    d_in.push_back(kernels::omp::bool_product(d_in.back(), a_t));
    d_out.push_back(kernels::omp::bool_product(d_out.back(), a));
  }
  std::vector<SparseMatrix> all;
  all.reserve(4 * static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) all.push_back(d_in[k]);
  for (int k = 0; k < K; ++k) all.push_back(d_out[k]);
  for (int k = 0; k < K; ++k) all.push_back(kernels::omp::witness_product(d_in[k], d_out[k]));
  for (int k = 0; k < K; ++k) all.push_back(kernels::omp::witness_product(d_out[k], d_in[k]));
  return ProximityStack(g.num_nodes(), K, std::move(all));
}

void save_stack(const ProximityStack& stack, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write stack cache " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kStackFormatVersion);
  write_pod(out, static_cast<std::uint64_t>(stack.num_nodes()));
  write_pod(out, static_cast<std::uint32_t>(stack.K()));
  for (const auto& m : stack.matrices()) {
    write_pod(out, static_cast<std::uint64_t>(m.nnz()));
    for (auto p : m.row_ptr) write_pod(out, static_cast<std::uint64_t>(p));
    out.write(reinterpret_cast<const char*>(m.col_idx.data()),
              static_cast<std::streamsize>(m.col_idx.size() * sizeof(std::uint32_t)));
  }
  if (!out) throw FormatError("failed writing stack cache " + path.string());
}

ProximityStack load_stack(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open stack cache " + path.string());
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError(path.string() + " is not a proximity stack cache");
  }
  std::uint32_t version = 0, K = 0;
  std::uint64_t n = 0;
  read_pod(in, version);
  if (version != kStackFormatVersion) {
    throw FormatError("stack cache format version " + std::to_string(version) + " is not supported");
  }
  read_pod(in, n);
  read_pod(in, K);
  if (K == 0 || K > 64) throw FormatError("stack cache: implausible K = " + std::to_string(K));
  std::vector<SparseMatrix> matrices;
  for (std::uint32_t b = 0; b < 4 * K; ++b) {
    SparseMatrix m(n, n);
    std::uint64_t nnz = 0;
    read_pod(in, nnz);
    for (auto& p : m.row_ptr) {
      std::uint64_t v = 0;
      read_pod(in, v);
      p = v;
    }
    if (m.row_ptr.front() != 0 || m.row_ptr.back() != nnz) throw FormatError("stack cache: corrupt row index");
    m.col_idx.resize(nnz);
    in.read(reinterpret_cast<char*>(m.col_idx.data()), static_cast<std::streamsize>(nnz * sizeof(std::uint32_t)));
    if (!in) throw FormatError("stack cache: unexpected end of file");
    for (auto j : m.col_idx) {
      if (j >= n) throw FormatError("stack cache: column index out of range");
    }
    matrices.push_back(std::move(m));
  }
  return ProximityStack(n, static_cast<int>(K), std::move(matrices));
}

}  // namespace dhypr
