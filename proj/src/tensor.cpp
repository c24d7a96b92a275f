#include "dhypr/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "dhypr/geometry.hpp"
#include "dhypr/kernels.hpp"

namespace dhypr::ad {

std::string to_string(Shape s) {
  return "(" + std::to_string(s.rows) + "x" + std::to_string(s.cols) + ")";
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : shape_{rows, cols}, data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : shape_{rows, cols}, data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ContractViolation("Matrix: data length " + std::to_string(data_.size()) +
                            " does not match shape " + to_string(shape_));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(std::vector<double> v) {
  const std::size_t n = v.size();
  return Matrix(n, 1, std::move(v));
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------- Tensor

const Matrix& Tensor::value() const { return tape().value(id_); }

double Tensor::item() const {
  const Matrix& v = value();
  if (v.shape() != Shape{1, 1}) {
    throw ContractViolation("item() on non-scalar tensor of shape " + to_string(v.shape()));
  }
  return v[0];
}

bool Tensor::requires_grad() const { return tape().requires_grad(id_); }

Tape& Tensor::tape() const {
  if (tape_ == nullptr) throw ContractViolation("use of an empty Tensor handle");
  return *tape_;
}

// ---------------------------------------------------------------- Tape

Tensor Tape::variable(Matrix value) {
  nodes_.push_back(Node{"variable", std::move(value), {}, true, {}, {}});
  return Tensor(this, nodes_.size() - 1);
}

Tensor Tape::constant(Matrix value) {
  nodes_.push_back(Node{"constant", std::move(value), {}, false, {}, {}});
  return Tensor(this, nodes_.size() - 1);
}

Tensor Tape::record(const char* op, Matrix value, std::vector<std::size_t> inputs,
                    BackwardFn backward) {
  if (!value.all_finite()) {
    throw NumericError(op, std::string("non-finite output from operation '") + op + "'");
  }
  const bool needs = std::any_of(inputs.begin(), inputs.end(),
                                 [this](std::size_t id) { return nodes_[id].requires_grad; });
  if (!needs) {
    inputs.clear();
    backward = nullptr;
  }
  nodes_.push_back(Node{op, std::move(value), {}, needs, std::move(inputs), std::move(backward)});
  return Tensor(this, nodes_.size() - 1);
}

void Tape::accumulate(std::size_t id, const Matrix& g) {
  Node& node = nodes_[id];
  if (!node.requires_grad) return;
  if (g.shape() != node.value.shape()) {
    throw ContractViolation(std::string("gradient shape mismatch at '") + node.op + "': " +
                            to_string(g.shape()) + " vs " + to_string(node.value.shape()));
  }
  if (node.grad.empty()) {
    node.grad = g;
    return;
  }
  for (std::size_t i = 0; i < g.size(); ++i) node.grad[i] += g[i];
}

void Tape::accumulate_row(std::size_t id, std::size_t row, std::span<const double> g) {
  Node& node = nodes_[id];
  if (!node.requires_grad) return;
  if (node.grad.empty()) node.grad = Matrix(node.value.rows(), node.value.cols());
  auto dst = node.grad.row(row);
  for (std::size_t j = 0; j < g.size(); ++j) dst[j] += g[j];
}

void Tape::backward(const Tensor& loss) {
  if (&loss.tape() != this) throw ContractViolation("backward: loss belongs to another tape");
  if (loss.shape() != Shape{1, 1}) {
    throw ContractViolation("backward: loss must be scalar, got " + to_string(loss.shape()));
  }
  for (auto& n : nodes_) n.grad = Matrix();
  if (!nodes_[loss.id()].requires_grad) return;
  nodes_[loss.id()].grad = Matrix::scalar(1.0);
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
    n.backward(*this, id);
  }
}

Matrix Tape::grad(const Tensor& t) const {
  const Node& n = nodes_[t.id()];
  if (n.grad.empty()) return Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

// ---------------------------------------------------------------- helpers

namespace {

Tape& same_tape(const Tensor& a, const Tensor& b, const char* op) {
  if (&a.tape() != &b.tape()) {
    throw ContractViolation(std::string(op) + ": operands live on different tapes");
  }
  return a.tape();
}

std::size_t broadcast_dim(std::size_t x, std::size_t y, const char* op, Shape a, Shape b) {
  if (x == y) return x;
  if (x == 1) return y;
  if (y == 1) return x;
  throw ContractViolation(std::string(op) + ": shapes " + to_string(a) + " and " + to_string(b) +
                          " do not broadcast");
}

Shape broadcast(Shape a, Shape b, const char* op) {
  return {broadcast_dim(a.rows, b.rows, op, a, b), broadcast_dim(a.cols, b.cols, op, a, b)};
}

inline std::size_t bidx(Shape s, std::size_t r, std::size_t c) {
  return (s.rows == 1 ? 0 : r) * s.cols + (s.cols == 1 ? 0 : c);
}

// Sums a full-size gradient back down to a (possibly broadcast) operand shape.
Matrix reduce_to(const Matrix& g, Shape s) {
  if (g.shape() == s) return g;
  Matrix out(s.rows, s.cols);
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) out[bidx(s, r, c)] += g(r, c);
  }
  return out;
}

// f(x, y) -> value; da(x, y, out), db(x, y, out) -> partial derivatives.
template <typename F, typename DA, typename DB>
Tensor binary(const char* op, const Tensor& a, const Tensor& b, F f, DA da, DB db) {
  Tape& tape = same_tape(a, b, op);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  const Shape as = av.shape(), bs = bv.shape();
  const Shape os = broadcast(as, bs, op);
  Matrix out(os.rows, os.cols);
  for (std::size_t r = 0; r < os.rows; ++r) {
    for (std::size_t c = 0; c < os.cols; ++c) out(r, c) = f(av[bidx(as, r, c)], bv[bidx(bs, r, c)]);
  }
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record(op, std::move(out), {ia, ib}, [ia, ib, as, bs, os, da, db](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_of(self);
    const Matrix& x = t.value(ia);
    const Matrix& y = t.value(ib);
    const Matrix& o = t.value(self);
    if (t.requires_grad(ia)) {
      Matrix ga(os.rows, os.cols);
      for (std::size_t r = 0; r < os.rows; ++r) {
        for (std::size_t c = 0; c < os.cols; ++c) {
          ga(r, c) = g(r, c) * da(x[bidx(as, r, c)], y[bidx(bs, r, c)], o(r, c));
        }
      }
      t.accumulate(ia, reduce_to(ga, as));
    }
    if (t.requires_grad(ib)) {
      Matrix gb(os.rows, os.cols);
      for (std::size_t r = 0; r < os.rows; ++r) {
        for (std::size_t c = 0; c < os.cols; ++c) {
          gb(r, c) = g(r, c) * db(x[bidx(as, r, c)], y[bidx(bs, r, c)], o(r, c));
        }
      }
      t.accumulate(ib, reduce_to(gb, bs));
    }
  });
}

// f(x) -> value; df(x, y) -> derivative given input and output.
template <typename F, typename DF>
Tensor unary(const char* op, const Tensor& a, F f, DF df) {
  Tape& tape = a.tape();
  const Matrix& av = a.value();
  Matrix out(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = f(av[i]);
  const std::size_t ia = a.id();
  return tape.record(op, std::move(out), {ia}, [ia, df](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_of(self);
    const Matrix& x = t.value(ia);
    const Matrix& y = t.value(self);
    Matrix ga(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) ga[i] = g[i] * df(x[i], y[i]);
    t.accumulate(ia, ga);
  });
}

kernels::ConstView view(const Matrix& m) { return {m.data().data(), m.rows(), m.cols()}; }
kernels::MutView mut_view(Matrix& m) { return {m.data().data(), m.rows(), m.cols()}; }

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

// ---------------------------------------------------------------- elementwise

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double, double) { return 1.0; }, [](double, double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double, double) { return 1.0; }, [](double, double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double, double y, double) { return y; }, [](double x, double, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  return binary(
      "div", a, b, [](double x, double y) { return x / y; },
      [](double, double y, double) { return 1.0 / y; },
      [](double, double y, double o) { return -o / y; });
}

Tensor maximum(const Tensor& a, const Tensor& b) {
  return binary(
      "maximum", a, b, [](double x, double y) { return x >= y ? x : y; },
      [](double x, double y, double) { return x >= y ? 1.0 : 0.0; },
      [](double x, double y, double) { return x >= y ? 0.0 : 1.0; });
}

Tensor negate(const Tensor& a) {
  return unary("negate", a, [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Tensor scale(const Tensor& a, double s) {
  return unary("scale", a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor add_scalar(const Tensor& a, double s) {
  return unary("add_scalar", a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor rdiv(double s, const Tensor& a) {
  return unary(
      "rdiv", a, [s](double x) { return s / x; }, [](double x, double y) { return -y / x; });
}

Tensor tanh(const Tensor& a) {
  return unary(
      "tanh", a, [](double x) { return geometry::clamped_tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor atanh(const Tensor& a) {
  static constexpr double lim = 1.0 - geometry::kAtanhEps;
  return unary(
      "atanh", a, [](double x) { return geometry::clamped_atanh(x); },
      [](double x, double) {
        const double xc = std::clamp(x, -lim, lim);
        return 1.0 / (1.0 - xc * xc);
      });
}

Tensor tanh_ratio(const Tensor& a) {
  return unary(
      "tanh_ratio", a, [](double x) { return geometry::tanh_ratio(x); },
      [](double x, double y) {
        if (std::abs(x) < geometry::kRatioSeries) return -2.0 * x / 3.0 + 8.0 * x * x * x / 15.0;
        const double t = geometry::clamped_tanh(x);
        return (1.0 - t * t - y) / x;
      });
}

Tensor atanh_ratio(const Tensor& a) {
  static constexpr double lim = 1.0 - geometry::kAtanhEps;
  return unary(
      "atanh_ratio", a, [](double x) { return geometry::atanh_ratio(x); },
      [](double x, double y) {
        if (std::abs(x) < geometry::kRatioSeries) return 2.0 * x / 3.0 + 4.0 * x * x * x / 5.0;
        const double xc = std::clamp(x, -lim, lim);
        return (1.0 / (1.0 - xc * xc) - y) / x;
      });
}

Tensor exp(const Tensor& a) {
  return unary("exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
  return unary("log", a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor sqrt(const Tensor& a) {
  return unary(
      "sqrt", a, [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / y; });
}

Tensor sigmoid(const Tensor& a) {
  return unary("sigmoid", a, stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Tensor softplus(const Tensor& a) {
  return unary(
      "softplus", a, [](double x) { return geometry::softplus(x); },
      [](double x, double) { return stable_sigmoid(x); });
}

Tensor relu(const Tensor& a) {
  return unary(
      "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  if (lo > hi) throw ContractViolation("clamp: lo > hi");
  return unary(
      "clamp", a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

Tensor clamp_min(const Tensor& a, double lo) {
  return unary(
      "clamp_min", a, [lo](double x) { return x < lo ? lo : x; },
      [lo](double x, double) { return x > lo ? 1.0 : 0.0; });
}

// ---------------------------------------------------------------- linear algebra

Tensor matmul(const Tensor& a, const Tensor& b) {
  Tape& tape = same_tape(a, b, "matmul");
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.rows()) {
    throw ContractViolation("matmul: " + to_string(av.shape()) + " x " + to_string(bv.shape()));
  }
  Matrix out(av.rows(), bv.cols());
  kernels::omp::gemm(view(av), view(bv), mut_view(out));
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record("matmul", std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_of(self);
    const Matrix& x = t.value(ia);
    const Matrix& y = t.value(ib);
    if (t.requires_grad(ia)) {
      Matrix ga(x.rows(), x.cols());
      kernels::omp::gemm_nt(view(g), view(y), mut_view(ga));
      t.accumulate(ia, ga);
    }
    if (t.requires_grad(ib)) {
      Matrix gb(y.rows(), y.cols());
      kernels::omp::gemm_tn(view(x), view(g), mut_view(gb));
      t.accumulate(ib, gb);
    }
  });
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  Tape& tape = same_tape(a, b, "matmul_nt");
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.cols()) {
    throw ContractViolation("matmul_nt: " + to_string(av.shape()) + " x " +
                            to_string(bv.shape()) + "^T");
  }
  Matrix out(av.rows(), bv.rows());
  kernels::omp::gemm_nt(view(av), view(bv), mut_view(out));
  const std::size_t ia = a.id(), ib = b.id();
  return tape.record("matmul_nt", std::move(out), {ia, ib}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_of(self);
    const Matrix& x = t.value(ia);
    const Matrix& y = t.value(ib);
    if (t.requires_grad(ia)) {
      Matrix ga(x.rows(), x.cols());
      kernels::omp::gemm(view(g), view(y), mut_view(ga));
      t.accumulate(ia, ga);
    }
    if (t.requires_grad(ib)) {
      Matrix gb(y.rows(), y.cols());
      kernels::omp::gemm_tn(view(g), view(x), mut_view(gb));
      t.accumulate(ib, gb);
    }
  });
}

Tensor transpose(const Tensor& a) {
  const Matrix& av = a.value();
  Matrix out(av.cols(), av.rows());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    for (std::size_t c = 0; c < av.cols(); ++c) out(c, r) = av(r, c);
  }
  const std::size_t ia = a.id();
  return a.tape().record("transpose", std::move(out), {ia}, [ia](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_of(self);
    Matrix ga(g.cols(), g.rows());
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) ga(c, r) = g(r, c);
    }
    t.accumulate(ia, ga);
  });
}

Tensor sparse_matmul(std::shared_ptr<const SparseOperand> s, const Tensor& b) {
  const Matrix& bv = b.value();
  if (s->forward.cols != bv.rows()) {
    throw ContractViolation("sparse_matmul: sparse operand has " + std::to_string(s->forward.cols) +
                            " columns, dense operand has " + std::to_string(bv.rows()) + " rows");
  }
  Matrix out(s->forward.rows, bv.cols());
  kernels::omp::spmm(s->forward, view(bv), mut_view(out));
  const std::size_t ib = b.id();
  return b.tape().record("sparse_matmul", std::move(out), {ib},
                         [ib, s = std::move(s)](Tape& t, std::size_t self) {
                           const Matrix& g = t.grad_of(self);
                           Matrix gb(s->transposed.rows, g.cols());
                           kernels::omp::spmm(s->transposed, view(g), mut_view(gb));
                           t.accumulate(ib, gb);
                         });
}

// ---------------------------------------------------------------- reductions & layout

Tensor sum(const Tensor& a) {
  const Matrix& av = a.value();
  double s = 0.0;
  for (double v : av.data()) s += v;
  const std::size_t ia = a.id();
  const Shape as = av.shape();
  return a.tape().record("sum", Matrix::scalar(s), {ia}, [ia, as](Tape& t, std::size_t self) {
    t.accumulate(ia, Matrix(as.rows, as.cols, t.grad_of(self)[0]));
  });
}

Tensor mean(const Tensor& a) {
  const Matrix& av = a.value();
  if (av.size() == 0) throw ContractViolation("mean of an empty tensor");
  double s = 0.0;
  for (double v : av.data()) s += v;
  const double n = static_cast<double>(av.size());
  const std::size_t ia = a.id();
  const Shape as = av.shape();
  return a.tape().record("mean", Matrix::scalar(s / n), {ia}, [ia, as, n](Tape& t, std::size_t self) {
    t.accumulate(ia, Matrix(as.rows, as.cols, t.grad_of(self)[0] / n));
  });
}

Tensor sum_rows(const Tensor& a) {
  const Matrix& av = a.value();
  Matrix out(av.rows(), 1);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    double s = 0.0;
    for (double v : av.row(r)) s += v;
    out[r] = s;
  }
  const std::size_t ia = a.id();
  const Shape as = av.shape();
  return a.tape().record("sum_rows", std::move(out), {ia}, [ia, as](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_of(self);
    Matrix ga(as.rows, as.cols);
    for (std::size_t r = 0; r < as.rows; ++r) {
      for (std::size_t c = 0; c < as.cols; ++c) ga(r, c) = g[r];
    }
    t.accumulate(ia, ga);
  });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ContractViolation("concat_cols: no inputs");
  Tape& tape = parts.front().tape();
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  std::vector<std::size_t> ids;
  std::vector<std::size_t> widths;
  for (const auto& p : parts) {
    same_tape(parts.front(), p, "concat_cols");
    if (p.rows() != rows) throw ContractViolation("concat_cols: row count mismatch");
    cols += p.cols();
    ids.push_back(p.id());
    widths.push_back(p.cols());
  }
  Matrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t off = 0;
    for (const auto& p : parts) {
      auto src = p.value().row(r);
      std::copy(src.begin(), src.end(), out.row(r).begin() + static_cast<std::ptrdiff_t>(off));
      off += p.cols();
    }
  }
  return tape.record("concat", std::move(out), ids, [ids, widths, rows](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_of(self);
    std::size_t off = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (t.requires_grad(ids[k])) {
        Matrix gk(rows, widths[k]);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < widths[k]; ++c) gk(r, c) = g(r, off + c);
        }
        t.accumulate(ids[k], gk);
      }
      off += widths[k];
    }
  });
}

Tensor gather_rows(const Tensor& a, std::span<const std::uint32_t> index) {
  const Matrix& av = a.value();
  Matrix out(index.size(), av.cols());
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] >= av.rows()) throw ContractViolation("gather_rows: index out of range");
    auto src = av.row(index[k]);
    std::copy(src.begin(), src.end(), out.row(k).begin());
  }
  const std::size_t ia = a.id();
  std::vector<std::uint32_t> idx(index.begin(), index.end());
  return a.tape().record("gather_rows", std::move(out), {ia},
                         [ia, idx = std::move(idx)](Tape& t, std::size_t self) {
                           const Matrix& g = t.grad_of(self);
                           for (std::size_t k = 0; k < idx.size(); ++k) t.accumulate_row(ia, idx[k], g.row(k));
                         });
}

Tensor pick(const Tensor& a, std::span<const std::uint32_t> index) {
  const Matrix& av = a.value();
  if (index.size() != av.rows()) throw ContractViolation("pick: need one index per row");
  Matrix out(av.rows(), 1);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    if (index[r] >= av.cols()) throw ContractViolation("pick: column index out of range");
    out[r] = av(r, index[r]);
  }
  const std::size_t ia = a.id();
  const Shape as = av.shape();
  std::vector<std::uint32_t> idx(index.begin(), index.end());
  return a.tape().record("pick", std::move(out), {ia},
                         [ia, as, idx = std::move(idx)](Tape& t, std::size_t self) {
                           const Matrix& g = t.grad_of(self);
                           Matrix ga(as.rows, as.cols);
                           for (std::size_t r = 0; r < as.rows; ++r) ga(r, idx[r]) = g[r];
                           t.accumulate(ia, ga);
                         });
}

Tensor l2_norm_rows(const Tensor& a) {
  const Matrix& av = a.value();
  Matrix out(av.rows(), 1);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    double s = 0.0;
    for (double v : av.row(r)) s += v * v;
    out[r] = std::sqrt(s);
  }
  const std::size_t ia = a.id();
  return a.tape().record("l2_norm_rows", std::move(out), {ia}, [ia](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_of(self);
    const Matrix& x = t.value(ia);
    const Matrix& y = t.value(self);
    Matrix ga(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      if (y[r] == 0.0) continue;
      const double s = g[r] / y[r];
      for (std::size_t c = 0; c < x.cols(); ++c) ga(r, c) = s * x(r, c);
    }
    t.accumulate(ia, ga);
  });
}

Tensor log_softmax_rows(const Tensor& a) {
  const Matrix& av = a.value();
  Matrix out(av.rows(), av.cols());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    auto x = av.row(r);
    const double mx = *std::max_element(x.begin(), x.end());
    double s = 0.0;
    for (double v : x) s += std::exp(v - mx);
    const double lse = mx + std::log(s);
    for (std::size_t c = 0; c < x.size(); ++c) out(r, c) = x[c] - lse;
  }
  const std::size_t ia = a.id();
  return a.tape().record("log_softmax_rows", std::move(out), {ia}, [ia](Tape& t, std::size_t self) {
    const Matrix& g = t.grad_of(self);
    const Matrix& y = t.value(self);
    Matrix ga(y.rows(), y.cols());
    for (std::size_t r = 0; r < y.rows(); ++r) {
      double gs = 0.0;
      for (std::size_t c = 0; c < y.cols(); ++c) gs += g(r, c);
      for (std::size_t c = 0; c < y.cols(); ++c) ga(r, c) = g(r, c) - std::exp(y(r, c)) * gs;
    }
    t.accumulate(ia, ga);
  });
}

}  // namespace dhypr::ad
