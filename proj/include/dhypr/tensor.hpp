#pragma once

// Minimal reverse-mode differentiation over dense 2-D real tensors.
//
// A Tape owns every value produced during one forward pass. Tensor is a cheap
// handle (tape pointer + node id). Nodes are appended in evaluation order, so
// the tape is already topologically sorted and backward() is a single reverse
// sweep. Scalars are 1x1 tensors; column (n x 1), row (1 x d) and scalar
// operands broadcast in the elementwise binary operations.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dhypr/errors.hpp"
#include "dhypr/sparse.hpp"

namespace dhypr::ad {

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t size() const noexcept { return rows * cols; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(Shape s);

// Dense row-major matrix of doubles. Plain value type.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix scalar(double v) { return Matrix(1, 1, v); }
  static Matrix identity(std::size_t n);
  static Matrix column(std::vector<double> v);

  std::size_t rows() const noexcept { return shape_.rows; }
  std::size_t cols() const noexcept { return shape_.cols; }
  Shape shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * shape_.cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * shape_.cols + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * shape_.cols, shape_.cols}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * shape_.cols, shape_.cols};
  }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::vector<double>& storage() noexcept { return data_; }

  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  Shape shape_{};
  std::vector<double> data_;
};

// A fixed sparse operand (e.g. aggregation weights) together with its
// transpose, which the backward pass of sparse_matmul needs.
struct SparseOperand {
  SparseMatrix forward;
  SparseMatrix transposed;
  explicit SparseOperand(SparseMatrix m) : forward(std::move(m)), transposed(forward.transpose()) {}
};

class Tape;

class Tensor {
 public:
  Tensor() = default;
  Tensor(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Matrix& value() const;
  Shape shape() const { return value().shape(); }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  // Value of a 1x1 tensor.
  double item() const;
  bool requires_grad() const;
  std::size_t id() const noexcept { return id_; }
  Tape& tape() const;
  bool valid() const noexcept { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  // Backward rule of one node: reads the node's gradient and pushes
  // contributions into its inputs via accumulate().
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Tensor variable(Matrix value);
  Tensor constant(Matrix value);

  // Appends an operation result. `backward` is kept only if some input
  // requires gradients. Throws NumericError when the value is not finite.
  Tensor record(const char* op, Matrix value, std::vector<std::size_t> inputs, BackwardFn backward);

  // Reverse sweep from a scalar loss. Gradients of earlier calls are cleared.
  void backward(const Tensor& loss);

  // Gradient of `t` after backward(); zero when `t` is not on a path to the loss.
  Matrix grad(const Tensor& t) const;

  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  const Matrix& grad_of(std::size_t id) const { return nodes_[id].grad; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  const char* op(std::size_t id) const { return nodes_[id].op; }
  void accumulate(std::size_t id, const Matrix& g);
  // Adds `g` into the gradient row `row` of node `id`.
  void accumulate_row(std::size_t id, std::size_t row, std::span<const double> g);
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    const char* op;
    Matrix value;
    Matrix grad;
    bool requires_grad;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
  };
  // deque keeps value references stable while the tape grows.
  std::deque<Node> nodes_;
};

// Elementwise binary operations with broadcasting.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
// Elementwise max; ties route the gradient to `a`.
Tensor maximum(const Tensor& a, const Tensor& b);

Tensor negate(const Tensor& a);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
// s / a, elementwise.
Tensor rdiv(double s, const Tensor& a);

Tensor matmul(const Tensor& a, const Tensor& b);
// a * b^T
Tensor matmul_nt(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor sparse_matmul(std::shared_ptr<const SparseOperand> s, const Tensor& b);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
// n x d -> n x 1
Tensor sum_rows(const Tensor& a);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor gather_rows(const Tensor& a, std::span<const std::uint32_t> index);
// One entry per row: out(i) = a(i, index[i]); n x 1.
Tensor pick(const Tensor& a, std::span<const std::uint32_t> index);

// tanh/atanh clamp their inputs (see geometry.hpp); the derivative is
// evaluated at the clamped input.
Tensor tanh(const Tensor& a);
Tensor atanh(const Tensor& a);
// tanh(a)/a and atanh(a)/a with value 1 and slope 0 at a = 0, so maps of the
// form ratio(|v|) * v have the identity Jacobian at the origin.
Tensor tanh_ratio(const Tensor& a);
Tensor atanh_ratio(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor softplus(const Tensor& a);
// Subgradient 0 at the kink.
Tensor relu(const Tensor& a);
// Gradient passes strictly inside (lo, hi), zero elsewhere.
Tensor clamp(const Tensor& a, double lo, double hi);
Tensor clamp_min(const Tensor& a, double lo);
// Row norms, n x d -> n x 1. Gradient at a zero row is zero.
Tensor l2_norm_rows(const Tensor& a);
Tensor log_softmax_rows(const Tensor& a);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator-(const Tensor& a) { return negate(a); }
inline Tensor operator*(double s, const Tensor& a) { return scale(a, s); }
inline Tensor operator*(const Tensor& a, double s) { return scale(a, s); }
inline Tensor operator+(const Tensor& a, double s) { return add_scalar(a, s); }
inline Tensor operator+(double s, const Tensor& a) { return add_scalar(a, s); }
inline Tensor operator-(const Tensor& a, double s) { return add_scalar(a, -s); }
inline Tensor operator-(double s, const Tensor& a) { return add_scalar(negate(a), s); }
inline Tensor operator/(double s, const Tensor& a) { return rdiv(s, a); }
inline Tensor operator/(const Tensor& a, double s) { return scale(a, 1.0 / s); }

}  // namespace dhypr::ad
