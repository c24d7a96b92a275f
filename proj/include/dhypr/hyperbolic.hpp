#pragma once

// Batched Poincare-ball operations on the differentiation tape. Each row of
// an n x d tensor is one point; `c` is a 1x1 tensor holding the ball
// parameter so that curvature can be trained. Semantics, clamps and guards
// match the reference kernel in geometry.hpp.

#include "dhypr/tensor.hpp"

namespace dhypr::hyp {

using ad::Tensor;

// Rescales rows with norm >= (1 - ball_eps)/sqrt(c) onto that shell.
Tensor project(const Tensor& x, const Tensor& c);
// Row-wise x (+) y. `y` may be a single 1 x d row, broadcast over x.
Tensor mobius_add(const Tensor& x, const Tensor& y, const Tensor& c);
Tensor mobius_scalar_mul(double r, const Tensor& x, const Tensor& c);
// Row-wise W (x) x_i for W of shape out x in and x of shape n x in.
Tensor mobius_matvec(const Tensor& w, const Tensor& x, const Tensor& c);
Tensor exp_map_origin(const Tensor& v, const Tensor& c);
Tensor log_map_origin(const Tensor& x, const Tensor& c);
// Row-wise hyperbolic distance, n x 1.
Tensor distance(const Tensor& x, const Tensor& y, const Tensor& c);

}  // namespace dhypr::hyp
