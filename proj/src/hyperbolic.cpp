#include "dhypr/hyperbolic.hpp"

#include "dhypr/geometry.hpp"

namespace dhypr::hyp {

using geometry::kBallEps;
using geometry::kMinNorm;

Tensor project(const Tensor& x, const Tensor& c) {
  const Tensor norms = ad::l2_norm_rows(x);
  const Tensor limit = (1.0 - kBallEps) / ad::sqrt(c);
  // limit / max(norm, limit) is exactly 1 strictly inside the ball.
  return x * (limit / ad::maximum(norms, limit));
}

Tensor mobius_add(const Tensor& x, const Tensor& y, const Tensor& c) {
  const Tensor xy = ad::sum_rows(x * y);
  const Tensor x2 = ad::sum_rows(x * x);
  const Tensor y2 = ad::sum_rows(y * y);
  const Tensor two_c_xy = 2.0 * c * xy;
  const Tensor num = (1.0 + two_c_xy + c * y2) * x + (1.0 - c * x2) * y;
  const Tensor den = ad::clamp_min(1.0 + two_c_xy + c * c * x2 * y2, kMinNorm);
  return project(num / den, c);
}

// The scale factors below are written with tanh_ratio / atanh_ratio so that
// they stay finite and differentiable at the origin.
Tensor mobius_scalar_mul(double r, const Tensor& x, const Tensor& c) {
  const Tensor sc = ad::sqrt(c);
  const Tensor a = ad::atanh_ratio(sc * ad::l2_norm_rows(x));
  // tanh(r atanh(sc |x|)) / (sc |x|) == tanh_ratio(y) * r * atanh_ratio(sc |x|)
  const Tensor y = r * (sc * ad::l2_norm_rows(x) * a);
  return project((r * (ad::tanh_ratio(y) * a)) * x, c);
}

Tensor mobius_matvec(const Tensor& w, const Tensor& x, const Tensor& c) {
  const Tensor sc = ad::sqrt(c);
  const Tensor mx = ad::matmul_nt(x, w);
  const Tensor a = ad::atanh_ratio(sc * ad::l2_norm_rows(x));
  // y = |Mx| / |x| * atanh(sc |x|); the factor tanh(y) / (sc |Mx|) reduces to
  // tanh_ratio(y) * atanh_ratio(sc |x|). Mx = 0 gives the origin.
  const Tensor y = sc * ad::l2_norm_rows(mx) * a;
  return project((ad::tanh_ratio(y) * a) * mx, c);
}

Tensor exp_map_origin(const Tensor& v, const Tensor& c) {
  const Tensor sc = ad::sqrt(c);
  return project(ad::tanh_ratio(sc * ad::l2_norm_rows(v)) * v, c);
}

Tensor log_map_origin(const Tensor& x, const Tensor& c) {
  const Tensor sc = ad::sqrt(c);
  return ad::atanh_ratio(sc * ad::l2_norm_rows(x)) * x;
}

Tensor distance(const Tensor& x, const Tensor& y, const Tensor& c) {
  const Tensor sc = ad::sqrt(c);
  const Tensor diff = mobius_add(-x, y, c);
  return 2.0 * (ad::atanh(sc * ad::l2_norm_rows(diff)) / sc);
}

}  // namespace dhypr::hyp
