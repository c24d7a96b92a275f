#include "dhypr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dhypr::geometry {

namespace {

void require_same_dim(std::span<const double> x, std::span<const double> y, const char* op) {
  if (x.size() != y.size()) {
    throw ContractViolation(std::string(op) + ": dimension mismatch (" +
                            std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
  }
}

Vec scaled(std::span<const double> x, double s) {
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = s * x[i];
  return out;
}

}  // namespace

Curvature::Curvature(double c) : c_(c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ContractViolation("curvature must be positive and finite, got " + std::to_string(c));
  }
}

double Curvature::sqrt_c() const noexcept { return std::sqrt(c_); }

double Curvature::max_norm() const noexcept { return (1.0 - kBallEps) / std::sqrt(c_); }

double softplus(double raw) {
  // log(1 + e^x) without overflow for large x.
  return raw > 0.0 ? raw + std::log1p(std::exp(-raw)) : std::log1p(std::exp(raw));
}

double softplus_inverse(double c) {
  if (!(c > 0.0)) throw ContractViolation("softplus_inverse: argument must be positive");
  return c > 30.0 ? c + std::log(-std::expm1(-c)) : std::log(std::expm1(c));
}

double clamped_atanh(double x) {
  return std::atanh(std::clamp(x, -1.0 + kAtanhEps, 1.0 - kAtanhEps));
}

double clamped_tanh(double x) { return std::tanh(std::clamp(x, -kTanhLimit, kTanhLimit)); }

double tanh_ratio(double x) {
  if (std::abs(x) < kRatioSeries) {
    const double x2 = x * x;
    return 1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0;
  }
  return clamped_tanh(x) / x;
}

double atanh_ratio(double x) {
  if (std::abs(x) < kRatioSeries) {
    const double x2 = x * x;
    return 1.0 + x2 / 3.0 + x2 * x2 / 5.0;
  }
  return clamped_atanh(x) / x;
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_same_dim(x, y, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

Vec project_to_ball(std::span<const double> x, Curvature c) {
  for (double v : x) {
    if (!std::isfinite(v)) throw ContractViolation("project_to_ball: non-finite input");
  }
  const double n = norm(x);
  const double limit = c.max_norm();
  if (n >= limit) return scaled(x, limit / n);
  return Vec(x.begin(), x.end());
}

Vec mobius_add(std::span<const double> x, std::span<const double> y, Curvature c) {
  require_same_dim(x, y, "mobius_add");
  const double cv = c.value();
  const double xy = dot(x, y);
  const double x2 = dot(x, x);
  const double y2 = dot(y, y);
  const double a = 1.0 + 2.0 * cv * xy + cv * y2;
  const double b = 1.0 - cv * x2;
  const double denom = std::max(1.0 + 2.0 * cv * xy + cv * cv * x2 * y2, kMinNorm);
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (a * x[i] + b * y[i]) / denom;
  return project_to_ball(out, c);
}

Vec mobius_scalar_mul(double r, std::span<const double> x, Curvature c) {
  const double n = norm(x);
  if (n == 0.0) return Vec(x.size(), 0.0);
  const double sc = c.sqrt_c();
  const double s = clamped_tanh(r * clamped_atanh(sc * n)) / (sc * std::max(n, kMinNorm));
  return project_to_ball(scaled(x, s), c);
}

Vec mobius_matvec(std::span<const double> m, std::size_t rows, std::size_t cols,
                  std::span<const double> x, Curvature c) {
  if (m.size() != rows * cols || x.size() != cols) {
    throw ContractViolation("mobius_matvec: matrix is " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " but vector has dimension " +
                            std::to_string(x.size()));
  }
  Vec mx(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += m[i * cols + j] * x[j];
    mx[i] = s;
  }
  const double mx_norm = norm(mx);
  const double x_norm = norm(x);
  if (mx_norm == 0.0 || x_norm == 0.0) return Vec(rows, 0.0);
  const double sc = c.sqrt_c();
  const double t = clamped_tanh(mx_norm / x_norm * clamped_atanh(sc * x_norm));
  return project_to_ball(scaled(mx, t / (sc * mx_norm)), c);
}

Vec exp_map_origin(std::span<const double> v, Curvature c) {
  const double n = norm(v);
  if (n == 0.0) return Vec(v.size(), 0.0);
  const double sc = c.sqrt_c();
  return project_to_ball(scaled(v, clamped_tanh(sc * n) / (sc * n)), c);
}

Vec log_map_origin(std::span<const double> x, Curvature c) {
  const double n = norm(x);
  if (n == 0.0) return Vec(x.size(), 0.0);
  const double sc = c.sqrt_c();
  return scaled(x, clamped_atanh(sc * n) / (sc * n));
}

double distance(std::span<const double> x, std::span<const double> y, Curvature c) {
  require_same_dim(x, y, "distance");
  const Vec neg_x = scaled(x, -1.0);
  const Vec diff = mobius_add(neg_x, y, c);
  const double sc = c.sqrt_c();
  return 2.0 / sc * clamped_atanh(sc * norm(diff));
}

}  // namespace dhypr::geometry
