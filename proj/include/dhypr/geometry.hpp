#pragma once

// Poincare-ball gyrovector kernel on plain real vectors.
//
// These are the reference (untraced) implementations. The batched, traced
// counterparts used during training live in hyperbolic.hpp and are tested
// against these.

#include <span>
#include <vector>

#include "dhypr/errors.hpp"

namespace dhypr::geometry {

using Vec = std::vector<double>;

// Points are clamped to norm <= (1 - kBallEps) / sqrt(c).
inline constexpr double kBallEps = 1e-5;
// atanh arguments are clamped to [-1 + kAtanhEps, 1 - kAtanhEps].
inline constexpr double kAtanhEps = 1e-15;
// tanh arguments are clamped to [-kTanhLimit, kTanhLimit].
inline constexpr double kTanhLimit = 15.0;
// Lower bound substituted for norms appearing in denominators.
inline constexpr double kMinNorm = 1e-15;

// Ball parameter c > 0. The sectional curvature of the ball is -c.
class Curvature {
 public:
  explicit Curvature(double c);
  double value() const noexcept { return c_; }
  double sqrt_c() const noexcept;
  // Largest admissible norm, (1 - kBallEps) / sqrt(c).
  double max_norm() const noexcept;

 private:
  double c_;
};

// Softplus, used to parameterize trainable curvatures.
double softplus(double raw);
// Inverse of softplus; returns the raw value r with softplus(r) == c.
double softplus_inverse(double c);

double clamped_atanh(double x);
double clamped_tanh(double x);
// clamped_tanh(x) / x and clamped_atanh(x) / x, continued by their limit 1 at
// x = 0 (series below |x| < kRatioSeries).
inline constexpr double kRatioSeries = 1e-3;
double tanh_ratio(double x);
double atanh_ratio(double x);

double norm(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

Vec project_to_ball(std::span<const double> x, Curvature c);
Vec mobius_add(std::span<const double> x, std::span<const double> y, Curvature c);
// r (x) x; extended with r (x) 0 = 0.
Vec mobius_scalar_mul(double r, std::span<const double> x, Curvature c);
// M (x) x for a row-major m x n matrix; Mx = 0 maps to the origin.
Vec mobius_matvec(std::span<const double> m, std::size_t rows, std::size_t cols,
                  std::span<const double> x, Curvature c);
Vec exp_map_origin(std::span<const double> v, Curvature c);
Vec log_map_origin(std::span<const double> x, Curvature c);
double distance(std::span<const double> x, std::span<const double> y, Curvature c);

}  // namespace dhypr::geometry
