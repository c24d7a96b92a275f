#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dhypr/pca.hpp"
#include "dhypr/rng.hpp"

namespace {

using namespace dhypr;
using ad::Matrix;

// Cyclic Jacobi eigen-decomposition of a symmetric matrix; columns of `vecs`
// are eigenvectors, sorted by descending eigenvalue.
void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& vals,
                  std::vector<std::vector<double>>& vecs) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a[x][x] > a[y][y]; });
  vals.clear();
  vecs.assign(n, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    vals.push_back(a[order[k]][order[k]]);
    for (std::size_t i = 0; i < n; ++i) vecs[i][k] = v[i][order[k]];
  }
}

Matrix random_data(Rng& rng, std::size_t n, std::size_t d) {
  Matrix x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.uniform(-1.0, 1.0) * static_cast<double>(d - j) + 0.5 * j;
  }
  return x;
}

TEST(Pca, MatchesJacobiOracleUpToSign) {
  Rng rng(1);
  const std::size_t n = 80, d = 5;
  const Matrix x = random_data(rng, n, d);
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += x(i, j) / n;
  }
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) cov[a][b] += (x(i, a) - mean[a]) * (x(i, b) - mean[b]) / (n - 1);
    }
  }
  std::vector<double> vals;
  std::vector<std::vector<double>> vecs;
  jacobi_eigen(cov, vals, vecs);

  const Matrix p = pca_project(x, 2);
  ASSERT_EQ(p.rows(), n);
  ASSERT_EQ(p.cols(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    std::vector<double> expected(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) expected[i] += (x(i, j) - mean[j]) * vecs[j][k];
    }
    const double sign = expected[0] * p(0, k) >= 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(p(i, k), sign * expected[i], 1e-6);
  }
}

TEST(Pca, RotationOfPlanarDataPreservesDistances) {
  Rng rng(2);
  const std::size_t n = 40;
  Matrix x(n, 3);
  const double a = 0.7;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform(-3.0, 3.0), v = rng.uniform(-1.0, 1.0);
    // Points on a tilted plane through (1, 2, 3).
    x(i, 0) = 1.0 + std::cos(a) * u;
    x(i, 1) = 2.0 + std::sin(a) * u;
    x(i, 2) = 3.0 + v;
  }
  const Matrix p = pca_project(x, 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double dx = 0.0, dp = 0.0;
      for (std::size_t k = 0; k < 3; ++k) dx += (x(i, k) - x(j, k)) * (x(i, k) - x(j, k));
      for (std::size_t k = 0; k < 2; ++k) dp += (p(i, k) - p(j, k)) * (p(i, k) - p(j, k));
      EXPECT_NEAR(std::sqrt(dx), std::sqrt(dp), 1e-9);
    }
  }
}

TEST(Pca, SignConventionAndDegenerateShapes) {
  Rng rng(3);
  const Matrix x = random_data(rng, 30, 4);
  Matrix flipped = x;
  for (auto& v : flipped.data()) v = -v;
  // Negating the data flips every axis; the sign rule flips it back.
  const Matrix a = pca_project(x, 2), b = pca_project(flipped, 2);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], -b[i], 1e-9);

  const Matrix one_d = pca_project(Matrix(5, 1, std::vector<double>{1, 2, 3, 4, 5}), 2);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(one_d(i, 1), 0.0);
  EXPECT_NEAR(std::abs(one_d(0, 0)), 2.0, 1e-12);
}

}  // namespace
