#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dhypr/errors.hpp"
#include "dhypr/metrics.hpp"
#include "dhypr/rng.hpp"

namespace {

using namespace dhypr;
using Labels = std::vector<std::uint8_t>;
using Scores = std::vector<double>;

// Probability that a random positive outscores a random negative, ties 1/2.
double brute_auc(const Labels& y, const Scores& s) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (!y[i] || y[j]) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

// Precision at each positive's rank, with the documented tie order.
double brute_ap(const Labels& y, const Scores& s) {
  const std::size_t n = y.size();
  double total = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!y[i]) continue;
    ++positives;
    std::size_t rank = 0, hits = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const bool ahead = s[j] > s[i] || (s[j] == s[i] && j <= i);
      if (ahead) {
        ++rank;
        hits += y[j];
      }
    }
    total += static_cast<double>(hits) / static_cast<double>(rank);
  }
  return total / static_cast<double>(positives);
}

TEST(Auc, WorkedExamples) {
  EXPECT_EQ(auc(Labels{1, 0, 1, 0}, Scores{0.9, 0.8, 0.7, 0.1}), 0.75);
  EXPECT_EQ(auc(Labels{1, 1, 0, 0}, Scores{0.9, 0.8, 0.2, 0.1}), 1.0);
  EXPECT_EQ(auc(Labels{1, 0, 1, 0, 0}, Scores{0.3, 0.3, 0.3, 0.3, 0.3}), 0.5);
  EXPECT_EQ(auc(Labels{0, 1}, Scores{0.9, 0.1}), 0.0);
}

TEST(Auc, Errors) {
  EXPECT_THROW(auc(Labels{1, 1}, Scores{0.1, 0.2}), MetricError);
  EXPECT_THROW(auc(Labels{0, 0}, Scores{0.1, 0.2}), MetricError);
  EXPECT_THROW(auc(Labels{1, 0}, Scores{0.1}), ContractViolation);
  EXPECT_THROW(auc(Labels{1, 0}, Scores{0.1, std::nan("")}), MetricError);
}

TEST(AveragePrecision, WorkedExamples) {
  EXPECT_EQ(average_precision(Labels{1, 0}, Scores{0.1, 0.9}), 0.5);
  EXPECT_EQ(average_precision(Labels{1, 1, 0}, Scores{0.9, 0.8, 0.1}), 1.0);
  // Positives at ranks 1 and 3: (1 + 2/3) / 2.
  EXPECT_NEAR(average_precision(Labels{1, 0, 1}, Scores{0.9, 0.5, 0.1}), 5.0 / 6.0, 1e-15);
  EXPECT_THROW(average_precision(Labels{0, 0}, Scores{0.1, 0.2}), MetricError);
}

TEST(Metrics, MatchBruteForceOnAllSizes) {
  Rng rng(12);
  for (std::size_t n = 2; n <= 200; n += 3) {
    Labels y(n);
    Scores s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.uniform() < 0.4 ? 1 : 0;
      // Coarse grid so ties are frequent.
      s[i] = std::floor(rng.uniform() * 10.0) / 10.0;
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_NEAR(auc(y, s), brute_auc(y, s), 1e-12) << "n=" << n;
    EXPECT_NEAR(average_precision(y, s), brute_ap(y, s), 1e-12) << "n=" << n;
  }
}

TEST(Metrics, InvariantUnderMonotoneTransform) {
  Rng rng(2);
  Labels y(100);
  Scores s(100), t(100);
  for (std::size_t i = 0; i < 100; ++i) {
    y[i] = i % 3 == 0;
    s[i] = rng.uniform(-2.0, 2.0);
    t[i] = std::exp(3.0 * s[i]) + 1.0;
  }
  EXPECT_EQ(auc(y, s), auc(y, t));
  EXPECT_EQ(average_precision(y, s), average_precision(y, t));
}

TEST(AveragePrecision, ImprovesWhenAPositiveMovesUp) {
  Rng rng(6);
  Labels y(60);
  Scores s(60);
  for (std::size_t i = 0; i < 60; ++i) {
    y[i] = i % 4 == 0;
    s[i] = rng.uniform();
  }
  double prev = average_precision(y, s);
  for (std::size_t i = 0; i < 60; i += 4) {
    s[i] += 0.3;
    const double now = average_precision(y, s);
    EXPECT_GE(now, prev);
    prev = now;
  }
}

TEST(Accuracy, Examples) {
  const std::vector<std::int32_t> a{1, 2, 3};
  EXPECT_EQ(accuracy(a, a), 1.0);
  EXPECT_EQ(accuracy(a, std::vector<std::int32_t>{0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(accuracy(a, std::vector<std::int32_t>{1, 2, 0}), 2.0 / 3.0);
  EXPECT_THROW(accuracy(a, std::vector<std::int32_t>{1, 2}), ContractViolation);
}

}  // namespace
