#include "dhypr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "dhypr/errors.hpp"

namespace dhypr {

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ContractViolation(std::string(what) + ": " + std::to_string(a) + " labels but " +
                            std::to_string(b) + " scores");
  }
}

void check_scores(std::span<const double> scores, const char* what) {
  for (double s : scores) {
    if (std::isnan(s)) throw MetricError(std::string(what) + ": NaN score");
  }
}

}  // namespace

double auc(std::span<const std::uint8_t> labels, std::span<const double> scores) {
  check_lengths(labels.size(), scores.size(), "auc");
  check_scores(scores, "auc");
  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of (doubled) midranks of the positives keeps everything integral.
  std::uint64_t n_pos = 0;
  std::uint64_t rank_sum2 = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const std::uint64_t twice_midrank = (i + 1) + j;  // ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        ++n_pos;
        rank_sum2 += twice_midrank;
      }
    }
    i = j;
  }
  const std::uint64_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw MetricError("auc: needs both positive and negative labels");
  // U = rank_sum - n_pos (n_pos + 1) / 2, doubled.
  const std::uint64_t u2 = rank_sum2 - n_pos * (n_pos + 1);
  return static_cast<double>(u2) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double average_precision(std::span<const std::uint8_t> labels, std::span<const double> scores) {
  check_lengths(labels.size(), scores.size(), "average_precision");
  check_scores(scores, "average_precision");
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double total = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (labels[order[r]]) {
      ++hits;
      total += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  if (hits == 0) throw MetricError("average_precision: no positive labels");
  return total / static_cast<double>(hits);
}

double accuracy(std::span<const std::int32_t> labels, std::span<const std::int32_t> predictions) {
  if (labels.size() != predictions.size()) {
    throw ContractViolation("accuracy: " + std::to_string(labels.size()) + " labels but " +
                            std::to_string(predictions.size()) + " predictions");
  }
  if (labels.empty()) throw MetricError("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += labels[i] == predictions[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace dhypr
