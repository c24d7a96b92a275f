#pragma once

#include <cstdint>
#include <span>

namespace dhypr {

// Area under the ROC curve by rank statistics; ties contribute 0.5.
// Throws MetricError unless both classes are present.
double auc(std::span<const std::uint8_t> labels, std::span<const double> scores);

// Mean of precision@rank over the positives, ranking by descending score with
// ties broken by ascending index. Throws MetricError without positives.
double average_precision(std::span<const std::uint8_t> labels, std::span<const double> scores);

// Fraction of exact matches; lengths must agree.
double accuracy(std::span<const std::int32_t> labels, std::span<const std::int32_t> predictions);

}  // namespace dhypr
