#pragma once

#include "dhypr/tensor.hpp"

namespace dhypr {

// Rows of `x` projected onto its leading `components` principal axes (after
// centering), n x components. Each axis is signed so that its largest-magnitude
// coordinate is positive. Axes beyond the data dimension are zero.
ad::Matrix pca_project(const ad::Matrix& x, std::size_t components = 2);

}  // namespace dhypr
