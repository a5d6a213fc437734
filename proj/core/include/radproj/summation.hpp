#pragma once

#include <cstddef>
#include <span>

namespace radproj {

/// Pairwise (tree) summation in a fixed order. The split points depend only on
/// the length of the input, so the result is reproducible bit for bit.
double pairwise_sum(std::span<const double> values);

}  // namespace radproj
