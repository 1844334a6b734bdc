#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace nlac {

// Row-parallel loop. Every row is written by exactly one worker, so the result
// never depends on the worker count.
void parallel_rows(std::size_t rows, int workers, const std::function<void(std::size_t)>& body);

/// Pairwise sum with a fixed splitting tree. Bit-identical for a given input
/// regardless of how the partials were produced.
double pairwise_sum(std::span<const double> values);

}  // namespace nlac
