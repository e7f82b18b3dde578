#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "slicerank/errors.hpp"

namespace slicerank {

/// Ascending 1-based ranks; tied values share the mean of the ranks they span.
template <typename T>
std::vector<double> average_ranks(std::span<const T> values) {
  if (values.empty()) throw ContractViolation("average_ranks: empty input");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && !(values[order[i]] < values[order[j]])) ++j;
    // positions i..j-1 (0-based) hold ranks i+1..j
    double mean = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mean;
    i = j;
  }
  return ranks;
}

template <typename T>
std::vector<double> average_ranks(const std::vector<T>& values) {
  return average_ranks(std::span<const T>(values));
}

}  // namespace slicerank
