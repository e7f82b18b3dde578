#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <span>
#include <vector>

#include "slicerank/ranking.hpp"
#include "slicerank/sample.hpp"

namespace slicerank {

/// Product-moment correlation. Throws UndefinedCorrelation for fewer than two
/// points or when either input is constant.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractViolation("pearson: inputs differ in length");
  if (x.size() < 2) throw UndefinedCorrelation("correlation needs at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("correlation is undefined for constant input");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(std::span<const double>(x), std::span<const double>(y));
}

/// Pearson correlation of the average-rank vectors.
inline double spearman(std::span<const double> predicted, std::span<const double> gold) {
  if (predicted.size() != gold.size()) throw ContractViolation("spearman: inputs differ in length");
  if (predicted.size() < 2) throw UndefinedCorrelation("correlation needs at least 2 points");
  const auto rp = average_ranks(predicted);
  const auto rg = average_ranks(gold);
  return pearson(rp, rg);
}

inline double spearman(const std::vector<double>& predicted, const std::vector<double>& gold) {
  return spearman(std::span<const double>(predicted), std::span<const double>(gold));
}

/// Counts of |predicted - gold| over buckets 0..4.
struct ErrorHistogram {
  std::array<std::size_t, kMaxLabel - kMinLabel + 1> counts{};
  std::size_t total = 0;

  bool operator==(const ErrorHistogram&) const = default;
};

inline ErrorHistogram error_histogram(std::span<const int> predicted, std::span<const int> gold) {
  if (predicted.size() != gold.size()) throw ContractViolation("error_histogram: inputs differ in length");
  ErrorHistogram h;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (!is_label(predicted[i]) || !is_label(gold[i])) {
      throw ContractViolation("error_histogram: scores must lie in [1, 5]");
    }
    ++h.counts[static_cast<std::size_t>(std::abs(predicted[i] - gold[i]))];
    ++h.total;
  }
  return h;
}

inline ErrorHistogram error_histogram(const std::vector<int>& predicted, const std::vector<int>& gold) {
  return error_histogram(std::span<const int>(predicted), std::span<const int>(gold));
}

}  // namespace slicerank
