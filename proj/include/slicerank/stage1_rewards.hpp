#pragma once

#include <cstdlib>
#include <string>

#include "slicerank/completion_parser.hpp"
#include "slicerank/config.hpp"
#include "slicerank/reward_breakdown.hpp"

namespace slicerank {

namespace detail {

inline void require_labels(int predicted, int gold) {
  if (!is_label(predicted) || !is_label(gold)) {
    throw ContractViolation("scores must lie in [1, 5], got " + std::to_string(predicted) + " and " +
                            std::to_string(gold));
  }
}

}  // namespace detail

/// 1 - |predicted - gold| / (5 - 1).
inline double pointwise_reward(int predicted, int gold) {
  detail::require_labels(predicted, gold);
  return 1.0 - std::abs(predicted - gold) / static_cast<double>(kMaxLabel - kMinLabel);
}

/// 1 when both scores fall in the same band (>= 3 similar, < 3 dissimilar).
inline double binary_reward(int predicted, int gold) {
  detail::require_labels(predicted, gold);
  return ((predicted >= 3) == (gold >= 3)) ? 1.0 : 0.0;
}

/// Stage I total: w0 * pointwise + w1 * binary + w2 * format. A structurally
/// invalid parse earns zero on every component.
inline RewardBreakdown stage1_reward(const ParsedPrediction& parsed, int gold, const Weights& weights) {
  if (!is_label(gold)) throw ContractViolation("gold label must lie in [1, 5]");
  RewardBreakdown out;
  out.stage = Stage::One;
  if (!parsed.structurallyValid) {
    out.pointwise = 0.0;
    out.binary = 0.0;
    out.format = 0.0;
    out.total = 0.0;
    return out;
  }
  out.pointwise = pointwise_reward(*parsed.score, gold);
  out.binary = binary_reward(*parsed.score, gold);
  out.format = format_reward(parsed);
  out.total = weights[0] * *out.pointwise + weights[1] * *out.binary + weights[2] * *out.format;
  return out;
}

}  // namespace slicerank
