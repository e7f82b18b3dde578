#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "slicerank/errors.hpp"

namespace slicerank {

/// Z-scores of one sample's G completion rewards:
/// (r_i - mean) / (population std + epsilon).
inline std::vector<double> group_advantages(std::span<const double> rewards, double epsilon) {
  if (rewards.size() < 2) throw ContractViolation("group_advantages: need at least 2 rewards");
  if (!(epsilon > 0.0)) throw ContractViolation("group_advantages: epsilon must be positive");
  // summing equal values need not reproduce them exactly, so short-circuit
  if (std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards.front(); })) {
    return std::vector<double>(rewards.size(), 0.0);
  }
  const double g = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= g;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double denom = std::sqrt(var / g) + epsilon;

  std::vector<double> out;
  out.reserve(rewards.size());
  for (double r : rewards) out.push_back((r - mean) / denom);
  return out;
}

inline std::vector<double> group_advantages(const std::vector<double>& rewards, double epsilon) {
  return group_advantages(std::span<const double>(rewards), epsilon);
}

/// True when every reward in the group is identical, so all advantages are 0.
inline bool is_degenerate_group(std::span<const double> rewards) {
  for (double r : rewards) {
    if (r != rewards.front()) return false;
  }
  return true;
}

/// Value of the token-level surrogate at ratio 1, plus the coefficient each
/// token's log-probability gradient is scaled by. With a terminal reward and no
/// discounting every token of completion i carries advantage i; the host
/// framework applies these to its own gradients.
struct SurrogateTerms {
  double objective = 0.0;
  std::vector<std::vector<double>> tokenCoefficients;
};

inline SurrogateTerms dapo_objective(std::span<const double> advantages, std::span<const std::size_t> token_counts) {
  if (advantages.size() != token_counts.size()) {
    throw ContractViolation("dapo_objective: advantages and token counts differ in length");
  }
  if (advantages.empty()) throw ContractViolation("dapo_objective: empty group");
  SurrogateTerms out;
  double weighted = 0.0;
  std::size_t total_tokens = 0;
  out.tokenCoefficients.reserve(advantages.size());
  for (std::size_t i = 0; i < advantages.size(); ++i) {
    if (token_counts[i] == 0) throw ContractViolation("dapo_objective: token counts must be >= 1");
    weighted += static_cast<double>(token_counts[i]) * advantages[i];
    total_tokens += token_counts[i];
    out.tokenCoefficients.emplace_back(token_counts[i], advantages[i]);
  }
  out.objective = weighted / static_cast<double>(total_tokens);
  return out;
}

inline SurrogateTerms dapo_objective(const std::vector<double>& advantages, const std::vector<std::size_t>& token_counts) {
  return dapo_objective(std::span<const double>(advantages), std::span<const std::size_t>(token_counts));
}

/// Half-open range [begin, end) of flat completion indices.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const IndexRange&) const = default;
};

/// Sequential forward/backward passes over the N x G completions of a batch.
/// Ordering contract: rewards and advantages for all completions are computed
/// globally before the first pass; passes only consume them.
struct AccumulationPlan {
  std::size_t totalCompletions = 0;
  std::size_t subBatchSize = 0;
  std::vector<IndexRange> passes;
};

inline AccumulationPlan plan_accumulation(std::size_t total_completions, std::size_t sub_batch_size) {
  if (total_completions == 0 || sub_batch_size == 0) {
    throw ContractViolation("plan_accumulation: total and sub-batch size must be positive");
  }
  AccumulationPlan plan{total_completions, sub_batch_size, {}};
  for (std::size_t b = 0; b < total_completions; b += sub_batch_size) {
    plan.passes.push_back({b, std::min(b + sub_batch_size, total_completions)});
  }
  return plan;
}

}  // namespace slicerank
