#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slicerank/completion_parser.hpp"
#include "slicerank/config.hpp"
#include "slicerank/ranking.hpp"
#include "slicerank/reward_breakdown.hpp"
#include "slicerank/stage1_rewards.hpp"

namespace slicerank {

/// N x G grid of parsed completions for one batch, row i = sample i,
/// column j = j-th completion. Labels and the adjacent-pair mask are per row.
class SliceMatrix {
 public:
  SliceMatrix(std::size_t n_samples, std::size_t group_size, std::vector<ParsedPrediction> cells,
              std::vector<int> labels, std::vector<bool> pair_mask)
      : n_(n_samples),
        g_(group_size),
        cells_(std::move(cells)),
        labels_(std::move(labels)),
        pair_mask_(std::move(pair_mask)) {
    if (n_ == 0 || g_ == 0) throw ShapeError("slice matrix needs positive dimensions");
    if (cells_.size() != n_ * g_) {
      throw ShapeError("expected " + std::to_string(n_ * g_) + " cells, found " + std::to_string(cells_.size()));
    }
    if (labels_.size() != n_) throw ShapeError("labels length must equal the number of samples");
    if (pair_mask_.empty()) pair_mask_.assign(n_, false);
    if (pair_mask_.size() != n_) throw ShapeError("pair mask length must equal the number of samples");
    for (int y : labels_) {
      if (!is_label(y)) throw RangeError("label " + std::to_string(y) + " is not in [1, 5]");
    }
    if (pair_mask_.back()) throw ShapeError("last sample cannot start a pair");
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      if (pair_mask_[i] && pair_mask_[i + 1]) throw ShapeError("overlapping pairs in pair mask");
    }
  }

  std::size_t n_samples() const { return n_; }
  std::size_t group_size() const { return g_; }
  const ParsedPrediction& at(std::size_t sample, std::size_t completion) const {
    return cells_.at(sample * g_ + completion);
  }
  std::span<const int> labels() const { return labels_; }
  /// True iff rows i and i+1 form a valid pair.
  bool pairs_with_next(std::size_t i) const { return pair_mask_.at(i); }
  const std::vector<bool>& pair_mask() const { return pair_mask_; }

 private:
  std::size_t n_;
  std::size_t g_;
  std::vector<ParsedPrediction> cells_;
  std::vector<int> labels_;
  std::vector<bool> pair_mask_;
};

/// Column j of the matrix: the j-th completion's score for every sample.
struct Slice {
  std::size_t sliceIndex = 0;  // 0-based
  std::vector<std::optional<int>> scores;
  std::vector<int> labels;
};

inline std::vector<Slice> build_slices(const SliceMatrix& m) {
  if (m.n_samples() < 2) throw ConfigError("parallel slices need at least 2 samples");
  std::vector<Slice> slices(m.group_size());
  for (std::size_t j = 0; j < m.group_size(); ++j) {
    auto& s = slices[j];
    s.sliceIndex = j;
    s.labels.assign(m.labels().begin(), m.labels().end());
    s.scores.reserve(m.n_samples());
    for (std::size_t i = 0; i < m.n_samples(); ++i) {
      const auto& p = m.at(i, j);
      s.scores.push_back(p.structurallyValid ? p.score : std::nullopt);
    }
  }
  return slices;
}

inline int sign(int v) { return (v > 0) - (v < 0); }

/// Sign-gated pair reward. Zero when the predicted order disagrees with the
/// gold order (a tie on one side and a strict order on the other counts as
/// disagreement); otherwise base + (1 - base) * (1 - |dPred - dTrue| / maxError),
/// never below base.
inline double pairwise_reward(int pred_first, int pred_second, int gold_first, int gold_second,
                              double base_reward, double max_error) {
  detail::require_labels(pred_first, gold_first);
  detail::require_labels(pred_second, gold_second);
  if (!(base_reward >= 0.0 && base_reward < 1.0)) throw ContractViolation("base reward must lie in [0, 1)");
  if (!(max_error > 0.0)) throw ContractViolation("max_error must be positive");

  const int d_pred = pred_first - pred_second;
  const int d_true = gold_first - gold_second;
  if (sign(d_pred) != sign(d_true)) return 0.0;
  const double closeness = 1.0 - std::abs(d_pred - d_true) / max_error;
  return std::max(base_reward, base_reward + (1.0 - base_reward) * closeness);
}

/// Per-completion rank-error reward within one slice:
/// 1 - |rank of prediction among present predictions - rank of label among all labels| / (N - 1).
/// Absent predictions get absent rewards.
inline std::vector<std::optional<double>> listwise_rewards(const Slice& slice) {
  const std::size_t n = slice.scores.size();
  if (n < 2 || slice.labels.size() != n) {
    throw ContractViolation("listwise_rewards: slice needs N >= 2 scores and N labels");
  }
  std::vector<int> present;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < n; ++i) {
    if (slice.scores[i]) {
      present.push_back(*slice.scores[i]);
      where.push_back(i);
    }
  }
  std::vector<std::optional<double>> out(n);
  if (present.empty()) return out;

  const auto pred_ranks = average_ranks(present);
  const auto ideal_ranks = average_ranks(slice.labels);
  const double norm = static_cast<double>(n - 1);
  for (std::size_t k = 0; k < present.size(); ++k) {
    out[where[k]] = 1.0 - std::abs(pred_ranks[k] - ideal_ranks[where[k]]) / norm;
  }
  return out;
}

/// What a completion knows about its pair partner in the same slice.
struct PairContext {
  ParsedPrediction partner;
  int partnerLabel = kMinLabel;
  PairRole role = PairRole::First;  // role of the completion being scored
};

struct Stage2Params {
  Weights weights{1.0, 1.5, 1.0};
  double baseReward = 0.5;
  double maxError = 3.0;

  static Stage2Params from(const CurriculumConfig& c) { return {c.stage2Weights, c.baseReward, c.maxError}; }
};

/// Stage II total: w0 * pointwise + w1 * pairwise + w2 * listwise. Pairwise is
/// absent (contributes 0) when there is no pair or the partner's completion is
/// invalid. An invalid parse zeroes every component.
inline RewardBreakdown stage2_reward(const ParsedPrediction& parsed, int gold,
                                     const std::optional<PairContext>& pair,
                                     std::optional<double> listwise, const Stage2Params& params) {
  if (!is_label(gold)) throw ContractViolation("gold label must lie in [1, 5]");
  RewardBreakdown out;
  out.stage = Stage::Two;
  if (!parsed.structurallyValid) {
    out.pointwise = 0.0;
    out.pairwise = 0.0;
    out.listwise = 0.0;
    out.total = 0.0;
    return out;
  }
  const int score = *parsed.score;
  out.pointwise = pointwise_reward(score, gold);
  if (pair && pair->partner.structurallyValid) {
    const int other = *pair->partner.score;
    out.pairwise = pair->role == PairRole::First
                       ? pairwise_reward(score, other, gold, pair->partnerLabel, params.baseReward, params.maxError)
                       : pairwise_reward(other, score, pair->partnerLabel, gold, params.baseReward, params.maxError);
  }
  out.listwise = listwise;
  const auto& w = params.weights;
  out.total = w[0] * *out.pointwise + w[1] * out.pairwise.value_or(0.0) + w[2] * out.listwise.value_or(0.0);
  return out;
}

}  // namespace slicerank
