#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "slicerank/config.hpp"
#include "slicerank/sample.hpp"
#include "slicerank/psrr.hpp"
#include "slicerank/stage1_rewards.hpp"

namespace slicerank {

/// Stage I while step < stage1Steps, Stage II afterwards.
inline Stage stage_at(std::uint64_t step, const CurriculumConfig& config) {
  return step < config.stage1Steps ? Stage::One : Stage::Two;
}

/// Row-major N x G rewards aligned with a SliceMatrix.
class RewardGrid {
 public:
  RewardGrid(std::size_t n, std::size_t g) : n_(n), g_(g), cells_(n * g) {}

  std::size_t n_samples() const { return n_; }
  std::size_t group_size() const { return g_; }
  RewardBreakdown& at(std::size_t i, std::size_t j) { return cells_.at(i * g_ + j); }
  const RewardBreakdown& at(std::size_t i, std::size_t j) const { return cells_.at(i * g_ + j); }
  const std::vector<RewardBreakdown>& cells() const { return cells_; }

  /// Totals of sample i's G completions, the input to group normalization.
  std::vector<double> group_totals(std::size_t i) const {
    std::vector<double> out;
    out.reserve(g_);
    for (std::size_t j = 0; j < g_; ++j) out.push_back(at(i, j).total);
    return out;
  }

  bool operator==(const RewardGrid&) const = default;

 private:
  std::size_t n_;
  std::size_t g_;
  std::vector<RewardBreakdown> cells_;
};

inline RewardGrid compute_batch_rewards(const SliceMatrix& matrix, Stage stage, const CurriculumConfig& config) {
  const std::size_t n = matrix.n_samples();
  const std::size_t g = matrix.group_size();
  RewardGrid grid(n, g);

  if (stage == Stage::One) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < g; ++j) {
        grid.at(i, j) = stage1_reward(matrix.at(i, j), matrix.labels()[i], config.stage1Weights);
      }
    }
    return grid;
  }

  if (n < 2) throw ConfigError("Stage II needs at least 2 samples per batch, got " + std::to_string(n));
  const auto params = Stage2Params::from(config);
  const auto slices = build_slices(matrix);
  for (const auto& slice : slices) {
    const std::size_t j = slice.sliceIndex;
    const auto listwise = listwise_rewards(slice);
    for (std::size_t i = 0; i < n; ++i) {
      std::optional<PairContext> pair;
      if (matrix.pairs_with_next(i)) {
        pair = PairContext{matrix.at(i + 1, j), matrix.labels()[i + 1], PairRole::First};
      } else if (i > 0 && matrix.pairs_with_next(i - 1)) {
        pair = PairContext{matrix.at(i - 1, j), matrix.labels()[i - 1], PairRole::Second};
      }
      grid.at(i, j) = stage2_reward(matrix.at(i, j), matrix.labels()[i], pair, listwise[i], params);
    }
  }
  return grid;
}

/// Consecutive batches of at most `slice_size` samples covering [0, n).
inline std::vector<std::pair<std::size_t, std::size_t>> batch_bounds(std::size_t n, std::size_t slice_size) {
  if (slice_size == 0) throw ConfigError("slice size must be positive");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t b = 0; b < n; b += slice_size) out.emplace_back(b, std::min(n, b + slice_size));
  return out;
}

/// Scores a whole dataset: samples are split into consecutive batches of
/// config.sliceSize, each batch forms its own slices, and pairs are honored only
/// when both members fall in the same batch. `cells` is row-major
/// (samples.size() x group_size).
inline RewardGrid score_dataset(const std::vector<Sample>& samples, const std::vector<ParsedPrediction>& cells,
                                std::size_t group_size, Stage stage, const CurriculumConfig& config) {
  if (cells.size() != samples.size() * group_size) {
    throw ShapeError("expected " + std::to_string(samples.size() * group_size) + " completions (" +
                     std::to_string(samples.size()) + " samples x " + std::to_string(group_size) + "), found " +
                     std::to_string(cells.size()));
  }
  RewardGrid out(samples.size(), group_size);
  const auto mask = pair_mask(samples);
  for (auto [begin, end] : batch_bounds(samples.size(), static_cast<std::size_t>(config.sliceSize))) {
    const std::size_t n = end - begin;
    std::vector<ParsedPrediction> batch_cells(cells.begin() + static_cast<std::ptrdiff_t>(begin * group_size),
                                              cells.begin() + static_cast<std::ptrdiff_t>(end * group_size));
    std::vector<int> labels;
    std::vector<bool> batch_mask(n, false);
    for (std::size_t i = begin; i < end; ++i) {
      labels.push_back(samples[i].label);
      batch_mask[i - begin] = i + 1 < end && mask[i];
    }
    SliceMatrix matrix(n, group_size, std::move(batch_cells), std::move(labels), std::move(batch_mask));
    const auto grid = compute_batch_rewards(matrix, stage, config);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < group_size; ++j) out.at(begin + i, j) = grid.at(i, j);
    }
  }
  return out;
}

}  // namespace slicerank
