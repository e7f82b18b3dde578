#pragma once

#include <optional>

namespace slicerank {

enum class Stage { One = 1, Two = 2 };

/// Per-completion component rewards and their weighted total. A component is
/// present iff it was live for the stage that produced the breakdown.
struct RewardBreakdown {
  std::optional<double> pointwise;
  std::optional<double> binary;
  std::optional<double> format;
  std::optional<double> pairwise;
  std::optional<double> listwise;
  double total = 0.0;
  Stage stage = Stage::One;

  bool operator==(const RewardBreakdown&) const = default;
};

}  // namespace slicerank
