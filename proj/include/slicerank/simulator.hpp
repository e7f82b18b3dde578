#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "slicerank/completion_parser.hpp"
#include "slicerank/config.hpp"
#include "slicerank/curriculum.hpp"
#include "slicerank/metrics.hpp"
#include "slicerank/sample.hpp"

namespace slicerank::sim {

/// Three-parameter stand-in for a scoring policy: predicted score is the gold
/// label shifted by `bias` plus Gaussian noise, rounded and clamped to [1, 5];
/// with probability `formatErrorRate` the completion is malformed instead.
struct SyntheticPolicy {
  double bias = 0.0;
  double noiseSigma = 0.0;
  double formatErrorRate = 0.0;

  bool operator==(const SyntheticPolicy&) const = default;
};

inline void check_policy(const SyntheticPolicy& p) {
  if (!std::isfinite(p.bias)) throw ConfigError("policy bias must be finite");
  if (!(p.noiseSigma >= 0.0) || !std::isfinite(p.noiseSigma)) throw ConfigError("noiseSigma must be >= 0");
  if (!(p.formatErrorRate >= 0.0 && p.formatErrorRate <= 1.0)) {
    throw ConfigError("formatErrorRate must lie in [0, 1]");
  }
}

/// splitmix64 finalizer; derives independent stream seeds from one run seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace detail {

inline constexpr std::array<const char*, 8> kSubjects{
    "A man", "A woman", "Two children", "A small dog", "A group of cyclists", "An old fisherman", "A chef", "Three students"};
inline constexpr std::array<const char*, 8> kActions{
    "is standing next to", "walks past", "is painting", "sits beside", "is carrying", "looks at", "is cleaning", "waits near"};
inline constexpr std::array<const char*, 8> kObjects{
    "a red car", "a wooden table", "a crowded market stall", "a blue bicycle", "a kitchen counter", "a snowy bench",
    "a tall lamp", "a pile of books"};
inline constexpr std::array<const char*, 8> kConditions{
    "The number of people.", "The color of the object.", "The room type.", "The activity.",
    "The weather.", "The age of the people.", "The type of vehicle.", "The location."};

template <typename Array>
const char* pick(const Array& a, std::mt19937_64& rng) {
  return a[std::uniform_int_distribution<std::size_t>(0, a.size() - 1)(rng)];
}

}  // namespace detail

/// 2 * n_pairs samples in adjacent pairs: both members share the same two
/// sentences and get distinct conditions; the first carries the higher label.
inline std::vector<Sample> generate_dataset(std::size_t n_pairs, std::uint64_t seed) {
  if (n_pairs == 0) throw ConfigError("generate_dataset: need at least one pair");
  std::mt19937_64 rng(derive_seed(seed, 0));
  std::uniform_int_distribution<int> label(kMinLabel, kMaxLabel);
  std::vector<Sample> out;
  out.reserve(2 * n_pairs);
  for (std::size_t k = 0; k < n_pairs; ++k) {
    std::string tag = " (scene " + std::to_string(k) + ")";
    std::string t1 = std::string(detail::pick(detail::kSubjects, rng)) + " " + detail::pick(detail::kActions, rng) +
                     " " + detail::pick(detail::kObjects, rng) + tag + ".";
    std::string t2 = std::string(detail::pick(detail::kSubjects, rng)) + " " + detail::pick(detail::kActions, rng) +
                     " " + detail::pick(detail::kObjects, rng) + tag + ".";
    std::size_t c1 = std::uniform_int_distribution<std::size_t>(0, detail::kConditions.size() - 1)(rng);
    std::size_t c2 = std::uniform_int_distribution<std::size_t>(0, detail::kConditions.size() - 2)(rng);
    if (c2 >= c1) ++c2;
    int a = label(rng);
    int b = label(rng);
    std::string id = "p" + std::to_string(k);
    out.push_back({t1, t2, detail::kConditions[c1], std::max(a, b), id, PairRole::First});
    out.push_back({t1, t2, detail::kConditions[c2], std::min(a, b), id, PairRole::Second});
  }
  return out;
}

/// Per-cell random draws. Fixing these and varying only the policy gives
/// common random numbers across policy evaluations.
struct CellNoise {
  double gaussian = 0.0;
  double uniform = 1.0;
  std::uint32_t malformedVariant = 0;
};

inline std::vector<CellNoise> draw_noise(std::size_t n_samples, std::size_t group_size, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, 1));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<CellNoise> out(n_samples * group_size);
  for (auto& c : out) {
    c.gaussian = normal(rng);
    c.uniform = unit(rng);
    c.malformedVariant = static_cast<std::uint32_t>(rng() % 5);
  }
  return out;
}

inline int policy_score(const SyntheticPolicy& policy, int gold, const CellNoise& noise) {
  const double raw = gold + policy.bias + policy.noiseSigma * noise.gaussian;
  return static_cast<int>(std::clamp(std::lround(raw), long{kMinLabel}, long{kMaxLabel}));
}

inline std::string render_completion(const SyntheticPolicy& policy, int gold, const CellNoise& noise) {
  const int k = policy_score(policy, gold, noise);
  const std::string digit = std::to_string(k);
  if (noise.uniform < policy.formatErrorRate) {
    switch (noise.malformedVariant) {
      case 0: return "The sentences differ under the condition. " + std::string(k >= 3 ? "yes" : "no") + "(" + digit + ")";
      case 1: return "Hard to say. <answer>maybe(" + digit + ")</answer>";
      case 2: return "Comparing both sentences. <answer>yes(" + std::to_string(k + 5) + ")</answer>";
      case 3: return "Under this condition: <answer>Yes, " + digit + "</answer>";
      default: return "I would rate this a " + digit + " out of 5.";
    }
  }
  return std::string("Comparing both sentences under the condition. <answer>") + (k >= 3 ? "yes" : "no") + "(" +
         digit + ")</answer>";
}

/// Row-major N x G completion texts.
inline std::vector<std::string> sample_completions(const SyntheticPolicy& policy, const std::vector<Sample>& samples,
                                                   std::size_t group_size, const std::vector<CellNoise>& noise) {
  if (noise.size() != samples.size() * group_size) throw ShapeError("noise grid does not match samples x G");
  std::vector<std::string> out;
  out.reserve(noise.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = 0; j < group_size; ++j) {
      out.push_back(render_completion(policy, samples[i].label, noise[i * group_size + j]));
    }
  }
  return out;
}

inline std::vector<std::string> sample_completions(const SyntheticPolicy& policy, const std::vector<Sample>& samples,
                                                   std::size_t group_size, std::uint64_t seed) {
  if (group_size < 2) throw ConfigError("group size must be at least 2");
  check_policy(policy);
  return sample_completions(policy, samples, group_size, draw_noise(samples.size(), group_size, seed));
}

struct TrajectoryPoint {
  std::size_t iteration = 0;
  SyntheticPolicy policy;
  Stage stage = Stage::One;
  double meanReward = 0.0;
  // NaN when fewer than two held-out predictions parse or they are constant.
  double heldoutSpearman = 0.0;
};

using Trajectory = std::vector<TrajectoryPoint>;

struct ClimbOptions {
  double biasStep = 0.25;
  double noiseStep = 0.25;
  double formatStep = 0.05;
  // Held-out pairs; 0 means the same count as the training dataset.
  std::size_t heldoutPairs = 0;
};

/// Evaluates policies against the reward engine on fixed noise draws.
class PolicyEvaluator {
 public:
  PolicyEvaluator(std::vector<Sample> dataset, CurriculumConfig config, std::uint64_t seed, std::size_t heldout_pairs)
      : dataset_(std::move(dataset)),
        config_(std::move(config)),
        group_size_(static_cast<std::size_t>(config_.groupSize)),
        noise_(draw_noise(dataset_.size(), group_size_, derive_seed(seed, 10))),
        heldout_(generate_dataset(heldout_pairs, derive_seed(seed, 11))),
        heldout_noise_(draw_noise(heldout_.size(), 1, derive_seed(seed, 12))) {}

  double mean_reward(const SyntheticPolicy& policy, Stage stage) const {
    const auto texts = sample_completions(policy, dataset_, group_size_, noise_);
    std::vector<ParsedPrediction> cells;
    cells.reserve(texts.size());
    for (const auto& t : texts) cells.push_back(parse_completion(t));
    const auto grid = score_dataset(dataset_, cells, group_size_, stage, config_);
    double sum = 0.0;
    for (const auto& r : grid.cells()) sum += r.total;
    return sum / static_cast<double>(grid.cells().size());
  }

  double heldout_spearman(const SyntheticPolicy& policy) const {
    const auto texts = sample_completions(policy, heldout_, 1, heldout_noise_);
    std::vector<double> predicted;
    std::vector<double> gold;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      const auto p = parse_completion(texts[i]);
      if (!p.structurallyValid) continue;
      predicted.push_back(*p.score);
      gold.push_back(heldout_[i].label);
    }
    try {
      return spearman(predicted, gold);
    } catch (const UndefinedCorrelation&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }

 private:
  std::vector<Sample> dataset_;
  CurriculumConfig config_;
  std::size_t group_size_;
  std::vector<CellNoise> noise_;
  std::vector<Sample> heldout_;
  std::vector<CellNoise> heldout_noise_;
};

/// Coordinate-wise local search over (bias, noiseSigma, formatErrorRate).
/// Iteration 0 records the initial policy. Each later iteration evaluates the
/// six +/- step neighbours in a fixed order under the stage given by
/// stage_at(iteration) and moves to the best one only if it strictly beats the
/// incumbent. When the stage changes the incumbent is re-scored, so meanReward
/// is non-decreasing within each stage.
inline Trajectory hill_climb(const SyntheticPolicy& initial, const std::vector<Sample>& dataset,
                             const CurriculumConfig& config, std::size_t iterations, std::uint64_t seed,
                             const ClimbOptions& options = {}) {
  check_config(config);
  check_policy(initial);
  if (iterations == 0) throw ConfigError("hill_climb: iterations must be >= 1");
  if (dataset.size() < static_cast<std::size_t>(config.sliceSize)) {
    throw ConfigError("dataset has " + std::to_string(dataset.size()) + " samples, fewer than sliceSize " +
                      std::to_string(config.sliceSize));
  }
  const std::size_t heldout_pairs = options.heldoutPairs ? options.heldoutPairs : std::max<std::size_t>(1, dataset.size() / 2);
  PolicyEvaluator eval(dataset, config, seed, heldout_pairs);

  Trajectory out;
  SyntheticPolicy current = initial;
  Stage stage = stage_at(0, config);
  double reward = eval.mean_reward(current, stage);
  out.push_back({0, current, stage, reward, eval.heldout_spearman(current)});

  for (std::size_t it = 1; it <= iterations; ++it) {
    const Stage now = stage_at(it, config);
    if (now != stage) {
      stage = now;
      reward = eval.mean_reward(current, stage);
    }
    std::vector<SyntheticPolicy> candidates;
    // snap to a fine grid so repeated steps do not drift (0.3 - 6 * 0.05 != 0)
    auto snap = [](double x) { return std::round(x * 1e9) / 1e9; };
    auto add = [&](SyntheticPolicy p) {
      p.bias = snap(p.bias);
      p.noiseSigma = std::max(0.0, snap(p.noiseSigma));
      p.formatErrorRate = std::clamp(snap(p.formatErrorRate), 0.0, 1.0);
      if (!(p == current)) candidates.push_back(p);
    };
    add({current.bias + options.biasStep, current.noiseSigma, current.formatErrorRate});
    add({current.bias - options.biasStep, current.noiseSigma, current.formatErrorRate});
    add({current.bias, current.noiseSigma + options.noiseStep, current.formatErrorRate});
    add({current.bias, current.noiseSigma - options.noiseStep, current.formatErrorRate});
    add({current.bias, current.noiseSigma, current.formatErrorRate + options.formatStep});
    add({current.bias, current.noiseSigma, current.formatErrorRate - options.formatStep});

    const SyntheticPolicy* best = nullptr;
    double best_reward = reward;
    for (const auto& c : candidates) {
      const double r = eval.mean_reward(c, stage);
      if (r > best_reward) {
        best_reward = r;
        best = &c;
      }
    }
    if (best) {
      current = *best;
      reward = best_reward;
    }
    out.push_back({it, current, stage, reward, eval.heldout_spearman(current)});
  }
  return out;
}

}  // namespace slicerank::sim
