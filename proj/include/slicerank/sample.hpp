#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "slicerank/errors.hpp"

namespace slicerank {

inline constexpr int kMinLabel = 1;
inline constexpr int kMaxLabel = 5;

enum class PairRole { First, Second };

inline const char* to_string(PairRole role) {
  return role == PairRole::First ? "first" : "second";
}

/// One conditional-similarity record: two opaque texts judged under a condition,
/// with an integer Likert label in [1, 5].
struct Sample {
  std::string text1;
  std::string text2;
  std::string condition;
  int label = kMinLabel;
  std::optional<std::string> pairId;
  std::optional<PairRole> pairRole;

  bool operator==(const Sample&) const = default;
};

inline bool is_label(int value) { return value >= kMinLabel && value <= kMaxLabel; }

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& record, const char* key) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) {
    throw SchemaError(std::string("missing field '") + key + "'");
  }
  return *it;
}

inline std::string require_string(const nlohmann::json& record, const char* key) {
  const auto& value = require_field(record, key);
  if (!value.is_string()) {
    throw SchemaError(std::string("field '") + key + "' must be a string");
  }
  return value.get<std::string>();
}

inline int require_label(const nlohmann::json& record) {
  const auto& value = require_field(record, "label");
  if (!value.is_number()) throw SchemaError("field 'label' must be a number");
  double raw = value.get<double>();
  if (raw != std::floor(raw) || raw < kMinLabel || raw > kMaxLabel) {
    throw RangeError("label " + value.dump() + " is not an integer in [1, 5]");
  }
  return static_cast<int>(raw);
}

}  // namespace detail

/// Builds a Sample from a raw dataset record (`sentence1`, `sentence2`, `condition`,
/// `label`, optionally `pairId`/`pairRole`). Throws SchemaError or RangeError.
inline Sample validate_sample(const nlohmann::json& record) {
  if (!record.is_object()) throw SchemaError("record is not an object");
  Sample s;
  s.text1 = detail::require_string(record, "sentence1");
  s.text2 = detail::require_string(record, "sentence2");
  s.condition = detail::require_string(record, "condition");
  s.label = detail::require_label(record);

  auto id = record.find("pairId");
  auto role = record.find("pairRole");
  bool has_id = id != record.end() && !id->is_null();
  bool has_role = role != record.end() && !role->is_null();
  if (has_id != has_role) throw SchemaError("pairId and pairRole must appear together");
  if (has_id) {
    if (!id->is_string()) throw SchemaError("field 'pairId' must be a string");
    s.pairId = id->get<std::string>();
    if (*role == "first") {
      s.pairRole = PairRole::First;
    } else if (*role == "second") {
      s.pairRole = PairRole::Second;
    } else {
      throw SchemaError("field 'pairRole' must be \"first\" or \"second\"");
    }
  }
  return s;
}

inline nlohmann::json to_json(const Sample& s) {
  nlohmann::json out = {{"sentence1", s.text1},
                        {"sentence2", s.text2},
                        {"condition", s.condition},
                        {"label", s.label}};
  if (s.pairId) {
    out["pairId"] = *s.pairId;
    out["pairRole"] = to_string(*s.pairRole);
  }
  return out;
}

/// Greedy left-to-right pairing of adjacent records that share both texts
/// byte-for-byte and differ in condition. Existing annotations are discarded,
/// so the result depends only on record order and content.
inline std::vector<Sample> detect_pairs(std::vector<Sample> samples) {
  for (auto& s : samples) {
    s.pairId.reset();
    s.pairRole.reset();
  }
  std::size_t next_id = 0;
  for (std::size_t i = 0; i + 1 < samples.size();) {
    auto& a = samples[i];
    auto& b = samples[i + 1];
    if (a.text1 == b.text1 && a.text2 == b.text2 && a.condition != b.condition) {
      std::string id = "p" + std::to_string(next_id++);
      a.pairId = id;
      a.pairRole = PairRole::First;
      b.pairId = std::move(id);
      b.pairRole = PairRole::Second;
      i += 2;
    } else {
      ++i;
    }
  }
  return samples;
}

/// mask[i] is true iff samples i and i+1 form an annotated pair (i first, i+1 second).
/// Last entry is always false.
inline std::vector<bool> pair_mask(const std::vector<Sample>& samples) {
  std::vector<bool> mask(samples.size(), false);
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const auto& a = samples[i];
    const auto& b = samples[i + 1];
    mask[i] = a.pairId && b.pairId && *a.pairId == *b.pairId &&
              a.pairRole == PairRole::First && b.pairRole == PairRole::Second;
  }
  return mask;
}

/// Checks dataset-level pair invariants: every pairId has exactly one partner,
/// the two are adjacent in first/second order and share both texts.
inline void validate_pairs(const std::vector<Sample>& samples) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!s.pairId) continue;
    bool ok = false;
    if (s.pairRole == PairRole::First && i + 1 < samples.size()) {
      const auto& b = samples[i + 1];
      ok = b.pairId == s.pairId && b.pairRole == PairRole::Second && b.text1 == s.text1 &&
           b.text2 == s.text2;
    } else if (s.pairRole == PairRole::Second && i > 0) {
      const auto& a = samples[i - 1];
      ok = a.pairId == s.pairId && a.pairRole == PairRole::First;
    }
    if (!ok) {
      throw SchemaError("record " + std::to_string(i) + ": pair '" + *s.pairId +
                        "' has no adjacent partner with matching texts");
    }
  }
}

struct PairCounts {
  std::size_t samples = 0;
  std::size_t pairs = 0;
  std::size_t unpaired = 0;
};

inline PairCounts count_pairs(const std::vector<Sample>& samples) {
  PairCounts c;
  c.samples = samples.size();
  for (const auto& s : samples) {
    if (!s.pairId) {
      ++c.unpaired;
    } else if (s.pairRole == PairRole::First) {
      ++c.pairs;
    }
  }
  return c;
}

}  // namespace slicerank
