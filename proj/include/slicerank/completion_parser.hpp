#pragma once

#include <cctype>
#include <optional>
#include <string_view>

#include "slicerank/sample.hpp"

namespace slicerank {

enum class Judgment { No, Yes };

/// Structured reading of one completion's final answer tag.
struct ParsedPrediction {
  std::optional<Judgment> judgment;
  std::optional<int> score;
  bool structurallyValid = false;
  // Judgment agrees with the score band (yes <-> score >= 3). False when invalid.
  bool consistent = false;

  bool operator==(const ParsedPrediction&) const = default;

  static ParsedPrediction valid(Judgment j, int k) {
    ParsedPrediction p;
    p.judgment = j;
    p.score = k;
    p.structurallyValid = true;
    p.consistent = (j == Judgment::Yes) == (k >= 3);
    return p;
  }
};

namespace detail {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline bool consume_word_icase(std::string_view& s, std::string_view word) {
  if (s.size() < word.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != word[i]) return false;
  }
  s.remove_prefix(word.size());
  return true;
}

}  // namespace detail

/// Parses the last `<answer>...</answer>` block of a completion. The inner text
/// must be `yes(k)` or `no(k)` with a single digit k in [1, 5]; yes/no is
/// case-insensitive and whitespace around the whole inner text is ignored.
/// Anything else yields an invalid prediction with no fields set.
inline ParsedPrediction parse_completion(std::string_view text) {
  constexpr std::string_view kOpen = "<answer>";
  constexpr std::string_view kClose = "</answer>";

  auto close = text.rfind(kClose);
  if (close == std::string_view::npos) return {};
  auto open = text.substr(0, close).rfind(kOpen);
  if (open == std::string_view::npos) return {};

  auto inner = detail::trim(text.substr(open + kOpen.size(), close - open - kOpen.size()));
  Judgment judgment;
  if (detail::consume_word_icase(inner, "yes")) {
    judgment = Judgment::Yes;
  } else if (detail::consume_word_icase(inner, "no")) {
    judgment = Judgment::No;
  } else {
    return {};
  }
  if (inner.size() != 3 || inner[0] != '(' || inner[2] != ')' ||
      !std::isdigit(static_cast<unsigned char>(inner[1]))) {
    return {};
  }
  int score = inner[1] - '0';
  if (!is_label(score)) return {};
  return ParsedPrediction::valid(judgment, score);
}

/// 1 for a structurally valid answer, 0 otherwise. Judgment/score consistency
/// is not checked here.
inline double format_reward(const ParsedPrediction& parsed) {
  return parsed.structurallyValid ? 1.0 : 0.0;
}

}  // namespace slicerank
