#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "slicerank/errors.hpp"

namespace slicerank {

/// Three non-negative component weights. Stage I: (pointwise, binary, format);
/// Stage II: (pointwise, pairwise, listwise).
using Weights = std::array<double, 3>;

struct CurriculumConfig {
  Weights stage1Weights{1.0, 0.5, 0.5};
  Weights stage2Weights{1.0, 1.5, 1.0};
  double baseReward = 0.5;
  double maxError = 3.0;
  int sliceSize = 24;
  int groupSize = 8;
  double epsilon = 1e-4;
  std::uint64_t stage1Steps = 100;
  // Discount factor; terminal reward only, so it is always 1.
  double gamma = 1.0;

  bool operator==(const CurriculumConfig&) const = default;
};

namespace detail {

inline void check_weights(const Weights& w, const char* name) {
  bool any_positive = false;
  for (double x : w) {
    if (!std::isfinite(x) || x < 0.0) {
      throw ConfigError(std::string(name) + ": weights must be finite and non-negative");
    }
    any_positive = any_positive || x > 0.0;
  }
  if (!any_positive) throw ConfigError(std::string(name) + ": at least one weight must be positive");
}

}  // namespace detail

/// Throws ConfigError if any CurriculumConfig invariant is violated.
inline const CurriculumConfig& check_config(const CurriculumConfig& c) {
  detail::check_weights(c.stage1Weights, "stage1Weights");
  detail::check_weights(c.stage2Weights, "stage2Weights");
  if (!(c.baseReward >= 0.0 && c.baseReward < 1.0)) {
    throw ConfigError("baseReward must lie in [0, 1)");
  }
  if (!(c.maxError > 0.0) || !std::isfinite(c.maxError)) throw ConfigError("maxError must be positive");
  if (c.sliceSize < 2) throw ConfigError("sliceSize must be at least 2");
  if (c.groupSize < 2) throw ConfigError("groupSize must be at least 2");
  if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon)) throw ConfigError("epsilon must be positive");
  if (c.gamma != 1.0) throw ConfigError("gamma is fixed at 1");
  return c;
}

/// Parsed key-value document: section -> key -> raw value.
using ConfigDocument = std::map<std::string, std::map<std::string, std::string>>;

/// Reads an INI-style document. `#` and `;` start comments; keys outside any
/// section are rejected.
inline ConfigDocument parse_config_document(std::istream& in) {
  ConfigDocument doc;
  std::string line;
  std::string section;
  int lineno = 0;
  auto trim = [](std::string s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return std::string{};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      doc[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside a section");
    auto key = trim(line.substr(0, eq));
    auto& slot = doc[section];
    if (slot.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    slot[key] = trim(line.substr(eq + 1));
  }
  return doc;
}

inline ConfigDocument parse_config_document(const std::string& text) {
  std::istringstream in(text);
  return parse_config_document(in);
}

namespace detail {

inline double parse_double(const std::string& key, const std::string& raw) {
  try {
    std::size_t used = 0;
    double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': not a number: '" + raw + "'");
  }
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& raw) {
  Int v{};
  auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
    throw ConfigError("'" + key + "': not an integer: '" + raw + "'");
  }
  return v;
}

inline Weights parse_weights(const std::string& key, const std::string& raw) {
  Weights w{};
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(raw);
  while (std::getline(in, part, ',')) {
    auto b = part.find_first_not_of(" \t");
    auto e = part.find_last_not_of(" \t");
    parts.push_back(b == std::string::npos ? std::string{} : part.substr(b, e - b + 1));
  }
  if (parts.size() != 3) throw ConfigError("'" + key + "': expected three comma-separated weights");
  for (std::size_t i = 0; i < 3; ++i) w[i] = parse_double(key, parts[i]);
  return w;
}

}  // namespace detail

/// Fills a CurriculumConfig from a document, taking defaults for absent keys,
/// then enforces every invariant. Unknown sections or keys are errors.
inline CurriculumConfig validate_config(const ConfigDocument& doc) {
  CurriculumConfig c;
  for (const auto& [section, entries] : doc) {
    for (const auto& [key, raw] : entries) {
      auto where = section + "." + key;
      if (section == "stage1" && key == "stage1Weights") {
        c.stage1Weights = detail::parse_weights(where, raw);
      } else if (section == "stage1" && key == "stage1Steps") {
        c.stage1Steps = detail::parse_int<std::uint64_t>(where, raw);
      } else if (section == "stage2" && key == "stage2Weights") {
        c.stage2Weights = detail::parse_weights(where, raw);
      } else if (section == "psrr" && key == "baseReward") {
        c.baseReward = detail::parse_double(where, raw);
      } else if (section == "psrr" && key == "maxError") {
        c.maxError = detail::parse_double(where, raw);
      } else if (section == "psrr" && key == "sliceSize") {
        c.sliceSize = detail::parse_int<int>(where, raw);
      } else if (section == "psrr" && key == "groupSize") {
        c.groupSize = detail::parse_int<int>(where, raw);
      } else if (section == "advantage" && key == "epsilon") {
        c.epsilon = detail::parse_double(where, raw);
      } else if (section == "advantage" && key == "gamma") {
        c.gamma = detail::parse_double(where, raw);
      } else {
        throw ConfigError("unknown configuration key '" + where + "'");
      }
    }
  }
  check_config(c);
  return c;
}

inline std::string format_config(const CurriculumConfig& c) {
  std::ostringstream out;
  out.precision(17);
  auto w = [&](const Weights& v) { out << v[0] << ", " << v[1] << ", " << v[2] << "\n"; };
  out << "[stage1]\nstage1Weights = ";
  w(c.stage1Weights);
  out << "stage1Steps = " << c.stage1Steps << "\n\n[stage2]\nstage2Weights = ";
  w(c.stage2Weights);
  out << "\n[psrr]\nbaseReward = " << c.baseReward << "\nmaxError = " << c.maxError
      << "\nsliceSize = " << c.sliceSize << "\ngroupSize = " << c.groupSize
      << "\n\n[advantage]\nepsilon = " << c.epsilon << "\ngamma = " << c.gamma << "\n";
  return out.str();
}

}  // namespace slicerank
