#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "slicerank/advantage.hpp"
#include "slicerank/completion_parser.hpp"
#include "slicerank/config.hpp"
#include "slicerank/curriculum.hpp"
#include "slicerank/metrics.hpp"
#include "slicerank/prompt.hpp"
#include "slicerank/sample.hpp"
#include "slicerank/simulator.hpp"

// Line-delimited JSON record files and the command implementations behind the
// CLI. Commands read from and write to streams so they can be driven in-process.
namespace slicerank::pipeline {

using Record = nlohmann::ordered_json;

namespace detail {

/// Calls fn(json, line_number) for each non-blank line.
template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError("line " + std::to_string(lineno) + ": invalid JSON: " + e.what());
    }
    try {
      fn(rec, lineno);
    } catch (const SchemaError& e) {
      throw SchemaError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const RangeError& e) {
      throw RangeError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (in.bad()) throw IoError("read failure");
}

inline std::size_t require_index(const nlohmann::json& rec, const char* key) {
  const auto& v = slicerank::detail::require_field(rec, key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw SchemaError(std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

inline std::optional<std::size_t> optional_token_count(const nlohmann::json& rec) {
  auto it = rec.find("tokenCount");
  if (it == rec.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 1) {
    throw SchemaError("field 'tokenCount' must be a positive integer");
  }
  return it->get<std::size_t>();
}

inline void write(std::ostream& out, const Record& rec) {
  out << rec.dump() << '\n';
  if (!out) throw IoError("write failure");
}

inline Record optional_value(const std::optional<double>& v) { return v ? Record(*v) : Record(nullptr); }

}  // namespace detail

/// Reads a dataset file. If no record carries pair annotations, pairs are
/// detected positionally; otherwise the annotations are validated and kept.
inline std::vector<Sample> read_dataset(std::istream& in) {
  std::vector<Sample> samples;
  bool annotated = false;
  detail::for_each_record(in, [&](const nlohmann::json& rec, std::size_t) {
    samples.push_back(validate_sample(rec));
    annotated = annotated || samples.back().pairId.has_value();
  });
  if (!annotated) return detect_pairs(std::move(samples));
  validate_pairs(samples);
  return samples;
}

inline void write_dataset(std::ostream& out, const std::vector<Sample>& samples) {
  for (const auto& s : samples) {
    Record rec = {{"sentence1", s.text1}, {"sentence2", s.text2}, {"condition", s.condition}, {"label", s.label}};
    if (s.pairId) {
      rec["pairId"] = *s.pairId;
      rec["pairRole"] = to_string(*s.pairRole);
    }
    detail::write(out, rec);
  }
}

/// Completion texts on an N x G grid.
struct CompletionGrid {
  std::size_t nSamples = 0;
  std::size_t groupSize = 0;
  std::vector<std::string> texts;                     // row-major
  std::vector<std::optional<std::size_t>> tokenCounts;  // row-major

  std::vector<ParsedPrediction> parsed() const {
    std::vector<ParsedPrediction> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(parse_completion(t));
    return out;
  }
};

inline CompletionGrid read_completions(std::istream& in, std::size_t n_samples, std::size_t group_size) {
  CompletionGrid grid{n_samples, group_size, std::vector<std::string>(n_samples * group_size),
                      std::vector<std::optional<std::size_t>>(n_samples * group_size)};
  std::vector<bool> seen(n_samples * group_size, false);
  std::size_t found = 0;
  detail::for_each_record(in, [&](const nlohmann::json& rec, std::size_t lineno) {
    const auto i = detail::require_index(rec, "sampleIndex");
    const auto j = detail::require_index(rec, "completionIndex");
    const auto text = slicerank::detail::require_string(rec, "text");
    ++found;
    if (i >= n_samples || j >= group_size) {
      throw ShapeError("line " + std::to_string(lineno) + ": cell (" + std::to_string(i) + ", " + std::to_string(j) +
                       ") outside the " + std::to_string(n_samples) + " x " + std::to_string(group_size) + " grid");
    }
    const auto cell = i * group_size + j;
    if (seen[cell]) {
      throw ShapeError("line " + std::to_string(lineno) + ": duplicate completion for cell (" + std::to_string(i) +
                       ", " + std::to_string(j) + ")");
    }
    seen[cell] = true;
    grid.texts[cell] = text;
    grid.tokenCounts[cell] = detail::optional_token_count(rec);
  });
  if (found != n_samples * group_size) {
    throw ShapeError("expected " + std::to_string(n_samples * group_size) + " completions (" +
                     std::to_string(n_samples) + " samples x " + std::to_string(group_size) + "), found " +
                     std::to_string(found));
  }
  return grid;
}

inline std::size_t count_tokens(const std::string& text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = slicerank::detail::is_space(c);
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return std::max<std::size_t>(n, 1);
}

inline void write_completions(std::ostream& out, const std::vector<std::string>& texts, std::size_t group_size) {
  for (std::size_t k = 0; k < texts.size(); ++k) {
    detail::write(out, Record{{"sampleIndex", k / group_size},
                              {"completionIndex", k % group_size},
                              {"text", texts[k]},
                              {"tokenCount", count_tokens(texts[k])}});
  }
}

// ---------------------------------------------------------------------------
// ingest

inline PairCounts cmd_ingest(std::istream& dataset, std::ostream& out) {
  std::vector<Sample> samples;
  detail::for_each_record(dataset, [&](const nlohmann::json& rec, std::size_t) {
    samples.push_back(validate_sample(rec));
  });
  samples = detect_pairs(std::move(samples));
  write_dataset(out, samples);
  return count_pairs(samples);
}

// ---------------------------------------------------------------------------
// render-prompts

inline std::size_t cmd_render_prompts(std::istream& dataset, std::ostream& out) {
  const auto samples = read_dataset(dataset);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    detail::write(out, Record{{"sampleIndex", i}, {"prompt", render_prompt(samples[i])}});
  }
  return samples.size();
}

// ---------------------------------------------------------------------------
// score

inline Record reward_record(std::size_t i, std::size_t j, const RewardBreakdown& r,
                            const std::optional<std::size_t>& token_count) {
  Record rec{{"sampleIndex", i},
             {"completionIndex", j},
             {"stage", static_cast<int>(r.stage)},
             {"pointwise", detail::optional_value(r.pointwise)},
             {"binary", detail::optional_value(r.binary)},
             {"format", detail::optional_value(r.format)},
             {"pairwise", detail::optional_value(r.pairwise)},
             {"listwise", detail::optional_value(r.listwise)},
             {"total", r.total}};
  if (token_count) rec["tokenCount"] = *token_count;
  return rec;
}

inline RewardGrid cmd_score(std::istream& dataset, std::istream& completions, const CurriculumConfig& config,
                            Stage stage, std::ostream& out) {
  const auto samples = read_dataset(dataset);
  const auto g = static_cast<std::size_t>(config.groupSize);
  const auto grid = read_completions(completions, samples.size(), g);
  auto rewards = score_dataset(samples, grid.parsed(), g, stage, config);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      detail::write(out, reward_record(i, j, rewards.at(i, j), grid.tokenCounts[i * g + j]));
    }
  }
  return rewards;
}

// ---------------------------------------------------------------------------
// advantage

struct AdvantageSummary {
  std::size_t records = 0;
  std::size_t groups = 0;
  std::size_t degenerateGroups = 0;
};

inline AdvantageSummary cmd_advantage(std::istream& rewards, const CurriculumConfig& config, std::ostream& out) {
  struct Row {
    std::size_t sample;
    std::size_t completion;
    double reward;
    std::optional<std::size_t> tokenCount;
  };
  std::vector<Row> rows;
  std::map<std::size_t, std::vector<std::size_t>> groups;  // sample -> row indices
  detail::for_each_record(rewards, [&](const nlohmann::json& rec, std::size_t) {
    Row r;
    r.sample = detail::require_index(rec, "sampleIndex");
    r.completion = detail::require_index(rec, "completionIndex");
    auto value = rec.find("reward");
    if (value == rec.end()) value = rec.find("total");
    if (value == rec.end() || !value->is_number()) throw SchemaError("missing numeric field 'reward' or 'total'");
    r.reward = value->get<double>();
    r.tokenCount = detail::optional_token_count(rec);
    groups[r.sample].push_back(rows.size());
    rows.push_back(r);
  });

  const auto g = static_cast<std::size_t>(config.groupSize);
  AdvantageSummary summary{rows.size(), groups.size(), 0};
  std::vector<double> advantage(rows.size());
  for (const auto& [sample, members] : groups) {
    std::set<std::size_t> completions;
    for (auto k : members) completions.insert(rows[k].completion);
    if (members.size() != g || completions.size() != g) {
      throw ShapeError("sample " + std::to_string(sample) + ": expected " + std::to_string(g) +
                       " distinct completions, found " + std::to_string(members.size()) + " records");
    }
    std::vector<double> values;
    for (auto k : members) values.push_back(rows[k].reward);
    if (is_degenerate_group(values)) ++summary.degenerateGroups;
    const auto adv = group_advantages(values, config.epsilon);
    for (std::size_t m = 0; m < members.size(); ++m) advantage[members[m]] = adv[m];
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    Record rec{{"sampleIndex", rows[k].sample},
               {"completionIndex", rows[k].completion},
               {"reward", rows[k].reward},
               {"advantage", advantage[k]}};
    if (rows[k].tokenCount) rec["tokenCount"] = *rows[k].tokenCount;
    detail::write(out, rec);
  }
  return summary;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluationReport {
  std::size_t scored = 0;
  std::size_t excluded = 0;
  double spearman = 0.0;  // raw, in [-1, 1]
  double pearson = 0.0;
  ErrorHistogram histogram;

  Record to_record() const {
    Record hist = Record::object();
    for (std::size_t e = 0; e < histogram.counts.size(); ++e) hist[std::to_string(e)] = histogram.counts[e];
    return Record{{"spearman", spearman * 100.0},
                  {"pearson", pearson * 100.0},
                  {"scored", scored},
                  {"excluded", excluded},
                  {"histogram", hist}};
  }
};

/// Predictions carry `sampleIndex` and either a completion `text` (parsed with
/// the answer grammar) or an integer `score`. Several predictions per sample
/// are allowed; each is compared with that sample's label. Unparseable
/// predictions are excluded and counted.
inline EvaluationReport cmd_evaluate(std::istream& predictions, std::istream& dataset) {
  const auto samples = read_dataset(dataset);
  EvaluationReport report;
  std::vector<int> predicted;
  std::vector<int> gold;
  detail::for_each_record(predictions, [&](const nlohmann::json& rec, std::size_t lineno) {
    const auto i = detail::require_index(rec, "sampleIndex");
    if (i >= samples.size()) {
      throw ShapeError("line " + std::to_string(lineno) + ": sampleIndex " + std::to_string(i) +
                       " outside dataset of " + std::to_string(samples.size()));
    }
    std::optional<int> score;
    if (auto t = rec.find("text"); t != rec.end() && t->is_string()) {
      score = parse_completion(t->get<std::string>()).score;
    } else if (auto s = rec.find("score"); s != rec.end() && s->is_number_integer() && is_label(s->get<int>())) {
      score = s->get<int>();
    } else if (rec.find("score") == rec.end() && rec.find("text") == rec.end()) {
      throw SchemaError("prediction needs a 'text' or 'score' field");
    }
    if (!score) {
      ++report.excluded;
      return;
    }
    predicted.push_back(*score);
    gold.push_back(samples[i].label);
  });
  if (predicted.empty()) throw UndefinedCorrelation("no valid predictions to evaluate");
  report.scored = predicted.size();
  std::vector<double> p(predicted.begin(), predicted.end());
  std::vector<double> y(gold.begin(), gold.end());
  report.spearman = spearman(p, y);
  report.pearson = pearson(p, y);
  report.histogram = error_histogram(predicted, gold);
  return report;
}

// ---------------------------------------------------------------------------
// simulate / generate

struct SimulationParams {
  sim::SyntheticPolicy initial{0.0, 2.0, 0.3};
  std::size_t pairs = 200;
  std::size_t iterations = 60;
  std::uint64_t seed = 0;
};

inline Record trajectory_record(const sim::TrajectoryPoint& p) {
  return Record{{"iteration", p.iteration},
                {"bias", p.policy.bias},
                {"noiseSigma", p.policy.noiseSigma},
                {"formatErrorRate", p.policy.formatErrorRate},
                {"stage", static_cast<int>(p.stage)},
                {"meanReward", p.meanReward},
                {"heldoutSpearman", std::isfinite(p.heldoutSpearman) ? Record(p.heldoutSpearman) : Record(nullptr)}};
}

inline sim::Trajectory cmd_simulate(const CurriculumConfig& config, const SimulationParams& params, std::ostream& out) {
  const auto dataset = sim::generate_dataset(params.pairs, sim::derive_seed(params.seed, 100));
  auto trajectory = sim::hill_climb(params.initial, dataset, config, params.iterations, params.seed);
  for (const auto& p : trajectory) detail::write(out, trajectory_record(p));
  return trajectory;
}

/// Writes a synthetic dataset and one N x G batch of policy completions.
inline void cmd_generate(const CurriculumConfig& config, const sim::SyntheticPolicy& policy, std::size_t pairs,
                         std::uint64_t seed, std::ostream& dataset_out, std::ostream& completions_out) {
  const auto samples = sim::generate_dataset(pairs, seed);
  const auto g = static_cast<std::size_t>(config.groupSize);
  write_dataset(dataset_out, samples);
  write_completions(completions_out, sim::sample_completions(policy, samples, g, seed), g);
}

}  // namespace slicerank::pipeline
