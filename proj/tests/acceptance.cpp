// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "slicerank/pipeline.hpp"

namespace {

using namespace slicerank;

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

// ---------------------------------------------------------------------------
// Independent correlation oracle: explicit tie-group enumeration over a sorted
// copy, then Pearson from raw sums in long double.

std::vector<long double> oracle_ranks(const std::vector<double>& v) {
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  std::vector<long double> out;
  for (double x : v) {
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
    auto hi = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
    long double sum = 0;
    for (auto p = lo; p < hi; ++p) sum += static_cast<long double>(p + 1);
    out.push_back(sum / static_cast<long double>(hi - lo));
  }
  return out;
}

template <typename T>
double oracle_pearson(const std::vector<T>& x, const std::vector<T>& y) {
  long double n = x.size(), sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    long double a = x[i], b = y[i];
    sx += a;
    sy += b;
    sxx += a * a;
    syy += b * b;
    sxy += a * b;
  }
  return static_cast<double>((n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy)));
}

bool is_constant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

void check_correlations(const std::vector<double>& x, const std::vector<double>& y, double& worst) {
  if (is_constant(x) || is_constant(y)) {
    bool threw = false;
    try {
      spearman(x, y);
    } catch (const UndefinedCorrelation&) {
      threw = true;
    }
    require(threw, "constant input must be an undefined correlation");
    return;
  }
  const double s = spearman(x, y);
  const double so = oracle_pearson(oracle_ranks(x), oracle_ranks(y));
  const double p = pearson(x, y);
  const double po = oracle_pearson(x, y);
  worst = std::max({worst, std::abs(s - so), std::abs(p - po)});
  require(std::abs(s - so) <= 1e-12, "spearman deviates from oracle");
  require(std::abs(p - po) <= 1e-12, "pearson deviates from oracle");
}

std::vector<std::vector<double>> all_vectors(std::size_t n) {
  std::vector<std::vector<double>> out;
  std::vector<double> v(n, 1.0);
  while (true) {
    out.push_back(v);
    std::size_t k = 0;
    while (k < n && v[k] == 5.0) v[k++] = 1.0;
    if (k == n) break;
    v[k] += 1.0;
  }
  return out;
}

std::string ac1_metric_oracle() {
  double worst = 0.0;
  std::size_t checked = 0;
  std::mt19937_64 rng(101);
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto vectors = all_vectors(n);
    if (n <= 4) {
      for (const auto& x : vectors) {
        for (const auto& y : vectors) {
          check_correlations(x, y, worst);
          ++checked;
        }
      }
    } else {
      // every predicted vector against a fixed seeded panel of gold vectors
      std::uniform_int_distribution<std::size_t> pick(0, vectors.size() - 1);
      std::vector<std::vector<double>> panel;
      for (int k = 0; k < 32; ++k) panel.push_back(vectors[pick(rng)]);
      for (const auto& x : vectors) {
        for (const auto& y : panel) {
          check_correlations(x, y, worst);
          ++checked;
        }
      }
    }
  }
  std::uniform_int_distribution<std::size_t> len(2, 50);
  std::normal_distribution<double> val(0.0, 10.0);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> x(len(rng)), y;
    for (auto& e : x) e = val(rng);
    for (std::size_t i = 0; i < x.size(); ++i) y.push_back(0.3 * x[i] + val(rng));
    check_correlations(x, y, worst);
    ++checked;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu vector pairs, max |diff| %.2e", checked, worst);
  return buf;
}

std::string ac2_group_normalization() {
  const double eps = 1e-4;
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> size(2, 16);
  std::uniform_real_distribution<double> reward(0.0, 3.5);
  double worst_mean = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> r(size(rng));
    do {
      for (auto& x : r) x = reward(rng);
    } while (is_degenerate_group(r));
    double m = 0.0;
    for (double x : r) m += x;
    m /= r.size();
    double var = 0.0;
    for (double x : r) var += (x - m) * (x - m);
    const double sigma = std::sqrt(var / r.size());

    const auto a = group_advantages(r, eps);
    double am = 0.0;
    for (double x : a) am += x;
    am /= a.size();
    double avar = 0.0;
    for (double x : a) avar += (x - am) * (x - am);
    const double astd = std::sqrt(avar / a.size());
    worst_mean = std::max(worst_mean, std::abs(am));
    require(std::abs(am) < 1e-9, "advantage mean not ~0");
    require(astd >= 1.0 - eps / sigma - 1e-9 && astd <= 1.0 + 1e-12, "advantage std outside bound");
  }
  for (int g = 2; g <= 16; ++g) {
    for (double x : group_advantages(std::vector<double>(g, reward(rng)), eps)) require(x == 0.0, "equal group");
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "1000 groups, max |mean| %.2e", worst_mean);
  return buf;
}

ParsedPrediction pred(int k) { return ParsedPrediction::valid(k >= 3 ? Judgment::Yes : Judgment::No, k); }

std::string ac3_bounds_and_gates() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> score(1, 5);
  std::uniform_int_distribution<int> cell(0, 5);
  std::uniform_real_distribution<double> base(0.0, 0.999);
  std::uniform_real_distribution<double> maxerr(0.5, 6.0);
  std::uniform_int_distribution<std::size_t> slice_len(2, 30);
  std::size_t mismatched = 0;
  std::size_t matched = 0;
  std::size_t ideal_slices = 0;
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };

  for (int t = 0; t < 10000; ++t) {
    const int p1 = score(rng), p2 = score(rng), y1 = score(rng), y2 = score(rng);
    const double b = base(rng), me = maxerr(rng);
    require(in_unit(pointwise_reward(p1, y1)), "pointwise out of [0,1]");
    require(in_unit(binary_reward(p1, y1)), "binary out of [0,1]");
    const double pr = pairwise_reward(p1, p2, y1, y2, b, me);
    require(in_unit(pr), "pairwise out of [0,1]");
    if (sign(p1 - p2) != sign(y1 - y2)) {
      require(pr == 0.0, "sign-mismatched pair earned reward");
      ++mismatched;
    } else {
      require(pr >= b, "sign-matched pair below base");
      ++matched;
    }

    // random slice with possible parse failures
    const std::size_t n = slice_len(rng);
    Slice s{0, {}, {}};
    for (std::size_t i = 0; i < n; ++i) {
      const int c = cell(rng);
      s.scores.push_back(c == 0 ? std::nullopt : std::optional<int>(c));
      s.labels.push_back(score(rng));
    }
    for (const auto& r : listwise_rewards(s)) require(!r || in_unit(*r), "listwise out of [0,1]");
    require(in_unit(format_reward(s.scores[0] ? pred(*s.scores[0]) : ParsedPrediction{})), "format out of [0,1]");

    // predictions as an order-preserving relabeling of the labels
    std::vector<int> values{1, 2, 3, 4, 5};
    std::vector<int> image;
    std::sample(values.begin(), values.end(), std::back_inserter(image), 5, rng);
    Slice ideal{0, {}, s.labels};
    std::vector<int> used(s.labels);
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::vector<int> target;
    std::sample(values.begin(), values.end(), std::back_inserter(target), used.size(), rng);
    for (int y : s.labels) {
      auto idx = std::lower_bound(used.begin(), used.end(), y) - used.begin();
      ideal.scores.push_back(target[idx]);
    }
    for (const auto& r : listwise_rewards(ideal)) require(r && *r == 1.0, "ideal ranking did not earn 1");
    ++ideal_slices;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu gated pairs, %zu matched pairs, %zu ideal slices", mismatched, matched,
                ideal_slices);
  return buf;
}

std::string ac4_worked_values() {
  auto near = [](double a, double b, double tol) { return std::abs(a - b) <= tol; };
  require(pointwise_reward(2, 4) == 0.5, "pointwise(2,4) != 0.5");
  require(near(pairwise_reward(3, 2, 4, 1, 0.5, 3.0), 2.0 / 3.0, 1e-15), "pairwise != 2/3");
  const auto lw = listwise_rewards(Slice{0, {5, 2, 3}, {1, 5, 4}});
  require(*lw[0] == 0.0 && *lw[1] == 0.0 && *lw[2] == 1.0, "listwise != [0,0,1]");
  const auto obj = dapo_objective(std::vector<double>{1.0, -1.0}, std::vector<std::size_t>{2, 3});
  require(near(obj.objective, -0.2, 1e-15), "dapo objective != -0.2");
  require(near(spearman({1, 2, 2, 3}, {1, 2, 3, 4}), 0.9487, 1e-4), "spearman tied example");
  require(near(pearson({0, 1, 2, 3}, {1, 1, 3, 3}), 0.8944, 1e-4), "pearson example");
  const auto adv = group_advantages({1.0, 0.0}, 1e-4);
  require(near(adv[0], 0.99980004, 1e-8) && near(adv[1], -0.99980004, 1e-8), "advantage [1,0]");
  const auto ranks = average_ranks(std::vector<int>{1, 2, 2, 3});
  require(ranks == std::vector<double>{1, 2.5, 2.5, 4}, "average ranks");
  require(stage1_reward(parse_completion("<answer>yes(4)</answer>"), 5, {1.0, 0.5, 0.5}).total == 1.75, "stage1 1.75");
  return "9 pinned values";
}

std::string ac5_granular_credit() {
  std::mt19937_64 rng(505);
  CurriculumConfig config;
  config.groupSize = 4;
  std::size_t comparisons = 0;
  for (int batch = 0; batch < 200; ++batch) {
    std::vector<int> labels{1, 2, 3, 4, 5};
    std::shuffle(labels.begin(), labels.end(), rng);
    std::vector<ParsedPrediction> cells;
    std::vector<std::vector<int>> preds(4, std::vector<int>{1, 2, 3, 4, 5});
    for (auto& p : preds) std::shuffle(p.begin(), p.end(), rng);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 4; ++j) cells.push_back(pred(preds[j][i]));
    }
    SliceMatrix m(5, 4, cells, labels, {});
    const auto grid = compute_batch_rewards(m, Stage::Two, config);
    for (std::size_t j = 0; j < 4; ++j) {
      // naive scheme: one whole-slice reward shared by every completion
      std::vector<double> pv(preds[j].begin(), preds[j].end()), yv(labels.begin(), labels.end());
      const double shared = (spearman(pv, yv) + 1.0) / 2.0;
      std::vector<double> naive(5, shared);
      bool psrr_split = false;
      bool has_distinct_errors = false;
      for (std::size_t a = 0; a < 5; ++a) {
        for (std::size_t b = a + 1; b < 5; ++b) {
          const int ea = std::abs(preds[j][a] - labels[a]);
          const int eb = std::abs(preds[j][b] - labels[b]);
          if (ea == eb) continue;
          has_distinct_errors = true;
          ++comparisons;
          require(*grid.at(a, j).listwise != *grid.at(b, j).listwise, "different rank errors, same listwise reward");
          psrr_split = true;
          require(naive[a] == naive[b], "naive scheme should not differentiate");
        }
      }
      require(!has_distinct_errors || psrr_split, "no differentiation in slice");
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu differentiated pairs; naive scheme flat in every slice", comparisons);
  return buf;
}

std::string ac6_closed_loop() {
  CurriculumConfig config;
  config.stage1Steps = 30;
  pipeline::SimulationParams params{{0.0, 2.0, 0.3}, 200, 60, 2024};
  std::ostringstream out;
  const auto traj = pipeline::cmd_simulate(config, params, out);
  const double initial = traj.front().heldoutSpearman;
  const double final_value = traj.back().heldoutSpearman;
  require(std::isfinite(initial) && std::isfinite(final_value), "held-out Spearman undefined");
  require(final_value - initial >= 0.2, "held-out Spearman improved by less than 0.2");

  params.initial = {0.0, 0.0, 0.0};
  params.iterations = 1;
  std::ostringstream oracle_out;
  const auto oracle = pipeline::cmd_simulate(config, params, oracle_out);
  require(oracle.front().heldoutSpearman == 1.0, "oracle policy held-out Spearman != 1");
  require(oracle.back().policy == oracle.front().policy, "oracle policy moved");

  char buf[160];
  std::snprintf(buf, sizeof buf, "held-out Spearman %.4f -> %.4f (+%.4f), final policy (%.2f, %.2f, %.2f)", initial,
                final_value, final_value - initial, traj.back().policy.bias, traj.back().policy.noiseSigma,
                traj.back().policy.formatErrorRate);
  return buf;
}

struct PipelineRun {
  std::string rewards;
  std::string advantages;
};

PipelineRun run_pipeline(const CurriculumConfig& c, Stage stage, std::uint64_t seed) {
  std::ostringstream ds, cs;
  pipeline::cmd_generate(c, {0.25, 1.25, 0.15}, 12, seed, ds, cs);
  std::istringstream raw(ds.str());
  std::ostringstream ingested;
  pipeline::cmd_ingest(raw, ingested);
  std::istringstream din(ingested.str()), cin(cs.str());
  std::ostringstream rewards;
  pipeline::cmd_score(din, cin, c, stage, rewards);
  std::istringstream rin(rewards.str());
  std::ostringstream advantages;
  pipeline::cmd_advantage(rin, c, advantages);
  return {rewards.str(), advantages.str()};
}

std::string ac7_pipeline_closure() {
  CurriculumConfig c;
  c.groupSize = 4;
  require(c.sliceSize == 24, "default slice size");
  std::size_t records = 0;
  for (Stage stage : {Stage::One, Stage::Two}) {
    const auto a = run_pipeline(c, stage, 77);
    const auto b = run_pipeline(c, stage, 77);
    require(a.rewards == b.rewards && a.advantages == b.advantages, "pipeline output not byte-identical");

    const auto samples = sim::generate_dataset(12, 77);
    require(samples.size() == 24, "batch is not 24 samples");
    const auto texts = sim::sample_completions({0.25, 1.25, 0.15}, samples, 4, 77);
    std::vector<ParsedPrediction> cells;
    for (const auto& t : texts) cells.push_back(parse_completion(t));
    std::vector<int> labels;
    for (const auto& s : samples) labels.push_back(s.label);
    const auto grid = compute_batch_rewards(SliceMatrix(24, 4, cells, labels, pair_mask(samples)), stage, c);

    std::istringstream rlines(a.rewards), alines(a.advantages);
    std::string rl, al;
    std::size_t k = 0;
    while (std::getline(rlines, rl) && std::getline(alines, al)) {
      const auto r = nlohmann::json::parse(rl);
      const auto v = nlohmann::json::parse(al);
      const std::size_t i = r["sampleIndex"], j = r["completionIndex"];
      require(i == k / 4 && j == k % 4, "record order");
      const auto& expect = grid.at(i, j);
      require(r["total"].get<double>() == expect.total, "reward total mismatch");
      auto same = [](const nlohmann::json& f, const std::optional<double>& e) {
        return f.is_null() ? !e.has_value() : (e && f.get<double>() == *e);
      };
      require(same(r["pointwise"], expect.pointwise) && same(r["binary"], expect.binary) &&
                  same(r["format"], expect.format) && same(r["pairwise"], expect.pairwise) &&
                  same(r["listwise"], expect.listwise),
              "reward component mismatch");
      const auto adv = group_advantages(grid.group_totals(i), c.epsilon);
      require(v["advantage"].get<double>() == adv[j], "advantage mismatch");
      require(v["reward"].get<double>() == expect.total, "advantage reward mismatch");
      ++k;
    }
    require(k == 96, "expected 96 records");
    records += k;
  }
  return std::to_string(records) + " records matched across both stages, reruns byte-identical";
}

std::string ac8_config_defaults() {
  const auto c = validate_config(parse_config_document(std::string{}));
  require(c.stage2Weights == Weights{1.0, 1.5, 1.0}, "stage2 weights default");
  require(c.sliceSize == 24, "slice size default");
  return "mu = (1.0, 1.5, 1.0), N = 24";
}

struct Criterion {
  const char* id;
  const char* name;
  double budget_seconds;
  std::function<std::string()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "metric oracle equivalence", 10.0, ac1_metric_oracle},
      {"AC2", "group advantage normalization", 1.0, ac2_group_normalization},
      {"AC3", "reward bounds and gates", 5.0, ac3_bounds_and_gates},
      {"AC4", "worked-value regression", 1.0, ac4_worked_values},
      {"AC5", "granular slice credit", 5.0, ac5_granular_credit},
      {"AC6", "closed-loop improvement", 60.0, ac6_closed_loop},
      {"AC7", "pipeline closure", 10.0, ac7_pipeline_closure},
      {"AC8", "configuration defaults", 1.0, ac8_config_defaults},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.run();
    } catch (const Failure& f) {
      ok = false;
      detail = f.what;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && secs > c.budget_seconds) {
      ok = false;
      detail += " (over runtime budget)";
    }
    std::printf("[%s] %s %s: %s (%.2f s / %.0f s)\n", ok ? "PASS" : "FAIL", c.id, c.name, detail.c_str(), secs,
                c.budget_seconds);
    failures += ok ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
