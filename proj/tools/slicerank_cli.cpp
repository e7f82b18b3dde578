#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "slicerank/pipeline.hpp"

namespace {

using namespace slicerank;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

/// Writes to `path`, or stdout when empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw IoError("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    stream().flush();
    if (!stream()) throw IoError("write failure");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

CurriculumConfig load_config(const std::string& path) {
  if (path.empty()) return check_config(CurriculumConfig{});
  auto in = open_input(path);
  return validate_config(parse_config_document(in));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward, advantage and evaluation engine for conditional similarity RL"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_path;
  std::uint64_t seed = 0;
  std::optional<int> stage_override;
  app.add_option("--config", config_path, "Curriculum configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--stage", stage_override, "Force reward stage (1 or 2)")->check(CLI::IsMember({1, 2}));
  app.add_option("--output", output_path, "Output file (default: stdout)");

  auto* ingest = app.add_subcommand("ingest", "Validate a dataset and annotate adjacent pairs");
  std::string dataset_path;
  ingest->add_option("dataset", dataset_path)->required();

  auto* render = app.add_subcommand("render-prompts", "Render the instruction prompt for every sample");
  render->add_option("dataset", dataset_path)->required();

  auto* score = app.add_subcommand("score", "Score an N x G grid of completions");
  std::string completions_path;
  std::uint64_t step = 0;
  score->add_option("--dataset", dataset_path)->required();
  score->add_option("--completions", completions_path)->required();
  score->add_option("--step", step, "Training step used to pick the curriculum stage");

  auto* advantage = app.add_subcommand("advantage", "Group-normalize rewards into advantages");
  std::string rewards_path;
  advantage->add_option("rewards", rewards_path)->required();

  auto* evaluate = app.add_subcommand("evaluate", "Spearman/Pearson and error histogram of predictions");
  std::string predictions_path;
  evaluate->add_option("--predictions", predictions_path)->required();
  evaluate->add_option("--dataset", dataset_path)->required();

  pipeline::SimulationParams sim_params;
  auto* simulate = app.add_subcommand("simulate", "Hill-climb a synthetic policy against the rewards");
  simulate->add_option("--pairs", sim_params.pairs)->check(CLI::PositiveNumber);
  simulate->add_option("--iterations", sim_params.iterations)->check(CLI::PositiveNumber);
  simulate->add_option("--bias", sim_params.initial.bias);
  simulate->add_option("--noise", sim_params.initial.noiseSigma);
  simulate->add_option("--format-error-rate", sim_params.initial.formatErrorRate);

  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset and a batch of policy completions");
  std::size_t gen_pairs = 12;
  sim::SyntheticPolicy gen_policy;
  std::string completions_out;
  generate->add_option("--pairs", gen_pairs)->check(CLI::PositiveNumber);
  generate->add_option("--bias", gen_policy.bias);
  generate->add_option("--noise", gen_policy.noiseSigma);
  generate->add_option("--format-error-rate", gen_policy.formatErrorRate);
  generate->add_option("--dataset-out", dataset_path)->required();
  generate->add_option("--completions-out", completions_out)->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = load_config(config_path);
    Output out(output_path);

    if (ingest->parsed()) {
      auto in = open_input(dataset_path);
      const auto c = pipeline::cmd_ingest(in, out.stream());
      std::cerr << c.samples << " samples, " << c.pairs << " pairs, " << c.unpaired << " unpaired\n";
    } else if (render->parsed()) {
      auto in = open_input(dataset_path);
      pipeline::cmd_render_prompts(in, out.stream());
    } else if (score->parsed()) {
      auto ds = open_input(dataset_path);
      auto cs = open_input(completions_path);
      const Stage stage = stage_override ? static_cast<Stage>(*stage_override) : stage_at(step, config);
      pipeline::cmd_score(ds, cs, config, stage, out.stream());
    } else if (advantage->parsed()) {
      auto in = open_input(rewards_path);
      const auto s = pipeline::cmd_advantage(in, config, out.stream());
      std::cerr << s.records << " records, " << s.groups << " groups, " << s.degenerateGroups
                << " zero-variance groups\n";
    } else if (evaluate->parsed()) {
      auto ps = open_input(predictions_path);
      auto ds = open_input(dataset_path);
      const auto report = pipeline::cmd_evaluate(ps, ds);
      out.stream() << report.to_record().dump() << '\n';
      std::cerr.setf(std::ios::fixed);
      std::cerr.precision(2);
      std::cerr << "spearman: " << report.spearman * 100.0 << "\npearson: " << report.pearson * 100.0
                << "\nscored: " << report.scored << "\nexcluded: " << report.excluded << "\n";
    } else if (simulate->parsed()) {
      sim_params.seed = seed;
      pipeline::cmd_simulate(config, sim_params, out.stream());
    } else if (generate->parsed()) {
      std::ofstream ds(dataset_path, std::ios::binary);
      std::ofstream cs(completions_out, std::ios::binary);
      if (!ds || !cs) throw IoError("cannot open generate outputs for writing");
      pipeline::cmd_generate(config, gen_policy, gen_pairs, seed, ds, cs);
    }
    out.close();
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
