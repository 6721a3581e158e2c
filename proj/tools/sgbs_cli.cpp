// Command-line front end: generate / pretrain / solve / compare / sweep.
// Each subcommand reads a JSON config (--config) with flag overrides for
// the seed, budget, and output directory. Exit codes: 0 success, 2 config
// error, 3 divergence in any method.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>

#include "sgbs/harness.hpp"

namespace {

sgbs::Json load_config(const std::string& path) {
  if (path.empty()) return sgbs::Json::object();
  std::ifstream in(path);
  if (!in) throw sgbs::ConfigError("cannot open config file: " + path);
  sgbs::Json j;
  try {
    in >> j;
  } catch (const sgbs::Json::exception& e) {
    throw sgbs::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return j;
}

struct CommonFlags {
  std::string config;
  std::string out;
  std::int64_t budget = -1;
  std::int64_t seed = -1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON config file");
    cmd->add_option("--out", out, "output directory (overrides config)");
    cmd->add_option("--budget", budget, "candidate-solution budget (overrides config)");
    cmd->add_option("--seed", seed, "global seed (overrides config)");
  }

  sgbs::Json resolve() const {
    sgbs::Json j = load_config(config);
    if (!out.empty()) j["out"] = out;
    if (budget >= 0) j["budget"] = budget;
    if (seed >= 0) j["seed"] = static_cast<std::uint64_t>(seed);
    return j;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation-guided beam search toolkit"};
  app.require_subcommand(1);

  CommonFlags generate_flags, pretrain_flags, solve_flags, compare_flags, sweep_flags;
  CLI::App* generate = app.add_subcommand("generate", "write a deterministic instance batch");
  generate_flags.attach(generate);
  CLI::App* pretrain = app.add_subcommand("pretrain", "train the policy and select a checkpoint");
  pretrain_flags.attach(pretrain);
  CLI::App* solve = app.add_subcommand("solve", "run one method, optionally with x8 augmentation");
  solve_flags.attach(solve);
  CLI::App* compare = app.add_subcommand("compare", "fair-budget method comparison");
  compare_flags.attach(compare);
  CLI::App* sweep = app.add_subcommand("sweep", "grid over (beta, gamma)");
  sweep_flags.attach(sweep);

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return sgbs::cmd_generate(generate_flags.resolve());
    if (pretrain->parsed()) return sgbs::cmd_pretrain(pretrain_flags.resolve());
    if (solve->parsed()) return sgbs::cmd_solve(solve_flags.resolve());
    if (compare->parsed()) return sgbs::cmd_compare(compare_flags.resolve());
    if (sweep->parsed()) return sgbs::cmd_sweep(sweep_flags.resolve());
  } catch (const sgbs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sgbs::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const sgbs::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
