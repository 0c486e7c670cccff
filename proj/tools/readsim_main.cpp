#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "readsim/commands.hpp"
#include "readsim/config.hpp"
#include "readsim/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDiverged = 4;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  std::optional<double> time;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "JSON run configuration");
  cmd->add_option("--seed", opts.seed, "Base random seed");
  cmd->add_option("--out", opts.out, "Output directory");
  cmd->add_option("--threads", opts.threads, "Worker threads");
}

readsim::RunConfig resolve_config(const CommonOptions& opts) {
  auto config = opts.config.empty() ? readsim::config_from_json(nlohmann::json::object())
                                    : readsim::load_config(opts.config);
  if (opts.seed) config.seed = *opts.seed;
  if (opts.out) config.output_dir = *opts.out;
  if (opts.threads) config.threads = *opts.threads;
  if (opts.time) {
    config.time_budgets = {*opts.time};
    config.env.time_budget_s = *opts.time;
  }
  config.validate();
  return config;
}

int exit_code_for(const readsim::Error& e) {
  if (e.kind() == "ConfigError") return kExitConfig;
  if (e.kind() == "TrainingDiverged") return kExitDiverged;
  return kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resource-constrained reading simulator"};
  app.require_subcommand(0, 1);
  bool print_defaults_flag = false;
  app.add_flag("--print-defaults", print_defaults_flag, "Print the default configuration and exit");

  CommonOptions train_opts;
  std::optional<std::size_t> updates;
  auto* train_cmd = app.add_subcommand("train", "Train a word-level policy with PPO");
  add_common(train_cmd, train_opts);
  train_cmd->add_option("--updates", updates, "Number of PPO updates");
  train_cmd->add_option("--time", train_opts.time, "Time budget in seconds");

  CommonOptions sim_opts;
  readsim::SimulateRequest sim_request;
  std::optional<std::string> sim_text;
  auto* sim_cmd = app.add_subcommand("simulate", "Run episodes and write scanpaths and metrics");
  add_common(sim_cmd, sim_opts);
  sim_cmd->add_option("--n", sim_request.episodes, "Episodes per time budget");
  sim_cmd->add_option("--time", sim_opts.time, "Time budget in seconds (overrides env.time_budget_s)");
  sim_cmd->add_option("--policy", sim_request.policy, "'heuristic' or a checkpoint path");
  sim_cmd->add_option("--text", sim_text, "Read this text file instead of the corpus passages");

  CommonOptions eval_opts;
  std::string sim_path;
  std::string human_path;
  auto* eval_cmd = app.add_subcommand("evaluate", "Compare simulated and human scanpaths");
  add_common(eval_cmd, eval_opts);
  eval_cmd->add_option("--sim", sim_path, "Simulated scanpath JSONL")->required();
  eval_cmd->add_option("--human", human_path, "Human scanpath JSONL")->required();

  CommonOptions fit_opts;
  std::string fit_policy = "heuristic";
  std::optional<std::string> fit_text;
  std::optional<std::size_t> fit_episodes;
  auto* fit_cmd = app.add_subcommand("fit", "Grid-search free parameters against target metrics");
  add_common(fit_cmd, fit_opts);
  fit_cmd->add_option("--policy", fit_policy, "'heuristic' or a checkpoint path");
  fit_cmd->add_option("--text", fit_text, "Read this text file instead of the corpus passages");
  fit_cmd->add_option("--n", fit_episodes, "Episodes per grid point (overrides fit.episodes)");
  fit_cmd->add_option("--time", fit_opts.time, "Time budget in seconds");

  auto* defaults_cmd = app.add_subcommand("print-defaults", "Print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (print_defaults_flag || defaults_cmd->parsed()) {
      std::cout << readsim::default_config_text();
      return kExitOk;
    }
    if (train_cmd->parsed()) {
      auto config = resolve_config(train_opts);
      if (updates) config.ppo.total_updates = *updates;
      const auto summary = readsim::cmd_train(config, config.output_dir, &std::cerr);
      std::cout << "checkpoint: " << summary.checkpoint.string() << "\ncurve: " << summary.curve.string()
                << "\nconfig: " << summary.resolved_config.string() << '\n';
      return kExitOk;
    }
    if (sim_cmd->parsed()) {
      const auto config = resolve_config(sim_opts);
      if (sim_text) sim_request.text = *sim_text;
      const auto summary = readsim::cmd_simulate(config, sim_request, config.output_dir);
      for (const auto& [condition, speed] : summary.reading_speed_by_condition) {
        std::cout << "T = " << condition << " s: mean reading speed " << speed.mean << " wpm over " << speed.n
                  << " episodes\n";
      }
      std::cout << "scanpaths: " << summary.scanpaths.string() << "\nmetrics: " << summary.metrics.string() << '\n';
      return kExitOk;
    }
    if (eval_cmd->parsed()) {
      const auto config = resolve_config(eval_opts);
      const auto report = readsim::cmd_evaluate(config, sim_path, human_path, config.output_dir);
      std::cout << report.pairs.size() << " pairs, " << report.unmatched.size() << " unmatched\n";
      for (const auto& [condition, c] : report.per_condition) {
        std::cout << "T = " << condition << " s: mean NLD " << c.mean_nld << " (sd " << c.sd_nld << ", n " << c.pairs
                  << ")\n";
      }
      return kExitOk;
    }
    if (fit_cmd->parsed()) {
      auto config = resolve_config(fit_opts);
      if (fit_episodes) config.fit.episodes = *fit_episodes;
      std::optional<std::filesystem::path> text;
      if (fit_text) text = *fit_text;
      const auto result = readsim::cmd_fit(config, fit_policy, text, config.output_dir);
      std::cout << "best grid point " << result.best.grid_index << " (loss " << result.best.loss << "):";
      for (const auto& [param, value] : result.best.parameters) std::cout << ' ' << param << '=' << value;
      std::cout << '\n';
      return kExitOk;
    }
    std::cout << app.help();
    return kExitConfig;
  } catch (const readsim::Error& e) {
    std::cerr << e.kind() << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
