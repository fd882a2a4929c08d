// navfuse command-line tool: generate episode suites, run policy modes over
// them, and aggregate results into benchmark reports.
//
//   navfuse gen  --domain outdoor --count 50 --seed 1 --out suite.episodes.jsonl
//   navfuse run  --episodes suite.episodes.jsonl --mode proposed
//     --out proposed.results.jsonl [--config cfg.json] [--parallelism 8]
//   navfuse eval --results proposed.results.jsonl [...] --out report
//   navfuse print-config
#include "navfuse/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace navfuse;

int main(int argc, char** argv) {
  CLI::App app{"navigation fusion benchmark tool"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate an episode suite");
  std::string gen_domain = "indoor";
  GenOptions gen_opt;
  std::string gen_out = "episodes.jsonl";
  gen->add_option("--domain", gen_domain, "indoor | outdoor | social")
      ->check(CLI::IsMember({"indoor", "outdoor", "social"}));
  gen->add_option("--count", gen_opt.count, "number of episodes")
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_opt.seed, "base seed; episode i uses seed+i");
  gen->add_option("--out", gen_out, "output episodes file")->required();
  gen->add_option("--pedestrians", gen_opt.knobs.pedestrians,
                  "social crowd size");
  gen->add_option("--crossers", gen_opt.knobs.crossers,
                  "outdoor crossing events per episode");
  gen->add_option("--drift-fraction", gen_opt.drift_fraction,
                  "fraction of episodes with the gps_drift condition");
  gen->add_option("--occlusion-fraction", gen_opt.occlusion_fraction,
                  "fraction of episodes with the occlusion condition");

  // run
  auto* run = app.add_subcommand("run", "run a policy mode over a suite");
  std::string run_episodes, run_mode = "proposed", run_out = "results.jsonl";
  std::string run_config;
  int parallelism = 1;
  bool fallback_scripted = false;
  run->add_option("--episodes", run_episodes, "episodes file")->required();
  run->add_option("--mode", run_mode, "policy mode")
      ->check(CLI::IsMember(
          {"classical", "single_branch", "no_fusion", "proposed"}));
  run->add_option("--out", run_out, "output results file")->required();
  run->add_option("--config", run_config, "config file (JSON)");
  run->add_option("--parallelism", parallelism, "worker threads")
      ->check(CLI::PositiveNumber);
  run->add_flag("--fallback-scripted", fallback_scripted,
                "fall back to the scripted backend when the remote endpoint "
                "is unreachable");

  // eval
  auto* eval = app.add_subcommand("eval", "aggregate results into a report");
  std::vector<std::string> eval_results;
  std::string eval_out = "report";
  eval->add_option("--results", eval_results, "results files")->expected(-1);
  eval->add_option("--out", eval_out,
                   "output base path (writes <out>.txt and <out>.jsonl)");

  // print-config
  auto* print_config =
      app.add_subcommand("print-config", "print the default config");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    gen_opt.domain = *domain_from_string(gen_domain);
    auto result = cmd_gen(gen_opt, gen_out);
    if (!result) {
      std::cerr << "error: " << result.error() << "\n";
      return 1;
    }
    std::cout << "wrote " << result.value() << " episodes to " << gen_out
              << "\n";
    return 0;
  }

  if (run->parsed()) {
    GlobalConfig cfg;
    if (!run_config.empty()) {
      auto loaded = load_config_file(run_config);
      if (!loaded) {
        std::cerr << "error: " << loaded.error() << "\n";
        return 1;
      }
      cfg = loaded.value();
    }
    std::string warning;
    auto result = cmd_run(run_episodes, *policy_mode_from_string(run_mode), cfg,
                          run_out, parallelism, fallback_scripted, &warning);
    if (!warning.empty()) std::cerr << "warning: " << warning << "\n";
    if (!result) {
      std::cerr << "error: " << result.error() << "\n";
      return 1;
    }
    std::cout << "wrote " << result.value() << " results to " << run_out
              << "\n";
    return 0;
  }

  if (eval->parsed()) {
    auto result = cmd_eval(eval_results, eval_out);
    if (!result) {
      std::cerr << "error: " << result.error() << "\n";
      return 1;
    }
    std::cout << render_report_text(result.value());
    std::cout << "report written to " << eval_out << ".txt and " << eval_out
              << ".jsonl\n";
    return 0;
  }

  if (print_config->parsed()) {
    std::cout << save_config(GlobalConfig{});
    return 0;
  }
  return 0;
}
