#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "agr/harness.hpp"
#include "agr/serialize.hpp"

namespace {

struct PlannerFlags {
  agr::RunConfig cfg;

  void attach(CLI::App* cmd) {
    cmd->add_option("--gamma", cfg.planner.gamma, "MCTS discount factor")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--ucb-c", cfg.planner.ucb_c, "UCB1 exploration constant");
    cmd->add_option("--iters", cfg.planner.iterations, "MCTS iterations per decision")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--depth", cfg.planner.max_depth, "MCTS search depth cap")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--lambda", cfg.planner.entropy_weight,
                    "weight of the actor-state entropy reward term");
    cmd->add_option("--epsilon", cfg.planner.epsilon,
                    "epsilon of the modeled actor policy")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--beta", cfg.beta, "passive recognizer scaling");
    cmd->add_option("--theta", cfg.metrics.theta, "convergence threshold")
        ->check(CLI::Range(0.0, 1.0));
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grid-world active goal recognition benchmark"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate instances for one configuration");
  std::string gen_config;
  uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--config", gen_config, "configuration label (S-E .. L-H)")->required();
  gen->add_option("--seed", gen_seed, "master seed")->required();
  gen->add_option("--out", gen_out, "output directory")->required();

  auto* run = app.add_subcommand("run", "run one algorithm over an instance directory");
  std::string run_dir, run_algo, run_out, run_trace;
  int run_workers = 1;
  bool run_timing = false;
  PlannerFlags run_flags;
  run->add_option("--instances", run_dir, "instance directory")->required();
  run->add_option("--algo", run_algo,
                  "passive-random | search-follow | belief-greedy | agr-mcts")
      ->required();
  run->add_option("--out", run_out, "results CSV path")->required();
  run->add_option("--trace", run_trace, "directory for per-episode JSONL traces");
  run->add_option("--workers", run_workers, "worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--timing", run_timing,
                "record wall-clock ms per episode (breaks byte-reproducibility)");
  run_flags.attach(run);

  auto* ablate = app.add_subcommand(
      "ablate", "dual-inference ablation: joint and passive CV on one action stream");
  std::string ab_dir, ab_strategy, ab_out;
  int ab_workers = 1;
  PlannerFlags ab_flags;
  ablate->add_option("--instances", ab_dir, "instance directory")->required();
  ablate->add_option("--strategy", ab_strategy,
                     "passive-random | search-follow | belief-greedy | agr-mcts")
      ->required();
  ablate->add_option("--out", ab_out, "ablation CSV path")->required();
  ablate->add_option("--workers", ab_workers, "worker threads")->check(CLI::PositiveNumber);
  ab_flags.attach(ablate);

  auto* report = app.add_subcommand("report", "aggregate a results CSV");
  std::string rep_in, rep_format = "table";
  report->add_option("--in", rep_in, "results CSV path")->required();
  report->add_option("--format", rep_format, "csv | table")
      ->check(CLI::IsMember({"csv", "table"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      auto cfg = agr::ExperimentConfig::parse(gen_config);
      if (!cfg) {
        std::cerr << "unknown configuration label: " << gen_config << "\n";
        return 1;
      }
      auto specs = agr::generate_instances(gen_seed, *cfg);
      agr::write_instances(gen_out, specs);
      std::cout << "wrote " << specs.size() << " instances to " << gen_out << "\n";
    } else if (run->parsed()) {
      auto algo = agr::parse_algorithm(run_algo);
      if (!algo) {
        std::cerr << "unknown algorithm: " << run_algo << "\n";
        return 1;
      }
      auto specs = agr::load_instances(run_dir);
      if (specs.empty()) {
        std::cerr << "no instances found in " << run_dir << "\n";
        return 1;
      }
      agr::BatchOptions opts;
      opts.workers = run_workers;
      opts.trace_dir = run_trace;
      opts.timing = run_timing;
      auto rows = agr::run_batch(specs, *algo, run_flags.cfg, opts);
      agr::write_results_csv(run_out, rows);
      std::cout << "wrote " << rows.size() << " rows to " << run_out << "\n";
    } else if (ablate->parsed()) {
      auto strategy = agr::parse_algorithm(ab_strategy);
      if (!strategy) {
        std::cerr << "unknown strategy: " << ab_strategy << "\n";
        return 1;
      }
      auto specs = agr::load_instances(ab_dir);
      if (specs.empty()) {
        std::cerr << "no instances found in " << ab_dir << "\n";
        return 1;
      }
      agr::BatchOptions opts;
      opts.workers = ab_workers;
      auto rows = agr::run_ablation_batch(specs, *strategy, ab_flags.cfg, opts);
      agr::write_ablation_csv(ab_out, rows);
      std::cout << "wrote " << rows.size() << " rows to " << ab_out << "\n";
    } else if (report->parsed()) {
      auto rows = agr::read_results_csv(rep_in);
      auto rep = agr::aggregate_report(rows);
      std::cout << (rep_format == "csv" ? agr::format_report_csv(rep)
                                        : agr::format_report_table(rep));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
