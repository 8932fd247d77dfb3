// Command-line front end: run experiments from a config file, verify runs
// against their theoretical residual envelopes, or emit log-log plot data.

#include "exgrad/bench.hpp"
#include "exgrad/diagnostics.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  int jobs = 1;
  unsigned long long seed_offset = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "output directory (default: out)");
  cmd->add_option("--jobs", args.jobs, "worker threads (default: 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed-offset", args.seed_offset,
                  "added to every seed in the config");
}

int report_runs(const exgrad::ExperimentResult& result) {
  for (const exgrad::RunResult& rr : result.runs) {
    if (rr.ok)
      std::cout << "ok   " << rr.scheme_id << " seed=" << rr.seed << " -> "
                << rr.csv_path << "\n";
    else
      std::cout << "FAIL " << rr.scheme_id << " seed=" << rr.seed << ": "
                << rr.error << "\n";
  }
  std::cout << "summary: " << result.summary_path << "\n";
  return result.all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"accelerated extragradient benchmark harness"};
  app.require_subcommand(1);

  CommonArgs run_args, verify_args, plot_args;
  long budget = 200000;

  CLI::App* cmd_run = app.add_subcommand("run", "run all (scheme, seed) pairs");
  add_common(cmd_run, run_args);

  CLI::App* cmd_verify = app.add_subcommand(
      "verify", "run, then check each trace against its residual envelope");
  add_common(cmd_verify, verify_args);
  cmd_verify->add_option("--budget", budget,
                         "iteration budget for reference solutions");

  CLI::App* cmd_plot =
      app.add_subcommand("plotdata", "run, then write log-log plot data (TSV)");
  add_common(cmd_plot, plot_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      exgrad::ExperimentConfig cfg = exgrad::parse_config_file(run_args.config_path);
      exgrad::ExperimentResult result = exgrad::run_experiment(
          cfg, run_args.out_dir, run_args.jobs, run_args.seed_offset);
      return report_runs(result);
    }

    if (cmd_verify->parsed()) {
      exgrad::ExperimentConfig cfg =
          exgrad::parse_config_file(verify_args.config_path);
      exgrad::ExperimentResult result = exgrad::run_experiment(
          cfg, verify_args.out_dir, verify_args.jobs, verify_args.seed_offset);
      bool all_pass = result.all_ok;
      for (const exgrad::RunResult& rr : result.runs) {
        if (!rr.ok) {
          std::cout << "FAIL " << rr.scheme_id << " seed=" << rr.seed << ": "
                    << rr.error << "\n";
          continue;
        }
        exgrad::ProblemInstance problem = exgrad::make_problem(cfg.problem, rr.seed);
        exgrad::Vector x_star;
        if (problem.x_star) {
          x_star = *problem.x_star;
        } else {
          exgrad::ReferenceSolution ref = exgrad::solve_reference(problem, budget);
          if (ref.low_confidence)
            std::cout << "warn " << rr.scheme_id << " seed=" << rr.seed
                      << ": reference solution has low confidence (fb residual "
                      << ref.fb_residual << ")\n";
          x_star = ref.x;
        }
        double dist0 = (rr.trace.x0 - x_star).norm();
        exgrad::BoundReport rep = exgrad::verify_bound(rr.trace, dist0);
        all_pass = all_pass && rep.pass;
        std::cout << (rep.pass ? "PASS " : "FAIL ") << rr.scheme_id
                  << " seed=" << rr.seed << " max_ratio=" << rep.max_ratio
                  << " at k=" << rep.argmax_k << "\n";
      }
      return all_pass ? 0 : 1;
    }

    exgrad::ExperimentConfig cfg = exgrad::parse_config_file(plot_args.config_path);
    exgrad::ExperimentResult result = exgrad::run_experiment(
        cfg, plot_args.out_dir, plot_args.jobs, plot_args.seed_offset);
    std::string path =
        plot_args.out_dir + "/" + cfg.run.out_prefix + "-plotdata.tsv";
    std::ofstream os(path);
    if (!os) {
      std::cerr << "error: cannot open output file '" << path << "'\n";
      return 1;
    }
    exgrad::emit_plotdata(os, cfg, result);
    std::cout << "plotdata: " << path << "\n";
    return result.all_ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
