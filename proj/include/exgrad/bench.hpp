#pragma once
// Experiment harness: INI-style configs mapping onto seeded problem
// instances and scheme schedules, a (scheme x seed) runner with CSV output,
// and the aggregate summary / plot-data writers.

#include "exgrad/problems.hpp"
#include "exgrad/schemes.hpp"

#include <iosfwd>
#include <vector>

namespace exgrad {

struct ProblemConfig {
  std::string kind = "minimax";  // minimax | spd | skew_plus_spd | indefinite_symmetric
  int p1 = 50, p2 = 50;          // minimax block sizes
  int dim = 50;                  // dimension for the linear kinds
  double d_low = 0.1;
  double noise_scale = 1.0;
  std::optional<double> rho_override;
};

struct RunConfig {
  long max_iter = 1000;
  std::vector<unsigned long long> seeds = {0};
  double stop_tol = 0.0;
  double x0_scale = 0.01;  // x^0 = x0_scale * ones
  bool emit_lyapunov = false;
  bool emit_dist = false;
  std::string out_prefix = "bench";
};

struct SchemeConfig {
  std::string id;
  SchemeFamily family = SchemeFamily::geag;
  Regime regime = Regime::geag_main;
  DirectionKind direction = DirectionKind::current;
  double alpha = 0.0, alpha_hat = 0.0, m = 1.0;
  std::optional<double> eta, beta, nu, mu, r, gamma, lambda;
  double eps = 0.0, eps_hat = 0.0;
};

struct ExperimentConfig {
  ProblemConfig problem;
  RunConfig run;
  std::vector<SchemeConfig> schemes;
};

// Parses the config grammar; errors carry the offending line number and key.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

// Instantiates the seeded problem a config describes.
ProblemInstance make_problem(const ProblemConfig& pc, unsigned long long seed);

// Direction rule / schedule for one scheme entry against instance constants.
DirectionRule make_rule(const SchemeConfig& sc);
Schedule make_schedule(const SchemeConfig& sc, double L, double rho);

struct RunResult {
  std::string scheme_id;
  unsigned long long seed = 0;
  bool ok = false;
  std::string error;  // set when ok is false
  Trace trace;
  std::string csv_path;
};

struct ExperimentResult {
  std::vector<RunResult> runs;  // scheme-major, seed-minor order
  std::string summary_path;
  bool all_ok = false;
};

// Runs every (scheme, seed) pair, writing one CSV per run plus a summary CSV
// under out_dir.  A failed run is recorded and the rest proceed.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir, int jobs = 1,
                                unsigned long long seed_offset = 0);

// rel fb residual with the pinned conventions: exactly 1 at k = 0, and a
// zero denominator maps to 1 (zero numerator) or infinity.
double rel_fb(const Trace& trace, std::size_t index);

// Writers (also used internally by run_experiment).
void write_trace_csv(std::ostream& os, const ExperimentConfig& cfg,
                     const SchemeConfig& sc, const ProblemInstance& problem,
                     unsigned long long seed, const Trace& trace);
void write_summary_csv(std::ostream& os, const ExperimentConfig& cfg,
                       const ExperimentResult& result);
void emit_plotdata(std::ostream& os, const ExperimentConfig& cfg,
                   const ExperimentResult& result);

// The summary's iteration grid: 0, the distinct values of round(10^(j/12)),
// and max_k itself.
std::vector<long> summary_grid(long max_k);

}  // namespace exgrad
