#include "exgrad/bench.hpp"
#include "exgrad/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace exgrad {
namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string direction_name(DirectionKind k) {
  switch (k) {
    case DirectionKind::current: return "current";
    case DirectionKind::past: return "past";
    case DirectionKind::affine: return "affine";
  }
  return "?";
}

[[noreturn]] void bad_line(long line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double parse_double(long line, const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    bad_line(line, "invalid number '" + value + "' for key '" + key + "'");
  }
}

long parse_long(long line, const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    bad_line(line, "invalid integer '" + value + "' for key '" + key + "'");
  }
}

bool parse_bool(long line, const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_line(line, "invalid boolean '" + value + "' for key '" + key + "'");
}

std::vector<unsigned long long> parse_seeds(long line, const std::string& value) {
  std::string v = value;
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream is(v);
  std::vector<unsigned long long> seeds;
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      bad_line(line, "invalid seed '" + tok + "' in seeds list");
    }
  }
  if (seeds.empty()) bad_line(line, "seeds list is empty");
  return seeds;
}

std::string normalize_kind(std::string v) {
  std::replace(v.begin(), v.end(), '-', '_');
  return v;
}

Regime default_regime(SchemeFamily family) {
  switch (family) {
    case SchemeFamily::geag: return Regime::geag_main;
    case SchemeFamily::gfeg: return Regime::gfeg_i;
    case SchemeFamily::gfeg_plus: return Regime::gfeg_plus_quasi;
    case SchemeFamily::gaeg: return Regime::gaeg_general;
    case SchemeFamily::gaeg_plus: return Regime::gaeg_plus_general;
  }
  return Regime::geag_main;
}

struct PendingKey {
  std::string value;
  long line = 0;
};

struct PendingScheme {
  SchemeConfig sc;
  PendingKey family, regime, direction;
};

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::vector<PendingScheme> pending;
  enum class Section { none, problem, run, scheme };
  Section section = Section::none;
  PendingScheme* cur = nullptr;

  std::string raw;
  long line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    std::size_t hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    std::size_t semi = s.find(';');
    if (semi != std::string::npos) s.erase(semi);
    s = trim(s);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') bad_line(line, "unterminated section header");
      std::string name = trim(s.substr(1, s.size() - 2));
      if (name == "problem") {
        section = Section::problem;
      } else if (name == "run") {
        section = Section::run;
      } else if (name.rfind("scheme", 0) == 0) {
        std::string id = trim(name.substr(6));
        if (id.empty()) bad_line(line, "scheme section needs an id: [scheme <id>]");
        if (id.find_first_of(" \t/") != std::string::npos)
          bad_line(line, "scheme id '" + id + "' may not contain spaces or '/'");
        for (const PendingScheme& p : pending)
          if (p.sc.id == id) bad_line(line, "duplicate scheme id '" + id + "'");
        pending.emplace_back();
        pending.back().sc.id = id;
        section = Section::scheme;
      } else {
        bad_line(line, "unknown section '[" + name + "]'");
      }
      cur = section == Section::scheme ? &pending.back() : nullptr;
      continue;
    }

    std::size_t eq = s.find('=');
    if (eq == std::string::npos) bad_line(line, "expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) bad_line(line, "empty key");
    if (value.empty()) bad_line(line, "empty value for key '" + key + "'");

    switch (section) {
      case Section::none:
        bad_line(line, "key '" + key + "' before any section header");
      case Section::problem: {
        ProblemConfig& pc = cfg.problem;
        if (key == "kind") {
          pc.kind = normalize_kind(value);
          if (pc.kind != "minimax" && pc.kind != "spd" &&
              pc.kind != "skew_plus_spd" && pc.kind != "indefinite_symmetric")
            bad_line(line, "unknown problem kind '" + value + "'");
        } else if (key == "p1") {
          pc.p1 = static_cast<int>(parse_long(line, key, value));
          if (pc.p1 < 1) bad_line(line, "p1 must be >= 1");
        } else if (key == "p2") {
          pc.p2 = static_cast<int>(parse_long(line, key, value));
          if (pc.p2 < 1) bad_line(line, "p2 must be >= 1");
        } else if (key == "dim") {
          pc.dim = static_cast<int>(parse_long(line, key, value));
          if (pc.dim < 1) bad_line(line, "dim must be >= 1");
        } else if (key == "d_low") {
          pc.d_low = parse_double(line, key, value);
        } else if (key == "noise_scale") {
          pc.noise_scale = parse_double(line, key, value);
        } else if (key == "rho_override") {
          pc.rho_override = parse_double(line, key, value);
          if (*pc.rho_override < 0.0) bad_line(line, "rho_override must be >= 0");
        } else {
          bad_line(line, "unknown key '" + key + "' in [problem]");
        }
        break;
      }
      case Section::run: {
        RunConfig& rc = cfg.run;
        if (key == "max_iter") {
          rc.max_iter = parse_long(line, key, value);
          if (rc.max_iter < 0) bad_line(line, "max_iter must be >= 0");
        } else if (key == "seeds") {
          rc.seeds = parse_seeds(line, value);
        } else if (key == "stop_tol") {
          rc.stop_tol = parse_double(line, key, value);
          if (rc.stop_tol < 0.0) bad_line(line, "stop_tol must be >= 0");
        } else if (key == "x0_scale") {
          rc.x0_scale = parse_double(line, key, value);
        } else if (key == "emit_lyapunov") {
          rc.emit_lyapunov = parse_bool(line, key, value);
        } else if (key == "emit_dist") {
          rc.emit_dist = parse_bool(line, key, value);
        } else if (key == "out_prefix") {
          if (value.find_first_of(" \t/") != std::string::npos)
            bad_line(line, "out_prefix may not contain spaces or '/'");
          rc.out_prefix = value;
        } else {
          bad_line(line, "unknown key '" + key + "' in [run]");
        }
        break;
      }
      case Section::scheme: {
        SchemeConfig& sc = cur->sc;
        if (key == "family") {
          cur->family = {value, line};
        } else if (key == "regime") {
          cur->regime = {value, line};
        } else if (key == "direction") {
          cur->direction = {value, line};
        } else if (key == "alpha") {
          sc.alpha = parse_double(line, key, value);
        } else if (key == "alpha_hat") {
          sc.alpha_hat = parse_double(line, key, value);
        } else if (key == "m") {
          sc.m = parse_double(line, key, value);
        } else if (key == "eta") {
          sc.eta = parse_double(line, key, value);
        } else if (key == "beta") {
          sc.beta = parse_double(line, key, value);
        } else if (key == "nu") {
          sc.nu = parse_double(line, key, value);
        } else if (key == "mu") {
          sc.mu = parse_double(line, key, value);
        } else if (key == "r") {
          sc.r = parse_double(line, key, value);
        } else if (key == "gamma") {
          sc.gamma = parse_double(line, key, value);
        } else if (key == "lambda") {
          sc.lambda = parse_double(line, key, value);
        } else if (key == "eps") {
          sc.eps = parse_double(line, key, value);
        } else if (key == "eps_hat") {
          sc.eps_hat = parse_double(line, key, value);
        } else {
          bad_line(line, "unknown key '" + key + "' in [scheme " + sc.id + "]");
        }
        break;
      }
    }
  }

  if (pending.empty()) throw ConfigError("config defines no [scheme <id>] section");
  for (PendingScheme& p : pending) {
    if (p.family.value.empty())
      throw ConfigError("scheme '" + p.sc.id + "' is missing the 'family' key");
    try {
      p.sc.family = parse_family(p.family.value);
    } catch (const ConfigError& e) {
      bad_line(p.family.line, e.what());
    }
    if (p.regime.value.empty()) {
      p.sc.regime = default_regime(p.sc.family);
    } else {
      try {
        p.sc.regime = parse_regime(p.sc.family, p.regime.value);
      } catch (const ConfigError& e) {
        bad_line(p.regime.line, e.what());
      }
    }
    if (!p.direction.value.empty()) {
      const std::string& d = p.direction.value;
      if (d == "current") p.sc.direction = DirectionKind::current;
      else if (d == "past") p.sc.direction = DirectionKind::past;
      else if (d == "affine") p.sc.direction = DirectionKind::affine;
      else bad_line(p.direction.line, "unknown direction '" + d + "'");
    }
    cfg.schemes.push_back(std::move(p.sc));
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

ProblemInstance make_problem(const ProblemConfig& pc, unsigned long long seed) {
  if (pc.kind == "minimax") {
    MinimaxSpec spec;
    spec.p1 = pc.p1;
    spec.p2 = pc.p2;
    spec.d_low = pc.d_low;
    spec.seed = seed;
    spec.noise_scale = pc.noise_scale;
    spec.rho_override = pc.rho_override;
    return gen_quadratic_minimax(spec);
  }
  LinearNESpec spec;
  spec.dim = pc.dim;
  spec.seed = seed;
  if (pc.kind == "spd") spec.kind = LinearKind::spd;
  else if (pc.kind == "skew_plus_spd") spec.kind = LinearKind::skew_plus_spd;
  else if (pc.kind == "indefinite_symmetric") spec.kind = LinearKind::indefinite_symmetric;
  else throw ConfigError("unknown problem kind '" + pc.kind + "'");
  return gen_linear_ne(spec);
}

DirectionRule make_rule(const SchemeConfig& sc) {
  switch (sc.direction) {
    case DirectionKind::current: return DirectionRule::current();
    case DirectionKind::past: return DirectionRule::past();
    case DirectionKind::affine: break;
  }
  switch (sc.family) {
    case SchemeFamily::geag: return DirectionRule::affine_geag(sc.alpha, sc.alpha_hat);
    case SchemeFamily::gfeg: return DirectionRule::affine_gfeg(sc.alpha, sc.alpha_hat, sc.m);
    case SchemeFamily::gfeg_plus:
      return DirectionRule::affine_gfeg_plus(sc.alpha, sc.alpha_hat, sc.m);
    case SchemeFamily::gaeg: return DirectionRule::affine_gaeg(sc.alpha, sc.alpha_hat, sc.m);
    case SchemeFamily::gaeg_plus:
      return DirectionRule::affine_gaeg_plus(sc.alpha, sc.alpha_hat, sc.m);
  }
  throw ConfigError("make_rule: unknown family");
}

Schedule make_schedule(const SchemeConfig& sc, double L, double rho) {
  DirectionRule rule = make_rule(sc);
  switch (sc.regime) {
    case Regime::geag_main:
      return Schedule::geag(L, rule.kappa, rule.kappa_hat, sc.nu.value_or(2.0), 1.0,
                            sc.eta);
    case Regime::gfeg_i:
    case Regime::gfeg_ii:
    case Regime::gfeg_iii:
    case Regime::gfeg_iv: {
      int case_number = sc.regime == Regime::gfeg_i     ? 1
                        : sc.regime == Regime::gfeg_ii  ? 2
                        : sc.regime == Regime::gfeg_iii ? 3
                                                        : 4;
      return Schedule::gfeg(case_number, L, rho, rule.kappa, rule.kappa_hat,
                            sc.nu.value_or(3.0), sc.eta, sc.beta);
    }
    case Regime::gfeg_plus_quasi:
      return Schedule::gfeg_plus_quasi(L, rho, rule.kappa, rule.kappa_hat,
                                       sc.mu.value_or(0.45), sc.r, sc.eta);
    case Regime::gfeg_plus_strict:
      return Schedule::gfeg_plus_strict(L, rho, sc.mu.value_or(0.45), sc.r, sc.eta,
                                        sc.gamma);
    case Regime::gaeg_general:
      return Schedule::gaeg(L, rho, rule.kappa, rule.kappa_hat, sc.r.value_or(3.0),
                            sc.lambda);
    case Regime::gaeg_current:
      return Schedule::gaeg_current(L, rho, sc.r.value_or(3.0), sc.lambda);
    case Regime::gaeg_past:
      return Schedule::gaeg_past(L, rho, sc.r.value_or(3.0), sc.lambda);
    case Regime::gaeg_plus_aeg:
      return Schedule::gaeg_plus_aeg(L, rho, sc.r.value_or(3.0), sc.beta, sc.eta);
    case Regime::gaeg_plus_general:
      return Schedule::gaeg_plus_general(L, rho, rule.kappa, rule.kappa_hat,
                                         sc.mu.value_or(2.0), sc.r.value_or(3.0),
                                         sc.eta, sc.eps, sc.eps_hat);
  }
  throw ConfigError("make_schedule: unknown regime");
}

double rel_fb(const Trace& trace, std::size_t index) {
  if (index >= trace.records.size())
    throw UsageError("rel_fb: record index out of range");
  if (index == 0) return 1.0;
  double fb = trace.records[index].fb_residual;
  if (trace.fb0 == 0.0)
    return fb == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return fb / trace.fb0;
}

namespace {

// Monitor value for the family's descent certificate; NaN when the monitor
// needs the solution and the instance does not carry one.
double lyapunov_value(const Trace& tr, std::size_t i,
                      const std::optional<Vector>& x_star) {
  const Schedule& sched = tr.schedule;
  const StateSnapshot& snap = tr.snapshots[i];
  const double nan = std::numeric_limits<double>::quiet_NaN();
  switch (sched.family) {
    case SchemeFamily::geag:
      return x_star ? lyapunov_geag(sched, snap, tr.x0, *x_star) : nan;
    case SchemeFamily::gfeg:
      return lyapunov_gfeg(sched, snap, tr.x0);
    case SchemeFamily::gfeg_plus:
      return x_star ? lyapunov_gfeg_plus(sched, snap, *x_star) : nan;
    case SchemeFamily::gaeg:
      return x_star ? lyapunov_gaeg(sched, snap, *x_star) : nan;
    case SchemeFamily::gaeg_plus:
      if (!x_star) return nan;
      return sched.regime == Regime::gaeg_plus_general
                 ? lyapunov_gaeg_plus_v2(sched, snap, *x_star)
                 : lyapunov_gaeg_plus_v1(sched, snap, *x_star);
  }
  return nan;
}

}  // namespace

void write_trace_csv(std::ostream& os, const ExperimentConfig& cfg,
                     const SchemeConfig& sc, const ProblemInstance& problem,
                     unsigned long long seed, const Trace& trace) {
  const Schedule& s = trace.schedule;
  os << "# scheme: " << sc.id << "\n";
  os << "# family: " << to_string(s.family) << "\n";
  os << "# regime: " << to_string(s.regime) << "\n";
  os << "# direction: " << direction_name(sc.direction);
  if (sc.direction == DirectionKind::affine)
    os << " alpha=" << fmt17(sc.alpha) << " alpha_hat=" << fmt17(sc.alpha_hat)
       << " m=" << fmt17(sc.m);
  os << "\n";
  os << "# constants: L=" << fmt17(s.L) << " rho=" << fmt17(s.rho)
     << " kappa=" << fmt17(s.kappa) << " kappa_hat=" << fmt17(s.kappa_hat)
     << " eta=" << fmt17(s.eta) << " nu=" << fmt17(s.nu) << " beta=" << fmt17(s.beta)
     << " mu=" << fmt17(s.mu) << " r=" << fmt17(s.r) << " gamma=" << fmt17(s.gamma)
     << " anchor_pull=" << fmt17(s.anchor_pull) << " lambda=" << fmt17(s.lambda)
     << " t0=" << s.t0 << " eps=" << fmt17(s.eps) << " eps_hat=" << fmt17(s.eps_hat)
     << "\n";
  os << "# seed: " << seed << "\n";
  os << "# prng: " << kPrngName << "\n";
  os << "# problem: " << problem.label << "\n";

  bool with_dist = cfg.run.emit_dist;
  bool with_lyap = cfg.run.emit_lyapunov && !trace.snapshots.empty();
  os << "k,residual,fb_residual,rel_fb_residual";
  if (with_dist) os << ",dist_to_star";
  if (with_lyap) os << ",lyapunov";
  os << ",wall_nanos\n";
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const TraceRecord& rec = trace.records[i];
    os << rec.k << "," << fmt17(rec.residual) << "," << fmt17(rec.fb_residual) << ","
       << fmt17(rel_fb(trace, i));
    if (with_dist) os << "," << fmt17(rec.dist_to_star);
    if (with_lyap) os << "," << fmt17(lyapunov_value(trace, i, problem.x_star));
    os << "," << rec.wall_nanos << "\n";
  }
}

std::vector<long> summary_grid(long max_k) {
  std::vector<long> grid;
  grid.push_back(0);
  for (int j = 0;; ++j) {
    long v = std::llround(std::pow(10.0, j / 12.0));
    if (v > max_k) break;
    grid.push_back(v);
  }
  if (max_k > 0) grid.push_back(max_k);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

void write_summary_csv(std::ostream& os, const ExperimentConfig& cfg,
                       const ExperimentResult& result) {
  os << "# per-scheme aggregates over seeds at a log-spaced iteration grid\n";
  os << "scheme,k,seeds,residual_mean,residual_min,residual_max,"
        "rel_fb_mean,rel_fb_min,rel_fb_max\n";
  std::vector<long> grid = summary_grid(cfg.run.max_iter);
  for (const SchemeConfig& sc : cfg.schemes) {
    for (long k : grid) {
      double rs = 0.0, rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
      double fs = 0.0, fmin = std::numeric_limits<double>::infinity(), fmax = 0.0;
      long n = 0;
      for (const RunResult& rr : result.runs) {
        if (!rr.ok || rr.scheme_id != sc.id) continue;
        if (static_cast<std::size_t>(k) >= rr.trace.records.size()) continue;
        double res = rr.trace.records[k].residual;
        double rf = rel_fb(rr.trace, static_cast<std::size_t>(k));
        rs += res;
        rmin = std::min(rmin, res);
        rmax = std::max(rmax, res);
        fs += rf;
        fmin = std::min(fmin, rf);
        fmax = std::max(fmax, rf);
        ++n;
      }
      if (n == 0) continue;
      os << sc.id << "," << k << "," << n << "," << fmt17(rs / n) << ","
         << fmt17(rmin) << "," << fmt17(rmax) << "," << fmt17(fs / n) << ","
         << fmt17(fmin) << "," << fmt17(fmax) << "\n";
    }
  }
}

void emit_plotdata(std::ostream& os, const ExperimentConfig& cfg,
                   const ExperimentResult& result) {
  std::vector<long> grid = summary_grid(cfg.run.max_iter);
  for (const SchemeConfig& sc : cfg.schemes) {
    os << "# scheme: " << sc.id << "\n";
    os << "# columns: log10_k\tlog10_residual_mean\tlog10_rel_fb_mean\n";
    for (long k : grid) {
      if (k == 0) continue;
      double rs = 0.0, fs = 0.0;
      long n = 0;
      for (const RunResult& rr : result.runs) {
        if (!rr.ok || rr.scheme_id != sc.id) continue;
        if (static_cast<std::size_t>(k) >= rr.trace.records.size()) continue;
        rs += rr.trace.records[k].residual;
        fs += rel_fb(rr.trace, static_cast<std::size_t>(k));
        ++n;
      }
      if (n == 0) continue;
      double rmean = rs / n, fmean = fs / n;
      if (rmean <= 0.0 || fmean <= 0.0) continue;
      os << fmt17(std::log10(static_cast<double>(k))) << "\t"
         << fmt17(std::log10(rmean)) << "\t" << fmt17(std::log10(fmean)) << "\n";
    }
    os << "\n";
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& out_dir, int jobs,
                                unsigned long long seed_offset) {
  if (cfg.schemes.empty()) throw ConfigError("run_experiment: no schemes configured");
  std::filesystem::create_directories(out_dir);

  struct Task {
    std::size_t scheme_index;
    unsigned long long seed;
  };
  std::vector<Task> tasks;
  for (std::size_t si = 0; si < cfg.schemes.size(); ++si)
    for (unsigned long long seed : cfg.run.seeds)
      tasks.push_back({si, seed + seed_offset});

  ExperimentResult result;
  result.runs.resize(tasks.size());

  auto work = [&](std::size_t ti) {
    const Task& task = tasks[ti];
    const SchemeConfig& sc = cfg.schemes[task.scheme_index];
    RunResult rr;
    rr.scheme_id = sc.id;
    rr.seed = task.seed;
    try {
      ProblemInstance problem = make_problem(cfg.problem, task.seed);
      DirectionRule rule = make_rule(sc);
      Schedule sched = make_schedule(sc, problem.lipschitz_L, problem.rho);
      RunOptions opts;
      opts.max_iter = cfg.run.max_iter;
      opts.stop_tol = cfg.run.stop_tol;
      opts.keep_snapshots = cfg.run.emit_lyapunov;
      if ((cfg.run.emit_dist || cfg.run.emit_lyapunov) && problem.x_star)
        opts.x_star = problem.x_star;
      Vector x0 = Vector::Constant(problem.dim, cfg.run.x0_scale);
      rr.trace = run(problem, sched, rule, x0, opts);
      rr.csv_path = out_dir + "/" + cfg.run.out_prefix + "-" + sc.id + "-seed" +
                    std::to_string(task.seed) + ".csv";
      std::ofstream os(rr.csv_path);
      if (!os) throw ConfigError("cannot open output file '" + rr.csv_path + "'");
      write_trace_csv(os, cfg, sc, problem, task.seed, rr.trace);
      rr.ok = true;
    } catch (const std::exception& e) {
      rr.ok = false;
      rr.error = e.what();
    }
    result.runs[ti] = std::move(rr);
  };

  int njobs = std::max(1, jobs);
  if (njobs == 1 || tasks.size() <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    int spawn = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(njobs), tasks.size()));
    workers.reserve(spawn);
    for (int t = 0; t < spawn; ++t)
      workers.emplace_back([&] {
        while (true) {
          std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) break;
          work(i);
        }
      });
    for (std::thread& w : workers) w.join();
  }

  result.summary_path = out_dir + "/" + cfg.run.out_prefix + "-summary.csv";
  std::ofstream os(result.summary_path);
  if (!os) throw ConfigError("cannot open output file '" + result.summary_path + "'");
  write_summary_csv(os, cfg, result);
  result.all_ok = std::all_of(result.runs.begin(), result.runs.end(),
                              [](const RunResult& r) { return r.ok; });
  return result;
}

}  // namespace exgrad
