#pragma once

#include "exgrad/core.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace exgrad {

// ---------------------------------------------------------------------------
// Families and parameter regimes
// ---------------------------------------------------------------------------

enum class SchemeFamily { geag, gfeg, gfeg_plus, gaeg, gaeg_plus };

enum class Regime {
  geag_main,         // anchored extragradient, monotone problems
  gfeg_i,            // exact directions (kappa = kappa_hat = 0)
  gfeg_ii,           // kappa = 0, kappa_hat > 0
  gfeg_iii,          // kappa > 0, kappa_hat = 0
  gfeg_iv,           // kappa > 0, kappa_hat > 0
  gfeg_plus_quasi,   // drifting anchor, quasi-descent certificate
  gfeg_plus_strict,  // drifting anchor, fresh gradients, strict descent
  gaeg_general,      // momentum scheme, any certified direction
  gaeg_current,      // momentum scheme specialized to u = Fx
  gaeg_past,         // momentum scheme specialized to u = Fy (previous)
  gaeg_plus_aeg,     // alternating scheme, fresh gradients (AEG schedule)
  gaeg_plus_general, // alternating scheme, certified directions
};

std::string to_string(SchemeFamily f);
std::string to_string(Regime r);
SchemeFamily parse_family(const std::string& name);
Regime parse_regime(SchemeFamily family, const std::string& name);

// ---------------------------------------------------------------------------
// Direction rules: how the extrapolation direction u^k is assembled.
// Each rule certifies constants (kappa, kappa_hat) for the per-family
// approximation condition that the step-size windows assume.  At k = 0 every
// rule falls back to u^0 = Fx^0.
// ---------------------------------------------------------------------------

enum class DirectionKind { current, past, affine };

struct DirectionRule {
  DirectionKind kind = DirectionKind::current;
  double alpha = 0.0;      // weight on the freshly evaluated gradient
  double alpha_hat = 0.0;  // weight on the family's auxiliary term
  double m = 1.0;          // Young-split weight behind the affine certificates
  double kappa = 0.0;
  double kappa_hat = 0.0;

  static DirectionRule current();  // u^k = Fx^k, certifies (0, 0)
  static DirectionRule past();     // u^k from the previous half step, certifies (1, 0)
  static DirectionRule affine_geag(double alpha, double alpha_hat);
  static DirectionRule affine_gfeg(double alpha, double alpha_hat, double m = 1.0);
  static DirectionRule affine_gfeg_plus(double alpha, double alpha_hat, double m = 1.0);
  static DirectionRule affine_gaeg(double alpha, double alpha_hat, double m = 1.0);
  static DirectionRule affine_gaeg_plus(double alpha, double alpha_hat, double m = 1.0);
};

// ---------------------------------------------------------------------------
// Step-size caps
// ---------------------------------------------------------------------------

// Largest admissible eta for GEAG given certified direction constants.
// ratio is the free tuning ratio in (0, 1]; exact directions return 1/L.
double eta_bar_geag(double kappa, double kappa_hat, double ratio, double L);

// Largest admissible lambda for GAEG in the general regime (positive root of
// the defining quadratic); specializes to 1/(4*sqrt(2)*L) when kappa = rho = 0.
double lambda_bar_gaeg(double kappa, double L, double rho);

// Largest admissible lambda for GAEG with past-gradient directions;
// specializes to 1/(2*sqrt(41)*L) when rho = 0.
double lambda_bar_gaeg_past(double L, double rho);

// Step-size shape constant for GAEG+ in the general regime; eta <= Psi/L.
double psi_gaeg_plus(double kappa, double kappa_hat, double r, double eps_hat = 0.0);

// ---------------------------------------------------------------------------
// Schedules: every scalar a run needs, validated per regime.  Factories throw
// ConfigError naming the violated inequality.  Fields are public so tests can
// assemble unchecked schedules for reduction experiments.
// ---------------------------------------------------------------------------

struct Schedule {
  SchemeFamily family = SchemeFamily::geag;
  Regime regime = Regime::geag_main;
  double L = 0.0;    // Lipschitz constant the windows were checked against
  double rho = 0.0;  // co-hypomonotonicity modulus assumed
  double kappa = 0.0;
  double kappa_hat = 0.0;
  double eta = 0.0;     // base extragradient step
  double nu = 0.0;      // geag / gfeg anchor offset
  double beta = 0.0;    // gfeg base correction; gaeg_plus correction step
  double mu = 0.0;      // gfeg_plus / gaeg_plus momentum shape
  double r = 0.0;       // gfeg_plus / gaeg / gaeg_plus index offset
  double gamma = 0.0;   // gfeg_plus anchor drift
  double anchor_pull = 0.0;  // gfeg_plus: c in beta_k = -gamma*tau_k + c*(1 - tau_k)
  double lambda = 0.0;  // gaeg half step
  long t0 = 0;          // gaeg_plus start index
  double eps = 0.0;      // gaeg_plus general: slack added to beta
  double eps_hat = 0.0;  // gaeg_plus general: slack in the step-size shape
  double delta_cap = 3.0;  // gaeg_plus general: weight in the boundedness certificate

  static Schedule geag(double L, double kappa = 0.0, double kappa_hat = 0.0,
                       double nu = 2.0, double ratio = 1.0,
                       std::optional<double> eta = {});
  static Schedule gfeg(int case_number, double L, double rho, double kappa,
                       double kappa_hat, double nu = 3.0,
                       std::optional<double> eta = {},
                       std::optional<double> beta = {});
  static Schedule gfeg_plus_quasi(double L, double rho, double kappa = 0.0,
                                  double kappa_hat = 0.0, double mu = 0.45,
                                  std::optional<double> r = {},
                                  std::optional<double> eta = {});
  static Schedule gfeg_plus_strict(double L, double rho, double mu = 0.45,
                                   std::optional<double> r = {},
                                   std::optional<double> eta = {},
                                   std::optional<double> gamma = {});
  static Schedule gaeg(double L, double rho, double kappa, double kappa_hat,
                       double r = 3.0, std::optional<double> lambda = {});
  static Schedule gaeg_current(double L, double rho, double r = 3.0,
                               std::optional<double> lambda = {});
  static Schedule gaeg_past(double L, double rho, double r = 3.0,
                            std::optional<double> lambda = {});
  static Schedule gaeg_plus_aeg(double L, double rho, double r = 3.0,
                                std::optional<double> beta = {},
                                std::optional<double> eta = {});
  static Schedule gaeg_plus_general(double L, double rho, double kappa = 0.0,
                                    double kappa_hat = 0.0, double mu = 2.0,
                                    double r = 3.0,
                                    std::optional<double> eta = {},
                                    double eps = 0.0, double eps_hat = 0.0);
};

// ---------------------------------------------------------------------------
// Per-family iteration state and one-step transitions.  Each step consumes
// the direction u^k for the current index and reports the two sides of the
// direction condition it was taken under (both zero for exact directions).
// ---------------------------------------------------------------------------

struct StepInfo {
  double cond_lhs = 0.0;  // ||Fx^k - u^k||^2
  double cond_rhs = 0.0;  // certified budget for this step
};

struct GeagState {
  Vector x0, x, xi, Fx;
  Vector y_prev, Fy_prev, u_prev, Fx_prev;
  double etahat_prev = 0.0;
  long k = 0;
};

struct GfegState {
  Vector x0, x, xi, xi_prev, Fx, Fx_prev;
  Vector y_prev, Fy_prev;
  long k = 0;
};

struct GfegPlusState {
  Vector x, xi, xi_prev, Fx, Fx_prev;
  Vector y_prev, Fy_prev, xbar;
  double tau_prev = 0.0;
  long k = 0;
};

struct GaegState {
  Vector x, xi, Fx, xhat, y;
  Vector Fy_prev, w_prev;
  long k = 0;
};

struct GaegPlusState {
  Vector x, xi, Fx, y;
  Vector Fy_prev, d_prev;
  long k = 0;
};

GeagState geag_init(const ProblemInstance& problem, const Vector& x0);
GfegState gfeg_init(const ProblemInstance& problem, const Vector& x0);
GfegPlusState gfeg_plus_init(const ProblemInstance& problem, const Schedule& sched, const Vector& x0);
GaegState gaeg_init(const ProblemInstance& problem, const Vector& x0);
GaegPlusState gaeg_plus_init(const ProblemInstance& problem, const Vector& x0);

// The direction u^k the given rule produces from the current state.
Vector build_direction(const Schedule& sched, const DirectionRule& rule, const GeagState& st);
Vector build_direction(const Schedule& sched, const DirectionRule& rule, const GfegState& st);
Vector build_direction(const Schedule& sched, const DirectionRule& rule, const GfegPlusState& st);
Vector build_direction(const Schedule& sched, const DirectionRule& rule, const GaegState& st);
Vector build_direction(const Schedule& sched, const DirectionRule& rule, const GaegPlusState& st);

StepInfo geag_step(const ProblemInstance& problem, const Schedule& sched, const DirectionRule& rule, GeagState& st);
StepInfo gfeg_step(const ProblemInstance& problem, const Schedule& sched, const DirectionRule& rule, GfegState& st);
StepInfo gfeg_plus_step(const ProblemInstance& problem, const Schedule& sched, const DirectionRule& rule, GfegPlusState& st);
StepInfo gaeg_step(const ProblemInstance& problem, const Schedule& sched, const DirectionRule& rule, GaegState& st);
StepInfo gaeg_plus_step(const ProblemInstance& problem, const Schedule& sched, const DirectionRule& rule, GaegPlusState& st);

// ---------------------------------------------------------------------------
// Runs and traces
// ---------------------------------------------------------------------------

struct TraceRecord {
  long k = 0;
  double residual = 0.0;     // ||Fx^k + xi^k||
  double fb_residual = 0.0;  // forward-backward residual at the schedule's eta
  double e_norm = 0.0;       // ||u^k - Fx^k|| for the direction at this index
  double dist_to_star = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t wall_nanos = 0;  // cumulative wall time when recorded
};

struct StateSnapshot {
  long k = 0;
  Vector x, xi, Fx;        // always present
  Vector u, y, xbar, xhat; // family-dependent; empty when not applicable
};

struct Trace {
  SchemeFamily family = SchemeFamily::geag;
  Regime regime = Regime::geag_main;
  Schedule schedule;
  DirectionRule rule;
  Vector x0;
  double w0_norm = 0.0;
  double fb0 = 0.0;
  bool stopped_early = false;
  std::vector<TraceRecord> records;
  std::vector<StateSnapshot> snapshots;  // parallel to records when requested
};

struct RunOptions {
  long max_iter = 1000;
  double stop_tol = 0.0;  // stop once the residual is <= this (0 disables)
  bool keep_snapshots = false;
  std::optional<Vector> x_star;  // enables dist_to_star in records
};

Trace run(const ProblemInstance& problem, const Schedule& sched,
          const DirectionRule& rule, const Vector& x0,
          const RunOptions& opts = {});

}  // namespace exgrad
