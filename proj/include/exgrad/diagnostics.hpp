#pragma once
// Trace-level diagnostics: theoretical residual envelopes, log-log rate fits,
// and the per-family descent monitors the test suites use as oracles.

#include "exgrad/schemes.hpp"

namespace exgrad {

struct BoundReport {
  bool pass = false;
  double max_ratio = 0.0;  // worst observed (measured / envelope)
  long argmax_k = 0;
  double r0_sq = 0.0;      // envelope numerator prescribed by the regime
};

// Checks every record of the trace against the regime's residual envelope.
// dist0 is ||x^0 - x_star||; tol is the accepted relative slack.
BoundReport verify_bound(const Trace& trace, double dist0, double tol = 1e-7);

struct RateFit {
  double slope = 0.0;  // least-squares slope of log10 residual vs log10 k
  double intercept = 0.0;
  long points = 0;
  bool prefix_only = false;  // an exact zero truncated the fit window
};

// Fits residual decay over records with k in [k_lo, k_hi] (k >= 1 only).
RateFit fit_rate(const Trace& trace, long k_lo, long k_hi);

// Weight on ||u^k - Fx^k||^2 in the inexact-direction envelopes (0 in the
// exact-direction regime).
double gfeg_psi(const Schedule& sched);

// Quasi-descent shape constant and the per-step allowed growth factor
// V_{k+1} <= gfeg_plus_quasi_factor(sched, k) * V_k.
double gfeg_plus_theta(double mu);
double gfeg_plus_quasi_factor(const Schedule& sched, long k);

// Accumulated growth bound for the gaeg+ general-regime monitor:
// 0 <= V_k <= gaeg_plus_omega(sched) * V_0.
double gaeg_plus_omega(const Schedule& sched);

// Descent monitors, evaluated on snapshots from current-gradient runs.
// Each returns the monitor value at the snapshot's index.
double lyapunov_geag(const Schedule& sched, const StateSnapshot& snap,
                     const Vector& x0, const Vector& x_star);
double lyapunov_gfeg(const Schedule& sched, const StateSnapshot& snap,
                     const Vector& x0);
double lyapunov_gfeg_plus(const Schedule& sched, const StateSnapshot& snap,
                          const Vector& x_star);
double lyapunov_gaeg(const Schedule& sched, const StateSnapshot& snap,
                     const Vector& x_star);
double lyapunov_gaeg_plus_v1(const Schedule& sched, const StateSnapshot& snap,
                             const Vector& x_star);
double lyapunov_gaeg_plus_v2(const Schedule& sched, const StateSnapshot& snap,
                             const Vector& x_star);

}  // namespace exgrad
