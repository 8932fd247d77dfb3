#include "exgrad/diagnostics.hpp"

#include <cmath>

namespace exgrad {
namespace {

double sq(double v) { return v * v; }

}  // namespace

// ---------------------------------------------------------------------------
// Residual envelopes
// ---------------------------------------------------------------------------

double gfeg_psi(const Schedule& sched) {
  if (sched.family != SchemeFamily::gfeg)
    throw UsageError("gfeg_psi: schedule is not a gfeg schedule");
  if (sched.regime == Regime::gfeg_i) return 0.0;
  double L = sched.L, eta = sched.eta, beta = sched.beta;
  return 8.0 * (L * L * eta * eta * eta + beta) / (2.0 * eta - 3.0 * beta);
}

double gfeg_plus_theta(double mu) {
  if (!(mu > 0.0 && mu < 0.5))
    throw UsageError("gfeg_plus_theta: mu must lie in (0, 1/2)");
  return (1.0 - 2.0 * mu) * sq(1.0 - mu) / (2.0 * (2.0 - mu) * mu * mu);
}

double gfeg_plus_quasi_factor(const Schedule& sched, long k) {
  if (sched.regime != Regime::gfeg_plus_quasi)
    throw UsageError("gfeg_plus_quasi_factor: schedule is not gfeg+ quasi");
  double tk = sched.mu * (static_cast<double>(k) + sched.r);
  return 1.0 + gfeg_plus_theta(sched.mu) * sq(sched.mu) / sq(tk);
}

double gaeg_plus_omega(const Schedule& sched) {
  if (sched.family != SchemeFamily::gaeg_plus || !(sched.mu > 1.0))
    throw UsageError("gaeg_plus_omega: needs a gaeg+ schedule with mu > 1");
  double omega = sched.mu * (sched.eta - sched.beta) / (sched.mu + 1.0);
  double c = std::sqrt(omega * sched.r * sq(sched.r - 2.0) /
                       (sched.eta * (sched.mu - 1.0)));
  double t0 = static_cast<double>(sched.t0);
  return std::pow((1.0 + t0 + c) / (1.0 + t0 - c), c / 2.0) *
         std::exp(c * c / (sq(1.0 + t0) - c * c));
}

namespace {

// Envelope numerator and per-k denominator for each regime.  The envelope is
// r0_sq / denom(k); the measured side is residual^2, plus psi * e_norm^2 for
// the inexact-direction gfeg regimes.
struct Envelope {
  double r0_sq = 0.0;
  double psi = 0.0;  // weight on e_norm^2 in the measured side
  std::function<double(double)> denom;
};

Envelope make_envelope(const Schedule& s, double dist0, double w0) {
  Envelope env;
  double d0_sq = dist0 * dist0;
  double w0_sq = w0 * w0;
  switch (s.regime) {
    case Regime::geag_main: {
      env.r0_sq = (4.0 * d0_sq + sq(s.eta) * w0_sq) / sq(s.eta);
      env.denom = [s](double k) { return sq(k + s.nu - 1.0); };
      break;
    }
    case Regime::gfeg_i: {
      double nu = s.nu, eta = s.eta, beta = s.beta;
      env.r0_sq = (4.0 * (nu - 1.0) / sq(eta - beta)) * d0_sq +
                  (4.0 * (nu - 1.0) * (eta * (nu - 1.0) - beta * (nu - 2.0)) /
                   (eta - beta)) *
                      w0_sq;
      env.denom = [nu](double k) { return sq(k + nu - 1.0); };
      break;
    }
    case Regime::gfeg_ii:
    case Regime::gfeg_iii:
    case Regime::gfeg_iv: {
      double nu = s.nu, eta = s.eta, beta = s.beta;
      env.psi = gfeg_psi(s);
      env.r0_sq = (8.0 * (nu - 1.0) / sq(2.0 * eta - 3.0 * beta)) * d0_sq +
                  (4.0 *
                   (2.0 * eta * sq(nu - 1.0) -
                    beta * (nu - 2.0) * (2.0 * nu - 1.0)) /
                   (2.0 * eta - 3.0 * beta)) *
                      w0_sq;
      env.denom = [nu](double k) { return sq(k + nu - 1.0); };
      break;
    }
    case Regime::gfeg_plus_quasi: {
      double mu = s.mu, r = s.r, eta = s.eta;
      double theta = gfeg_plus_theta(mu);
      double l0 = (eta * sq(mu) * sq(r - 1.0) / 2.0) * w0_sq +
                  (3.0 * (1.0 - mu) / ((1.0 - 2.0 * mu) * eta)) * d0_sq;
      env.r0_sq = 6.0 * std::exp(theta / r) * l0 / (eta * sq(mu));
      env.denom = [r](double k) { return sq(k + r - 1.0); };
      break;
    }
    case Regime::gfeg_plus_strict: {
      double mu = s.mu, r = s.r, eta = s.eta, rho = s.rho, gamma = s.gamma;
      double l0 = (mu * (r - 1.0) * (mu * (r - 1.0) * (eta - 2.0 * rho) + 2.0 * rho) /
                   2.0) *
                      w0_sq +
                  ((1.0 - mu) / (2.0 * gamma)) * d0_sq;
      env.r0_sq = 2.0 * (1.0 - mu) * l0 /
                  (((1.0 - mu) * (eta - 2.0 * rho) - gamma) * sq(mu));
      env.denom = [r](double k) { return sq(k + r - 1.0); };
      break;
    }
    case Regime::gaeg_general: {
      double lam = s.lambda, r = s.r, rho = s.rho;
      env.r0_sq = (lam * (r - 1.0) * (12.0 * (r + 2.0) * lam + 29.0 * rho) * w0_sq +
                   16.0 * d0_sq) /
                  (3.0 * sq(lam));
      env.denom = [r](double k) { return (k + r - 1.0) * (k + r + 2.0); };
      break;
    }
    case Regime::gaeg_current: {
      double lam = s.lambda, r = s.r, rho = s.rho;
      env.r0_sq = (4.0 * lam * (r - 1.0) * ((r + 1.0) * lam + 2.0 * rho) * w0_sq +
                   (16.0 / 3.0) * d0_sq) /
                  sq(lam);
      env.denom = [r](double k) { return (k + r - 2.0) * (k + r - 1.0); };
      break;
    }
    case Regime::gaeg_past: {
      double lam = s.lambda, r = s.r, rho = s.rho;
      env.r0_sq = (2.0 * lam * (r - 1.0) * ((2.0 * r + 3.0) * lam + 4.0 * rho) * w0_sq +
                   (16.0 / 3.0) * d0_sq) /
                  sq(lam);
      env.denom = [r](double k) { return (k + r - 1.0) * (k + r); };
      break;
    }
    case Regime::gaeg_plus_aeg:
    case Regime::gaeg_plus_general: {
      double eta = s.eta, beta = s.beta, mu = s.mu, r = s.r, rho = s.rho;
      double t0 = static_cast<double>(s.t0);
      double c0 = r * ((eta - beta) * t0 - eta * (r - 1.0));
      double lam0 = (sq((eta - beta) * (t0 - r + 1.0) - (r - 1.0) * beta) +
                     mu * sq(r - 1.0) * eta * beta) /
                    (mu + 1.0);
      double base = (c0 + r * r + r * mu) * d0_sq + (c0 + lam0) * w0_sq;
      if (s.regime == Regime::gaeg_plus_aeg) {
        env.r0_sq = 4.0 * base / sq(eta - beta);
        env.denom = [t0, r](double k) { return sq(k + t0 - r + 1.0); };
      } else {
        env.r0_sq = 4.0 * gaeg_plus_omega(s) * sq(mu + 1.0) * base /
                    sq(eta - 8.0 * rho);
        env.denom = [t0](double k) { return sq(k + t0); };
      }
      break;
    }
    default:
      throw UsageError("verify_bound: regime has no residual envelope");
  }
  return env;
}

}  // namespace

BoundReport verify_bound(const Trace& trace, double dist0, double tol) {
  if (trace.records.empty()) throw UsageError("verify_bound: empty trace");
  if (!(dist0 >= 0.0)) throw UsageError("verify_bound: dist0 must be >= 0");
  Envelope env = make_envelope(trace.schedule, dist0, trace.w0_norm);

  BoundReport rep;
  rep.r0_sq = env.r0_sq;
  rep.max_ratio = 0.0;
  for (const TraceRecord& rec : trace.records) {
    double lhs = sq(rec.residual) + env.psi * sq(rec.e_norm);
    double bound = env.r0_sq / env.denom(static_cast<double>(rec.k));
    double ratio = lhs / bound;
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.argmax_k = rec.k;
    }
  }
  rep.pass = rep.max_ratio <= 1.0 + tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Rate fits
// ---------------------------------------------------------------------------

RateFit fit_rate(const Trace& trace, long k_lo, long k_hi) {
  if (k_lo < 1 || k_hi < k_lo)
    throw UsageError("fit_rate: need 1 <= k_lo <= k_hi");
  RateFit fit;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long n = 0;
  for (const TraceRecord& rec : trace.records) {
    if (rec.k < k_lo || rec.k > k_hi) continue;
    if (rec.residual == 0.0) {
      fit.prefix_only = true;
      break;
    }
    double x = std::log10(static_cast<double>(rec.k));
    double y = std::log10(rec.residual);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw UsageError("fit_rate: fewer than two usable records in window");
  double det = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.points = n;
  return fit;
}

// ---------------------------------------------------------------------------
// Descent monitors
// ---------------------------------------------------------------------------

double lyapunov_geag(const Schedule& sched, const StateSnapshot& snap,
                     const Vector& x0, const Vector& x_star) {
  double nu = sched.nu, eta = sched.eta;
  double s = static_cast<double>(snap.k) + nu - 1.0;
  double b_k = s / (nu - 1.0);
  double a_k = eta * s * s / (nu - 1.0);
  Vector w = snap.Fx + snap.xi;
  double d0_sq = (x0 - x_star).squaredNorm();
  return 0.5 * a_k * w.squaredNorm() + b_k * w.dot(snap.x - x0) +
         d0_sq / (eta * (nu - 1.0));
}

double lyapunov_gfeg(const Schedule& sched, const StateSnapshot& snap,
                     const Vector& x0) {
  double nu = sched.nu, eta = sched.eta, beta = sched.beta;
  double s = static_cast<double>(snap.k) + nu - 1.0;
  double b_k = s / (nu - 1.0);
  double a_k = s * (eta * s - beta * (s - 1.0)) / (nu - 1.0);
  Vector w = snap.Fx + snap.xi;
  return 0.5 * a_k * w.squaredNorm() + b_k * w.dot(snap.x - x0);
}

double lyapunov_gfeg_plus(const Schedule& sched, const StateSnapshot& snap,
                          const Vector& x_star) {
  double mu = sched.mu, r = sched.r, eta = sched.eta, rho = sched.rho;
  double t_prev = mu * (static_cast<double>(snap.k) - 1.0 + r);
  double a_k = sched.regime == Regime::gfeg_plus_quasi
                   ? eta * t_prev * t_prev - 4.0 * rho * t_prev * (t_prev - 1.0)
                   : t_prev * (eta * t_prev - 2.0 * rho * (t_prev - 1.0));
  Vector w = snap.Fx + snap.xi;
  return 0.5 * a_k * w.squaredNorm() + t_prev * w.dot(snap.x - snap.xbar) +
         ((1.0 - mu) / (2.0 * sched.gamma)) * (snap.xbar - x_star).squaredNorm();
}

double lyapunov_gaeg(const Schedule& sched, const StateSnapshot& snap,
                     const Vector& x_star) {
  double r = sched.r, lam = sched.lambda, rho = sched.rho;
  double t_k = static_cast<double>(snap.k) + r;
  double t_prev = t_k - 1.0;
  double b_k = 1.5 * lam * t_k * t_prev;
  double a_k = 1.5 * lam * t_prev * (lam * t_k + lam + 2.0 * rho);
  Vector w = snap.Fx + snap.xi;
  return 0.5 * a_k * w.squaredNorm() + b_k * w.dot(snap.xhat - snap.y) +
         (snap.xhat - x_star + t_k * (snap.y - snap.xhat)).squaredNorm();
}

namespace {

// Shared quadratic form behind both gaeg+ monitors, evaluated with a caller
// supplied direction g standing in for the operator value.
double gaeg_plus_core(const Schedule& sched, const StateSnapshot& snap,
                      const Vector& x_star, const Vector& g) {
  double eta = sched.eta, beta = sched.beta, mu = sched.mu, r = sched.r;
  double t_k = static_cast<double>(snap.k) + static_cast<double>(sched.t0);
  double psi_aux = (eta - beta) / (mu + 1.0);
  double c_k = (psi_aux * (t_k - r + 1.0) - (r - 1.0) * beta) * t_k;
  double lam_k = (sq((eta - beta) * (t_k - r + 1.0) - (r - 1.0) * beta) +
                  mu * sq(r - 1.0) * eta * beta) /
                 (mu + 1.0);
  Vector dx = snap.x - x_star;
  return (r * dx + t_k * (snap.y - snap.x)).squaredNorm() +
         r * mu * dx.squaredNorm() + 2.0 * c_k * g.dot(snap.y - snap.x) +
         lam_k * g.squaredNorm() +
         2.0 * r * ((eta - beta) * t_k - eta * (r - 1.0)) * g.dot(dx);
}

}  // namespace

double lyapunov_gaeg_plus_v1(const Schedule& sched, const StateSnapshot& snap,
                             const Vector& x_star) {
  return gaeg_plus_core(sched, snap, x_star, snap.Fx + snap.xi);
}

double lyapunov_gaeg_plus_v2(const Schedule& sched, const StateSnapshot& snap,
                             const Vector& x_star) {
  double eta = sched.eta, beta = sched.beta, mu = sched.mu, r = sched.r;
  double t_k = static_cast<double>(snap.k) + static_cast<double>(sched.t0);
  double omega = mu * (eta - beta) / (mu + 1.0);
  double a_k = t_k * (omega * (t_k - r - mu) + mu * eta);
  double alpha_k = (sched.delta_cap * r * eta + 8.0 * sched.rho) * omega * t_k * t_k;
  Vector w = snap.Fx + snap.xi;
  Vector z = snap.u + snap.xi;
  Vector dz = z - w;
  return gaeg_plus_core(sched, snap, x_star, z) +
         2.0 * a_k * dz.dot(snap.y - snap.x) + alpha_k * dz.squaredNorm();
}

}  // namespace exgrad
