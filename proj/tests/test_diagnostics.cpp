#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "exgrad/diagnostics.hpp"
#include "exgrad/problems.hpp"

#include <cmath>

using namespace exgrad;

namespace {

ProblemInstance spd_instance(int dim, std::uint64_t seed) {
  LinearNESpec spec;
  spec.dim = dim;
  spec.seed = seed;
  spec.kind = LinearKind::spd;
  return gen_linear_ne(spec);
}

Trace synthetic_trace(const Schedule& sched, const std::vector<double>& residuals,
                      const std::vector<double>& e_norms = {}) {
  Trace tr;
  tr.family = sched.family;
  tr.regime = sched.regime;
  tr.schedule = sched;
  tr.w0_norm = residuals.empty() ? 0.0 : residuals.front();
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    TraceRecord rec;
    rec.k = static_cast<long>(i);
    rec.residual = residuals[i];
    rec.e_norm = i < e_norms.size() ? e_norms[i] : 0.0;
    tr.records.push_back(rec);
  }
  return tr;
}

}  // namespace

// ---------------------------------------------------------------------------
// Rate fitting
// ---------------------------------------------------------------------------

TEST_CASE("fit_rate recovers exact power laws") {
  Schedule sched = Schedule::geag(1.0);
  std::vector<double> r1, r2;
  for (long k = 0; k <= 100; ++k) {
    r1.push_back(3.0 / std::max<long>(k, 1));
    r2.push_back(7.0 / double(std::max<long>(k, 1) * std::max<long>(k, 1)));
  }
  Trace t1 = synthetic_trace(sched, r1);
  Trace t2 = synthetic_trace(sched, r2);

  RateFit f1 = fit_rate(t1, 1, 100);
  CHECK(f1.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(f1.intercept == doctest::Approx(std::log10(3.0)).epsilon(1e-10));
  CHECK(f1.points == 100);
  CHECK_FALSE(f1.prefix_only);

  RateFit f2 = fit_rate(t2, 1, 100);
  CHECK(f2.slope == doctest::Approx(-2.0).epsilon(1e-12));

  RateFit window = fit_rate(t1, 10, 50);
  CHECK(window.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(window.points == 41);
}

TEST_CASE("fit_rate truncates at an exact zero and flags it") {
  Schedule sched = Schedule::geag(1.0);
  std::vector<double> r;
  for (long k = 0; k <= 20; ++k) r.push_back(2.0 / std::max<long>(k, 1));
  r[11] = 0.0;  // exact zero: everything after is ignored
  for (std::size_t i = 12; i < r.size(); ++i) r[i] = 5.0;
  Trace tr = synthetic_trace(sched, r);
  RateFit f = fit_rate(tr, 1, 20);
  CHECK(f.prefix_only);
  CHECK(f.points == 10);
  CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("fit_rate needs at least two usable points") {
  Schedule sched = Schedule::geag(1.0);
  Trace only0 = synthetic_trace(sched, {1.0});
  CHECK_THROWS_AS(fit_rate(only0, 1, 10), UsageError);
  Trace two = synthetic_trace(sched, {1.0, 0.5, 0.25});
  CHECK_THROWS_AS(fit_rate(two, 2, 2), UsageError);  // single point
  CHECK_NOTHROW(fit_rate(two, 1, 2));
}

// ---------------------------------------------------------------------------
// Residual envelopes
// ---------------------------------------------------------------------------

TEST_CASE("verify_bound recomputes the anchored envelope exactly") {
  Schedule sched = Schedule::geag(1.0);  // eta = 1, nu = 2
  double dist0 = 1.0;
  Trace tr = synthetic_trace(sched, {2.0, 1.2, 0.5, 0.25});
  // envelope(k) = (4*d0^2 + eta^2*w0^2) / (eta^2*(k+nu-1)^2) = 8/(k+1)^2
  BoundReport rep = verify_bound(tr, dist0);
  CHECK(rep.pass);
  CHECK(rep.r0_sq == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(rep.max_ratio == doctest::Approx(1.2 * 1.2 / 2.0).epsilon(1e-12));
  CHECK(rep.argmax_k == 1);

  Trace bad = synthetic_trace(sched, {2.0, 1.5, 0.8, 0.5});
  BoundReport rep2 = verify_bound(bad, dist0);
  CHECK_FALSE(rep2.pass);
  CHECK(rep2.max_ratio == doctest::Approx(2.25 / 2.0).epsilon(1e-12));
  CHECK(rep2.argmax_k == 1);
}

TEST_CASE("verify_bound weighs direction error in the inexact regimes") {
  Schedule sched = Schedule::gfeg(3, 1.0, 0.0, 1.0, 0.0);  // kappa > 0 regime
  double eta = sched.eta, beta = sched.beta, nu = sched.nu;
  double psi = gfeg_psi(sched);
  CHECK(psi == doctest::Approx(8.0 * (eta * eta * eta + beta) / (2.0 * eta - 3.0 * beta))
                   .epsilon(1e-12));

  double w0 = 2.0, dist0 = 1.5;
  Trace tr = synthetic_trace(sched, {w0, 1.0, 0.6}, {0.0, 0.3, 0.2});
  double r0_sq = (8.0 * (nu - 1.0) / ((2.0 * eta - 3.0 * beta) * (2.0 * eta - 3.0 * beta))) *
                     dist0 * dist0 +
                 (4.0 * (2.0 * eta * (nu - 1.0) * (nu - 1.0) -
                         beta * (nu - 2.0) * (2.0 * nu - 1.0)) /
                  (2.0 * eta - 3.0 * beta)) *
                     w0 * w0;
  BoundReport rep = verify_bound(tr, dist0);
  CHECK(rep.r0_sq == doctest::Approx(r0_sq).epsilon(1e-12));
  double worst = 0.0;
  for (long k = 0; k <= 2; ++k) {
    double lhs = tr.records[k].residual * tr.records[k].residual +
                 psi * tr.records[k].e_norm * tr.records[k].e_norm;
    double env = r0_sq / ((k + nu - 1.0) * (k + nu - 1.0));
    worst = std::max(worst, lhs / env);
  }
  CHECK(rep.max_ratio == doctest::Approx(worst).epsilon(1e-12));
}

TEST_CASE("verify_bound passes a certified run and catches an oversized step") {
  ProblemInstance prob = spd_instance(8, 6);
  double L = prob.lipschitz_L;
  Vector x0 = Vector::Constant(8, 0.01);
  double dist0 = (x0 - *prob.x_star).norm();
  RunOptions opts;
  opts.max_iter = 200;

  Trace good = run(prob, Schedule::geag(L), DirectionRule::current(), x0, opts);
  BoundReport ok = verify_bound(good, dist0);
  CHECK(ok.pass);
  CHECK(ok.max_ratio <= 1.0 + 1e-7);

  Schedule wild = Schedule::geag(L);
  wild.eta = 2.2 / L;  // far outside the certified window
  Trace bad = run(prob, wild, DirectionRule::current(), x0, opts);
  BoundReport fail = verify_bound(bad, dist0);
  CHECK_FALSE(fail.pass);
  CHECK(fail.max_ratio > 1.0);
}

TEST_CASE("verify_bound rejects unusable input") {
  Schedule sched = Schedule::geag(1.0);
  Trace empty;
  empty.schedule = sched;
  CHECK_THROWS_AS(verify_bound(empty, 1.0), UsageError);
  Trace tr = synthetic_trace(sched, {1.0, 0.5});
  CHECK_THROWS_AS(verify_bound(tr, -0.1), UsageError);
}

// ---------------------------------------------------------------------------
// Shape constants
// ---------------------------------------------------------------------------

TEST_CASE("quasi-descent shape constants") {
  double mu = 0.45;
  double theta = (1.0 - 2.0 * mu) * (1.0 - mu) * (1.0 - mu) /
                 (2.0 * (2.0 - mu) * mu * mu);
  CHECK(gfeg_plus_theta(mu) == doctest::Approx(theta).epsilon(1e-12));
  CHECK_THROWS_AS(gfeg_plus_theta(0.5), UsageError);
  CHECK_THROWS_AS(gfeg_plus_theta(0.0), UsageError);

  Schedule sched = Schedule::gfeg_plus_quasi(1.0, 0.0);
  for (long k : {0L, 5L}) {
    double t = sched.mu * (k + sched.r);
    double want = 1.0 + gfeg_plus_theta(sched.mu) * sched.mu * sched.mu / (t * t);
    CHECK(gfeg_plus_quasi_factor(sched, k) == doctest::Approx(want).epsilon(1e-12));
  }
  Schedule wrong = Schedule::geag(1.0);
  CHECK_THROWS_AS(gfeg_plus_quasi_factor(wrong, 0), UsageError);
}

TEST_CASE("accumulated growth factor for the alternating general regime") {
  Schedule sched = Schedule::gaeg_plus_general(1.0, 0.0);
  double om = gaeg_plus_omega(sched);
  CHECK(om == doctest::Approx(1.068906).epsilon(1e-4));
  // recompute from the definition
  double omega = sched.mu * (sched.eta - sched.beta) / (sched.mu + 1.0);
  double c2 = omega * sched.r * (sched.r - 2.0) * (sched.r - 2.0) /
              (sched.eta * (sched.mu - 1.0));
  double c = std::sqrt(c2);
  double t0 = static_cast<double>(sched.t0);
  double want = std::pow((1.0 + t0 + c) / (1.0 + t0 - c), c / 2.0) *
                std::exp(c2 / ((1.0 + t0) * (1.0 + t0) - c2));
  CHECK(om == doctest::Approx(want).epsilon(1e-12));
  CHECK_THROWS_AS(gaeg_plus_omega(Schedule::geag(1.0)), UsageError);
}

TEST_CASE("direction-error weight is zero only in the exact regime") {
  CHECK(gfeg_psi(Schedule::gfeg(1, 1.0, 0.0, 0.0, 0.0)) == 0.0);
  CHECK(gfeg_psi(Schedule::gfeg(3, 1.0, 0.0, 1.0, 0.0)) > 0.0);
  CHECK_THROWS_AS(gfeg_psi(Schedule::geag(1.0)), UsageError);
}

// ---------------------------------------------------------------------------
// Descent monitors
// ---------------------------------------------------------------------------

TEST_CASE("gfeg monitor at the initial point reduces to its closed form") {
  MinimaxSpec mspec;
  mspec.p1 = 4;
  mspec.p2 = 3;
  mspec.seed = 19;
  ProblemInstance prob = gen_quadratic_minimax(mspec);
  Schedule sched = Schedule::gfeg(1, prob.lipschitz_L, 0.0, 0.0, 0.0);
  Vector x0 = Vector::Constant(prob.dim, 0.01);
  RunOptions opts;
  opts.max_iter = 0;
  opts.keep_snapshots = true;
  Trace tr = run(prob, sched, DirectionRule::current(), x0, opts);
  REQUIRE(tr.snapshots.size() == 1);
  double a0 = sched.eta * (sched.nu - 1.0) - sched.beta * (sched.nu - 2.0);
  double v = lyapunov_gfeg(sched, tr.snapshots[0], x0);
  CHECK(v == doctest::Approx(0.5 * a0 * tr.w0_norm * tr.w0_norm).epsilon(1e-12));
}

TEST_CASE("anchored monitor descends along a certified run (smoke)") {
  ProblemInstance prob = spd_instance(10, 11);
  double L = prob.lipschitz_L;
  Vector x0 = Vector::Constant(10, 0.01);
  RunOptions opts;
  opts.max_iter = 50;
  opts.keep_snapshots = true;
  Trace tr = run(prob, Schedule::geag(L), DirectionRule::current(), x0, opts);
  double prev = lyapunov_geag(tr.schedule, tr.snapshots[0], x0, *prob.x_star);
  for (std::size_t i = 1; i < tr.snapshots.size(); ++i) {
    double cur = lyapunov_geag(tr.schedule, tr.snapshots[i], x0, *prob.x_star);
    CAPTURE(i);
    CHECK(cur <= prev + 1e-8 * (1.0 + std::abs(prev)));
    prev = cur;
  }
}
