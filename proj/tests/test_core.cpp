#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "exgrad/core.hpp"

#include <cmath>

using namespace exgrad;

namespace {

// 2-d affine operator with T = normal cone of the nonnegative orthant,
// whose resolvent is the componentwise positive part.
ProblemInstance box_problem() {
  ProblemInstance p;
  p.dim = 2;
  Matrix a(2, 2);
  a << 2.0, 0.0, 0.0, 1.0;
  Vector b(2);
  b << -1.0, 1.0;
  p.F = [a, b](const Vector& x) -> Vector { return a * x + b; };
  p.resolvent = [](double, const Vector& v) -> Vector { return v.cwiseMax(0.0); };
  p.lipschitz_L = 2.0;
  p.label = "box";
  return p;
}

ProblemInstance free_problem() {
  ProblemInstance p;
  p.dim = 2;
  p.F = [](const Vector& x) -> Vector { return 3.0 * x; };
  p.resolvent = [](double, const Vector& v) -> Vector { return v; };
  p.lipschitz_L = 3.0;
  p.t_is_zero = true;
  p.label = "free";
  return p;
}

}  // namespace

TEST_CASE("eval_F checks dimensions and values") {
  ProblemInstance p = box_problem();
  Vector x(2);
  x << 1.0, 2.0;
  Vector fx = eval_F(p, x);
  CHECK(fx(0) == doctest::Approx(1.0));
  CHECK(fx(1) == doctest::Approx(3.0));
  CHECK_THROWS_AS(eval_F(p, Vector::Zero(3)), UsageError);

  ProblemInstance bad = box_problem();
  bad.F = [](const Vector& x) -> Vector {
    Vector v = x;
    v(0) = std::nan("");
    return v;
  };
  CHECK_THROWS_AS(eval_F(bad, x), NumericalFailure);
}

TEST_CASE("eval_resolvent recovers xi with point + eta*xi == v") {
  ProblemInstance p = box_problem();
  Vector v(2);
  v << -3.0, 5.0;
  ResolventResult r = eval_resolvent(p, 0.5, v);
  CHECK(r.point(0) == doctest::Approx(0.0));
  CHECK(r.point(1) == doctest::Approx(5.0));
  CHECK((r.point + 0.5 * r.xi - v).norm() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.xi(0) == doctest::Approx(-6.0));
  CHECK(r.xi(1) == doctest::Approx(0.0));
  CHECK_THROWS_AS(eval_resolvent(p, 0.0, v), UsageError);
  CHECK_THROWS_AS(eval_resolvent(p, -1.0, v), UsageError);
  CHECK_THROWS_AS(eval_resolvent(p, 1.0, Vector::Zero(5)), UsageError);
}

TEST_CASE("residual_norm is ||Fx + xi||") {
  ProblemInstance p = box_problem();
  Vector x(2), xi(2);
  x << 1.0, 0.0;
  xi << 0.5, -1.0;
  // Fx = (1, 1), so Fx + xi = (1.5, 0).
  CHECK(residual_norm(p, x, xi) == doctest::Approx(1.5));
  CHECK_THROWS_AS(residual_norm(p, x, Vector::Zero(3)), UsageError);
}

TEST_CASE("fb_residual: identity resolvent shortcut and general form") {
  ProblemInstance f = free_problem();
  Vector x(2);
  x << 1.0, -2.0;
  // T = 0: fb residual is just ||Fx||.
  CHECK(fb_residual(f, 0.25, x) == doctest::Approx((3.0 * x).norm()));

  ProblemInstance p = box_problem();
  Vector z = Vector::Zero(2);
  // At x = 0: x - eta*Fx = (eta, -eta) projects to (eta, 0);
  // fb = ||(0,0) - (eta,0)|| / eta = 1.
  CHECK(fb_residual(p, 0.5, z) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fb_residual(p, 0.0, z), UsageError);
}

TEST_CASE("error types carry context") {
  NumericalFailure nf("boom", 17);
  CHECK(nf.iteration == 17);
  NumericalFailure nf2("boom");
  CHECK(nf2.iteration == -1);
  CHECK_THROWS_AS(throw ConfigError("cfg"), std::runtime_error);
  CHECK_THROWS_AS(throw UsageError("use"), std::invalid_argument);
}
