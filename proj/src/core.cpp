#include "exgrad/core.hpp"

namespace exgrad {

Vector eval_F(const ProblemInstance& problem, const Vector& x) {
  if (x.size() != problem.dim) {
    throw UsageError("eval_F: x has dim " + std::to_string(x.size()) +
                     ", problem expects " + std::to_string(problem.dim));
  }
  Vector out = problem.F(x);
  if (!out.allFinite()) {
    throw NumericalFailure("eval_F: non-finite output from operator '" +
                           problem.label + "'");
  }
  return out;
}

ResolventResult eval_resolvent(const ProblemInstance& problem, double eta,
                               const Vector& v) {
  if (eta <= 0.0) {
    throw UsageError("eval_resolvent: eta must be positive, got " +
                     std::to_string(eta));
  }
  if (v.size() != problem.dim) {
    throw UsageError("eval_resolvent: v has dim " + std::to_string(v.size()) +
                     ", problem expects " + std::to_string(problem.dim));
  }
  ResolventResult r;
  r.point = problem.resolvent(eta, v);
  if (!r.point.allFinite()) {
    throw NumericalFailure("eval_resolvent: non-finite output from '" +
                           problem.label + "'");
  }
  r.xi = (v - r.point) / eta;
  return r;
}

double residual_norm(const ProblemInstance& problem, const Vector& x,
                     const Vector& xi) {
  if (x.size() != problem.dim || xi.size() != problem.dim) {
    throw UsageError("residual_norm: dimension mismatch");
  }
  return (eval_F(problem, x) + xi).norm();
}

double fb_residual(const ProblemInstance& problem, double eta, const Vector& x) {
  if (eta <= 0.0) {
    throw UsageError("fb_residual: eta must be positive, got " +
                     std::to_string(eta));
  }
  Vector Fx = eval_F(problem, x);
  if (problem.t_is_zero) return Fx.norm();  // resolvent is the identity
  ResolventResult r = eval_resolvent(problem, eta, x - eta * Fx);
  return (x - r.point).norm() / eta;
}

}  // namespace exgrad
