#pragma once
// Problem abstraction for inclusions 0 in Fx + Tx: single-valued F,
// multivalued T accessed through its resolvent, plus the residual metrics
// every solver reports.

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace exgrad {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Caller mistakes: bad dimensions, nonpositive steps, incompatible arguments.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& msg) : std::invalid_argument(msg) {}
};

// NaN/Inf or divergence while iterating; carries the iteration index when known.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& msg, long iteration = -1)
      : std::runtime_error(msg), iteration(iteration) {}
  long iteration;
};

// Infeasible or inconsistent configuration (violated theorem precondition,
// malformed config file, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ProblemInstance {
  int dim = 0;
  std::function<Vector(const Vector&)> F;
  // resolvent(eta, v) computes J_{eta T}(v); identity when T = 0.
  std::function<Vector(double, const Vector&)> resolvent;
  double lipschitz_L = 0.0;
  double rho = 0.0;  // co-hypomonotonicity modulus, 0 for monotone
  std::optional<Vector> x_star;
  std::string label;
  bool t_is_zero = false;       // true when T = 0 (resolvent is identity)
  bool lipschitz_flagged = false;  // power iteration failed to converge
};

struct ResolventResult {
  Vector point;  // x = J_{eta T}(v)
  Vector xi;     // recovered element of Tx: (v - x)/eta
};

Vector eval_F(const ProblemInstance& problem, const Vector& x);
ResolventResult eval_resolvent(const ProblemInstance& problem, double eta,
                               const Vector& v);

// ||Fx + xi|| for a carried xi in Tx (zero when T = 0).
double residual_norm(const ProblemInstance& problem, const Vector& x,
                     const Vector& xi);

// ||x - J_{eta T}(x - eta Fx)|| / eta; scheme-independent solution metric.
double fb_residual(const ProblemInstance& problem, double eta, const Vector& x);

}  // namespace exgrad
