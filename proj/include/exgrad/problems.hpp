#pragma once
// Benchmark instance generators: the constrained quadratic minimax family
// (KKT operator + blockwise simplex projection) and linear equations with
// exactly known roots, plus spectral-norm estimation and reference solutions.

#include "exgrad/core.hpp"

#include <cstdint>

namespace exgrad {

inline constexpr const char* kPrngName = "mt19937_64";

struct MinimaxSpec {
  int p1 = 1;
  int p2 = 1;
  double d_low = 0.1;  // eigenvalue clip for A and B
  std::uint64_t seed = 0;
  double noise_scale = 1.0;  // scale of L, b, c entries
  std::optional<double> rho_override;  // used when d_low <= 0
};

enum class LinearKind { spd, skew_plus_spd, indefinite_symmetric };

struct LinearNESpec {
  int dim = 1;
  std::uint64_t seed = 0;
  LinearKind kind = LinearKind::spd;
};

// Raw generated data, exposed so tests can transcribe the operator
// independently of the assembled instance.
struct MinimaxData {
  Matrix A, B, L;
  Vector b, c;
  Matrix Fmat;  // [[A, L], [-L^T, B]]
  Vector fvec;  // [b; c]
};

struct LinearNEData {
  Matrix Fmat;
  Vector fvec;
};

struct LipschitzEstimate {
  double value = 0.0;
  bool converged = true;
};

struct ReferenceSolution {
  Vector x;
  double fb_residual = 0.0;
  bool low_confidence = false;
};

MinimaxData gen_quadratic_minimax_data(const MinimaxSpec& spec);
ProblemInstance gen_quadratic_minimax(const MinimaxSpec& spec);

LinearNEData gen_linear_ne_data(const LinearNESpec& spec);
ProblemInstance gen_linear_ne(const LinearNESpec& spec);

// Euclidean projection onto {x >= 0, sum x_i = 1} (sort-based).
Vector project_simplex(const Vector& v);

// Spectral norm by power iteration on F^T F (1e-6 relative, <= 10000 iters);
// on non-convergence returns the best estimate inflated by 1% and flags it.
LipschitzEstimate estimate_lipschitz(const Matrix& F);

// Co-hypomonotonicity modulus of an invertible symmetric matrix operator:
// max(0, -lambda_min(F^{-1})).
double co_hypo_modulus_indefinite(const Matrix& sym);

// High-accuracy solution: returns x_star directly when known, otherwise a
// long accelerated run keeping the best forward-backward residual seen.
ReferenceSolution solve_reference(const ProblemInstance& problem, long budget);

}  // namespace exgrad
