#include "exgrad/problems.hpp"
#include "exgrad/schemes.hpp"

#include <algorithm>
#include <random>

namespace exgrad {
namespace {

using Rng = std::mt19937_64;

Matrix gaussian_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * normal(rng);
  return m;
}

Vector gaussian_vector(Rng& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * normal(rng);
  return v;
}

// Orthonormal Q from the QR factorization of a Gaussian matrix, with the
// diagonal of R sign-fixed so Q is deterministic per seed.
Matrix orthonormal(Rng& rng, int n) {
  Matrix g = gaussian_matrix(rng, n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

// A = Q diag(d) Q^T with d_j drawn standard normal then clipped from below.
Matrix clipped_sym(Rng& rng, int n, double d_low) {
  Matrix q = orthonormal(rng, n);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = std::max(normal(rng), d_low);
  Matrix a = q * d.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

Vector identity_resolvent(double, const Vector& v) { return v; }

}  // namespace

Vector project_simplex(const Vector& v) {
  const int n = static_cast<int>(v.size());
  if (n < 1) throw UsageError("project_simplex: empty vector");
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double csum = 0.0, theta = 0.0;
  int support = 0;
  for (int j = 0; j < n; ++j) {
    csum += u[j];
    double t = (1.0 - csum) / (j + 1);
    if (u[j] + t > 0.0) {
      support = j + 1;
      theta = t;
    }
  }
  (void)support;
  return (v.array() + theta).cwiseMax(0.0).matrix();
}

LipschitzEstimate estimate_lipschitz(const Matrix& F) {
  if (F.rows() != F.cols()) {
    throw UsageError("estimate_lipschitz: operator must be square");
  }
  const int n = static_cast<int>(F.rows());
  Rng rng(0x5EED5EEDull);  // fixed start, independent of the instance seed
  Vector v = gaussian_vector(rng, n);
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector w = F.transpose() * (F * v);
    double lambda = v.dot(w);
    double nw = w.norm();
    if (nw == 0.0) return {0.0, true};  // zero operator
    double next = std::sqrt(std::max(lambda, 0.0));
    v = w / nw;
    if (it > 0 && std::abs(next - sigma) <= 1e-6 * std::max(next, 1e-300)) {
      return {next, true};
    }
    sigma = next;
  }
  return {sigma * 1.01, false};
}

double co_hypo_modulus_indefinite(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  double min_inv = std::numeric_limits<double>::infinity();
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double ev = es.eigenvalues()(i);
    if (ev == 0.0) throw UsageError("co_hypo_modulus_indefinite: singular matrix");
    min_inv = std::min(min_inv, 1.0 / ev);
  }
  return std::max(0.0, -min_inv);
}

MinimaxData gen_quadratic_minimax_data(const MinimaxSpec& spec) {
  if (spec.p1 < 1 || spec.p2 < 1) {
    throw UsageError("gen_quadratic_minimax: p1, p2 must be >= 1");
  }
  Rng rng(spec.seed);
  MinimaxData d;
  d.A = clipped_sym(rng, spec.p1, spec.d_low);
  d.B = clipped_sym(rng, spec.p2, spec.d_low);
  d.L = gaussian_matrix(rng, spec.p1, spec.p2, spec.noise_scale);
  d.b = gaussian_vector(rng, spec.p1, spec.noise_scale);
  d.c = gaussian_vector(rng, spec.p2, spec.noise_scale);
  const int p = spec.p1 + spec.p2;
  d.Fmat.setZero(p, p);
  d.Fmat.topLeftCorner(spec.p1, spec.p1) = d.A;
  d.Fmat.topRightCorner(spec.p1, spec.p2) = d.L;
  d.Fmat.bottomLeftCorner(spec.p2, spec.p1) = -d.L.transpose();
  d.Fmat.bottomRightCorner(spec.p2, spec.p2) = d.B;
  d.fvec.resize(p);
  d.fvec << d.b, d.c;
  return d;
}

ProblemInstance gen_quadratic_minimax(const MinimaxSpec& spec) {
  MinimaxData data = gen_quadratic_minimax_data(spec);
  ProblemInstance pi;
  pi.dim = spec.p1 + spec.p2;
  pi.label = "minimax-p" + std::to_string(spec.p1) + "x" +
             std::to_string(spec.p2) + "-seed" + std::to_string(spec.seed);
  Matrix Fmat = data.Fmat;
  Vector fvec = data.fvec;
  pi.F = [Fmat, fvec](const Vector& x) -> Vector { return Fmat * x + fvec; };
  const int p1 = spec.p1;
  pi.resolvent = [p1](double, const Vector& v) -> Vector {
    Vector out(v.size());
    out.head(p1) = project_simplex(v.head(p1));
    out.tail(v.size() - p1) = project_simplex(v.tail(v.size() - p1));
    return out;
  };
  LipschitzEstimate le = estimate_lipschitz(Fmat);
  pi.lipschitz_L = le.value;
  pi.lipschitz_flagged = !le.converged;
  pi.rho = spec.d_low > 0 ? 0.0
                          : spec.rho_override.value_or(std::abs(spec.d_low));
  return pi;
}

LinearNEData gen_linear_ne_data(const LinearNESpec& spec) {
  if (spec.dim < 1) throw UsageError("gen_linear_ne: dim must be >= 1");
  for (int attempt = 0; attempt <= 8; ++attempt) {
    std::uint64_t sub_seed =
        attempt == 0 ? spec.seed : spec.seed * 1000003ull + attempt;
    Rng rng(sub_seed);
    const int n = spec.dim;
    Matrix F;
    std::normal_distribution<double> normal(0.0, 1.0);
    if (spec.kind == LinearKind::spd ||
        spec.kind == LinearKind::indefinite_symmetric) {
      Matrix q = orthonormal(rng, n);
      Vector d(n);
      for (int i = 0; i < n; ++i) {
        double g = normal(rng);
        double mag = std::max(std::abs(g), 0.1);
        d(i) = spec.kind == LinearKind::spd ? mag : (g < 0 ? -mag : mag);
      }
      F = q * d.asDiagonal() * q.transpose();
      F = 0.5 * (F + F.transpose());
    } else {  // skew_plus_spd: rotation-dominant monotone operator
      Matrix q = orthonormal(rng, n);
      Vector d(n);
      for (int i = 0; i < n; ++i) d(i) = std::max(std::abs(normal(rng)), 0.1);
      Matrix s = q * d.asDiagonal() * q.transpose();
      Matrix g2 = gaussian_matrix(rng, n, n);
      F = 0.1 * 0.5 * (s + s.transpose()) + 0.5 * (g2 - g2.transpose());
    }
    Vector f = gaussian_vector(rng, n);
    Eigen::FullPivLU<Matrix> lu(F);
    if (!lu.isInvertible()) continue;  // retry with a fresh sub-seed
    return {F, f};
  }
  throw NumericalFailure("gen_linear_ne: singular operator after 8 retries");
}

ProblemInstance gen_linear_ne(const LinearNESpec& spec) {
  LinearNEData data = gen_linear_ne_data(spec);
  ProblemInstance pi;
  pi.dim = spec.dim;
  const char* kind_name = spec.kind == LinearKind::spd ? "spd"
                          : spec.kind == LinearKind::skew_plus_spd
                              ? "skew-plus-spd"
                              : "indefinite-symmetric";
  pi.label = std::string("linear-ne-") + kind_name + "-dim" +
             std::to_string(spec.dim) + "-seed" + std::to_string(spec.seed);
  Matrix Fmat = data.Fmat;
  Vector fvec = data.fvec;
  pi.F = [Fmat, fvec](const Vector& x) -> Vector { return Fmat * x + fvec; };
  pi.resolvent = identity_resolvent;
  pi.t_is_zero = true;
  pi.lipschitz_L = Fmat.jacobiSvd().singularValues()(0);
  pi.x_star = Eigen::ColPivHouseholderQR<Matrix>(Fmat).solve(-fvec);
  pi.rho = spec.kind == LinearKind::indefinite_symmetric
               ? co_hypo_modulus_indefinite(Fmat)
               : 0.0;
  return pi;
}

ReferenceSolution solve_reference(const ProblemInstance& problem, long budget) {
  double eta = 1.0 / std::max(problem.lipschitz_L, 1e-12);
  if (problem.x_star)
    return {*problem.x_star, fb_residual(problem, eta, *problem.x_star), false};
  Schedule sched = Schedule::gaeg_plus_aeg(problem.lipschitz_L, problem.rho);
  DirectionRule rule = DirectionRule::current();
  GaegPlusState st = gaeg_plus_init(problem, Vector::Constant(problem.dim, 0.01));
  // Keep only the best iterate seen so far; storing the whole trajectory would
  // be wasteful at reference budgets.
  ReferenceSolution ref;
  ref.x = st.x;
  ref.fb_residual = fb_residual(problem, eta, st.x);
  for (long k = 0; k < budget && ref.fb_residual > 1e-11; ++k) {
    gaeg_plus_step(problem, sched, rule, st);
    double fb = fb_residual(problem, eta, st.x);
    if (fb < ref.fb_residual) {
      ref.fb_residual = fb;
      ref.x = st.x;
    }
  }
  ref.low_confidence = ref.fb_residual > 1e-6;
  return ref;
}

}  // namespace exgrad
