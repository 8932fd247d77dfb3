#include "exgrad/schemes.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <sstream>

namespace exgrad {
namespace {

double sq(double v) { return v * v; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Regime validation: every violated window is reported by name.
void need(bool ok, const std::string& where, const std::string& what) {
  if (!ok) throw ConfigError(where + " schedule infeasible: needs " + what);
}

long start_index(double candidates_max, double r) {
  return std::max(static_cast<long>(std::ceil(candidates_max)),
                  static_cast<long>(std::ceil(r + 1.0)));
}

}  // namespace

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

std::string to_string(SchemeFamily f) {
  switch (f) {
    case SchemeFamily::geag: return "geag";
    case SchemeFamily::gfeg: return "gfeg";
    case SchemeFamily::gfeg_plus: return "gfeg+";
    case SchemeFamily::gaeg: return "gaeg";
    case SchemeFamily::gaeg_plus: return "gaeg+";
  }
  return "?";
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::geag_main: return "main";
    case Regime::gfeg_i: return "i";
    case Regime::gfeg_ii: return "ii";
    case Regime::gfeg_iii: return "iii";
    case Regime::gfeg_iv: return "iv";
    case Regime::gfeg_plus_quasi: return "quasi";
    case Regime::gfeg_plus_strict: return "strict";
    case Regime::gaeg_general: return "general";
    case Regime::gaeg_current: return "current";
    case Regime::gaeg_past: return "past";
    case Regime::gaeg_plus_aeg: return "aeg";
    case Regime::gaeg_plus_general: return "general";
  }
  return "?";
}

SchemeFamily parse_family(const std::string& name) {
  if (name == "geag") return SchemeFamily::geag;
  if (name == "gfeg") return SchemeFamily::gfeg;
  if (name == "gfeg+" || name == "gfeg_plus") return SchemeFamily::gfeg_plus;
  if (name == "gaeg") return SchemeFamily::gaeg;
  if (name == "gaeg+" || name == "gaeg_plus") return SchemeFamily::gaeg_plus;
  throw ConfigError("unknown scheme family '" + name + "'");
}

Regime parse_regime(SchemeFamily family, const std::string& name) {
  switch (family) {
    case SchemeFamily::geag:
      if (name == "main") return Regime::geag_main;
      break;
    case SchemeFamily::gfeg:
      if (name == "i") return Regime::gfeg_i;
      if (name == "ii") return Regime::gfeg_ii;
      if (name == "iii") return Regime::gfeg_iii;
      if (name == "iv") return Regime::gfeg_iv;
      break;
    case SchemeFamily::gfeg_plus:
      if (name == "quasi") return Regime::gfeg_plus_quasi;
      if (name == "strict") return Regime::gfeg_plus_strict;
      break;
    case SchemeFamily::gaeg:
      if (name == "general") return Regime::gaeg_general;
      if (name == "current") return Regime::gaeg_current;
      if (name == "past") return Regime::gaeg_past;
      break;
    case SchemeFamily::gaeg_plus:
      if (name == "aeg") return Regime::gaeg_plus_aeg;
      if (name == "general") return Regime::gaeg_plus_general;
      break;
  }
  throw ConfigError("unknown regime '" + name + "' for family '" +
                    to_string(family) + "'");
}

// ---------------------------------------------------------------------------
// Direction rules
// ---------------------------------------------------------------------------

DirectionRule DirectionRule::current() {
  return {DirectionKind::current, 0.0, 0.0, 1.0, 0.0, 0.0};
}

DirectionRule DirectionRule::past() {
  return {DirectionKind::past, 0.0, 0.0, 1.0, 1.0, 0.0};
}

namespace {
void check_split_weight(double m) {
  if (!(m > 0.0)) throw UsageError("affine direction rule: m must be > 0");
}
}  // namespace

DirectionRule DirectionRule::affine_geag(double alpha, double alpha_hat) {
  return {DirectionKind::affine, alpha, alpha_hat, 1.0, sq(alpha), sq(alpha_hat)};
}

DirectionRule DirectionRule::affine_gfeg(double alpha, double alpha_hat, double m) {
  check_split_weight(m);
  return {DirectionKind::affine, alpha, alpha_hat, m,
          (1.0 + m) * sq(alpha_hat), (1.0 + 1.0 / m) * sq(1.0 - alpha - alpha_hat)};
}

DirectionRule DirectionRule::affine_gfeg_plus(double alpha, double alpha_hat, double m) {
  check_split_weight(m);
  return {DirectionKind::affine, alpha, alpha_hat, m,
          (1.0 + m) * sq(1.0 - alpha), (1.0 + 1.0 / m) * sq(alpha_hat)};
}

DirectionRule DirectionRule::affine_gaeg(double alpha, double alpha_hat, double m) {
  check_split_weight(m);
  return {DirectionKind::affine, alpha, alpha_hat, m,
          (1.0 + m) * sq(alpha_hat), (1.0 + 1.0 / m) * sq(1.0 - alpha - alpha_hat)};
}

DirectionRule DirectionRule::affine_gaeg_plus(double alpha, double alpha_hat, double m) {
  check_split_weight(m);
  return {DirectionKind::affine, alpha, alpha_hat, m,
          (1.0 + m) * sq(alpha), (1.0 + 1.0 / m) * sq(alpha_hat)};
}

// ---------------------------------------------------------------------------
// Step-size caps
// ---------------------------------------------------------------------------

double eta_bar_geag(double kappa, double kappa_hat, double ratio, double L) {
  if (!(L > 0.0)) throw UsageError("eta_bar_geag: L must be > 0");
  if (kappa < 0.0 || kappa_hat < 0.0)
    throw UsageError("eta_bar_geag: kappa and kappa_hat must be >= 0");
  if (!(ratio > 0.0 && ratio <= 1.0))
    throw UsageError("eta_bar_geag: ratio must lie in (0, 1]");
  if (kappa == 0.0 && kappa_hat == 0.0) return 1.0 / L;
  return std::sqrt(ratio) /
         std::sqrt((1.0 + ratio) * (ratio + 2.0 * kappa) * L * L +
                   2.0 * kappa * kappa_hat);
}

double lambda_bar_gaeg(double kappa, double L, double rho) {
  if (!(L > 0.0)) throw UsageError("lambda_bar_gaeg: L must be > 0");
  if (kappa < 0.0 || rho < 0.0)
    throw UsageError("lambda_bar_gaeg: kappa and rho must be >= 0");
  const double sigma = 5.0 / 24.0;
  double bbar = (1.0 + sigma) * (49.0 * kappa + 8.0) * rho / (29.0 * kappa + 4.0);
  double cbar = (1.0 - 32.0 * sq(1.0 + sigma) * (5.0 * kappa + 1.0) * sq(L * rho)) /
                (8.0 * L * L * (29.0 * kappa + 4.0));
  if (!(cbar > 0.0))
    throw ConfigError("gaeg step cap undefined: needs L*rho < 6/(29*sqrt(2*(5*kappa+1)))");
  return 2.0 * cbar / (bbar + std::sqrt(bbar * bbar + 4.0 * cbar));
}

double lambda_bar_gaeg_past(double L, double rho) {
  if (!(L > 0.0)) throw UsageError("lambda_bar_gaeg_past: L must be > 0");
  if (rho < 0.0) throw UsageError("lambda_bar_gaeg_past: rho must be >= 0");
  double bbar = 272.0 * rho / 123.0;
  double cbar = (1.0 - 129.0 * sq(L * rho)) / (164.0 * L * L);
  if (!(cbar > 0.0))
    throw ConfigError("gaeg past step cap undefined: needs 129*(L*rho)^2 < 1");
  return 2.0 * cbar / (bbar + std::sqrt(bbar * bbar + 4.0 * cbar));
}

double psi_gaeg_plus(double kappa, double kappa_hat, double r, double eps_hat) {
  if (!(r > 1.0 / 3.0)) throw UsageError("psi_gaeg_plus: r must be > 1/3");
  if (kappa < 0.0 || kappa_hat < 0.0 || eps_hat < 0.0)
    throw UsageError("psi_gaeg_plus: kappa, kappa_hat, eps_hat must be >= 0");
  return (1.0 - 1.0 / (3.0 * r) - kappa_hat * (12.0 + 3.0 * r + eps_hat)) /
         std::sqrt(4.0 + 12.0 * kappa + 3.0 * kappa * r + kappa * eps_hat);
}

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

Schedule Schedule::geag(double L, double kappa, double kappa_hat, double nu,
                        double ratio, std::optional<double> eta_in) {
  const std::string where = "geag";
  need(L > 0.0, where, "L > 0");
  need(kappa >= 0.0 && kappa_hat >= 0.0, where, "kappa, kappa_hat >= 0");
  need(nu >= 2.0, where, "nu >= 2 (got nu = " + fmt(nu) + ")");
  need(ratio > 0.0 && ratio <= 1.0, where, "ratio in (0, 1]");
  double cap = eta_bar_geag(kappa, kappa_hat, ratio, L);
  double eta = eta_in.value_or(cap);
  need(eta > 0.0 && eta <= cap * (1.0 + 1e-12), where,
       "0 < eta <= eta_bar = " + fmt(cap) + " (got eta = " + fmt(eta) + ")");
  Schedule s;
  s.family = SchemeFamily::geag;
  s.regime = Regime::geag_main;
  s.L = L;
  s.rho = 0.0;
  s.kappa = kappa;
  s.kappa_hat = kappa_hat;
  s.eta = eta;
  s.nu = nu;
  return s;
}

Schedule Schedule::gfeg(int case_number, double L, double rho, double kappa,
                        double kappa_hat, double nu, std::optional<double> eta_in,
                        std::optional<double> beta_in) {
  Schedule s;
  s.family = SchemeFamily::gfeg;
  s.L = L;
  s.rho = rho;
  s.kappa = kappa;
  s.kappa_hat = kappa_hat;
  s.nu = nu;
  const std::string where = "gfeg case (" + std::string(case_number == 1   ? "i"
                                                        : case_number == 2 ? "ii"
                                                        : case_number == 3 ? "iii"
                                                                           : "iv") + ")";
  need(L > 0.0, where, "L > 0");
  need(rho >= 0.0, where, "rho >= 0");
  need(kappa >= 0.0 && kappa_hat >= 0.0, where, "kappa, kappa_hat >= 0");

  double lo = 0.0, hi = 0.0;
  bool closed_hi = false;
  switch (case_number) {
    case 1: {
      s.regime = Regime::gfeg_i;
      need(nu >= 2.0, where, "nu >= 2");
      need(kappa == 0.0 && kappa_hat == 0.0, where, "kappa = kappa_hat = 0");
      need(2.0 * L * rho <= 1.0, where,
           "2*L*rho <= 1 (got 2*L*rho = " + fmt(2.0 * L * rho) + ")");
      double cap = 1.0 / L;
      s.eta = eta_in.value_or(cap);
      need(s.eta > 0.0 && s.eta <= cap * (1.0 + 1e-12), where,
           "0 < eta <= 1/L = " + fmt(cap));
      lo = 2.0 * rho;
      hi = s.eta;
      break;
    }
    case 2: {
      s.regime = Regime::gfeg_ii;
      need(nu > 2.0, where, "nu > 2");
      need(kappa == 0.0, where, "kappa = 0");
      need(kappa_hat > 0.0 && kappa_hat < (nu - 2.0) / (4.0 * nu), where,
           "0 < kappa_hat < (nu-2)/(4*nu) = " + fmt((nu - 2.0) / (4.0 * nu)));
      double sig = std::sqrt(std::min(
          0.5, (nu - 2.0 - 4.0 * nu * kappa_hat) / (12.0 * (nu - 1.0) * kappa_hat)));
      need(L * rho < (nu - 2.0 - 4.0 * nu * kappa_hat) * sig / (12.0 * (nu - 2.0)),
           where, "L*rho < (nu-2-4*nu*kappa_hat)*sigma/(12*(nu-2))");
      double cap = sig / L;
      s.eta = eta_in.value_or(cap);
      need(s.eta > 0.0 && s.eta <= cap * (1.0 + 1e-12), where,
           "0 < eta <= sigma/L = " + fmt(cap));
      lo = (2.0 * (nu - 2.0) / (nu - 2.0 - 4.0 * nu * kappa_hat)) *
           (2.0 * (nu - 1.0) * kappa_hat * s.eta * sig * sig / (nu - 2.0) + 2.0 * rho);
      hi = 2.0 * s.eta / 3.0;
      break;
    }
    case 3: {
      s.regime = Regime::gfeg_iii;
      need(nu >= 2.0, where, "nu >= 2");
      need(kappa > 0.0, where, "kappa > 0");
      need(kappa_hat == 0.0, where, "kappa_hat = 0");
      need(L * rho <= (nu - 1.0) / (32.0 * nu * std::sqrt(kappa + 1.0)), where,
           "L*rho <= (nu-1)/(32*nu*sqrt(kappa+1))");
      double cap = 1.0 / (2.0 * L * std::sqrt(kappa + 1.0));
      s.eta = eta_in.value_or(cap);
      need(s.eta > 0.0 && s.eta <= cap * (1.0 + 1e-12), where,
           "0 < eta <= 1/(2*L*sqrt(kappa+1)) = " + fmt(cap));
      lo = 4.0 * rho;
      hi = (nu - 1.0) * s.eta / (4.0 * nu);
      closed_hi = true;
      break;
    }
    case 4: {
      s.regime = Regime::gfeg_iv;
      need(nu > 2.0, where, "nu > 2");
      need(kappa > 0.0 && kappa_hat > 0.0, where, "kappa > 0 and kappa_hat > 0");
      need(kappa_hat < (nu - 2.0) / (4.0 * nu), where,
           "kappa_hat < (nu-2)/(4*nu) = " + fmt((nu - 2.0) / (4.0 * nu)));
      double sig = std::sqrt(
          std::min(0.5, (nu - 2.0 - 4.0 * nu * kappa_hat) / (32.0 * nu * kappa_hat)) /
          (kappa + 1.0));
      need(L * rho < (nu - 2.0 - 4.0 * nu * kappa_hat) * sig / (12.0 * (nu - 2.0)),
           where, "L*rho < (nu-2-4*nu*kappa_hat)*sigma/(12*(nu-2))");
      double cap = sig / L;
      s.eta = eta_in.value_or(cap);
      need(s.eta > 0.0 && s.eta <= cap * (1.0 + 1e-12), where,
           "0 < eta <= sigma/L = " + fmt(cap));
      lo = (2.0 * (nu - 2.0) / (nu - 2.0 - 4.0 * nu * kappa_hat)) *
           (2.0 * (nu - 1.0) * kappa_hat * s.eta * sig * sig / (nu - 2.0) + 2.0 * rho);
      hi = 2.0 * s.eta / 3.0;
      break;
    }
    default:
      throw UsageError("gfeg: case_number must be 1, 2, 3, or 4");
  }
  need(closed_hi ? lo <= hi : lo < hi, where,
       "nonempty beta window [" + fmt(lo) + ", " + fmt(hi) + (closed_hi ? "]" : ")"));
  s.beta = beta_in.value_or(0.5 * (lo + hi));
  need(s.beta >= lo && (closed_hi ? s.beta <= hi : s.beta < hi), where,
       "beta in [" + fmt(lo) + ", " + fmt(hi) + (closed_hi ? "]" : ")") +
           " (got beta = " + fmt(s.beta) + ")");
  return s;
}

Schedule Schedule::gfeg_plus_quasi(double L, double rho, double kappa,
                                   double kappa_hat, double mu,
                                   std::optional<double> r_in,
                                   std::optional<double> eta_in) {
  const std::string where = "gfeg+ quasi";
  need(L > 0.0, where, "L > 0");
  need(rho >= 0.0, where, "rho >= 0");
  need(kappa >= 0.0 && kappa_hat >= 0.0, where, "kappa, kappa_hat >= 0");
  need(mu > 0.0 && mu < 0.5, where, "mu in (0, 1/2) (got mu = " + fmt(mu) + ")");
  double r = r_in.value_or(std::ceil(1.0 + 2.0 / mu));
  need(r >= 1.0 + 2.0 / mu, where,
       "r >= 1 + 2/mu = " + fmt(1.0 + 2.0 / mu) + " (got r = " + fmt(r) + ")");
  double cap = 1.0 / std::sqrt(2.0 * (1.0 + 4.0 * kappa) * L * L + 4.0 * kappa_hat);
  double eta = eta_in.value_or(cap);
  need(eta <= cap * (1.0 + 1e-12), where,
       "eta <= 1/sqrt(2*(1+4*kappa)*L^2 + 4*kappa_hat) = " + fmt(cap));
  need(8.0 * rho < eta, where,
       "8*rho < eta (got 8*rho = " + fmt(8.0 * rho) + ", eta = " + fmt(eta) + ")");
  Schedule s;
  s.family = SchemeFamily::gfeg_plus;
  s.regime = Regime::gfeg_plus_quasi;
  s.L = L;
  s.rho = rho;
  s.kappa = kappa;
  s.kappa_hat = kappa_hat;
  s.eta = eta;
  s.mu = mu;
  s.r = r;
  s.gamma = (1.0 - 2.0 * mu) * eta / 6.0;
  s.anchor_pull = 4.0 * rho;
  return s;
}

Schedule Schedule::gfeg_plus_strict(double L, double rho, double mu,
                                    std::optional<double> r_in,
                                    std::optional<double> eta_in,
                                    std::optional<double> gamma_in) {
  const std::string where = "gfeg+ strict";
  need(L > 0.0, where, "L > 0");
  need(rho >= 0.0, where, "rho >= 0");
  need(mu > 0.0 && mu < 1.0, where, "mu in (0, 1) (got mu = " + fmt(mu) + ")");
  double r = r_in.value_or(std::ceil(1.0 + 2.0 / mu));
  need(mu * r >= 1.0, where, "mu*r >= 1 (got mu*r = " + fmt(mu * r) + ")");
  double cap = 1.0 / L;
  double eta = eta_in.value_or(cap);
  need(eta <= cap * (1.0 + 1e-12), where, "eta <= 1/L = " + fmt(cap));
  need(2.0 * rho < eta, where,
       "2*rho < eta (got 2*rho = " + fmt(2.0 * rho) + ", eta = " + fmt(eta) + ")");
  double gcap = (1.0 - mu) * (eta - 2.0 * rho);
  double gamma = gamma_in.value_or(0.5 * gcap);
  need(gamma > 0.0 && gamma < gcap, where,
       "0 < gamma < (1-mu)*(eta-2*rho) = " + fmt(gcap) + " (got gamma = " + fmt(gamma) + ")");
  Schedule s;
  s.family = SchemeFamily::gfeg_plus;
  s.regime = Regime::gfeg_plus_strict;
  s.L = L;
  s.rho = rho;
  s.eta = eta;
  s.mu = mu;
  s.r = r;
  s.gamma = gamma;
  s.anchor_pull = 2.0 * rho;
  return s;
}

Schedule Schedule::gaeg(double L, double rho, double kappa, double kappa_hat,
                        double r, std::optional<double> lambda_in) {
  const std::string where = "gaeg general";
  need(L > 0.0, where, "L > 0");
  need(rho >= 0.0, where, "rho >= 0");
  need(kappa >= 0.0 && kappa_hat >= 0.0, where, "kappa, kappa_hat >= 0");
  need(r > 1.0, where, "r > 1 (got r = " + fmt(r) + ")");
  need(kappa_hat <= (r - 1.0) / (58.0 * r), where,
       "kappa_hat <= (r-1)/(58*r) = " + fmt((r - 1.0) / (58.0 * r)));
  need(L * rho < 6.0 / (29.0 * std::sqrt(2.0 * (5.0 * kappa + 1.0))), where,
       "L*rho < 6/(29*sqrt(2*(5*kappa+1))) = " +
           fmt(6.0 / (29.0 * std::sqrt(2.0 * (5.0 * kappa + 1.0)))));
  double cap = lambda_bar_gaeg(kappa, L, rho);
  double lambda = lambda_in.value_or(cap);
  need(lambda > 0.0 && lambda <= cap * (1.0 + 1e-12), where,
       "0 < lambda <= lambda_bar = " + fmt(cap) + " (got lambda = " + fmt(lambda) + ")");
  Schedule s;
  s.family = SchemeFamily::gaeg;
  s.regime = Regime::gaeg_general;
  s.L = L;
  s.rho = rho;
  s.kappa = kappa;
  s.kappa_hat = kappa_hat;
  s.lambda = lambda;
  s.eta = 4.0 * lambda + (29.0 / 6.0) * rho;
  s.r = r;
  return s;
}

Schedule Schedule::gaeg_current(double L, double rho, double r,
                                std::optional<double> lambda_in) {
  const std::string where = "gaeg current";
  need(L > 0.0, where, "L > 0");
  need(rho >= 0.0, where, "rho >= 0");
  need(r > 2.0, where, "r > 2 (got r = " + fmt(r) + ")");
  need(2.0 * L * rho < 1.0, where,
       "2*L*rho < 1 (got 2*L*rho = " + fmt(2.0 * L * rho) + ")");
  double cap = 1.0 / L - 2.0 * rho;
  double lambda = lambda_in.value_or(cap);
  need(lambda > 0.0 && lambda <= cap * (1.0 + 1e-12), where,
       "0 < lambda <= 1/L - 2*rho = " + fmt(cap) + " (got lambda = " + fmt(lambda) + ")");
  Schedule s;
  s.family = SchemeFamily::gaeg;
  s.regime = Regime::gaeg_current;
  s.L = L;
  s.rho = rho;
  s.lambda = lambda;
  s.eta = lambda + 2.0 * rho;
  s.r = r;
  return s;
}

Schedule Schedule::gaeg_past(double L, double rho, double r,
                             std::optional<double> lambda_in) {
  const std::string where = "gaeg past";
  need(L > 0.0, where, "L > 0");
  need(rho >= 0.0, where, "rho >= 0");
  need(r > 1.0, where, "r > 1 (got r = " + fmt(r) + ")");
  need(8.0 * std::sqrt(3.0) * L * rho < 1.0, where,
       "8*sqrt(3)*L*rho < 1 (got " + fmt(8.0 * std::sqrt(3.0) * L * rho) + ")");
  double cap = lambda_bar_gaeg_past(L, rho);
  double lambda = lambda_in.value_or(cap);
  need(lambda > 0.0 && lambda <= cap * (1.0 + 1e-12), where,
       "0 < lambda <= lambda_bar = " + fmt(cap) + " (got lambda = " + fmt(lambda) + ")");
  Schedule s;
  s.family = SchemeFamily::gaeg;
  s.regime = Regime::gaeg_past;
  s.L = L;
  s.rho = rho;
  s.kappa = 1.0;
  s.kappa_hat = 0.0;
  s.lambda = lambda;
  s.eta = 3.0 * lambda + 4.0 * rho;
  s.r = r;
  return s;
}

Schedule Schedule::gaeg_plus_aeg(double L, double rho, double r,
                                 std::optional<double> beta_in,
                                 std::optional<double> eta_in) {
  const std::string where = "gaeg+ aeg";
  need(L > 0.0, where, "L > 0");
  need(rho >= 0.0, where, "rho >= 0");
  need(r > 2.0, where, "r > 2 (got r = " + fmt(r) + ")");
  need(2.0 * L * rho < 1.0, where,
       "2*L*rho < 1 (got 2*L*rho = " + fmt(2.0 * L * rho) + ")");
  double beta = beta_in.value_or(2.0 * rho + 0.05 * (1.0 / L - 2.0 * rho));
  need(2.0 * rho < beta, where,
       "2*rho < beta (got 2*rho = " + fmt(2.0 * rho) + ", beta = " + fmt(beta) + ")");
  double eta = eta_in.value_or(1.0 / L - 0.05 * (1.0 / L - beta));
  need(beta < eta, where,
       "beta < eta (got beta = " + fmt(beta) + ", eta = " + fmt(eta) + ")");
  need(eta < 1.0 / L, where,
       "eta < 1/L (got eta = " + fmt(eta) + ", 1/L = " + fmt(1.0 / L) + ")");

  Schedule s;
  s.family = SchemeFamily::gaeg_plus;
  s.regime = Regime::gaeg_plus_aeg;
  s.L = L;
  s.rho = rho;
  s.eta = eta;
  s.beta = beta;
  s.mu = 1.0;
  s.r = r;

  double omega = 0.5 * (eta - beta);
  double phihat = (1.0 - sq(L * eta)) / (2.0 * sq(L * eta));
  double Gamma = (sq(r - 2.0) * eta * eta + (4.0 * r - 6.0) * eta * beta -
                  (r * r - 2.0) * beta * beta) /
                 4.0;
  double Gammahat = 2.0 * Gamma / (r - 2.0) + 4.0 * rho * omega * r;
  double c1 = (r + 1.0) / 2.0 + eta / (2.0 * phihat * omega);
  double c2 = Gammahat / sq(eta - beta);
  double c3 = rho > 0.0
                  ? 4.0 * rho * (eta - omega * (r + 1.0)) / (omega * (beta - 2.0 * rho))
                  : 0.0;
  double c4 = eta * (r - 1.0) / (eta - beta);
  s.t0 = start_index(std::max({c1, c2, c3, c4}), r);
  return s;
}

Schedule Schedule::gaeg_plus_general(double L, double rho, double kappa,
                                     double kappa_hat, double mu, double r,
                                     std::optional<double> eta_in, double eps,
                                     double eps_hat) {
  const std::string where = "gaeg+ general";
  need(L > 0.0, where, "L > 0");
  need(rho >= 0.0, where, "rho >= 0");
  need(kappa >= 0.0, where, "kappa >= 0");
  need(eps >= 0.0 && eps_hat >= 0.0, where, "eps, eps_hat >= 0");
  need(mu > 1.0, where, "mu > 1 (got mu = " + fmt(mu) + ")");
  need(r > 2.0, where, "r > 2 (got r = " + fmt(r) + ")");
  double khat_cap = (3.0 * r - 1.0) / (3.0 * r * (12.0 + 3.0 * r + eps_hat));
  need(kappa_hat >= 0.0 && kappa_hat < khat_cap, where,
       "0 <= kappa_hat < (3r-1)/(3r*(12+3r+eps_hat)) = " + fmt(khat_cap));
  double Psi = psi_gaeg_plus(kappa, kappa_hat, r, eps_hat);
  need(L * rho < (r - 2.0) * Psi / (8.0 * (r + mu - 1.0)), where,
       "L*rho < (r-2)*Psi/(8*(r+mu-1)) = " + fmt((r - 2.0) * Psi / (8.0 * (r + mu - 1.0))));
  double beta = 8.0 * rho + 2.0 * eps;
  double eta_cap = Psi / L;
  double eta_lo = (r + mu - 1.0) * beta / (r - 2.0);
  need(eta_lo <= eta_cap, where,
       "nonempty eta window: (r+mu-1)*beta/(r-2) <= Psi/L (got [" + fmt(eta_lo) +
           ", " + fmt(eta_cap) + "])");
  double eta = eta_in.value_or(eta_cap);
  need(eta >= eta_lo, where,
       "(r+mu-1)*beta/(r-2) <= eta (got eta = " + fmt(eta) + ", lower end = " + fmt(eta_lo) + ")");
  need(eta <= eta_cap * (1.0 + 1e-12), where,
       "eta <= Psi/L = " + fmt(eta_cap) + " (got eta = " + fmt(eta) + ")");
  need(beta < eta, where, "beta < eta");

  Schedule s;
  s.family = SchemeFamily::gaeg_plus;
  s.regime = Regime::gaeg_plus_general;
  s.L = L;
  s.rho = rho;
  s.kappa = kappa;
  s.kappa_hat = kappa_hat;
  s.eta = eta;
  s.beta = beta;
  s.mu = mu;
  s.r = r;
  s.eps = eps;
  s.eps_hat = eps_hat;

  const double Delta = s.delta_cap;
  double psi_aux = (eta - beta) / (mu + 1.0);
  double omega = mu * (eta - beta) / (mu + 1.0);
  double delta = (r - 1.0) * beta + (r - 2.0) * psi_aux;
  double D = 2.0 * delta + omega * sq(r + mu - 1.0) + 2.0 * Delta * r * eta +
             2.0 * beta + 2.0 * eps_hat * eta;
  double E = 4.0 * rho * r * (r - 2.0) + Delta * r * eta + 8.0 * rho + eps_hat * eta;
  double tbar = (D + std::sqrt(D * D + 4.0 * eta * E)) / (2.0 * eta);
  double A = sq(eta - beta) / sq(mu + 1.0) * (mu - 1.0 / (2.0 * r) - 0.5);
  double B = (eta - beta) / sq(mu + 1.0) *
             ((r - 1.0) * (2.0 * r * mu * (eta - beta) - (eta + mu * beta)) / (2.0 * r) +
              rho * (mu + 1.0) * (2.0 * r * mu - 1.0));
  double C = (r - 1.0) *
             (((r - 1.0) * (eta + mu * beta) / sq(mu + 1.0)) *
                  ((mu - 1.0 / (2.0 * r)) * eta - (2.0 * r + 1.0) * mu * beta / (2.0 * r)) -
              2.0 * rho * (eta - (2.0 * r + 1.0) * omega));
  double that = (B * B >= A * C) ? (B + std::sqrt(B * B - A * C)) / A : 0.0;
  double c5 = eta * (r - 1.0) / (eta - beta);
  double c6 = (mu / omega) * (r - 1.0) * (eta - (2.0 * r + 1.0) * omega);
  double c7 = (r - 2.0) * std::sqrt(omega * r) / std::sqrt(eta * (mu - 1.0));
  s.t0 = start_index(std::max({tbar, that, r, c5, c6, c7}), r);
  return s;
}

// ---------------------------------------------------------------------------
// Initial states
// ---------------------------------------------------------------------------

GeagState geag_init(const ProblemInstance& problem, const Vector& x0) {
  GeagState st;
  st.x0 = x0;
  st.x = x0;
  st.xi = Vector::Zero(problem.dim);
  st.Fx = eval_F(problem, x0);
  st.y_prev = x0;
  st.Fy_prev = st.Fx;
  st.u_prev = st.Fx;
  st.Fx_prev = st.Fx;
  st.etahat_prev = 0.0;
  st.k = 0;
  return st;
}

GfegState gfeg_init(const ProblemInstance& problem, const Vector& x0) {
  GfegState st;
  st.x0 = x0;
  st.x = x0;
  st.xi = Vector::Zero(problem.dim);
  st.xi_prev = st.xi;
  st.Fx = eval_F(problem, x0);
  st.Fx_prev = st.Fx;
  st.y_prev = x0;
  st.Fy_prev = st.Fx;
  st.k = 0;
  return st;
}

GfegPlusState gfeg_plus_init(const ProblemInstance& problem, const Schedule& sched,
                             const Vector& x0) {
  GfegPlusState st;
  st.x = x0;
  st.xi = Vector::Zero(problem.dim);
  st.xi_prev = st.xi;
  st.Fx = eval_F(problem, x0);
  st.Fx_prev = st.Fx;
  st.y_prev = x0;
  st.Fy_prev = st.Fx;
  st.xbar = x0;
  st.tau_prev = 1.0 / (sched.mu * (sched.r - 1.0));
  st.k = 0;
  return st;
}

GaegState gaeg_init(const ProblemInstance& problem, const Vector& x0) {
  GaegState st;
  st.x = x0;
  st.xi = Vector::Zero(problem.dim);
  st.Fx = eval_F(problem, x0);
  st.xhat = x0;
  st.y = x0;
  st.Fy_prev = st.Fx;
  st.w_prev = st.Fx;  // w^0 carried as the k = -1 stand-in
  st.k = 0;
  return st;
}

GaegPlusState gaeg_plus_init(const ProblemInstance& problem, const Vector& x0) {
  GaegPlusState st;
  st.x = x0;
  st.xi = Vector::Zero(problem.dim);
  st.Fx = eval_F(problem, x0);
  st.y = x0;
  st.Fy_prev = st.Fx;
  st.d_prev = Vector::Zero(problem.dim);
  st.k = 0;
  return st;
}

// ---------------------------------------------------------------------------
// Direction assembly (pure in the state)
// ---------------------------------------------------------------------------

Vector build_direction(const Schedule&, const DirectionRule& rule, const GeagState& st) {
  if (st.k == 0 || rule.kind == DirectionKind::current) return st.Fx;
  if (rule.kind == DirectionKind::past) return st.Fy_prev;
  return (1.0 - rule.alpha) * st.Fx + rule.alpha * st.Fy_prev +
         rule.alpha_hat *
             (st.x - st.y_prev + st.etahat_prev * (st.Fx_prev - st.u_prev));
}

Vector build_direction(const Schedule&, const DirectionRule& rule, const GfegState& st) {
  if (st.k == 0 || rule.kind == DirectionKind::current) return st.Fx;
  if (rule.kind == DirectionKind::past) return st.Fy_prev + (st.xi - st.xi_prev);
  return rule.alpha * st.Fx + rule.alpha_hat * st.Fy_prev +
         (1.0 - rule.alpha - rule.alpha_hat) * st.Fx_prev +
         rule.alpha_hat * (st.xi - st.xi_prev);
}

Vector build_direction(const Schedule& sched, const DirectionRule& rule,
                       const GfegPlusState& st) {
  if (st.k == 0 || rule.kind == DirectionKind::current) return st.Fx;
  if (rule.kind == DirectionKind::past) return st.Fy_prev;
  double ea = sched.eta * rule.alpha_hat;
  return rule.alpha * st.Fx + (1.0 - rule.alpha + ea) * st.Fy_prev -
         ea * (1.0 - st.tau_prev) * st.Fx_prev +
         ea * (st.xi - (1.0 - st.tau_prev) * st.xi_prev);
}

Vector build_direction(const Schedule&, const DirectionRule& rule, const GaegState& st) {
  if (st.k == 0 || rule.kind == DirectionKind::current) return st.Fx;
  if (rule.kind == DirectionKind::past) return st.Fy_prev;
  return rule.alpha * st.Fx + rule.alpha_hat * st.Fy_prev +
         (1.0 - rule.alpha - rule.alpha_hat) * (st.w_prev - st.xi);
}

Vector build_direction(const Schedule&, const DirectionRule& rule,
                       const GaegPlusState& st) {
  if (st.k == 0 || rule.kind == DirectionKind::current) return st.Fx;
  if (rule.kind == DirectionKind::past) return st.Fy_prev;
  return rule.alpha_hat * st.d_prev + (1.0 - rule.alpha) * st.Fx +
         rule.alpha * st.Fy_prev;
}

// ---------------------------------------------------------------------------
// One-step transitions
// ---------------------------------------------------------------------------

namespace {
void check_condition(const StepInfo& info) {
  // Debug-only guard; release builds surface violations through the
  // certificate test suites instead.
  assert(info.cond_lhs <= info.cond_rhs + 1e-9 * (1.0 + info.cond_rhs));
  (void)info;
}
}  // namespace

StepInfo geag_step(const ProblemInstance& problem, const Schedule& sched,
                   const DirectionRule& rule, GeagState& st) {
  double tau = 1.0 / (st.k + sched.nu);
  double etahat = sched.eta * (1.0 - tau);
  Vector u = build_direction(sched, rule, st);

  StepInfo info;
  info.cond_lhs = (u - st.Fx).squaredNorm();
  info.cond_rhs =
      rule.kappa * (st.Fx - st.Fy_prev).squaredNorm() +
      rule.kappa_hat *
          (st.x - st.y_prev + st.etahat_prev * (st.Fx_prev - st.u_prev)).squaredNorm();
  check_condition(info);

  Vector anchor_mix = tau * st.x0 + (1.0 - tau) * st.x;
  Vector y = eval_resolvent(problem, etahat, anchor_mix - etahat * u).point;
  Vector Fy = eval_F(problem, y);
  ResolventResult nxt = eval_resolvent(problem, sched.eta, anchor_mix - sched.eta * Fy);

  st.etahat_prev = etahat;
  st.u_prev = std::move(u);
  st.y_prev = std::move(y);
  st.Fy_prev = std::move(Fy);
  st.Fx_prev = std::move(st.Fx);
  st.x = std::move(nxt.point);
  st.xi = std::move(nxt.xi);
  st.Fx = eval_F(problem, st.x);
  st.k += 1;
  return info;
}

StepInfo gfeg_step(const ProblemInstance& problem, const Schedule& sched,
                   const DirectionRule& rule, GfegState& st) {
  double tau = 1.0 / (st.k + sched.nu);
  double etahat = sched.eta * (1.0 - tau);
  double beta_k = sched.beta * (1.0 - tau);
  Vector u = build_direction(sched, rule, st);

  StepInfo info;
  info.cond_lhs = (st.Fx - u).squaredNorm();
  info.cond_rhs =
      rule.kappa * (st.Fx - st.Fy_prev).squaredNorm() +
      rule.kappa_hat * ((st.Fx + st.xi) - (st.Fx_prev + st.xi_prev)).squaredNorm();
  check_condition(info);

  Vector z = u + st.xi;
  Vector y = st.x + tau * (st.x0 - st.x) - (etahat - beta_k) * z;
  Vector Fy = eval_F(problem, y);
  ResolventResult nxt =
      eval_resolvent(problem, sched.eta, y - sched.eta * Fy + etahat * z);

  st.xi_prev = std::move(st.xi);
  st.Fx_prev = std::move(st.Fx);
  st.y_prev = std::move(y);
  st.Fy_prev = std::move(Fy);
  st.x = std::move(nxt.point);
  st.xi = std::move(nxt.xi);
  st.Fx = eval_F(problem, st.x);
  st.k += 1;
  return info;
}

StepInfo gfeg_plus_step(const ProblemInstance& problem, const Schedule& sched,
                        const DirectionRule& rule, GfegPlusState& st) {
  double t = sched.mu * (st.k + sched.r);
  double tau = 1.0 / t;
  double etahat = sched.eta * (1.0 - tau);
  double beta_k = -sched.gamma * tau + sched.anchor_pull * (1.0 - tau);
  Vector u = build_direction(sched, rule, st);

  StepInfo info;
  info.cond_lhs = (st.Fx - u).squaredNorm();
  info.cond_rhs =
      rule.kappa * (st.Fx - st.Fy_prev).squaredNorm() +
      rule.kappa_hat * sq(sched.eta) *
          ((st.Fy_prev + st.xi) - (1.0 - st.tau_prev) * (st.Fx_prev + st.xi_prev))
              .squaredNorm();
  check_condition(info);

  Vector z = u + st.xi;
  Vector y = st.x + tau * (st.xbar - st.x) - (etahat - beta_k) * z;
  Vector Fy = eval_F(problem, y);
  ResolventResult nxt =
      eval_resolvent(problem, sched.eta, y - sched.eta * Fy + etahat * z);
  st.xbar -= sched.gamma * z;

  st.xi_prev = std::move(st.xi);
  st.Fx_prev = std::move(st.Fx);
  st.y_prev = std::move(y);
  st.Fy_prev = std::move(Fy);
  st.tau_prev = tau;
  st.x = std::move(nxt.point);
  st.xi = std::move(nxt.xi);
  st.Fx = eval_F(problem, st.x);
  st.k += 1;
  return info;
}

StepInfo gaeg_step(const ProblemInstance& problem, const Schedule& sched,
                   const DirectionRule& rule, GaegState& st) {
  double t = st.k + sched.r;
  double t1 = t + 1.0;
  double gamma_k = (t - 1.0) / t;
  double theta_k = (t - 1.0) / t1;
  double nu_k = t / t1;
  Vector u = build_direction(sched, rule, st);
  Vector w = st.Fx + st.xi;

  StepInfo info;
  info.cond_lhs = (st.Fx - u).squaredNorm();
  info.cond_rhs = rule.kappa * (st.Fx - st.Fy_prev).squaredNorm() +
                  rule.kappa_hat * (w - st.w_prev).squaredNorm();
  check_condition(info);

  Vector z = u + st.xi;
  Vector Fy = eval_F(problem, st.y);
  ResolventResult nxt =
      eval_resolvent(problem, sched.eta, st.y - sched.eta * (Fy - gamma_k * z));
  Vector Fx1 = eval_F(problem, nxt.point);

  // Next direction, assembled from end-of-step quantities.
  Vector u1;
  if (rule.kind == DirectionKind::current) {
    u1 = Fx1;
  } else if (rule.kind == DirectionKind::past) {
    u1 = Fy;
  } else {
    u1 = rule.alpha * Fx1 + rule.alpha_hat * Fy +
         (1.0 - rule.alpha - rule.alpha_hat) * (w - nxt.xi);
  }
  Vector z1 = u1 + nxt.xi;
  Vector xhat1 = nxt.point - sched.lambda * z1;
  Vector y1 = xhat1 + theta_k * (xhat1 - st.xhat) + nu_k * (st.y - xhat1);

  st.w_prev = std::move(w);
  st.Fy_prev = std::move(Fy);
  st.x = std::move(nxt.point);
  st.xi = std::move(nxt.xi);
  st.Fx = std::move(Fx1);
  st.xhat = std::move(xhat1);
  st.y = std::move(y1);
  st.k += 1;
  return info;
}

StepInfo gaeg_plus_step(const ProblemInstance& problem, const Schedule& sched,
                        const DirectionRule& rule, GaegPlusState& st) {
  double t = st.k + static_cast<double>(sched.t0);
  double t1 = t + 1.0;
  double theta_k = (t - sched.r - sched.mu) / t1;
  double gamma_k = (t - sched.r + 1.0) / t;
  double dstep = (sched.r - 1.0) * sched.beta +
                 (sched.r - 2.0) * (sched.eta - sched.beta) / (sched.mu + 1.0);
  double eta_k = ((sched.eta - sched.beta) * t - dstep) / t1;
  double lambda_k = sched.eta * t / t1;
  double nu_k = sched.beta * t / t1;
  Vector u = build_direction(sched, rule, st);

  StepInfo info;
  info.cond_lhs = (st.Fx - u).squaredNorm();
  info.cond_rhs = rule.kappa * (st.Fx - st.Fy_prev).squaredNorm() +
                  rule.kappa_hat * st.d_prev.squaredNorm();
  check_condition(info);

  Vector z = u + st.xi;
  Vector Fy = eval_F(problem, st.y);
  ResolventResult nxt = eval_resolvent(
      problem, sched.eta, st.y - sched.eta * Fy + sched.eta * gamma_k * z);
  Vector d = (st.y - nxt.point) / sched.eta;
  Vector Fx1 = eval_F(problem, nxt.point);

  Vector u1;
  if (rule.kind == DirectionKind::current) {
    u1 = Fx1;
  } else if (rule.kind == DirectionKind::past) {
    u1 = Fy;
  } else {
    u1 = rule.alpha_hat * d + (1.0 - rule.alpha) * Fx1 + rule.alpha * Fy;
  }
  Vector z1 = u1 + nxt.xi;
  Vector y1 = nxt.point + theta_k * (nxt.point - st.x) - eta_k * z1 +
              lambda_k * (Fy + nxt.xi) - nu_k * z;

  st.d_prev = std::move(d);
  st.Fy_prev = std::move(Fy);
  st.x = std::move(nxt.point);
  st.xi = std::move(nxt.xi);
  st.Fx = std::move(Fx1);
  st.y = std::move(y1);
  st.k += 1;
  return info;
}

// ---------------------------------------------------------------------------
// Run driver
// ---------------------------------------------------------------------------

namespace {

double fb_from(const ProblemInstance& p, double eta, const Vector& x, const Vector& Fx) {
  if (p.t_is_zero) return Fx.norm();
  ResolventResult rr = eval_resolvent(p, eta, x - eta * Fx);
  return (x - rr.point).norm() / eta;
}

template <class State, class StepFn, class SnapFn>
Trace drive(const ProblemInstance& problem, const Schedule& sched,
            const DirectionRule& rule, const Vector& x0, const RunOptions& opts,
            State st, StepFn step, SnapFn snap) {
  Trace tr;
  tr.family = sched.family;
  tr.regime = sched.regime;
  tr.schedule = sched;
  tr.rule = rule;
  tr.x0 = x0;

  auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&t_start]() -> std::uint64_t {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now() - t_start)
            .count());
  };

  auto record = [&](const State& s) -> double {
    TraceRecord rec;
    rec.k = s.k;
    rec.residual = (s.Fx + s.xi).norm();
    if (!std::isfinite(rec.residual))
      throw NumericalFailure("non-finite residual on " + problem.label, s.k);
    rec.fb_residual = fb_from(problem, sched.eta, s.x, s.Fx);
    Vector u = build_direction(sched, rule, s);
    rec.e_norm = (u - s.Fx).norm();
    if (opts.x_star) rec.dist_to_star = (s.x - *opts.x_star).norm();
    rec.wall_nanos = elapsed();
    tr.records.push_back(rec);
    if (opts.keep_snapshots) {
      StateSnapshot ss;
      ss.k = s.k;
      ss.x = s.x;
      ss.xi = s.xi;
      ss.Fx = s.Fx;
      ss.u = std::move(u);
      snap(s, ss);
      tr.snapshots.push_back(std::move(ss));
    }
    return rec.residual;
  };

  double res = record(st);
  tr.w0_norm = res;
  tr.fb0 = tr.records.front().fb_residual;
  for (long it = 0; it < opts.max_iter; ++it) {
    if (opts.stop_tol > 0.0 && res <= opts.stop_tol) {
      tr.stopped_early = true;
      break;
    }
    step(problem, sched, rule, st);
    res = record(st);
  }
  return tr;
}

}  // namespace

Trace run(const ProblemInstance& problem, const Schedule& sched,
          const DirectionRule& rule, const Vector& x0, const RunOptions& opts) {
  if (x0.size() != problem.dim)
    throw UsageError("run: x0 has dimension " + std::to_string(x0.size()) +
                     ", problem expects " + std::to_string(problem.dim));
  if (opts.max_iter < 0) throw UsageError("run: max_iter must be >= 0");
  if (rule.kappa > sched.kappa + 1e-12 || rule.kappa_hat > sched.kappa_hat + 1e-12)
    throw UsageError(
        "run: direction rule certifies (kappa, kappa_hat) = (" + fmt(rule.kappa) +
        ", " + fmt(rule.kappa_hat) + ") but the schedule was validated for (" +
        fmt(sched.kappa) + ", " + fmt(sched.kappa_hat) + ")");
  auto require_kind = [&](DirectionKind kind, const char* name) {
    if (rule.kind != kind)
      throw UsageError(std::string("run: regime '") + to_string(sched.regime) +
                       "' requires the " + name + " direction rule");
  };
  if (sched.regime == Regime::gfeg_plus_strict) require_kind(DirectionKind::current, "current");
  if (sched.regime == Regime::gaeg_current) require_kind(DirectionKind::current, "current");
  if (sched.regime == Regime::gaeg_past) require_kind(DirectionKind::past, "past");
  if (sched.regime == Regime::gaeg_plus_aeg) require_kind(DirectionKind::current, "current");

  switch (sched.family) {
    case SchemeFamily::geag:
      return drive(problem, sched, rule, x0, opts, geag_init(problem, x0), geag_step,
                   [](const GeagState&, StateSnapshot&) {});
    case SchemeFamily::gfeg:
      return drive(problem, sched, rule, x0, opts, gfeg_init(problem, x0), gfeg_step,
                   [](const GfegState&, StateSnapshot&) {});
    case SchemeFamily::gfeg_plus:
      return drive(problem, sched, rule, x0, opts,
                   gfeg_plus_init(problem, sched, x0), gfeg_plus_step,
                   [](const GfegPlusState& s, StateSnapshot& ss) { ss.xbar = s.xbar; });
    case SchemeFamily::gaeg:
      return drive(problem, sched, rule, x0, opts, gaeg_init(problem, x0), gaeg_step,
                   [](const GaegState& s, StateSnapshot& ss) {
                     ss.xhat = s.xhat;
                     ss.y = s.y;
                   });
    case SchemeFamily::gaeg_plus:
      return drive(problem, sched, rule, x0, opts, gaeg_plus_init(problem, x0),
                   gaeg_plus_step,
                   [](const GaegPlusState& s, StateSnapshot& ss) { ss.y = s.y; });
  }
  throw UsageError("run: unknown scheme family");
}

}  // namespace exgrad
