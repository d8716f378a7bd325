#include "specbound/inequalities.hpp"

#include "specbound/models.hpp"
#include "specbound/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace specbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void require_count(const Spectrum& s, Eigen::Index n, const char* op) {
  if (n < 1) throw PreconditionError(std::string(op) + " requires n >= 1");
  if (n > s.size()) {
    std::ostringstream os;
    os << op << " requires n <= " << s.size() << " listed eigenvalues (n = " << n << ")";
    throw PreconditionError(os.str());
  }
}

void require_next_eigenvalue(const Spectrum& s, Eigen::Index n, const char* op) {
  require_count(s, n, op);
  if (n + 1 > s.size()) {
    std::ostringstream os;
    os << op << " needs lambda_" << n + 1 << ", but only " << s.size()
       << " eigenvalues are listed";
    throw PreconditionError(os.str());
  }
}

void require_admissible_exponents(double p, double q, const char* op) {
  if (!std::isfinite(p) || !std::isfinite(q)) {
    throw PreconditionError(std::string(op) + " requires finite exponents");
  }
  if (!(p > q && q > 0.0)) {
    throw PreconditionError(std::string(op) + " requires p > q > 0 (p = " + fmt(p) +
                            ", q = " + fmt(q) + ")");
  }
  if (q > 1.0) {
    throw PreconditionError(std::string(op) + " requires q <= min(1, p) (q = " + fmt(q) + ")");
  }
  if (p + q > 3.0) {
    throw PreconditionError(std::string(op) + " requires p + q <= 3 (p + q = " + fmt(p + q) + ")");
  }
}

// The gap-corrected bounds are stated for Dirichlet-type constants; alpha
// must vanish, and when the spectrum knows its dimension the pair
// (beta, gamma) must match (4/d, 1).
void require_dirichlet_constants(const Spectrum& s, const CommutatorConstants& c, const char* op) {
  c.validate();
  if (c.alpha != 0.0) {
    throw PreconditionError(std::string(op) +
                            " requires Dirichlet-type constants with alpha = 0 (alpha = " +
                            fmt(c.alpha) + ")");
  }
  if (s.dimension) {
    const double beta_want = 4.0 / static_cast<double>(*s.dimension);
    if (std::abs(c.beta - beta_want) > 1e-12 * beta_want || std::abs(c.gamma - 1.0) > 1e-12) {
      std::ostringstream os;
      os << op << " requires (beta, gamma) = (4/d, 1) for d = " << *s.dimension << "; got beta = "
         << fmt(c.beta) << ", gamma = " << fmt(c.gamma);
      throw PreconditionError(os.str());
    }
  }
}

void require_ascending_positive_grid(const Vector& g, const char* op) {
  if (g.size() < 2) throw PreconditionError(std::string(op) + " requires a grid of at least 2 points");
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g(i)) || g(i) <= 0.0) {
      throw PreconditionError(std::string(op) + " requires a finite positive grid (entry " +
                              fmt(g(i)) + ")");
    }
    if (i > 0 && !(g(i) > g(i - 1))) {
      throw PreconditionError(std::string(op) + " requires a strictly increasing grid");
    }
  }
}

double kahan_mean_pow(const Vector& lam, Eigen::Index n, double r) {
  KahanSum sum;
  for (Eigen::Index j = 0; j < n; ++j) sum.add(std::pow(lam(j), r));
  return sum.value() / static_cast<double>(n);
}

}  // namespace

// ---- moment means -------------------------------------------------------

double moment_mean_S(const Spectrum& s, const CommutatorConstants& c, Eigen::Index n, double r) {
  c.validate();
  require_count(s, n, "moment mean");
  if (!std::isfinite(r) || !(r > 0.0)) {
    throw PreconditionError("moment mean requires a finite order r > 0 (r = " + fmt(r) + ")");
  }
  if (c.alpha != 0.0 || r < 1.0) s.require_positive("moment mean");
  const double lead = 1.0 + c.beta * r / (2.0 * c.gamma);
  double value = lead * kahan_mean_pow(s.values, n, r);
  if (c.alpha != 0.0) {
    value += (c.alpha * r / (2.0 * c.gamma)) * kahan_mean_pow(s.values, n, r - 1.0);
  }
  return value;
}

Vector moment_mean_prefix(const Spectrum& s, const CommutatorConstants& c, Eigen::Index n_max,
                          double r) {
  c.validate();
  require_count(s, n_max, "moment mean");
  if (!std::isfinite(r) || !(r > 0.0)) {
    throw PreconditionError("moment mean requires a finite order r > 0 (r = " + fmt(r) + ")");
  }
  if (c.alpha != 0.0 || r < 1.0) s.require_positive("moment mean");
  const double lead = 1.0 + c.beta * r / (2.0 * c.gamma);
  const double alpha_coef = c.alpha * r / (2.0 * c.gamma);
  Vector out(n_max);
  KahanSum sr, sr1;
  for (Eigen::Index j = 0; j < n_max; ++j) {
    sr.add(std::pow(s.values(j), r));
    const double inv_n = 1.0 / static_cast<double>(j + 1);
    double v = lead * sr.value() * inv_n;
    if (c.alpha != 0.0) {
      sr1.add(std::pow(s.values(j), r - 1.0));
      v += alpha_coef * sr1.value() * inv_n;
    }
    out(j) = v;
  }
  return out;
}

double geometric_mean(const Spectrum& s, Eigen::Index n) {
  require_count(s, n, "geometric mean");
  s.require_positive("geometric mean");
  KahanSum logs;
  for (Eigen::Index j = 0; j < n; ++j) logs.add(std::log(s.values(j)));
  return std::exp(logs.value() / static_cast<double>(n));
}

InequalityReport check_moment_order(const Spectrum& s, const CommutatorConstants& c,
                                    Eigen::Index n, double p, double q, double tol_rel) {
  require_admissible_exponents(p, q, "moment comparison");
  const double lhs = std::pow(moment_mean_S(s, c, n, p), 1.0 / p);
  const double rhs = std::pow(moment_mean_S(s, c, n, q), 1.0 / q);
  ReportContext ctx;
  ctx.n = static_cast<int>(n);
  ctx.p = p;
  ctx.q = q;
  return make_inequality_report("moment-order", lhs, rhs, tol_rel, ctx);
}

InequalityReport check_geometric_bound(const Spectrum& s, const CommutatorConstants& c,
                                       Eigen::Index n, double p, double tol_rel) {
  c.validate();
  require_count(s, n, "geometric-mean bound");
  if (!(p > 0.0 && p <= 3.0)) {
    throw PreconditionError("geometric-mean bound requires 0 < p <= 3 (p = " + fmt(p) + ")");
  }
  s.require_positive("geometric-mean bound");
  const double lhs = std::pow(moment_mean_S(s, c, n, p), 1.0 / p);
  double rhs = std::exp(c.beta / (2.0 * c.gamma)) * geometric_mean(s, n);
  if (c.alpha != 0.0) {
    rhs *= std::exp(c.alpha / (2.0 * c.gamma) * kahan_mean_pow(s.values, n, -1.0));
  }
  ReportContext ctx;
  ctx.n = static_cast<int>(n);
  ctx.p = p;
  return make_inequality_report("geometric-mean", lhs, rhs, tol_rel, ctx);
}

// ---- quadratic cap ------------------------------------------------------

double yang_type_cap(const Spectrum& s, const CommutatorConstants& c, Eigen::Index n) {
  c.validate();
  require_count(s, n, "quadratic cap");
  KahanSum b_sum, c_sum;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lam = s.values(j);
    const double w = (c.beta * lam + c.alpha) / c.gamma;
    b_sum.add(2.0 * lam + w);
    c_sum.add(lam * lam + w * lam);
  }
  const double nn = static_cast<double>(n);
  const double B = b_sum.value();
  const double C = c_sum.value();
  double disc = B * B - 4.0 * nn * C;
  const double disc_scale = std::max(B * B, std::abs(4.0 * nn * C));
  if (disc < 0.0) {
    if (disc >= -1e-12 * disc_scale) {
      disc = 0.0;
    } else {
      std::ostringstream os;
      os << "quadratic cap discriminant is negative (" << fmt(disc)
         << "); the constants (alpha, beta, gamma) are inconsistent with any commutator pair "
            "for this spectrum";
      throw InternalInconsistencyError(os.str());
    }
  }
  return (B + std::sqrt(disc)) / (2.0 * nn);
}

InequalityReport check_yang_cap(const Spectrum& s, const CommutatorConstants& c, Eigen::Index n,
                                double tol_rel) {
  require_next_eigenvalue(s, n, "quadratic cap");
  const double cap = yang_type_cap(s, c, n);
  ReportContext ctx;
  ctx.n = static_cast<int>(n);
  return make_inequality_report("yang-cap", s.lambda(n + 1), cap, tol_rel, ctx);
}

// ---- Riesz means --------------------------------------------------------

namespace {

void require_riesz_order(double rho, bool allow_low_rho) {
  if (!std::isfinite(rho) || rho <= 1.0) {
    throw PreconditionError("Riesz mean order rho = " + fmt(rho) +
                            " is outside the hypothesis range (requires rho > 1)");
  }
  if (rho < 2.0 && !allow_low_rho) {
    throw PreconditionError(
        "Riesz mean order rho = " + fmt(rho) +
        " is below the verified range rho >= 2; pass the explicit override to evaluate anyway");
  }
}

}  // namespace

double riesz_mean(const Spectrum& s, double z, double rho, bool allow_low_rho) {
  require_riesz_order(rho, allow_low_rho);
  if (!std::isfinite(z)) throw PreconditionError("Riesz mean requires a finite z");
  KahanSum sum;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const double gap = z - s.values(j);
    if (gap > 0.0) sum.add(std::pow(gap, rho));
  }
  return sum.value();
}

MonotonicityReport check_riesz_monotone(const Spectrum& s, const CommutatorConstants& c,
                                        double rho, const Vector& z_grid, double tol_rel,
                                        bool allow_low_rho) {
  c.validate();
  require_riesz_order(rho, allow_low_rho);
  require_ascending_positive_grid(z_grid, "Riesz monotonicity");
  const double lam_max = s.values(s.size() - 1);
  if (!spectrum_is_complete(s)) {
    const double z_top = z_grid(z_grid.size() - 1);
    if (z_top > lam_max * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "Riesz grid reaches z = " << fmt(z_top)
         << " beyond the certified window of this truncated spectrum (z <= lambda_"
         << s.size() << " = " << fmt(lam_max) << ")";
      throw TrustRegionError(os.str(), lam_max);
    }
  }

  MonotonicityReport r;
  r.law = "riesz-monotone";
  r.grid = z_grid;
  r.ratio_values.resize(z_grid.size());
  const double expo = rho + 2.0 * c.gamma / c.beta;
  for (Eigen::Index i = 0; i < z_grid.size(); ++i) {
    r.ratio_values(i) = riesz_mean(s, z_grid(i), rho, allow_low_rho) / std::pow(z_grid(i), expo);
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i + 1 < z_grid.size(); ++i) {
    worst = std::max(worst, r.ratio_values(i) - r.ratio_values(i + 1));
  }
  r.max_violation = worst;
  r.tolerance = tol_rel * std::max(1.0, r.ratio_values.cwiseAbs().maxCoeff());
  r.verdict = r.max_violation <= r.tolerance;
  r.context.rho = rho;
  if (rho < 2.0) r.note = "outside verified hypothesis range (rho < 2)";
  return r;
}

// ---- weighted partition function ----------------------------------------

namespace {

double z_list_value(const Vector& lam, double shift, double p, double t) {
  KahanSum sum;
  for (Eigen::Index j = 0; j < lam.size(); ++j) {
    sum.add(std::pow(lam(j) + shift, -p) * std::exp(-t * lam(j)));
  }
  return sum.value();
}

// Upper bound for the contribution of every eigenvalue beyond the listed
// window, integrating the counting majorant against -w' plus a boundary term
// for a multiplet split at the cut.
// abs_floor caps the precision demanded of each window at the scale the
// caller actually compares against; without it the integrator chases
// subnormal exponential tails to full recursion depth.
double z_tail_bound(const CountingMajorant& maj, double n_listed, double lam0, double shift,
                    double p, double t, double abs_floor) {
  const auto weight = [&](double lam) { return std::pow(lam + shift, -p) * std::exp(-t * lam); };
  const auto excess = [&](double lam) { return std::max(maj(lam) - n_listed, 0.0); };
  const auto integrand = [&](double lam) {
    return excess(lam) * (p / (lam + shift) + t) * weight(lam);
  };
  double tail = excess(lam0) * weight(lam0);
  const double window = std::max(8.0 / t, 0.25 * (std::abs(lam0) + 1.0));
  double lo = lam0;
  int quiet = 0;
  for (int i = 0; i < 400 && quiet < 2; ++i) {
    const double piece = adaptive_simpson(integrand, lo, lo + window, 1e-9, abs_floor);
    tail += piece;
    quiet = (piece <= 1e-9 * tail + abs_floor) ? quiet + 1 : 0;
    lo += window;
  }
  return tail;
}

struct ZTrustInput {
  Vector lam;
  double shift = 0.0;
  double p = 0.0;
  double trust_rel = 0.0;
  double n_listed = 0.0;
  double lam0 = 0.0;
  CountingMajorant maj;
};

bool z_tail_too_large(const ZTrustInput& in, double t) {
  const double budget = in.trust_rel * z_list_value(in.lam, in.shift, in.p, t);
  // 400 windows of floor-level slop stay far below the budget itself.
  const double tail =
      z_tail_bound(in.maj, in.n_listed, in.lam0, in.shift, in.p, t, 1e-5 * budget);
  return tail > budget;
}

}  // namespace

double weighted_partition_Z(const Spectrum& s, const CommutatorConstants& c, double p, double t,
                            double trust_rel) {
  c.validate();
  if (!(p >= 0.0) || !std::isfinite(p)) {
    throw PreconditionError("weighted partition requires p >= 0 (p = " + fmt(p) + ")");
  }
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw PreconditionError("weighted partition requires t > 0 (t = " + fmt(t) + ")");
  }
  const double shift = c.alpha / c.beta;
  if (p > 0.0) {
    const double low = s.values(0) + shift;
    if (!(low > 0.0)) {
      throw PreconditionError("weighted partition requires lambda_1 + alpha/beta > 0 (value " +
                              fmt(low) + ")");
    }
  }

  if (!spectrum_is_complete(s)) {
    const std::optional<CountingMajorant> maj = counting_majorant(s);
    if (!maj) {
      throw InternalInconsistencyError(
          "truncated spectrum without a counting majorant: " + s.label);
    }
    ZTrustInput in;
    in.lam = s.values;
    in.shift = shift;
    in.p = p;
    in.trust_rel = trust_rel;
    in.n_listed = static_cast<double>(s.size());
    in.lam0 = s.values(s.size() - 1);
    in.maj = *maj;
    if (z_tail_too_large(in, t)) {
      // Find the smallest t whose omitted tail stays inside the trust budget.
      double hi = t;
      int doublings = 0;
      while (doublings < 200 && z_tail_too_large(in, hi)) {
        hi *= 2.0;
        ++doublings;
      }
      double threshold = kInf;
      if (doublings < 200) {
        double lo_t = hi / 2.0;
        for (int i = 0; i < 80; ++i) {
          const double mid = std::sqrt(lo_t * hi);
          if (z_tail_too_large(in, mid)) {
            lo_t = mid;
          } else {
            hi = mid;
          }
        }
        threshold = hi;
      }
      std::ostringstream os;
      os << "omitted spectrum beyond lambda_" << s.size() << " = " << fmt(in.lam0)
         << " can contribute more than " << fmt(trust_rel)
         << " of Z at t = " << fmt(t) << "; smallest certified t is about " << fmt(threshold);
      throw TrustRegionError(os.str(), threshold);
    }
  }
  return z_list_value(s.values, shift, p, t);
}

MonotonicityReport check_Z_monotone(const Spectrum& s, const CommutatorConstants& c, double p,
                                    const Vector& t_grid, double tol_rel, double trust_rel) {
  c.validate();
  require_ascending_positive_grid(t_grid, "weighted-partition monotonicity");
  MonotonicityReport r;
  r.law = "zp-monotone";
  r.grid = t_grid;
  r.ratio_values.resize(t_grid.size());
  const double expo = 2.0 * c.gamma / c.beta - p;
  const double shift = c.alpha / c.beta;
  for (Eigen::Index i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid(i);
    r.ratio_values(i) =
        weighted_partition_Z(s, c, p, t, trust_rel) * std::pow(t, expo) * std::exp(-shift * t);
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i + 1 < t_grid.size(); ++i) {
    worst = std::max(worst, r.ratio_values(i + 1) - r.ratio_values(i));
  }
  r.max_violation = worst;
  r.tolerance = tol_rel * std::max(1.0, r.ratio_values.cwiseAbs().maxCoeff());
  r.verdict = r.max_violation <= r.tolerance;
  r.context.p = p;
  return r;
}

// ---- averaged ratio bound -----------------------------------------------

InequalityReport check_ratio_bound(const Spectrum& s, const CommutatorConstants& c,
                                   Eigen::Index n, Eigen::Index k, double tol_rel) {
  c.validate();
  require_count(s, n, "ratio bound");
  if (k < 1 || k > n) throw PreconditionError("ratio bound requires 1 <= k <= n");
  const double factor_nk = 1.0 + 2.0 * c.gamma / c.beta;
  if (static_cast<double>(n) < factor_nk * static_cast<double>(k) - 1e-12) {
    std::ostringstream os;
    os << "ratio bound requires n >= (1 + 2 gamma / beta) k = " << fmt(factor_nk) << " * " << k
       << " (n = " << n << ")";
    throw PreconditionError(os.str());
  }

  const double shift = c.alpha / c.beta;
  KahanSum sum;
  double mean_k = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    sum.add(s.values(j));
    if (j + 1 == k) mean_k = sum.value() / static_cast<double>(k);
  }
  const double mean_n = sum.value() / static_cast<double>(n);
  if (!(mean_k + shift > 0.0)) {
    throw PreconditionError("ratio bound requires the shifted mean of the first k eigenvalues "
                            "to be positive (value " +
                            fmt(mean_k + shift) + ")");
  }

  const double expo = c.beta / (2.0 * c.gamma);
  const double constant = 2.0 * std::pow(c.beta + c.gamma, 1.0 + expo) /
                          (c.beta * std::pow(c.beta + 2.0 * c.gamma, expo));
  const double lhs = (mean_n + shift) / (mean_k + shift);
  const double rhs =
      constant * std::pow(static_cast<double>(n) / static_cast<double>(k), expo);
  ReportContext ctx;
  ctx.n = static_cast<int>(n);
  ctx.k = static_cast<int>(k);
  return make_inequality_report("ratio-bound", lhs, rhs, tol_rel, ctx);
}

// ---- gap-corrected bounds -----------------------------------------------

GapQuantities gap_quantities(const Spectrum& s, Eigen::Index n, double p) {
  require_next_eigenvalue(s, n, "gap quantities");
  s.require_positive("gap quantities");
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw PreconditionError("gap quantities require p > 0 (p = " + fmt(p) + ")");
  }
  GapQuantities g;
  const double lam_n = s.lambda(n);
  g.gamma_n = (s.lambda(n + 1) - lam_n) / lam_n;
  if (g.gamma_n < 1.0) {
    g.lambda_cap = lam_n * std::pow((1.0 + (p - 1.0) * g.gamma_n) / (1.0 - g.gamma_n), 1.0 / p);
  } else {
    g.lambda_cap = kInf;
  }
  return g;
}

GapBoundReports check_pln_bounds(const Spectrum& s, const CommutatorConstants& c, Eigen::Index n,
                                 double p, double tol_rel) {
  require_dirichlet_constants(s, c, "gap-corrected bounds");
  if (!(p > 0.0 && p <= 3.0)) {
    throw PreconditionError("gap-corrected bounds require 0 < p <= 3 (p = " + fmt(p) + ")");
  }
  const GapQuantities gq = gap_quantities(s, n, p);
  const double g = gq.gamma_n;
  const double expo = c.beta / (2.0 * c.gamma);
  const double sp = moment_mean_S(s, c, n, p);
  const double gn = geometric_mean(s, n);
  const double lam_n = s.lambda(n);

  GapBoundReports out;
  out.lambda_cap = gq.lambda_cap;
  out.z_difference = lam_n * std::exp(0.5 * g);
  out.z_quotient = lam_n * std::pow(1.0 + 0.5 * p * g, 1.0 / p);
  // The closed forms evaluate the underlying bounds at these points, which
  // must sit inside [lambda_n, Lambda_n(p)] for the derivation to apply.
  const double cap_slack = gq.lambda_cap * (1.0 + 1e-12);
  if (!(out.z_difference <= cap_slack) || !(out.z_quotient <= cap_slack)) {
    std::ostringstream os;
    os << "gap-bound minimizers escaped [lambda_n, Lambda_n(p)]: z_diff = "
       << fmt(out.z_difference) << ", z_quot = " << fmt(out.z_quotient)
       << ", Lambda = " << fmt(gq.lambda_cap);
    throw InternalInconsistencyError(os.str());
  }

  ReportContext ctx;
  ctx.n = static_cast<int>(n);
  ctx.p = p;
  {
    const double lhs = sp - std::pow(std::exp(expo) * gn, p);
    const double rhs = std::pow(lam_n, p) * (1.0 + 0.5 * p * g - std::exp(0.5 * p * g));
    out.difference = make_inequality_report("pln-1", lhs, rhs, tol_rel, ctx);
  }
  {
    const double lhs = std::pow(sp, 1.0 / p) / (std::exp(expo) * gn);
    const double rhs = std::pow(1.0 + 0.5 * p * g, 1.0 / p) / std::exp(0.5 * g);
    out.quotient = make_inequality_report("pln-2", lhs, rhs, tol_rel, ctx);
  }
  return out;
}

InequalityReport check_dirichlet_refined(const Spectrum& s, const CommutatorConstants& c,
                                         Eigen::Index n, double p, double q, double tol_rel) {
  require_dirichlet_constants(s, c, "gap-refined moment comparison");
  require_admissible_exponents(p, q, "gap-refined moment comparison");
  const GapQuantities gq = gap_quantities(s, n, p);
  const double g = gq.gamma_n;
  const double lhs =
      std::pow(moment_mean_S(s, c, n, p), 1.0 / p) / std::pow(1.0 + 0.5 * p * g, 1.0 / p);
  const double rhs =
      std::pow(moment_mean_S(s, c, n, q), 1.0 / q) / std::pow(1.0 + 0.5 * q * g, 1.0 / q);
  ReportContext ctx;
  ctx.n = static_cast<int>(n);
  ctx.p = p;
  ctx.q = q;
  return make_inequality_report("dirichlet-refined", lhs, rhs, tol_rel, ctx);
}

// ---- averaged trace inequality ------------------------------------------

namespace {

// Sampled sign checks for f >= 0 and f' <= 0 on [lo, hi]; the concavity of
// f' has its own dedicated scan in require_concave_derivative.
void require_c2_sign_hypotheses(const FunctionSpec& f, double lo, double hi) {
  const int samples = 512;
  double max_f = 0.0, max_df = 0.0;
  double worst_f = kInf, worst_f_at = lo;
  double worst_df = -kInf, worst_df_at = lo;
  for (int i = 0; i <= samples; ++i) {
    const double x =
        (lo == hi) ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples);
    const double fx = f.eval(x);
    const double dx = f.deriv1(x);
    max_f = std::max(max_f, std::abs(fx));
    max_df = std::max(max_df, std::abs(dx));
    if (fx < worst_f) {
      worst_f = fx;
      worst_f_at = x;
    }
    if (dx > worst_df) {
      worst_df = dx;
      worst_df_at = x;
    }
    if (lo == hi) break;
  }
  if (worst_f < -1e-9 * std::max(max_f, 1.0)) {
    throw HypothesisError("hypothesis H1 violated for " + f.family_tag + ": f(" +
                              fmt(worst_f_at) + ") = " + fmt(worst_f) + " < 0",
                          worst_f_at, worst_f);
  }
  if (worst_df > 1e-9 * std::max(max_df, 1.0)) {
    throw HypothesisError("hypothesis H2 violated for " + f.family_tag + ": f'(" +
                              fmt(worst_df_at) + ") = " + fmt(worst_df) + " > 0",
                          worst_df_at, worst_df);
  }
}

}  // namespace

InequalityReport check_C2_general(const Spectrum& s, const CommutatorConstants& c, Eigen::Index n,
                                  const FunctionSpec& f, C2Mode mode, double tol_rel) {
  c.validate();

  if (mode == C2Mode::Partial) {
    require_next_eigenvalue(s, n, "averaged trace inequality");
    const double lo = s.lambda(1);
    const double hi = s.lambda(n);
    f.require_contains(lo, hi, "averaged trace inequality");
    require_c2_sign_hypotheses(f, lo, hi);
    if (lo < hi) require_concave_derivative(f, lo, hi);

    const double gap = s.lambda(n + 1) - hi;
    const double d1 = f.deriv1(hi);
    const double d2 = f.second_derivative(hi);
    const double boundary = d1 + d2 * gap;
    const double btol = 1e-9 * std::max({std::abs(d1), std::abs(d2 * gap), 1.0});
    if (boundary < -btol) {
      throw HypothesisError("boundary condition f'(lambda_n) + f''(lambda_n) (lambda_{n+1} - "
                            "lambda_n) >= 0 fails for " +
                                f.family_tag + ": value " + fmt(boundary),
                            hi, boundary);
    }

    KahanSum lhs_sum;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double lam = s.values(j);
      const double w = (c.beta * lam + c.alpha) / c.gamma;
      lhs_sum.add(f.eval(lam) + 0.5 * w * f.deriv1(lam));
    }
    const double lhs = lhs_sum.value() / static_cast<double>(n);
    const double rhs = f.eval(hi) + 0.5 * d1 * gap;
    ReportContext ctx;
    ctx.n = static_cast<int>(n);
    if (f.params.count("t")) ctx.t = f.params.at("t");
    if (f.params.count("z")) ctx.z = f.params.at("z");
    return make_inequality_report("c2", lhs, rhs, tol_rel, ctx);
  }

  // Full-trace mode: the sum over the whole listed spectrum must be <= 0.
  const Eigen::Index count = s.size();
  const double lo = s.lambda(1);
  const double hi = s.values(count - 1);
  f.require_contains(lo, hi, "averaged trace inequality (full trace)");
  require_c2_sign_hypotheses(f, lo, hi);
  if (lo < hi) require_concave_derivative(f, lo, hi);

  ReportContext ctx;
  ctx.n = static_cast<int>(count);
  std::string note = "full-trace";
  if (!spectrum_is_complete(s)) {
    if (f.kind != FamilyKind::Exp) {
      throw PreconditionError(
          "full-trace mode on a truncated spectrum is certified only for the exponential "
          "family; omitted terms of " +
          f.family_tag + " have no sign certificate");
    }
    const double t = f.params.at("t");
    const double denom = c.beta * hi + c.alpha;
    if (!(denom > 0.0)) {
      throw TrustRegionError("tail certificate needs beta lambda_N + alpha > 0 (value " +
                                 fmt(denom) + ")",
                             kInf);
    }
    const double t_min = 2.0 * c.gamma / denom;
    if (t < t_min * (1.0 - 1e-12)) {
      std::ostringstream os;
      os << "omitted terms are certified nonpositive only for t >= 2 gamma / (beta lambda_N + "
            "alpha) = "
         << fmt(t_min) << " (t = " << fmt(t) << ")";
      throw TrustRegionError(os.str(), t_min);
    }
    note += "; omitted terms certified nonpositive, listed sum is an upper bound";
    ctx.t = t;
  }

  KahanSum sum;
  for (Eigen::Index j = 0; j < count; ++j) {
    const double lam = s.values(j);
    const double w = (c.beta * lam + c.alpha) / c.gamma;
    sum.add(f.eval(lam) + 0.5 * w * f.deriv1(lam));
  }
  InequalityReport r = make_inequality_report("c2", sum.value(), 0.0, tol_rel, ctx);
  if (f.params.count("t") && !r.context.t) r.context.t = f.params.at("t");
  r.note = note;
  return r;
}

}  // namespace specbound
