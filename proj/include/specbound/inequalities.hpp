// Spectral inequalities driven by a nondecreasing eigenvalue list and
// commutator constants (alpha, beta, gamma). The recurring weight is
// w_j = (beta lambda_j + alpha) / gamma and the central quantity is the
// corrected moment mean
//
//   S_n(r) = (1 + beta r / 2 gamma) * mean_{j<=n} lambda_j^r
//            + (alpha r / 2 gamma) * mean_{j<=n} lambda_j^{r-1},
//
// which satisfies S_n(p)^{1/p} <= S_n(q)^{1/q} for admissible exponent pairs
// (p > q > 0, q <= min(1, p), p + q <= 3) and is capped below by a geometric
// mean bound. The remaining checks cover the quadratic cap on lambda_{n+1},
// Riesz-mean and weighted-partition monotonicity in z and t, an averaged
// ratio bound between mean eigenvalues, gap-corrected variants of the moment
// comparison, and the averaged trace inequality (C2) behind all of them.
//
// Spectra from analytic generators are finite windows of infinite spectra;
// checks whose value depends on omitted eigenvalues guard the truncation
// either with a counting-function majorant (weighted partitions) or by
// restricting the evaluation window (Riesz means), and throw
// TrustRegionError outside the certified range.

#pragma once

#include "specbound/core.hpp"
#include "specbound/functions.hpp"
#include "specbound/report.hpp"

#include <optional>

namespace specbound {

// ---- moment means -------------------------------------------------------

// S_n(r) as above. Requires 1 <= n <= size and r > 0; all eigenvalues must be
// positive when alpha != 0 or r < 1 (negative powers / inverse moments).
double moment_mean_S(const Spectrum& s, const CommutatorConstants& c, Eigen::Index n, double r);

// S_1(r) .. S_{n_max}(r) in one pass.
Vector moment_mean_prefix(const Spectrum& s, const CommutatorConstants& c, Eigen::Index n_max,
                          double r);

// Geometric mean of the first n eigenvalues (requires positivity).
double geometric_mean(const Spectrum& s, Eigen::Index n);

// S_n(p)^{1/p} <= S_n(q)^{1/q}; exponents validated against the admissible
// region before computing.
InequalityReport check_moment_order(const Spectrum& s, const CommutatorConstants& c,
                                    Eigen::Index n, double p, double q, double tol_rel = 1e-9);

// S_n(p)^{1/p} <= e^{beta/2gamma} G_n exp((alpha/2gamma) mean(1/lambda)) for
// 0 < p <= 3, with G_n the geometric mean.
InequalityReport check_geometric_bound(const Spectrum& s, const CommutatorConstants& c,
                                       Eigen::Index n, double p, double tol_rel = 1e-9);

// ---- quadratic cap on the next eigenvalue -------------------------------

// Largest root of P(z) = sum_{j<=n} [(z - lambda_j)^2 - w_j (z - lambda_j)];
// lambda_{n+1} never exceeds it. A negative discriminant cannot occur for
// constants that actually belong to a commutator pair and is reported as an
// internal inconsistency.
double yang_type_cap(const Spectrum& s, const CommutatorConstants& c, Eigen::Index n);

// lambda_{n+1} <= yang_type_cap (requires n + 1 <= size).
InequalityReport check_yang_cap(const Spectrum& s, const CommutatorConstants& c, Eigen::Index n,
                                double tol_rel = 1e-9);

// ---- Riesz means --------------------------------------------------------

// R_rho(z) = sum_j max(z - lambda_j, 0)^rho. rho >= 2 is the verified range;
// 1 < rho < 2 is admitted only with allow_low_rho (reports carry a note);
// rho <= 1 is rejected.
double riesz_mean(const Spectrum& s, double z, double rho, bool allow_low_rho = false);

// z -> R_rho(z) / z^(rho + 2 gamma / beta) must be nondecreasing. The grid
// must be strictly increasing and positive; for truncated spectra every grid
// point must stay at or below the largest listed eigenvalue.
MonotonicityReport check_riesz_monotone(const Spectrum& s, const CommutatorConstants& c,
                                        double rho, const Vector& z_grid, double tol_rel = 1e-9,
                                        bool allow_low_rho = false);

// ---- weighted partition function ----------------------------------------

// Z_p(t) = sum_j (lambda_j + alpha/beta)^{-p} e^{-t lambda_j}, p >= 0, t > 0.
// Truncated spectra are certified against a counting majorant: the omitted
// tail must contribute at most trust_rel * Z or a TrustRegionError reports
// the smallest trustworthy t.
double weighted_partition_Z(const Spectrum& s, const CommutatorConstants& c, double p, double t,
                            double trust_rel = 1e-10);

// t -> Z_p(t) t^{2 gamma / beta - p} e^{-(alpha/beta) t} must be
// nonincreasing; the report stores the composite values on the grid.
MonotonicityReport check_Z_monotone(const Spectrum& s, const CommutatorConstants& c, double p,
                                    const Vector& t_grid, double tol_rel = 1e-9,
                                    double trust_rel = 1e-10);

// ---- averaged ratio bound -----------------------------------------------

// (mean_n + alpha/beta) / (mean_k + alpha/beta)
//   <= (2 (beta + gamma)^{1 + beta/2gamma} / (beta (beta + 2gamma)^{beta/2gamma}))
//      (n/k)^{beta/2gamma},
// valid once n >= (1 + 2 gamma / beta) k.
InequalityReport check_ratio_bound(const Spectrum& s, const CommutatorConstants& c,
                                   Eigen::Index n, Eigen::Index k, double tol_rel = 1e-9);

// ---- gap-corrected bounds -----------------------------------------------

struct GapQuantities {
  double gamma_n = 0.0;      // (lambda_{n+1} - lambda_n) / lambda_n
  double lambda_cap = 0.0;   // Lambda_n(p); +inf when gamma_n >= 1
};

// Requires positivity and n + 1 <= size.
GapQuantities gap_quantities(const Spectrum& s, Eigen::Index n, double p);

struct GapBoundReports {
  InequalityReport difference;   // S_n(p) - (e^c G_n)^p <= lambda_n^p (1 + p g/2 - e^{p g/2})
  InequalityReport quotient;     // S_n(p)^{1/p} / (e^c G_n) <= (1 + p g/2)^{1/p} / e^{g/2}
  double z_difference = 0.0;     // minimizer behind the difference bound
  double z_quotient = 0.0;       // minimizer behind the quotient bound
  double lambda_cap = 0.0;
};

// Both gap bounds at once (c = beta/2gamma, g = gamma_n). Requires
// Dirichlet-type constants (alpha = 0; beta = 4/d and gamma = 1 when the
// spectrum carries a dimension) and 0 < p <= 3. The closed forms rest on the
// minimizers staying at or below Lambda_n(p); that placement is re-verified
// numerically and a failure is an internal inconsistency.
GapBoundReports check_pln_bounds(const Spectrum& s, const CommutatorConstants& c, Eigen::Index n,
                                 double p, double tol_rel = 1e-9);

// Gap-refined moment comparison:
//   S_n(p)^{1/p} / (1 + (p/2) gamma_n)^{1/p}
//     <= S_n(q)^{1/q} / (1 + (q/2) gamma_n)^{1/q}.
// Same constants precondition as check_pln_bounds; exponent admissibility as
// in check_moment_order.
InequalityReport check_dirichlet_refined(const Spectrum& s, const CommutatorConstants& c,
                                         Eigen::Index n, double p, double q,
                                         double tol_rel = 1e-9);

// ---- averaged trace inequality ------------------------------------------

enum class C2Mode {
  Partial,    // mean over j <= n against f at lambda_n and the gap to lambda_{n+1}
  FullTrace,  // whole-spectrum sum <= 0
};

// Partial mode checks
//   mean_{j<=n} [ f(lambda_j) + (w_j / 2) f'(lambda_j) ]
//     <= f(lambda_n) + 1/2 f'(lambda_n) (lambda_{n+1} - lambda_n)
// after verifying f >= 0, f' <= 0, midpoint-concavity of f' on the hull, and
// the boundary condition f'(lambda_n) + f''(lambda_n)(lambda_{n+1} -
// lambda_n) >= 0. Full-trace mode checks sum_j [...] <= 0 over the whole
// list; for truncated spectra that is certified only for the exponential
// family once every omitted term is provably nonpositive (t >= 2 gamma /
// (beta lambda_N + alpha)), otherwise a TrustRegionError reports the
// threshold.
InequalityReport check_C2_general(const Spectrum& s, const CommutatorConstants& c, Eigen::Index n,
                                  const FunctionSpec& f, C2Mode mode, double tol_rel = 1e-9);

}  // namespace specbound
