// Commutator algebra for a symmetric pair (H, G) and the trace identities
// built from it. With eigenpairs H phi_j = lambda_j phi_j the key quantities
// per state are
//
//   Gjk      = <G phi_j, phi_k>                        (symmetric),
//   hg2_j    = ||[H, G] phi_j||^2 = sum_k (lambda_k - lambda_j)^2 Gjk^2,
//   q_j      = <[G, [H, G]] phi_j, phi_j> = 2 sum_k (lambda_k - lambda_j) Gjk^2.
//
// trk_residual measures the second line (the sum-rule identity), the
// quadratic identity couples a chosen index set J against its complement at a
// shift z, and check_T1 evaluates the trace inequality
//
//   1/2 sum_{j in J} [ f'(lambda_j) hg2_j + f(lambda_j) q_j ]
//     <= sum_{j in J} sum_{k not in J}
//          (f(lambda_j) + 1/2 f'(lambda_j)(lambda_k - lambda_j))
//          (lambda_k - lambda_j) Gjk^2
//
// for any f with concave derivative on the spectral hull, with equality for
// quadratic f. Index sets are 0-based eigenpair indices.

#pragma once

#include "specbound/core.hpp"
#include "specbound/functions.hpp"
#include "specbound/models.hpp"
#include "specbound/report.hpp"

#include <vector>

namespace specbound {

struct CommutatorBundle {
  Matrix first;            // [H, G]
  Matrix second;           // [G, [H, G]]
  Matrix matrix_elements;  // Gjk in the eigenbasis of H
  Vector hg_norm_sq;       // per-state ||[H, G] phi_j||^2
  Vector second_diag;      // per-state <[G, [H, G]] phi_j, phi_j>
};

// Forms the bundle and cross-checks it against the eigenbasis: Gjk must come
// out symmetric and the first-commutator elements must match
// (lambda_j - lambda_k) Gjk. Failures throw InternalInconsistencyError.
CommutatorBundle commutator_bundle(const MatrixModel& model);

struct IdentityResiduals {
  Vector residuals;
  double scale = 0.0;         // ||G||_F^2 * max |lambda|, floored at 1
  double max_abs = 0.0;
};

// residual_j = 1/2 q_j - sum_k (lambda_k - lambda_j) Gjk^2; exactly zero in
// exact arithmetic for every symmetric pair.
IdentityResiduals trk_residual(const MatrixModel& model);

struct QuadraticIdentityResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;      // lhs - rhs
  double scale = 0.0;
};

// sum_{j in J} [ (z - lambda_j)^2 q_j - 2 (z - lambda_j) hg2_j ]
//   = 2 sum_{j in J} sum_{k not in J}
//       (z - lambda_j)(z - lambda_k)(lambda_k - lambda_j) Gjk^2.
// When J covers every index the left side collapses to zero on its own.
QuadraticIdentityResult quadratic_identity_residual(const MatrixModel& model,
                                                    const std::vector<Eigen::Index>& J,
                                                    double z);

// Trace inequality for f with concave derivative (checked up front; a failing
// triple is reported in the HypothesisError). Slack carries the reporting
// convention of report.hpp but the tolerance is tol_rel times a problem scale
// ||G||_F^2 * spread * max(max|f|, spread * max|f'|) rather than the default.
InequalityReport check_T1(const MatrixModel& model, const std::vector<Eigen::Index>& J,
                          const FunctionSpec& f, double tol_rel = 1e-9);

}  // namespace specbound
