#include "specbound/commutators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace specbound {

namespace {

std::vector<char> index_mask(const std::vector<Eigen::Index>& J, Eigen::Index order,
                             const char* op) {
  if (J.empty()) throw PreconditionError(std::string(op) + " requires a nonempty index set");
  std::vector<char> in(static_cast<std::size_t>(order), 0);
  for (Eigen::Index j : J) {
    if (j < 0 || j >= order) {
      std::ostringstream os;
      os << op << ": index " << j << " outside [0, " << order << ")";
      throw PreconditionError(os.str());
    }
    if (in[static_cast<std::size_t>(j)]) {
      std::ostringstream os;
      os << op << ": index " << j << " listed twice";
      throw PreconditionError(os.str());
    }
    in[static_cast<std::size_t>(j)] = 1;
  }
  return in;
}

double max_abs_eigenvalue(const Vector& lambda) {
  return std::max(std::abs(lambda(0)), std::abs(lambda(lambda.size() - 1)));
}

// Effective spectral spread, floored so degenerate spectra still give a
// usable scale.
double effective_spread(const Vector& lambda) {
  const double spread = lambda(lambda.size() - 1) - lambda(0);
  const double eps = std::numeric_limits<double>::epsilon();
  return std::max({spread, eps * max_abs_eigenvalue(lambda), 1e-300});
}

}  // namespace

CommutatorBundle commutator_bundle(const MatrixModel& model) {
  const EigenDecomposition& dec = model.decomposition();
  const Matrix& G = model.G();
  const Matrix& V = dec.eigenvectors;
  const Vector& lambda = dec.eigenvalues;
  const Eigen::Index n = G.rows();

  CommutatorBundle b;
  b.first = model.H() * G - G * model.H();
  b.second = G * b.first - b.first * G;
  b.matrix_elements = V.transpose() * G * V;

  const Matrix first_cols = b.first * V;
  b.hg_norm_sq = first_cols.colwise().squaredNorm().transpose();
  const Matrix second_cols = b.second * V;
  b.second_diag = V.cwiseProduct(second_cols).colwise().sum().transpose();

  const double g_scale = b.matrix_elements.cwiseAbs().maxCoeff();
  const double asym = (b.matrix_elements - b.matrix_elements.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(g_scale, 1e-300)) {
    std::ostringstream os;
    os << "eigenbasis matrix elements of G lost symmetry: max |Gjk - Gkj| = " << asym;
    throw InternalInconsistencyError(os.str());
  }

  // (V^T [H,G] V)_{jk} must equal (lambda_j - lambda_k) Gjk.
  const Matrix first_elems = V.transpose() * first_cols;
  const Matrix expected =
      (lambda.replicate(1, n) - lambda.transpose().replicate(n, 1)).cwiseProduct(b.matrix_elements);
  const double mismatch = (first_elems - expected).cwiseAbs().maxCoeff();
  const double scale = std::max(g_scale * std::max(max_abs_eigenvalue(lambda), 1.0), 1.0);
  if (mismatch > 1e-9 * scale) {
    std::ostringstream os;
    os << "first-commutator matrix elements disagree with (lambda_j - lambda_k) Gjk: max error "
       << mismatch << " against scale " << scale;
    throw InternalInconsistencyError(os.str());
  }
  return b;
}

IdentityResiduals trk_residual(const MatrixModel& model) {
  const CommutatorBundle b = commutator_bundle(model);
  const Vector& lambda = model.decomposition().eigenvalues;
  const Eigen::Index n = lambda.size();

  IdentityResiduals out;
  out.residuals.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    KahanSum sum;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double g = b.matrix_elements(j, k);
      sum.add((lambda(k) - lambda(j)) * g * g);
    }
    out.residuals(j) = 0.5 * b.second_diag(j) - sum.value();
  }
  out.scale = std::max(b.matrix_elements.squaredNorm() * max_abs_eigenvalue(lambda), 1.0);
  out.max_abs = out.residuals.cwiseAbs().maxCoeff();
  return out;
}

QuadraticIdentityResult quadratic_identity_residual(const MatrixModel& model,
                                                    const std::vector<Eigen::Index>& J,
                                                    double z) {
  if (!std::isfinite(z)) throw PreconditionError("quadratic identity requires a finite shift z");
  const CommutatorBundle b = commutator_bundle(model);
  const Vector& lambda = model.decomposition().eigenvalues;
  const Eigen::Index n = lambda.size();
  const std::vector<char> in_J = index_mask(J, n, "quadratic identity");

  KahanSum lhs;
  for (Eigen::Index j : J) {
    const double dz = z - lambda(j);
    lhs.add(dz * dz * b.second_diag(j));
    lhs.add(-2.0 * dz * b.hg_norm_sq(j));
  }

  KahanSum rhs;
  for (Eigen::Index j : J) {
    const double dzj = z - lambda(j);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (in_J[static_cast<std::size_t>(k)]) continue;
      const double g = b.matrix_elements(j, k);
      rhs.add(2.0 * dzj * (z - lambda(k)) * (lambda(k) - lambda(j)) * g * g);
    }
  }

  QuadraticIdentityResult out;
  out.lhs = lhs.value();
  out.rhs = rhs.value();
  out.residual = out.lhs - out.rhs;
  const double dz_max =
      std::max(std::abs(z - lambda(0)), std::abs(z - lambda(n - 1)));
  out.scale = std::max(
      b.matrix_elements.squaredNorm() * effective_spread(lambda) * std::max(dz_max, 1.0) *
          std::max(dz_max, 1.0),
      1.0);
  return out;
}

InequalityReport check_T1(const MatrixModel& model, const std::vector<Eigen::Index>& J,
                          const FunctionSpec& f, double tol_rel) {
  const CommutatorBundle b = commutator_bundle(model);
  const Vector& lambda = model.decomposition().eigenvalues;
  const Eigen::Index n = lambda.size();
  const std::vector<char> in_J = index_mask(J, n, "trace inequality");

  const double lo = lambda(0);
  const double hi = lambda(n - 1);
  f.require_contains(lo, hi, "trace inequality");
  require_concave_derivative(f, lo, hi);

  KahanSum lhs;
  for (Eigen::Index j : J) {
    lhs.add(0.5 * f.deriv1(lambda(j)) * b.hg_norm_sq(j));
    lhs.add(0.5 * f.eval(lambda(j)) * b.second_diag(j));
  }

  KahanSum rhs;
  for (Eigen::Index j : J) {
    const double fj = f.eval(lambda(j));
    const double dfj = f.deriv1(lambda(j));
    for (Eigen::Index k = 0; k < n; ++k) {
      if (in_J[static_cast<std::size_t>(k)]) continue;
      const double gap = lambda(k) - lambda(j);
      const double g = b.matrix_elements(j, k);
      rhs.add((fj + 0.5 * dfj * gap) * gap * g * g);
    }
  }

  // Problem scale: Frobenius mass of G times the spectral spread times the
  // size of f and f' over the hull (sampled at the eigenvalues and a coarse
  // uniform grid).
  double max_f = 0.0, max_df = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    max_f = std::max(max_f, std::abs(f.eval(lambda(j))));
    max_df = std::max(max_df, std::abs(f.deriv1(lambda(j))));
  }
  for (int i = 0; i <= 64; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / 64.0;
    max_f = std::max(max_f, std::abs(f.eval(x)));
    max_df = std::max(max_df, std::abs(f.deriv1(x)));
  }
  const double spread = effective_spread(lambda);
  const double scale =
      std::max(b.matrix_elements.squaredNorm() * spread * std::max(max_f, spread * max_df), 1.0);

  InequalityReport r;
  r.law = "t1";
  r.lhs = lhs.value();
  r.rhs = rhs.value();
  r.slack = r.rhs - r.lhs;
  r.tolerance = tol_rel * scale;
  r.verdict = r.slack >= -r.tolerance;
  r.context.n = static_cast<int>(J.size());
  if (f.params.count("t")) r.context.t = f.params.at("t");
  if (f.params.count("z")) r.context.z = f.params.at("z");
  if (f.params.count("p")) r.context.p = f.params.at("p");
  if (f.params.count("q")) r.context.q = f.params.at("q");
  return r;
}

}  // namespace specbound
