#include "specbound/core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace specbound {

void Spectrum::validate() const {
  if (values.size() == 0) throw PreconditionError("spectrum must contain at least one eigenvalue");
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw PreconditionError("spectrum contains a non-finite eigenvalue at position " +
                              std::to_string(i + 1));
    }
    if (i > 0 && values[i] < values[i - 1]) {
      std::ostringstream os;
      os << "spectrum is not nondecreasing: lambda_" << i << " = " << values[i - 1]
         << " > lambda_" << (i + 1) << " = " << values[i];
      throw PreconditionError(os.str());
    }
  }
  if (constants) constants->validate();
  if (dimension && *dimension < 1) throw PreconditionError("spectrum dimension must be >= 1");
  if (volume && !(*volume > 0.0)) throw PreconditionError("spectrum volume must be > 0");
}

void Spectrum::require_positive(const char* op) const {
  if (values.size() > 0 && values[0] <= 0.0) {
    std::ostringstream os;
    os << op << " requires strictly positive eigenvalues; lambda_1 = " << values[0]
       << " (apply normalize_to_positive first)";
    throw PreconditionError(os.str());
  }
}

Spectrum make_spectrum(Vector values, std::string label, std::optional<int> dimension,
                       std::optional<double> volume,
                       std::optional<CommutatorConstants> constants) {
  Spectrum s;
  s.values = std::move(values);
  s.label = std::move(label);
  s.dimension = dimension;
  s.volume = volume;
  s.constants = constants;
  s.validate();
  return s;
}

namespace {

bool is_tridiagonal(MatrixRef M) {
  const Eigen::Index n = M.rows();
  if (n < 3) return false;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 2; i < n; ++i) {
      if (M(i, j) != 0.0 || M(j, i) != 0.0) return false;
    }
  }
  return true;
}

void apply_sign_convention(Matrix& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    auto col = vectors.col(j);
    const double thresh = 1e-12 * col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) > thresh) {
        if (col[i] < 0.0) col = -col;
        break;
      }
    }
  }
}

}  // namespace

EigenDecomposition solve_symmetric_eigen(MatrixRef M, const EigenOptions& opts) {
  if (M.rows() != M.cols()) {
    throw PreconditionError("solve_symmetric_eigen requires a square matrix, got " +
                            std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
  }
  const Eigen::Index n = M.rows();
  if (n == 0) throw PreconditionError("solve_symmetric_eigen requires a nonempty matrix");
  if (n > opts.max_order) {
    throw CapacityError("matrix order " + std::to_string(n) + " exceeds the supported cap of " +
                        std::to_string(opts.max_order));
  }

  const double scale = M.cwiseAbs().maxCoeff();
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > opts.symmetry_rel_tol * scale) {
    std::ostringstream os;
    os << "matrix is not symmetric: max |M - M^T| = " << asym << " exceeds "
       << opts.symmetry_rel_tol << " * max|M| = " << opts.symmetry_rel_tol * scale;
    throw PreconditionError(os.str());
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver;
  if (is_tridiagonal(M)) {
    solver.computeFromTridiagonal(M.diagonal(), M.diagonal(-1),
                                  Eigen::ComputeEigenvectors);
  } else {
    solver.compute(M);
  }
  if (solver.info() != Eigen::Success) {
    throw InternalInconsistencyError("symmetric eigensolver failed to converge");
  }

  EigenDecomposition d;
  d.eigenvalues = solver.eigenvalues();
  d.eigenvectors = solver.eigenvectors();
  apply_sign_convention(d.eigenvectors);
  return d;
}

std::pair<Spectrum, CommutatorConstants> shift_spectrum(const Spectrum& s,
                                                        const CommutatorConstants& c,
                                                        double eta) {
  s.validate();
  c.validate();
  Spectrum out = s;
  out.values.array() += eta;
  CommutatorConstants cc = c;
  cc.alpha = c.alpha - c.beta * eta;
  out.constants = cc;
  return {std::move(out), cc};
}

NormalizedSpectrum normalize_to_positive(const Spectrum& s, const CommutatorConstants& c) {
  s.validate();
  c.validate();
  double eta = 0.0;
  if (s.values[0] <= 0.0) {
    const double gap = s.size() >= 2 ? s.values[1] - s.values[0] : 0.0;
    const double target = gap > 0.0 ? 0.5 * gap : 1.0;
    eta = target - s.values[0];
  }
  auto [shifted, cc] = shift_spectrum(s, c, eta);
  return NormalizedSpectrum{std::move(shifted), cc, eta};
}

}  // namespace specbound
