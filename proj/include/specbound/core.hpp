// Core value types for spectral data and commutator constants.
//
// A Spectrum is a nondecreasing list of eigenvalues lambda_1 <= ... <= lambda_N,
// optionally tagged with the generating model's dimension d, volume V and the
// commutator constants (alpha, beta, gamma) that make the trace inequalities
// meaningful: gamma = <(1/2)[G,[H,G]]phi, phi> and -[H,G]^2 <= beta H + alpha.
//
// Shifting H -> H + eta moves every eigenvalue by eta and transforms
// alpha -> alpha - beta*eta while beta and gamma are untouched.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace specbound {

using Scalar = double;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixRef = Eigen::Ref<const Matrix>;
using VectorRef = Eigen::Ref<const Vector>;

// ── Errors ──────────────────────────────────────────────────────────────

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Precondition / parameter-range rejection.
struct PreconditionError : Error {
  using Error::Error;
};

// Input larger than the supported envelope.
struct CapacityError : Error {
  using Error::Error;
};

// A required function hypothesis failed; carries a witness point.
struct HypothesisError : PreconditionError {
  HypothesisError(const std::string& msg, double witness_lambda, double witness_value)
      : PreconditionError(msg), lambda(witness_lambda), value(witness_value) {}
  double lambda = 0.0;
  double value = 0.0;
};

// Requested evaluation point cannot be certified against truncation error.
struct TrustRegionError : PreconditionError {
  TrustRegionError(const std::string& msg, double threshold_in)
      : PreconditionError(msg), threshold(threshold_in) {}
  double threshold = 0.0;  // nearest admissible parameter value
};

// Two internally computed routes disagree; indicates a bug, not bad input.
struct InternalInconsistencyError : Error {
  using Error::Error;
};

// ── Compensated accumulation ────────────────────────────────────────────

// Neumaier-compensated running sum; used wherever eigenbasis sums are
// accumulated so identity residuals sit at roundoff scale.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// ── Types ───────────────────────────────────────────────────────────────

struct CommutatorConstants {
  double alpha = 0.0;
  double beta = 0.0;   // > 0
  double gamma = 0.0;  // > 0

  void validate() const {
    if (!(beta > 0.0)) throw PreconditionError("commutator constants require beta > 0");
    if (!(gamma > 0.0)) throw PreconditionError("commutator constants require gamma > 0");
  }
};

struct Spectrum {
  Vector values;                                   // nondecreasing
  std::optional<int> dimension;
  std::optional<double> volume;
  std::optional<CommutatorConstants> constants;
  std::string label;

  Eigen::Index size() const { return values.size(); }

  // 1-based accessor matching lambda_n notation.
  double lambda(Eigen::Index n) const {
    if (n < 1 || n > values.size()) {
      throw PreconditionError("eigenvalue index out of range: lambda_" + std::to_string(n) +
                              " of " + std::to_string(values.size()));
    }
    return values[n - 1];
  }

  void validate() const;

  // Throws unless every eigenvalue is strictly positive (required by the
  // moment, geometric-mean and gap operations).
  void require_positive(const char* op) const;
};

Spectrum make_spectrum(Vector values, std::string label = {},
                       std::optional<int> dimension = {},
                       std::optional<double> volume = {},
                       std::optional<CommutatorConstants> constants = {});

struct EigenDecomposition {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // orthonormal columns, column j pairs with eigenvalues[j]
};

// ── Operations ──────────────────────────────────────────────────────────

struct EigenOptions {
  Eigen::Index max_order = 4000;
  double symmetry_rel_tol = 1e-12;
};

// Full symmetric eigendecomposition with deterministic output: ascending
// eigenvalues, each eigenvector scaled so its first component of nonnegligible
// magnitude is positive. Rejects non-square or asymmetric input (tolerance
// symmetry_rel_tol * max|M|, the maximal asymmetry is reported) and orders
// beyond max_order. Exact tridiagonal input takes the tridiagonal fast path.
EigenDecomposition solve_symmetric_eigen(MatrixRef M, const EigenOptions& opts = {});

// H -> H + eta: eigenvalues shift by eta, alpha -> alpha - beta*eta.
std::pair<Spectrum, CommutatorConstants> shift_spectrum(const Spectrum& s,
                                                        const CommutatorConstants& c,
                                                        double eta);

// Shifts a spectrum with nonpositive bottom into the positive axis, placing
// lambda_1 at half the first gap (or at 1 when the gap degenerates). Returns
// the shifted data and the eta used; eta = 0 when already positive.
struct NormalizedSpectrum {
  Spectrum spectrum;
  CommutatorConstants constants;
  double eta = 0.0;
};
NormalizedSpectrum normalize_to_positive(const Spectrum& s, const CommutatorConstants& c);

}  // namespace specbound
