// Model builders. Analytic spectra:
//
//   box:        lambda = pi^2 * sum_i (m_i / L_i)^2,  m_i >= 1, d <= 3,
//               constants (0, 4/d, 1), volume = prod L_i
//   oscillator: lambda = 2|n| + d over multi-indices n >= 0, constants (0, 4, 1)
//
// Finite-difference matrix pairs (H, G) with G = multiplication by the first
// coordinate: Dirichlet Laplacian in 1-D/2-D and a 1-D Schrodinger operator
// -Delta + V whose commutator constants stay caller-supplied data.
//
// Counting majorants certify truncation tails for the analytic spectra:
//   box:        N(l) <= V l^{d/2} / pi^d          (per-axis count)
//   oscillator: N(l) <= ((l + d)/2)^d / d!        (simplex count)

#pragma once

#include "specbound/core.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace specbound {

class MatrixModel {
 public:
  // Validates symmetry of both operators (1e-12 relative, max asymmetry
  // reported) and equal orders.
  MatrixModel(Matrix H, Matrix G, std::optional<CommutatorConstants> constants = {},
              std::string label = {}, std::optional<double> mesh = {},
              std::optional<int> dimension = {}, std::optional<double> volume = {});

  const Matrix& H() const { return H_; }
  const Matrix& G() const { return G_; }
  const std::optional<CommutatorConstants>& constants() const { return constants_; }
  const std::string& label() const { return label_; }
  std::optional<double> mesh() const { return mesh_; }
  std::optional<int> dimension() const { return dimension_; }
  std::optional<double> volume() const { return volume_; }
  Eigen::Index order() const { return H_.rows(); }

  // Lazily computed and cached; concurrent first access performs exactly one
  // fill. Copies of the model share the cache.
  const EigenDecomposition& decomposition() const;

 private:
  struct Cache;
  Matrix H_;
  Matrix G_;
  std::optional<CommutatorConstants> constants_;
  std::string label_;
  std::optional<double> mesh_;
  std::optional<int> dimension_;
  std::optional<double> volume_;
  std::shared_ptr<Cache> cache_;
};

// Complete spectrum of the model as a Spectrum carrying the model's metadata.
Spectrum spectrum_of(const MatrixModel& model);

// ── Analytic spectra ────────────────────────────────────────────────────

// Lowest `count` Dirichlet eigenvalues of the box with the given side lengths
// (1 <= d <= 3). Enumerates every lattice point below a safe threshold, then
// sorts and truncates, so ties across axes are never split incorrectly.
Spectrum box_spectrum(const std::vector<double>& sides, Eigen::Index count);

// Lowest `count` eigenvalues of the isotropic oscillator in dimension d with
// level 2k + d and multiplicity C(k + d - 1, d - 1).
Spectrum oscillator_spectrum(int d, Eigen::Index count);

// ── Finite-difference models ────────────────────────────────────────────

// Dirichlet Laplacian on a product of intervals, second-order stencil.
// sides/grid must agree in length (1 or 2 entries); G multiplies by the first
// coordinate. Constants (0, 4/d, 1) and mesh = max grid spacing are attached.
MatrixModel discretize_dirichlet(const std::vector<double>& sides,
                                 const std::vector<int>& grid);

// 1-D Schrodinger -u'' + V u on [a, b], Dirichlet ends. potential holds V at
// the n interior nodes a + i h, i = 1..n. No constants are attached: callers
// must supply them (they depend on the potential).
MatrixModel discretize_schrodinger_1d(const Vector& potential, double a, double b);

// Discretization allowance for continuum statements checked on mesh data:
// the 1-D closed form <[G,[H,G]]phi_k, phi_k> = 2 - h^2 lambda_k calibrates
// C = 1 in delta(h) = C h^2 lambda.
double mesh_allowance(double h, double lambda);

// ── Truncation majorants ────────────────────────────────────────────────

enum class SpectrumKind { Box, Oscillator, FdDirichlet, FdSchrodinger, Custom };

// First whitespace-delimited token of the label decides the kind.
SpectrumKind spectrum_kind(const Spectrum& s);

// A list labeled box/oscillator is a prefix of an infinite spectrum; anything
// else is taken as the complete spectrum of a finite operator.
bool spectrum_is_complete(const Spectrum& s);

struct CountingMajorant {
  double A = 0.0;
  double B = 0.0;
  double s = 0.0;
  double operator()(double lambda) const;  // upper bound on N(lambda)
};

// Majorant for the infinite kinds; nullopt when the label is unknown or the
// needed metadata (dimension, volume) is absent.
std::optional<CountingMajorant> counting_majorant(const Spectrum& s);

}  // namespace specbound
