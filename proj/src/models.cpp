#include "specbound/models.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace specbound {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Eigen::Index kEnumerationCap = 50'000'000;

void require_symmetric(const Matrix& M, const char* name) {
  const double scale = M.cwiseAbs().maxCoeff();
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    std::ostringstream os;
    os << "MatrixModel: " << name << " is not symmetric, max |M - M^T| = " << asym
       << " exceeds 1e-12 * max|M| = " << 1e-12 * scale;
    throw PreconditionError(os.str());
  }
}

}  // namespace

struct MatrixModel::Cache {
  std::once_flag flag;
  EigenDecomposition decomposition;
};

MatrixModel::MatrixModel(Matrix H, Matrix G, std::optional<CommutatorConstants> constants,
                         std::string label, std::optional<double> mesh,
                         std::optional<int> dimension, std::optional<double> volume)
    : H_(std::move(H)),
      G_(std::move(G)),
      constants_(constants),
      label_(std::move(label)),
      mesh_(mesh),
      dimension_(dimension),
      volume_(volume),
      cache_(std::make_shared<Cache>()) {
  if (H_.rows() == 0 || H_.rows() != H_.cols()) {
    throw PreconditionError("MatrixModel: H must be square and nonempty");
  }
  if (G_.rows() != H_.rows() || G_.cols() != H_.cols()) {
    throw PreconditionError("MatrixModel: G must match the order of H, got " +
                            std::to_string(G_.rows()) + "x" + std::to_string(G_.cols()) +
                            " vs " + std::to_string(H_.rows()));
  }
  require_symmetric(H_, "H");
  require_symmetric(G_, "G");
  if (constants_) constants_->validate();
}

const EigenDecomposition& MatrixModel::decomposition() const {
  std::call_once(cache_->flag, [this] { cache_->decomposition = solve_symmetric_eigen(H_); });
  return cache_->decomposition;
}

Spectrum spectrum_of(const MatrixModel& model) {
  return make_spectrum(model.decomposition().eigenvalues, model.label(), model.dimension(),
                       model.volume(), model.constants());
}

// ── Analytic spectra ────────────────────────────────────────────────────

Spectrum box_spectrum(const std::vector<double>& sides, Eigen::Index count) {
  const int d = static_cast<int>(sides.size());
  if (d < 1 || d > 3) {
    throw PreconditionError("box_spectrum supports dimension 1..3, got " + std::to_string(d));
  }
  for (double L : sides) {
    if (!(L > 0.0) || !std::isfinite(L)) {
      throw PreconditionError("box_spectrum requires positive finite side lengths");
    }
  }
  if (count < 1) throw PreconditionError("box_spectrum requires count >= 1");

  double volume = 1.0;
  for (double L : sides) volume *= L;

  std::vector<double> values;
  if (d == 1) {
    if (count > 10'000'000) {
      throw CapacityError("box_spectrum: count " + std::to_string(count) + " exceeds 1e7");
    }
    values.reserve(static_cast<size_t>(count));
    for (Eigen::Index k = 1; k <= count; ++k) {
      const double r = static_cast<double>(k) / sides[0];
      values.push_back(kPi * kPi * r * r);
    }
  } else {
    // Threshold so that the per-axis counting bound guarantees >= count modes,
    // grown geometrically if the guess falls short.
    double T = 0.0;
    {
      // Invert N(T) ~ V T^{d/2} / pi^d with 3x headroom, floored above the
      // ground state.
      const double target = 3.0 * static_cast<double>(count) + 16.0;
      T = std::pow(target / volume, 2.0 / d) * kPi * kPi;
      double ground = 0.0;
      for (double L : sides) ground += 1.0 / (L * L);
      T = std::max(T, 4.0 * kPi * kPi * ground);
    }
    for (;;) {
      Eigen::Index capacity = 1;
      std::vector<Eigen::Index> mmax(sides.size());
      for (size_t i = 0; i < sides.size(); ++i) {
        mmax[i] = static_cast<Eigen::Index>(std::floor(sides[i] * std::sqrt(T) / kPi));
        mmax[i] = std::max<Eigen::Index>(mmax[i], 1);
        capacity *= mmax[i];
        if (capacity > kEnumerationCap) {
          throw CapacityError("box_spectrum: enumeration of " + std::to_string(capacity) +
                              " lattice points exceeds the supported envelope");
        }
      }
      values.clear();
      values.reserve(static_cast<size_t>(capacity));
      const double T_over = T * (1.0 + 1e-12);
      if (d == 2) {
        for (Eigen::Index m1 = 1; m1 <= mmax[0]; ++m1) {
          for (Eigen::Index m2 = 1; m2 <= mmax[1]; ++m2) {
            const double r1 = m1 / sides[0], r2 = m2 / sides[1];
            const double lam = kPi * kPi * (r1 * r1 + r2 * r2);
            if (lam <= T_over) values.push_back(lam);
          }
        }
      } else {
        for (Eigen::Index m1 = 1; m1 <= mmax[0]; ++m1) {
          for (Eigen::Index m2 = 1; m2 <= mmax[1]; ++m2) {
            for (Eigen::Index m3 = 1; m3 <= mmax[2]; ++m3) {
              const double r1 = m1 / sides[0], r2 = m2 / sides[1], r3 = m3 / sides[2];
              const double lam = kPi * kPi * (r1 * r1 + r2 * r2 + r3 * r3);
              if (lam <= T_over) values.push_back(lam);
            }
          }
        }
      }
      if (static_cast<Eigen::Index>(values.size()) >= count) break;
      T *= 2.0;
    }
    std::sort(values.begin(), values.end());
    values.resize(static_cast<size_t>(count));
  }

  Vector v = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  std::ostringstream label;
  label << "box d=" << d << " sides=";
  for (size_t i = 0; i < sides.size(); ++i) label << (i ? "x" : "") << sides[i];
  return make_spectrum(std::move(v), label.str(), d, volume,
                       CommutatorConstants{0.0, 4.0 / d, 1.0});
}

Spectrum oscillator_spectrum(int d, Eigen::Index count) {
  if (d < 1 || d > 8) {
    throw PreconditionError("oscillator_spectrum supports dimension 1..8, got " +
                            std::to_string(d));
  }
  if (count < 1) throw PreconditionError("oscillator_spectrum requires count >= 1");
  if (count > 10'000'000) {
    throw CapacityError("oscillator_spectrum: count " + std::to_string(count) + " exceeds 1e7");
  }
  std::vector<double> values;
  values.reserve(static_cast<size_t>(count));
  double multiplicity = 1.0;  // C(k + d - 1, d - 1), updated multiplicatively
  for (Eigen::Index k = 0; static_cast<Eigen::Index>(values.size()) < count; ++k) {
    if (k > 0) multiplicity = multiplicity * (k + d - 1) / static_cast<double>(k);
    const auto copies = static_cast<Eigen::Index>(std::llround(multiplicity));
    const double level = 2.0 * static_cast<double>(k) + d;
    for (Eigen::Index j = 0; j < copies && static_cast<Eigen::Index>(values.size()) < count;
         ++j) {
      values.push_back(level);
    }
  }
  Vector v = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  return make_spectrum(std::move(v), "oscillator d=" + std::to_string(d), d, {},
                       CommutatorConstants{0.0, 4.0, 1.0});
}

// ── Finite-difference models ────────────────────────────────────────────

MatrixModel discretize_dirichlet(const std::vector<double>& sides,
                                 const std::vector<int>& grid) {
  const size_t d = sides.size();
  if (d < 1 || d > 2 || grid.size() != d) {
    throw PreconditionError(
        "discretize_dirichlet supports dimension 1..2 with matching sides/grid lengths");
  }
  for (double L : sides) {
    if (!(L > 0.0)) throw PreconditionError("discretize_dirichlet requires positive sides");
  }
  for (int N : grid) {
    if (N < 3) throw PreconditionError("discretize_dirichlet requires grid sizes >= 3");
  }

  if (d == 1) {
    const int N = grid[0];
    const double L = sides[0];
    const double h = L / (N + 1);
    const double w = 1.0 / (h * h);
    Matrix H = Matrix::Zero(N, N);
    Matrix G = Matrix::Zero(N, N);
    for (int i = 0; i < N; ++i) {
      H(i, i) = 2.0 * w;
      if (i + 1 < N) {
        H(i, i + 1) = -w;
        H(i + 1, i) = -w;
      }
      G(i, i) = (i + 1) * h;
    }
    std::ostringstream label;
    label << "fd-dirichlet d=1 N=" << N << " L=" << L;
    return MatrixModel(std::move(H), std::move(G), CommutatorConstants{0.0, 4.0, 1.0},
                       label.str(), h, 1, L);
  }

  const int Nx = grid[0], Ny = grid[1];
  const double Lx = sides[0], Ly = sides[1];
  const double hx = Lx / (Nx + 1), hy = Ly / (Ny + 1);
  const double wx = 1.0 / (hx * hx), wy = 1.0 / (hy * hy);
  const Eigen::Index n = static_cast<Eigen::Index>(Nx) * Ny;
  if (n > 4000) {
    throw CapacityError("discretize_dirichlet: grid " + std::to_string(Nx) + "x" +
                        std::to_string(Ny) + " exceeds the order cap of 4000");
  }
  Matrix H = Matrix::Zero(n, n);
  Matrix G = Matrix::Zero(n, n);
  auto idx = [Nx](int ix, int iy) { return static_cast<Eigen::Index>(iy) * Nx + ix; };
  for (int iy = 0; iy < Ny; ++iy) {
    for (int ix = 0; ix < Nx; ++ix) {
      const Eigen::Index k = idx(ix, iy);
      H(k, k) = 2.0 * wx + 2.0 * wy;
      if (ix + 1 < Nx) {
        H(k, idx(ix + 1, iy)) = -wx;
        H(idx(ix + 1, iy), k) = -wx;
      }
      if (iy + 1 < Ny) {
        H(k, idx(ix, iy + 1)) = -wy;
        H(idx(ix, iy + 1), k) = -wy;
      }
      G(k, k) = (ix + 1) * hx;
    }
  }
  std::ostringstream label;
  label << "fd-dirichlet d=2 N=" << Nx << "x" << Ny << " L=" << Lx << "x" << Ly;
  return MatrixModel(std::move(H), std::move(G), CommutatorConstants{0.0, 2.0, 1.0},
                     label.str(), std::max(hx, hy), 2, Lx * Ly);
}

MatrixModel discretize_schrodinger_1d(const Vector& potential, double a, double b) {
  const Eigen::Index N = potential.size();
  if (N < 3) throw PreconditionError("discretize_schrodinger_1d requires >= 3 interior nodes");
  if (!(a < b)) throw PreconditionError("discretize_schrodinger_1d requires a < b");
  if (!potential.allFinite()) {
    throw PreconditionError("discretize_schrodinger_1d requires finite potential samples");
  }
  const double h = (b - a) / static_cast<double>(N + 1);
  const double w = 1.0 / (h * h);
  Matrix H = Matrix::Zero(N, N);
  Matrix G = Matrix::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    H(i, i) = 2.0 * w + potential[i];
    if (i + 1 < N) {
      H(i, i + 1) = -w;
      H(i + 1, i) = -w;
    }
    G(i, i) = a + static_cast<double>(i + 1) * h;
  }
  std::ostringstream label;
  label << "fd-schrodinger N=" << N << " interval=[" << a << "," << b << "]";
  // Constants intentionally absent: they depend on the potential and must be
  // supplied by the caller before constant-dependent checks run.
  return MatrixModel(std::move(H), std::move(G), {}, label.str(), h, 1, b - a);
}

double mesh_allowance(double h, double lambda) {
  if (!(h > 0.0)) throw PreconditionError("mesh_allowance requires h > 0");
  return h * h * std::abs(lambda);
}

// ── Truncation majorants ────────────────────────────────────────────────

SpectrumKind spectrum_kind(const Spectrum& s) {
  const auto end = s.label.find_first_of(" \t");
  const std::string head = s.label.substr(0, end);
  if (head == "box") return SpectrumKind::Box;
  if (head == "oscillator") return SpectrumKind::Oscillator;
  if (head == "fd-dirichlet") return SpectrumKind::FdDirichlet;
  if (head == "fd-schrodinger") return SpectrumKind::FdSchrodinger;
  return SpectrumKind::Custom;
}

bool spectrum_is_complete(const Spectrum& s) {
  const SpectrumKind kind = spectrum_kind(s);
  return kind != SpectrumKind::Box && kind != SpectrumKind::Oscillator;
}

double CountingMajorant::operator()(double lambda) const {
  if (lambda <= 0.0 && B <= 0.0) return 0.0;
  return A * std::pow(std::max(lambda + B, 0.0), s);
}

std::optional<CountingMajorant> counting_majorant(const Spectrum& s) {
  switch (spectrum_kind(s)) {
    case SpectrumKind::Box: {
      if (!s.dimension || !s.volume) return std::nullopt;
      const int d = *s.dimension;
      return CountingMajorant{*s.volume / std::pow(kPi, d), 0.0, d / 2.0};
    }
    case SpectrumKind::Oscillator: {
      if (!s.dimension) return std::nullopt;
      const int d = *s.dimension;
      double dfact = 1.0;
      for (int i = 2; i <= d; ++i) dfact *= i;
      return CountingMajorant{1.0 / (std::pow(2.0, d) * dfact), static_cast<double>(d),
                              static_cast<double>(d)};
    }
    default:
      return std::nullopt;
  }
}

}  // namespace specbound
