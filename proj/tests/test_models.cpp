#include <doctest.h>

#include "specbound/models.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace specbound;
using oracle::kPi;

TEST_CASE("interval eigenvalues and metadata") {
  Spectrum s = box_spectrum({1.0}, 5);
  REQUIRE(s.size() == 5);
  for (int k = 1; k <= 5; ++k)
    CHECK(s.lambda(k) == doctest::Approx(k * k * kPi * kPi).epsilon(1e-15));
  CHECK(s.label == "box d=1 sides=1");
  CHECK(s.dimension == 1);
  CHECK(s.volume == doctest::Approx(1.0));
  REQUIRE(s.constants.has_value());
  CHECK(s.constants->alpha == 0.0);
  CHECK(s.constants->beta == 4.0);
  CHECK(s.constants->gamma == 1.0);
}

TEST_CASE("higher-dimensional boxes") {
  SUBCASE("unit square") {
    Spectrum s = box_spectrum({1.0, 1.0}, 4);
    CHECK(s.lambda(1) == doctest::Approx(2.0 * kPi * kPi));
    CHECK(s.lambda(2) == doctest::Approx(5.0 * kPi * kPi));
    CHECK(s.lambda(3) == doctest::Approx(5.0 * kPi * kPi));
    CHECK(s.lambda(4) == doctest::Approx(8.0 * kPi * kPi));
    CHECK(s.constants->beta == doctest::Approx(2.0));
    CHECK(s.label == "box d=2 sides=1x1");
  }

  SUBCASE("unit cube ground state") {
    Spectrum s = box_spectrum({1.0, 1.0, 1.0}, 1);
    CHECK(s.lambda(1) == doctest::Approx(3.0 * kPi * kPi));
    CHECK(s.constants->beta == doctest::Approx(4.0 / 3.0));
    CHECK(s.volume == doctest::Approx(1.0));
  }

  SUBCASE("side length scales the spectrum quadratically") {
    Spectrum s = box_spectrum({2.0}, 3);
    for (int k = 1; k <= 3; ++k)
      CHECK(s.lambda(k) == doctest::Approx(k * k * kPi * kPi / 4.0));
    CHECK(s.volume == doctest::Approx(2.0));
  }

  SUBCASE("1x2 rectangle ordering mixes the two axes") {
    Spectrum s = box_spectrum({1.0, 2.0}, 4);
    CHECK(s.lambda(1) == doctest::Approx(1.25 * kPi * kPi));
    CHECK(s.lambda(2) == doctest::Approx(2.0 * kPi * kPi));
    CHECK(s.lambda(3) == doctest::Approx(3.25 * kPi * kPi));
    CHECK(s.lambda(4) == doctest::Approx(4.25 * kPi * kPi));
    CHECK(s.volume == doctest::Approx(2.0));
  }
}

TEST_CASE("oscillator ladders") {
  SUBCASE("one dimension is the odd integers") {
    Spectrum s = oscillator_spectrum(1, 5);
    for (int k = 0; k < 5; ++k) CHECK(s.values(k) == doctest::Approx(2.0 * k + 1.0));
    CHECK(s.label == "oscillator d=1");
    CHECK_FALSE(s.volume.has_value());
    CHECK(s.constants->beta == doctest::Approx(4.0));
  }

  SUBCASE("two dimensions with multiplicity k+1") {
    Spectrum s = oscillator_spectrum(2, 10);
    const double want[] = {2, 4, 4, 6, 6, 6, 8, 8, 8, 8};
    for (int i = 0; i < 10; ++i) CHECK(s.values(i) == doctest::Approx(want[i]));
    CHECK(s.label == "oscillator d=2");
  }

  SUBCASE("three dimensions with triangular multiplicities") {
    Spectrum s = oscillator_spectrum(3, 10);
    const double want[] = {3, 5, 5, 5, 7, 7, 7, 7, 7, 7};
    for (int i = 0; i < 10; ++i) CHECK(s.values(i) == doctest::Approx(want[i]));
  }
}

TEST_CASE("model constructor gates") {
  CHECK_THROWS_AS(box_spectrum({}, 3), PreconditionError);
  CHECK_THROWS_AS(box_spectrum({1.0, 1.0, 1.0, 1.0}, 3), PreconditionError);
  CHECK_THROWS_AS(box_spectrum({-1.0}, 3), PreconditionError);
  CHECK_THROWS_AS(box_spectrum({1.0}, 0), PreconditionError);
  CHECK_THROWS_AS(oscillator_spectrum(0, 3), PreconditionError);
  CHECK_THROWS_AS(oscillator_spectrum(9, 3), PreconditionError);
  CHECK_THROWS_AS(oscillator_spectrum(2, 0), PreconditionError);
}

TEST_CASE("finite-difference Dirichlet discretization") {
  SUBCASE("three-point interior stencil written out by hand") {
    MatrixModel m = discretize_dirichlet({1.0}, {3});
    Matrix want(3, 3);
    want << 32.0, -16.0, 0.0, -16.0, 32.0, -16.0, 0.0, -16.0, 32.0;
    CHECK((m.H() - want).cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.G()(0, 0) == doctest::Approx(0.25));
    CHECK(m.G()(1, 1) == doctest::Approx(0.5));
    CHECK(m.G()(2, 2) == doctest::Approx(0.75));
    CHECK(m.G()(0, 1) == 0.0);
    CHECK(m.mesh() == doctest::Approx(0.25));
    CHECK(m.label() == "fd-dirichlet d=1 N=3 L=1");
    REQUIRE(m.constants().has_value());
    CHECK(m.constants()->beta == doctest::Approx(4.0));
  }

  SUBCASE("eigenvalues match the discrete sine closed form") {
    MatrixModel m = discretize_dirichlet({1.0}, {32});
    Spectrum s = spectrum_of(m);
    const double h = 1.0 / 33.0;
    for (int k = 1; k <= 32; ++k)
      CHECK(oracle::rel_err(s.lambda(k), oracle::fd_lambda(k, h)) < 1e-12);
    CHECK(s.dimension == 1);
    CHECK(s.volume == doctest::Approx(1.0));
  }

  SUBCASE("two dimensions separates into sums of 1-D levels") {
    MatrixModel m = discretize_dirichlet({1.0, 1.0}, {6, 6});
    Spectrum s = spectrum_of(m);
    REQUIRE(s.size() == 36);
    const double h = 1.0 / 7.0;
    std::vector<double> sums;
    for (int i = 1; i <= 6; ++i)
      for (int j = 1; j <= 6; ++j)
        sums.push_back(oracle::fd_lambda(i, h) + oracle::fd_lambda(j, h));
    std::sort(sums.begin(), sums.end());
    for (int k = 0; k < 36; ++k)
      CHECK(oracle::rel_err(s.values(k), sums[k]) < 1e-10);
    CHECK(m.constants()->beta == doctest::Approx(2.0));
    CHECK(m.mesh() == doctest::Approx(h));
    CHECK(m.label() == "fd-dirichlet d=2 N=6x6 L=1x1");
  }

  SUBCASE("rejections") {
    CHECK_THROWS_AS(discretize_dirichlet({1.0}, {2}), PreconditionError);
    CHECK_THROWS_AS(discretize_dirichlet({1.0, 1.0}, {3}), PreconditionError);
    CHECK_THROWS_AS(discretize_dirichlet({1.0, 1.0, 1.0}, {3, 3, 3}), PreconditionError);
    CHECK_THROWS_AS(discretize_dirichlet({1.0, 1.0}, {80, 80}), CapacityError);
  }
}

TEST_CASE("1-D potential discretization") {
  SUBCASE("zero potential reproduces the Dirichlet matrix") {
    MatrixModel flat = discretize_schrodinger_1d(Vector::Zero(16), 0.0, 1.0);
    MatrixModel dir = discretize_dirichlet({1.0}, {16});
    CHECK((flat.H() - dir.H()).cwiseAbs().maxCoeff() == 0.0);
    CHECK_FALSE(flat.constants().has_value());
    CHECK(flat.label() == "fd-schrodinger N=16 interval=[0,1]");
  }

  SUBCASE("constant potential shifts every eigenvalue") {
    MatrixModel flat = discretize_schrodinger_1d(Vector::Zero(12), 0.0, 1.0);
    MatrixModel lifted = discretize_schrodinger_1d(Vector::Constant(12, 7.0), 0.0, 1.0);
    Spectrum a = spectrum_of(flat);
    Spectrum b = spectrum_of(lifted);
    for (int k = 1; k <= 12; ++k)
      CHECK(b.lambda(k) == doctest::Approx(a.lambda(k) + 7.0).epsilon(1e-12));
  }

  SUBCASE("position observable tracks the interval offset") {
    MatrixModel m = discretize_schrodinger_1d(Vector::Zero(4), 2.0, 3.0);
    const double h = 1.0 / 5.0;
    for (int i = 0; i < 4; ++i)
      CHECK(m.G()(i, i) == doctest::Approx(2.0 + (i + 1) * h));
    Spectrum s = spectrum_of(m);
    CHECK(s.volume == doctest::Approx(1.0));
  }

  SUBCASE("rejections") {
    CHECK_THROWS_AS(discretize_schrodinger_1d(Vector::Zero(2), 0.0, 1.0),
                    PreconditionError);
    CHECK_THROWS_AS(discretize_schrodinger_1d(Vector::Zero(8), 1.0, 1.0),
                    PreconditionError);
    Vector bad = Vector::Zero(8);
    bad(3) = std::nan("");
    CHECK_THROWS_AS(discretize_schrodinger_1d(bad, 0.0, 1.0), PreconditionError);
  }
}

TEST_CASE("matrix model invariants") {
  Matrix h(2, 2);
  h << 0.0, 0.0, 0.0, 1.0;
  Matrix g(2, 2);
  g << 0.0, 1.0, 1.0, 0.0;

  SUBCASE("construction gates name the offending matrix") {
    Matrix bad = h;
    bad(0, 1) = 0.5;
    CHECK_THROWS_WITH_AS(MatrixModel(bad, g), doctest::Contains("H"), PreconditionError);
    CHECK_THROWS_WITH_AS(MatrixModel(h, Matrix::Identity(3, 3)),
                         doctest::Contains("order"), PreconditionError);
  }

  SUBCASE("the decomposition is computed once and shared across copies") {
    MatrixModel m(h, g);
    const EigenDecomposition* first = &m.decomposition();
    CHECK(first == &m.decomposition());
    MatrixModel copy = m;
    CHECK(&copy.decomposition() == first);
  }

  SUBCASE("spectrum_of carries the model metadata") {
    MatrixModel m(h, g, CommutatorConstants{0.0, 4.0, 1.0}, "toy", 0.1, 1, 2.0);
    Spectrum s = spectrum_of(m);
    CHECK(s.label == "toy");
    CHECK(s.dimension == 1);
    CHECK(s.volume == doctest::Approx(2.0));
    CHECK(s.constants->beta == doctest::Approx(4.0));
    CHECK(s.values(0) == doctest::Approx(0.0));
    CHECK(s.values(1) == doctest::Approx(1.0));
  }
}

TEST_CASE("spectrum kind tagging") {
  CHECK(spectrum_kind(box_spectrum({1.0}, 2)) == SpectrumKind::Box);
  CHECK(spectrum_kind(oscillator_spectrum(1, 2)) == SpectrumKind::Oscillator);
  CHECK(spectrum_kind(spectrum_of(discretize_dirichlet({1.0}, {4}))) ==
        SpectrumKind::FdDirichlet);
  CHECK(spectrum_kind(spectrum_of(discretize_schrodinger_1d(Vector::Zero(4), 0.0,
                                                            1.0))) ==
        SpectrumKind::FdSchrodinger);
  Vector v(1);
  v << 1.0;
  CHECK(spectrum_kind(make_spectrum(v)) == SpectrumKind::Custom);
  CHECK(spectrum_kind(make_spectrum(v, "mystery thing")) == SpectrumKind::Custom);

  CHECK_FALSE(spectrum_is_complete(box_spectrum({1.0}, 2)));
  CHECK_FALSE(spectrum_is_complete(oscillator_spectrum(1, 2)));
  CHECK(spectrum_is_complete(spectrum_of(discretize_dirichlet({1.0}, {4}))));
  CHECK(spectrum_is_complete(make_spectrum(v)));
}

TEST_CASE("counting majorants dominate the exact counts") {
  SUBCASE("interval") {
    Spectrum s = box_spectrum({1.0}, 50);
    auto maj = counting_majorant(s);
    REQUIRE(maj.has_value());
    CHECK((*maj)(-1.0) == 0.0);
    CHECK((*maj)(0.0) == 0.0);
    for (int k = 1; k < 50; ++k) {
      const double mid = 0.5 * (s.lambda(k) + s.lambda(k + 1));
      int exact = 0;
      while (exact < 50 && s.values(exact) <= mid) ++exact;
      CHECK((*maj)(mid) >= exact);
    }
  }

  SUBCASE("planar oscillator") {
    Spectrum s = oscillator_spectrum(2, 55);
    auto maj = counting_majorant(s);
    REQUIRE(maj.has_value());
    // Below level 2k+2 the count is k(k+1)/2 + (k+1) states... check directly.
    for (double lam : {3.0, 5.0, 9.0, 13.0}) {
      int exact = 0;
      while (exact < 55 && s.values(exact) <= lam) ++exact;
      CHECK((*maj)(lam) >= exact);
    }
  }

  SUBCASE("unavailable without the geometric metadata") {
    Vector v(2);
    v << 1.0, 2.0;
    CHECK_FALSE(counting_majorant(make_spectrum(v)).has_value());
    Spectrum s = box_spectrum({1.0}, 3);
    s.volume.reset();
    CHECK_FALSE(counting_majorant(s).has_value());
  }
}

TEST_CASE("mesh allowance") {
  CHECK(mesh_allowance(0.1, 50.0) == doctest::Approx(0.5));
  CHECK(mesh_allowance(0.1, -50.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(mesh_allowance(0.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(mesh_allowance(-0.1, 1.0), PreconditionError);
}
