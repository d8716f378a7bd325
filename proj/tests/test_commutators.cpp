#include <doctest.h>

#include "specbound/commutators.hpp"
#include "specbound/functions.hpp"
#include "specbound/models.hpp"

#include "oracles.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace specbound;

namespace {

MatrixModel two_state() {
  Matrix h(2, 2);
  h << 0.0, 0.0, 0.0, 1.0;
  Matrix g(2, 2);
  g << 0.0, 1.0, 1.0, 0.0;
  return MatrixModel(h, g);
}

MatrixModel random_model(int n, std::mt19937_64& rng) {
  return MatrixModel(oracle::random_symmetric(n, rng), oracle::random_symmetric(n, rng));
}

}  // namespace

TEST_CASE("two-state bundle has the textbook commutators") {
  MatrixModel m = two_state();
  CommutatorBundle b = commutator_bundle(m);

  Matrix first_want(2, 2);
  first_want << 0.0, -1.0, 1.0, 0.0;
  CHECK((b.first - first_want).cwiseAbs().maxCoeff() < 1e-15);

  Matrix second_want(2, 2);
  second_want << 2.0, 0.0, 0.0, -2.0;
  CHECK((b.second - second_want).cwiseAbs().maxCoeff() < 1e-15);

  // H is already diagonal, so the eigenbasis change leaves G alone.
  CHECK(std::abs(b.matrix_elements(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(b.matrix_elements(0, 0)) < 1e-15);

  CHECK(b.hg_norm_sq(0) == doctest::Approx(1.0));
  CHECK(b.hg_norm_sq(1) == doctest::Approx(1.0));
  CHECK(b.second_diag(0) == doctest::Approx(2.0));
  CHECK(b.second_diag(1) == doctest::Approx(-2.0));
}

TEST_CASE("sum rule residuals vanish identically on the two-state model") {
  IdentityResiduals r = trk_residual(two_state());
  CHECK(r.residuals.size() == 2);
  CHECK(r.residuals.cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.max_abs == 0.0);
}

TEST_CASE("bundle internal consistency on random models") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    MatrixModel m = random_model(3 + static_cast<int>(rng() % 10), rng);
    CommutatorBundle b = commutator_bundle(m);
    const EigenDecomposition& d = m.decomposition();
    const Eigen::Index n = b.matrix_elements.rows();
    const double gscale = std::max(b.matrix_elements.cwiseAbs().maxCoeff(), 1.0);
    const double lscale = std::max(d.eigenvalues.cwiseAbs().maxCoeff(), 1.0);

    CHECK((b.matrix_elements - b.matrix_elements.transpose()).cwiseAbs().maxCoeff() <
          1e-10 * gscale);

    // Diagonal summaries agree with direct sums over the matrix elements.
    for (Eigen::Index j = 0; j < n; ++j) {
      double hg = 0.0, second = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double gap = d.eigenvalues(k) - d.eigenvalues(j);
        const double gjk = b.matrix_elements(j, k);
        hg += gap * gap * gjk * gjk;
        second += 2.0 * gap * gjk * gjk;
      }
      CHECK(std::abs(b.hg_norm_sq(j) - hg) < 1e-9 * lscale * lscale * gscale * gscale * n);
      CHECK(std::abs(b.second_diag(j) - second) < 1e-9 * lscale * gscale * gscale * n);
    }
  }
}

TEST_CASE("sum rule holds to rounding on random models") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    MatrixModel m = random_model(2 + static_cast<int>(rng() % 15), rng);
    IdentityResiduals r = trk_residual(m);
    CHECK(r.max_abs <= 1e-12 * r.scale);

    // Cross-check one diagonal entry through the operator route:
    // (1/2) Q_jj = w^T (H - lambda_j) w with w = G v_j.
    const EigenDecomposition& d = m.decomposition();
    const Eigen::Index j = static_cast<Eigen::Index>(rng() % d.eigenvalues.size());
    const Vector w = m.G() * d.eigenvectors.col(j);
    const double direct =
        w.dot(m.H() * w) - d.eigenvalues(j) * w.squaredNorm();
    CommutatorBundle b = commutator_bundle(m);
    CHECK(std::abs(0.5 * b.second_diag(j) - direct) <= 1e-10 * r.scale);
  }
}

TEST_CASE("subset identity at second order") {
  SUBCASE("two-state closed form in z") {
    MatrixModel m = two_state();
    for (double z : {0.3, 0.7, 2.0}) {
      QuadraticIdentityResult r = quadratic_identity_residual(m, {0}, z);
      CHECK(r.lhs == doctest::Approx(2.0 * z * z - 2.0 * z).epsilon(1e-14));
      CHECK(r.rhs == doctest::Approx(2.0 * z * z - 2.0 * z).epsilon(1e-14));
      CHECK(std::abs(r.residual) <= 1e-14 * r.scale);
    }
  }

  SUBCASE("random subsets balance to rounding") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uz(-2.0, 2.0);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 3 + static_cast<int>(rng() % 10);
      MatrixModel m = random_model(n, rng);
      std::vector<long> subset;
      for (int j = 0; j < n; ++j)
        if (rng() % 2 == 0) subset.push_back(j);
      if (subset.empty()) subset.push_back(static_cast<long>(rng() % n));
      QuadraticIdentityResult r = quadratic_identity_residual(m, subset, uz(rng));
      CHECK(std::abs(r.residual) <= 1e-11 * r.scale);
    }
  }

  SUBCASE("the full index set leaves no coupling terms") {
    std::mt19937_64 rng(57);
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 8);
      MatrixModel m = random_model(n, rng);
      std::vector<long> all(n);
      for (int j = 0; j < n; ++j) all[j] = j;
      QuadraticIdentityResult r = quadratic_identity_residual(m, all, 0.5);
      CHECK(r.rhs == 0.0);
      CHECK(std::abs(r.lhs) <= 1e-11 * r.scale);
    }
  }

  SUBCASE("index validation") {
    MatrixModel m = two_state();
    CHECK_THROWS_WITH_AS(quadratic_identity_residual(m, {}, 0.5),
                         doctest::Contains("nonempty"), PreconditionError);
    CHECK_THROWS_WITH_AS(quadratic_identity_residual(m, {2}, 0.5),
                         doctest::Contains("outside"), PreconditionError);
    CHECK_THROWS_WITH_AS(quadratic_identity_residual(m, {0, 0}, 0.5),
                         doctest::Contains("twice"), PreconditionError);
    CHECK_THROWS_AS(quadratic_identity_residual(m, {0}, std::nan("")), PreconditionError);
  }
}

TEST_CASE("first-order trace bound") {
  SUBCASE("any admissible function gives equality on a two-state model") {
    MatrixModel m = two_state();

    FunctionSpec quad = make_quadratic(1.0, -4.0, 4.0);  // (l - 2)^2
    InequalityReport r1 = check_T1(m, {0}, quad);
    // f(0) + f'(0)/2 * (1 - 0) = 4 - 2 = 2 on both sides.
    CHECK(r1.lhs == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r1.rhs == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r1.verdict);
    CHECK(r1.law == "t1");
    CHECK(r1.context.n == 1);

    FunctionSpec e = make_exp_family(0.5);
    InequalityReport r2 = check_T1(m, {0}, e);
    // f(0) + f'(0)/2 = 1 - 0.25 = 0.75.
    CHECK(r2.lhs == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(r2.rhs == doctest::Approx(0.75).epsilon(1e-14));
  }

  SUBCASE("quadratics stay an identity on larger random models") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uc(-1.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
      const int n = 3 + static_cast<int>(rng() % 10);
      MatrixModel m = random_model(n, rng);
      FunctionSpec f = make_quadratic(uc(rng), uc(rng), uc(rng));
      std::vector<long> subset;
      for (int j = 0; j < n; ++j)
        if (rng() % 3 != 0) subset.push_back(j);
      if (subset.empty()) subset.push_back(0);
      InequalityReport r = check_T1(m, subset, f);
      CHECK(std::abs(r.slack) <= 10.0 * r.tolerance);
      CHECK(static_cast<std::size_t>(*r.context.n) == subset.size());
    }
  }

  SUBCASE("decaying exponentials and power wells give one-sided slack") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 3 + static_cast<int>(rng() % 10);
      MatrixModel m = random_model(n, rng);
      const Vector& lam = m.decomposition().eigenvalues;
      const double lo = lam(0), hi = lam(n - 1);
      const double spread = std::max(hi - lo, 1.0);

      FunctionSpec f = (trial % 2 == 0)
                           ? make_exp_family(0.1 + 2.0 * u01(rng) / spread)
                           : make_power_family(hi + (0.1 + u01(rng)) * spread,
                                               2.0 + 2.0 * u01(rng));
      std::vector<long> subset;
      for (int j = 0; j < n; ++j)
        if (rng() % 2 == 0) subset.push_back(j);
      if (subset.empty()) subset.push_back(0);
      InequalityReport r = check_T1(m, subset, f);
      CHECK(r.verdict);
      CHECK(r.slack >= -r.tolerance);
    }
  }

  SUBCASE("hypothesis and domain gates") {
    MatrixModel m = two_state();
    auto cube = [](double x) { return x * x * x; };
    auto dcube = [](double x) { return 3.0 * x * x; };
    FunctionSpec convex = make_function_spec(cube, dcube, {}, -10.0, 10.0, "cube",
                                             FamilyKind::Custom, {}, 0.2, 1.2);
    CHECK_THROWS_AS(check_T1(m, {0}, convex), HypothesisError);

    FunctionSpec short_dom = make_power_family(0.5, 2.0);  // domain ends below lambda_2
    CHECK_THROWS_AS(check_T1(m, {0}, short_dom), PreconditionError);
  }
}
