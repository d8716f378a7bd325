#include <doctest.h>

#include "specbound/functions.hpp"

#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace specbound;

namespace {

// Independent closed forms for the weighted-moment family on [0, z]:
// f(l) = q l^p - p l^q z^(p-q) + (p-q) z^p.
double moment_eval(double l, double z, double p, double q) {
  return q * std::pow(l, p) - p * std::pow(l, q) * std::pow(z, p - q) +
         (p - q) * std::pow(z, p);
}

}  // namespace

TEST_CASE("family closed forms") {
  SUBCASE("decaying exponential") {
    FunctionSpec f = make_exp_family(0.5);
    CHECK(f.eval(2.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(f.deriv1(2.0) == doctest::Approx(-0.5 * std::exp(-1.0)));
    CHECK(f.second_derivative(2.0) == doctest::Approx(0.25 * std::exp(-1.0)));
    CHECK(f.family_tag == "exp:t=0.5");
    CHECK(f.kind == FamilyKind::Exp);
    CHECK(f.domain_hi == std::numeric_limits<double>::infinity());
  }

  SUBCASE("power well") {
    FunctionSpec f = make_power_family(5.0, 3.0);
    CHECK(f.eval(2.0) == doctest::Approx(27.0));
    CHECK(f.deriv1(2.0) == doctest::Approx(-27.0));
    CHECK(f.second_derivative(2.0) == doctest::Approx(18.0));
    CHECK(f.domain_hi == 5.0);
    CHECK(f.eval(5.0) == 0.0);
  }

  SUBCASE("weighted moment difference vanishes to second order at z") {
    FunctionSpec f = make_moment_family(4.0, 1.0, 0.5);
    CHECK(f.eval(1.0) == doctest::Approx(moment_eval(1.0, 4.0, 1.0, 0.5)));
    CHECK(f.eval(1.0) == doctest::Approx(0.5 - 2.0 + 2.0));
    CHECK(f.eval(4.0) == doctest::Approx(0.0));
    CHECK(f.deriv1(4.0) == doctest::Approx(0.0));
    CHECK(f.deriv1(1.0) == doctest::Approx(1.0 * (0.5 - std::pow(4.0, 0.5) * 0.5)));
    CHECK(f.domain_lo == 0.0);
    CHECK(f.domain_hi == 4.0);
  }

  SUBCASE("quadratic") {
    FunctionSpec f = make_quadratic(2.0, -1.0, 3.0);
    CHECK(f.eval(1.5) == doctest::Approx(2.0 * 2.25 - 1.5 + 3.0));
    CHECK(f.deriv1(1.5) == doctest::Approx(2.0 * 2.0 * 1.5 - 1.0));
    CHECK(f.second_derivative(0.3) == doctest::Approx(4.0));
    CHECK(f.family_tag == "quad:a=2:b=-1:c=3");
  }
}

TEST_CASE("family parameter gates") {
  CHECK_THROWS_AS(make_exp_family(0.0), PreconditionError);
  CHECK_THROWS_AS(make_exp_family(-1.0), PreconditionError);
  CHECK_THROWS_WITH_AS(make_power_family(1.0, 1.5), doctest::Contains("p >= 2"),
                       PreconditionError);
  CHECK_THROWS_AS(make_moment_family(-1.0, 1.0, 0.5), PreconditionError);
  CHECK_THROWS_AS(make_moment_family(1.0, 0.5, 0.5), PreconditionError);   // needs p > q
  CHECK_THROWS_AS(make_moment_family(1.0, 2.0, 1.5), PreconditionError);   // q > 1
  CHECK_THROWS_AS(make_moment_family(1.0, 2.5, 0.9), PreconditionError);   // p + q > 3
  CHECK_THROWS_AS(make_log_family(2.0, 3.5), PreconditionError);
  CHECK_THROWS_AS(make_log_family(0.0, 1.0), PreconditionError);
}

TEST_CASE("self-check rejects a wrong derivative") {
  auto eval = [](double x) { return x * x; };
  auto good = [](double x) { return 2.0 * x; };
  auto bad = [](double x) { return 3.0 * x; };
  CHECK_NOTHROW(make_function_spec(eval, good, {}, -10.0, 10.0, "probe",
                                   FamilyKind::Custom, {}, -2.0, 2.0));
  CHECK_THROWS_WITH_AS(make_function_spec(eval, bad, {}, -10.0, 10.0, "probe",
                                         FamilyKind::Custom, {}, -2.0, 2.0),
                       doctest::Contains("self-check"), PreconditionError);
}

TEST_CASE("family dispatch by kind") {
  FamilyParams params;
  params.t = 0.4;
  FunctionSpec via_kind = make_family(FamilyKind::Exp, params);
  FunctionSpec direct = make_exp_family(0.4);
  CHECK(via_kind.family_tag == direct.family_tag);
  CHECK(via_kind.eval(1.3) == direct.eval(1.3));

  FamilyParams empty;
  CHECK_THROWS_WITH_AS(make_family(FamilyKind::Exp, empty),
                       doctest::Contains("requires parameter"), PreconditionError);
  CHECK_THROWS_AS(make_family(FamilyKind::Power, empty), PreconditionError);
  CHECK_THROWS_AS(make_family(FamilyKind::Custom, empty), PreconditionError);
}

TEST_CASE("products and shifts compose") {
  SUBCASE("product of exponentials is the exponential of the summed rate") {
    FunctionSpec a = make_exp_family(0.25);
    FunctionSpec b = make_exp_family(0.5);
    FunctionSpec ab = product_spec(a, b);
    FunctionSpec direct = make_exp_family(0.75);
    for (double x : {-1.0, 0.0, 0.5, 2.0}) {
      CHECK(ab.eval(x) == doctest::Approx(direct.eval(x)));
      CHECK(ab.deriv1(x) == doctest::Approx(direct.deriv1(x)));
    }
    CHECK(ab.family_tag == "product(exp:t=0.25,exp:t=0.5)");
  }

  SUBCASE("disjoint domains cannot be multiplied") {
    FunctionSpec left = make_power_family(0.0, 2.0);   // domain (-inf, 0]
    FunctionSpec right = make_log_family(2.0, 1.0);    // domain ~ (0, 2]
    CHECK_THROWS_AS(product_spec(left, right), PreconditionError);
  }

  SUBCASE("shift translates the domain and the arguments") {
    FunctionSpec f = make_power_family(5.0, 2.0);
    FunctionSpec g = shifted_spec(f, 2.0);  // g(l) = f(l - 2) on the lifted domain
    CHECK(g.domain_hi == doctest::Approx(7.0));
    CHECK(g.eval(1.0) == doctest::Approx(f.eval(-1.0)));
    CHECK(g.deriv1(1.0) == doctest::Approx(f.deriv1(-1.0)));
    CHECK(g.family_tag == f.family_tag + "|shift=2");
    CHECK(g.params.at("shift") == 2.0);
  }
}

TEST_CASE("domain guard names the interval and the function") {
  FunctionSpec f = make_power_family(5.0, 2.0);
  CHECK_NOTHROW(f.require_contains(-3.0, 5.0, "trace bound"));
  CHECK_THROWS_WITH_AS(f.require_contains(0.0, 6.0, "trace bound"),
                       doctest::Contains("leaves the domain"), PreconditionError);
}

TEST_CASE("hypothesis screening") {
  SUBCASE("decaying exponential satisfies everything") {
    FunctionSpec f = make_exp_family(0.3);
    HypothesisReport r = check_hypotheses(f, 1.0, 6.0, 10.0);
    CHECK(r.h1.pass);
    CHECK(r.h2.pass);
    CHECK(r.h3.pass);
    CHECK(r.h4.pass);
    CHECK(r.h4_prime.pass);
    CHECK(r.a_used == 10.0);
  }

  SUBCASE("a convex increasing cube fails the sign and concavity requirements") {
    auto cube = [](double x) { return x * x * x; };
    auto dcube = [](double x) { return 3.0 * x * x; };
    FunctionSpec f = make_function_spec(cube, dcube, {}, 0.5, 100.0, "cube",
                                        FamilyKind::Custom, {}, 1.0, 5.0);
    HypothesisReport r = check_hypotheses(f, 1.0, 6.0, 8.0);
    CHECK_FALSE(r.h2.pass);  // f' > 0
    CHECK_FALSE(r.h3.pass);  // f' convex, not concave
    REQUIRE(r.h2.witness.has_value());
    CHECK(r.h2.witness->lambda >= 1.0);
    CHECK(r.h2.witness->lambda <= 6.0);
    CHECK(r.h2.witness->value > 0.0);
    REQUIRE(r.h3.witness.has_value());
  }

  SUBCASE("power family toggles the extended hypothesis with the shift point") {
    FunctionSpec f = make_power_family(10.0, 2.5);
    // H4' at b = 5: f'(b) + f''(b)(a - b) >= 0 iff (p-1)(a-5) >= 5.
    HypothesisReport far = check_hypotheses(f, 1.0, 5.0, 9.0);
    CHECK(far.h4_prime.pass);
    CHECK(far.h4.pass);
    HypothesisReport near = check_hypotheses(f, 1.0, 5.0, 6.0);
    CHECK_FALSE(near.h4_prime.pass);
    CHECK_FALSE(near.h4.pass);
    REQUIRE(near.h4_prime.witness.has_value());
  }

  SUBCASE("degenerate hull reduces to point checks") {
    FunctionSpec f = make_exp_family(1.0);
    HypothesisReport r = check_hypotheses(f, 3.0, 3.0, 4.0);
    CHECK(r.h1.pass);
    CHECK(r.h3.pass);
  }

  SUBCASE("the shift point must lie beyond the hull") {
    FunctionSpec f = make_exp_family(1.0);
    CHECK_THROWS_WITH_AS(check_hypotheses(f, 1.0, 6.0, 5.0),
                         doctest::Contains("exceed"), PreconditionError);
    CHECK_THROWS_AS(check_hypotheses(f, 6.0, 1.0, 8.0), PreconditionError);
  }
}

TEST_CASE("concave-derivative gate") {
  FunctionSpec ok = make_exp_family(0.5);
  CHECK_NOTHROW(require_concave_derivative(ok, 0.0, 4.0));
  CHECK_NOTHROW(require_concave_derivative(ok, 2.0, 2.0));  // empty interval

  auto cube = [](double x) { return x * x * x; };
  auto dcube = [](double x) { return 3.0 * x * x; };
  FunctionSpec f = make_function_spec(cube, dcube, {}, -10.0, 10.0, "cube",
                                      FamilyKind::Custom, {}, 0.5, 1.5);
  try {
    require_concave_derivative(f, 0.0, 2.0);
    FAIL("expected a hypothesis violation");
  } catch (const HypothesisError& e) {
    CHECK(std::string(e.what()).find("midpoint concavity") != std::string::npos);
    CHECK(e.lambda >= 0.0);
    CHECK(e.lambda <= 2.0);
  }
}

TEST_CASE("chord slope residual") {
  FunctionSpec e1 = make_exp_family(1.0);
  // (f(1)-f(0))/1 - (f'(0)+f'(1))/2 with f = exp(-x): 1.5/e - 0.5.
  CHECK(chord_slope_residual(e1, 0.0, 1.0) ==
        doctest::Approx(1.5 / std::exp(1.0) - 0.5));
  CHECK(chord_slope_residual(e1, 1.0, 0.0) ==
        doctest::Approx(1.5 / std::exp(1.0) - 0.5));

  auto cube = [](double x) { return x * x * x; };
  auto dcube = [](double x) { return 3.0 * x * x; };
  FunctionSpec f = make_function_spec(cube, dcube, {}, -10.0, 10.0, "cube",
                                      FamilyKind::Custom, {}, 0.5, 1.5);
  CHECK(chord_slope_residual(f, 0.0, 2.0) == doctest::Approx(-2.0));

  CHECK_THROWS_AS(chord_slope_residual(e1, 1.0, 1.0), PreconditionError);

  // For a function with concave derivative the residual is never negative.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 6.0);
  for (int i = 0; i < 200; ++i) {
    double x = u(rng), y = u(rng);
    if (x == y) continue;
    CHECK(chord_slope_residual(e1, x, y) >= -1e-15);
  }
}

TEST_CASE("integral transform concavity certificate") {
  SUBCASE("constant density") {
    // phi(x) = x*h - 2*h*x = -h*x, linear, concave.
    auto r = concavity_transform_check([](double) { return 2.0; }, 3.0);
    CHECK(r.verdict);
    CHECK(r.phi(r.phi.size() - 1) == doctest::Approx(-6.0));
    CHECK(r.max_violation <= r.tolerance);
  }

  SUBCASE("linear density gives an identically zero transform") {
    auto r = concavity_transform_check([](double x) { return -x; }, 2.0);
    CHECK(r.verdict);
    for (Eigen::Index i = 0; i < r.phi.size(); ++i) CHECK(std::abs(r.phi(i)) < 1e-9);
  }

  SUBCASE("square root density") {
    // phi(x) = x^{3/2} - (4/3) x^{3/2} = -x^{3/2}/3, concave on x > 0.
    auto r = concavity_transform_check([](double x) { return std::sqrt(x); }, 4.0);
    CHECK(r.verdict);
    CHECK(r.phi(r.phi.size() - 1) == doctest::Approx(-8.0 / 3.0).epsilon(1e-8));
  }

  SUBCASE("convex density is rejected before the transform is formed") {
    CHECK_THROWS_WITH_AS(concavity_transform_check([](double x) { return x * x; }, 2.0),
                         doctest::Contains("not concave"), PreconditionError);
  }

  SUBCASE("argument gates") {
    CHECK_THROWS_AS(concavity_transform_check([](double) { return 1.0; }, 0.0),
                    PreconditionError);
    CHECK_THROWS_AS(concavity_transform_check([](double) { return 1.0; }, 1.0, 4),
                    PreconditionError);
    CHECK_THROWS_AS(concavity_transform_check({}, 1.0), PreconditionError);
  }
}

TEST_CASE("finite-difference fallback for the second derivative") {
  auto eval = [](double x) { return std::exp(-0.8 * x); };
  auto d1 = [](double x) { return -0.8 * std::exp(-0.8 * x); };
  FunctionSpec f = make_function_spec(eval, d1, {}, -5.0, 5.0, "expfd",
                                      FamilyKind::Custom, {}, -1.0, 1.0);
  CHECK(f.second_derivative(0.5) ==
        doctest::Approx(0.64 * std::exp(-0.4)).epsilon(1e-6));
  CHECK(f.second_derivative(-4.9) ==
        doctest::Approx(0.64 * std::exp(0.8 * 4.9)).epsilon(1e-5));
}
