// Trial-function machinery. A FunctionSpec bundles f, f', optionally f'' on a
// closed domain; the named families are
//
//   exp:      f(l) = exp(-t*l),                         t > 0
//   power:    f(l) = (z - l)^p on (-inf, z],            p >= 2
//   moment:   f(l) = q*l^p - p*l^q*z^(p-q) + (p-q)*z^p  on [0, z],
//             p > q > 0, q <= min(1, p), p + q <= 3
//   log:      f(l) = l^p - p*z^p*ln(l) + p*z^p*ln(z) - z^p on (0, z], 0 < p <= 3
//   quad:     f(l) = a*l^2 + b*l + c
//
// The hypothesis battery on a hull [lo, hi] with shift point a > hi:
//   H1: f >= 0        H2: f' <= 0        H3: f' concave (midpoint sampling)
//   H4: g(l) = 2 f(l) + f'(l) (a - l) nondecreasing
//   H4': f'(hi) + f''(hi) (a - hi) >= 0   (sufficient for H4 given H3)

#pragma once

#include "specbound/core.hpp"

#include <functional>
#include <map>
#include <optional>

namespace specbound {

enum class FamilyKind { Exp, Power, Moment, Log, Quadratic, Custom };

struct FunctionSpec {
  std::function<double(double)> eval;
  std::function<double(double)> deriv1;
  std::function<double(double)> deriv2;  // empty when not supplied
  double domain_lo = 0.0;                // closed; may be -inf / +inf
  double domain_hi = 0.0;
  std::string family_tag;
  FamilyKind kind = FamilyKind::Custom;
  std::map<std::string, double> params;
  double self_check_lo = 0.0;  // finite window the derivative validation ran on
  double self_check_hi = 0.0;

  bool has_deriv2() const { return static_cast<bool>(deriv2); }

  // f'' via deriv2 when present, else centered finite difference of deriv1.
  double second_derivative(double x) const;

  void require_contains(double lo, double hi, const char* op) const;
};

// Validates the pair (eval, deriv1) by centered finite differences on 64
// deterministic pseudo-random points inside [check_lo, check_hi]; rejects with
// the worst point named when the relative mismatch exceeds 1e-6.
FunctionSpec make_function_spec(std::function<double(double)> eval,
                                std::function<double(double)> deriv1,
                                std::function<double(double)> deriv2, double domain_lo,
                                double domain_hi, std::string family_tag, FamilyKind kind,
                                std::map<std::string, double> params, double check_lo,
                                double check_hi);

FunctionSpec make_exp_family(double t);
FunctionSpec make_power_family(double z, double p);
FunctionSpec make_moment_family(double z, double p, double q);
FunctionSpec make_log_family(double z, double p);
FunctionSpec make_quadratic(double a, double b, double c);

struct FamilyParams {
  std::optional<double> t, z, p, q, a, b, c;
};
FunctionSpec make_family(FamilyKind kind, const FamilyParams& params);

// Pointwise product on the intersected domain; H4 of the product is a claim
// about the product and is checked by callers, never assumed.
FunctionSpec product_spec(const FunctionSpec& f, const FunctionSpec& g);

// f(. - eta) with the domain translated; realizes the spectral shift on the
// function side so shifted checks compare like with like.
FunctionSpec shifted_spec(const FunctionSpec& f, double eta);

// ── Hypothesis battery ──────────────────────────────────────────────────

struct HypothesisWitness {
  double lambda = 0.0;  // violating point (midpoint for H3)
  double value = 0.0;   // signed violation magnitude
  double x = 0.0;       // H3/H4 only: companion points
  double y = 0.0;
};

struct HypothesisVerdict {
  bool pass = true;
  std::optional<HypothesisWitness> witness;
};

struct HypothesisReport {
  HypothesisVerdict h1, h2, h3, h4, h4_prime;
  double a_used = 0.0;
};

struct HypothesisOptions {
  int samples = 512;
  double tol_rel = 1e-9;
  unsigned seed = 0x5b0cd1u;
};

// Samples H1..H4 on [hull_lo, hull_hi] (degenerate hulls allowed) with shift
// point a > hull_hi, refining randomly around the worst sample of each check.
HypothesisReport check_hypotheses(const FunctionSpec& f, double hull_lo, double hull_hi,
                                  double a, const HypothesisOptions& opts = {});

// Throws HypothesisError naming the witness triple unless f' passes midpoint
// concavity sampling on [lo, hi].
void require_concave_derivative(const FunctionSpec& f, double lo, double hi,
                                const HypothesisOptions& opts = {});

// (f(y) - f(x))/(y - x) - (f'(x) + f'(y))/2; nonnegative when f' is concave.
double chord_slope_residual(const FunctionSpec& f, double x, double y);

// ── Concavity transform (x*h(x) - 2*Int_0^x h) ──────────────────────────

struct ConcavityTransformReport {
  Vector grid;
  Vector phi;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool verdict = false;
};

// Checks that Phi(x) = x*h(x) - 2*Int_0^x h(s) ds is concave on (0, x0] when h
// is; h is pre-checked by midpoint sampling and the integral is evaluated by
// adaptive quadrature.
ConcavityTransformReport concavity_transform_check(const std::function<double(double)>& h,
                                                   double x0, int grid_points = 65);

}  // namespace specbound
