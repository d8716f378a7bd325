#include "specbound/weyl.hpp"

#include "specbound/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace specbound {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

struct DomainData {
  int d = 0;
  double volume = 0.0;
};

DomainData require_domain_data(const Spectrum& s, const char* op) {
  if (!s.dimension || !s.volume) {
    throw PreconditionError(std::string(op) +
                            " requires a spectrum carrying dimension and volume (" + s.label +
                            " has " + (s.dimension ? "dimension" : "no dimension") + ", " +
                            (s.volume ? "volume" : "no volume") + ")");
  }
  return {*s.dimension, *s.volume};
}

}  // namespace

double weyl_constant(int dimension) {
  if (dimension < 1) throw PreconditionError("Weyl constant requires dimension >= 1");
  const double d = static_cast<double>(dimension);
  const double omega_d = std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
  return 4.0 * kPi * kPi / std::pow(omega_d, 2.0 / d);
}

WeylContext weyl_context(const Spectrum& s) {
  const DomainData dom = require_domain_data(s, "Weyl context");
  return {dom.d, dom.volume, weyl_constant(dom.d)};
}

double weyl_estimate(const Spectrum& s, Eigen::Index n) {
  const DomainData dom = require_domain_data(s, "Weyl estimate");
  if (n < 1) throw PreconditionError("Weyl estimate requires n >= 1");
  const double d = static_cast<double>(dom.d);
  return weyl_constant(dom.d) * std::pow(static_cast<double>(n) / dom.volume, 2.0 / d);
}

double counting_asymptote(const Spectrum& s, double lambda) {
  const DomainData dom = require_domain_data(s, "counting asymptote");
  if (lambda <= 0.0) return 0.0;
  const double d = static_cast<double>(dom.d);
  return std::pow(weyl_constant(dom.d), -d / 2.0) * dom.volume * std::pow(lambda, d / 2.0);
}

Eigen::Index counting_exact(const Spectrum& s, double lambda) {
  const double* begin = s.values.data();
  const double* end = begin + s.size();
  return std::upper_bound(begin, end, lambda) - begin;
}

CountingRatioReport check_counting_ratio(const Spectrum& s) {
  const DomainData dom = require_domain_data(s, "counting ratio");
  const double lam_top = s.values(s.size() - 1);
  // Largest listed value strictly below the top one; a multiplet cut off by
  // the window boundary would otherwise undercount.
  double lam_eval = -1.0;
  for (Eigen::Index j = s.size() - 1; j >= 0; --j) {
    if (s.values(j) < lam_top) {
      lam_eval = s.values(j);
      break;
    }
  }
  if (lam_eval <= 0.0) {
    throw PreconditionError("counting ratio needs at least two distinct positive eigenvalues");
  }

  CountingRatioReport r;
  r.lambda_eval = lam_eval;
  r.n_exact = counting_exact(s, lam_eval);
  r.n_asym = counting_asymptote(s, lam_eval);
  r.ratio = static_cast<double>(r.n_exact) / r.n_asym;
  r.band = (dom.d == 1) ? 1e-3 : 5e-2;
  r.verdict = std::abs(r.ratio - 1.0) <= r.band;
  return r;
}

AbelResult abel_identity(const Spectrum& s, const FunctionSpec& f, double L) {
  if (!std::isfinite(L) || L <= 0.0) {
    throw PreconditionError("summation-by-parts check requires a finite cut L > 0");
  }
  if (L > s.values(s.size() - 1)) {
    throw PreconditionError("summation-by-parts cut L = " + fmt(L) +
                            " exceeds the listed window (top eigenvalue " +
                            fmt(s.values(s.size() - 1)) + ")");
  }
  const Eigen::Index m = counting_exact(s, L);
  if (m < 1) throw PreconditionError("summation-by-parts window contains no eigenvalues");
  f.require_contains(std::min(s.values(0), L), L, "summation-by-parts check");

  KahanSum direct;
  for (Eigen::Index j = 0; j < m; ++j) direct.add(f.eval(s.values(j)));

  // int_0^L f'(t) N(t) dt with N constant between breakpoints; N = 0 below
  // lambda_1 contributes nothing.
  KahanSum integral;
  const auto d1 = [&](double x) { return f.deriv1(x); };
  for (Eigen::Index j = 0; j < m; ++j) {
    const double a = s.values(j);
    const double b = (j + 1 < m) ? std::min(s.values(j + 1), L) : L;
    if (b > a) {
      integral.add(static_cast<double>(j + 1) * adaptive_simpson(d1, a, b, 1e-12, 1e-300));
    }
  }

  AbelResult out;
  out.direct = direct.value();
  out.via_counting = static_cast<double>(m) * f.eval(L) - integral.value();
  out.residual = out.direct - out.via_counting;
  double max_abs_f = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) max_abs_f = std::max(max_abs_f, std::abs(f.eval(s.values(j))));
  out.scale = std::max({std::abs(out.direct), std::abs(out.via_counting),
                        static_cast<double>(m) * max_abs_f, 1.0});
  return out;
}

SemiclassicalResidual semiclassical_residual(const Spectrum& s, const CommutatorConstants& c,
                                             const FunctionSpec& f, double lambda_cut) {
  c.validate();
  const Eigen::Index m = counting_exact(s, lambda_cut);
  if (m < 1) {
    throw PreconditionError("semiclassical residual window below lambda_cut = " + fmt(lambda_cut) +
                            " contains no eigenvalues");
  }
  const double lam_m = s.values(m - 1);
  f.require_contains(s.values(0), std::max(lam_m, lambda_cut), "semiclassical residual");

  KahanSum sum;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double lam = s.values(j);
    const double w = (c.beta * lam + c.alpha) / c.gamma;
    sum.add(f.eval(lam) + 0.5 * w * f.deriv1(lam));
  }
  SemiclassicalResidual out;
  out.m = m;
  out.raw = sum.value() - static_cast<double>(m) * f.eval(lam_m);
  const double denom = static_cast<double>(m) * std::abs(f.eval(lambda_cut));
  if (!(denom > 0.0)) {
    throw PreconditionError("semiclassical residual normalization vanishes at lambda_cut = " +
                            fmt(lambda_cut));
  }
  out.normalized = out.raw / denom;
  return out;
}

SemiclassicalResidual abel_residual(const Spectrum& s, const CommutatorConstants& c,
                                    const FunctionSpec& f, double lambda_cut) {
  const double top = s.values(s.size() - 1);
  const AbelResult identity = abel_identity(s, f, std::min(lambda_cut, top));
  if (std::abs(identity.residual) > 1e-9 * identity.scale) {
    throw InternalInconsistencyError(
        "summation-by-parts identity failed before the trend computation: residual " +
        fmt(identity.residual) + " against scale " + fmt(identity.scale));
  }
  return semiclassical_residual(s, c, f, lambda_cut);
}

}  // namespace specbound
