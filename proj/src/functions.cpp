#include "specbound/functions.hpp"

#include "specbound/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

namespace specbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kEpsCbrt = std::cbrt(std::numeric_limits<double>::epsilon());

double fd_step(double x, double width, double lo, double hi) {
  double h = kEpsCbrt * std::clamp(std::abs(x), 1e-3 * width, width);
  const double room = 0.9 * std::min(x - lo, hi - x);
  if (room > 0.0) h = std::min(h, room);
  return h;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double FunctionSpec::second_derivative(double x) const {
  if (deriv2) return deriv2(x);
  const double lo = std::isfinite(domain_lo) ? domain_lo : x - 1.0;
  const double hi = std::isfinite(domain_hi) ? domain_hi : x + 1.0;
  const double width = std::max(hi - lo, 1e-6);
  const double h = fd_step(x, width, lo, hi);
  if (!(h > 0.0)) {
    throw PreconditionError("cannot form finite-difference f'' at the domain boundary x = " +
                            fmt(x));
  }
  return (deriv1(x + h) - deriv1(x - h)) / (2.0 * h);
}

void FunctionSpec::require_contains(double lo, double hi, const char* op) const {
  if (lo < domain_lo || hi > domain_hi) {
    std::ostringstream os;
    os << op << ": interval [" << lo << ", " << hi << "] leaves the domain of " << family_tag
       << " = [" << domain_lo << ", " << domain_hi << "]";
    throw PreconditionError(os.str());
  }
}

FunctionSpec make_function_spec(std::function<double(double)> eval,
                                std::function<double(double)> deriv1,
                                std::function<double(double)> deriv2, double domain_lo,
                                double domain_hi, std::string family_tag, FamilyKind kind,
                                std::map<std::string, double> params, double check_lo,
                                double check_hi) {
  if (!eval || !deriv1) throw PreconditionError("function spec requires eval and deriv1");
  if (!(domain_lo < domain_hi)) {
    throw PreconditionError("function spec requires domain_lo < domain_hi");
  }
  if (!(std::isfinite(check_lo) && std::isfinite(check_hi) && check_lo < check_hi)) {
    throw PreconditionError("function spec self-check window must be finite and nonempty");
  }

  FunctionSpec f;
  f.eval = std::move(eval);
  f.deriv1 = std::move(deriv1);
  f.deriv2 = std::move(deriv2);
  f.domain_lo = domain_lo;
  f.domain_hi = domain_hi;
  f.family_tag = std::move(family_tag);
  f.kind = kind;
  f.params = std::move(params);
  f.self_check_lo = check_lo;
  f.self_check_hi = check_hi;

  // Derivative consistency: centered differences at 64 seeded points, judged
  // relative to the largest derivative magnitude seen.
  const double width = check_hi - check_lo;
  const double margin = 1e-3 * width;
  std::mt19937_64 rng(0xd1ff5eedULL);
  std::uniform_real_distribution<double> pick(check_lo + margin, check_hi - margin);

  constexpr int kPoints = 64;
  std::vector<double> xs(kPoints), analytic(kPoints), fd(kPoints);
  double scale = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double x = pick(rng);
    const double h = fd_step(x, width, check_lo, check_hi);
    xs[i] = x;
    analytic[i] = f.deriv1(x);
    fd[i] = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
    scale = std::max(scale, std::abs(analytic[i]));
  }
  scale = std::max(scale, 1e-300);
  double worst = 0.0;
  int worst_i = 0;
  for (int i = 0; i < kPoints; ++i) {
    const double err = std::abs(fd[i] - analytic[i]) / scale;
    if (err > worst) {
      worst = err;
      worst_i = i;
    }
  }
  if (worst > 1e-6) {
    std::ostringstream os;
    os << "deriv1 self-check failed for " << f.family_tag << " at x = " << fmt(xs[worst_i])
       << ": analytic " << fmt(analytic[worst_i]) << " vs centered difference "
       << fmt(fd[worst_i]) << " (relative error " << worst << ")";
    throw PreconditionError(os.str());
  }
  return f;
}

// ── Families ────────────────────────────────────────────────────────────

FunctionSpec make_exp_family(double t) {
  if (!(t > 0.0)) throw PreconditionError("exp family requires t > 0, got t = " + fmt(t));
  auto eval = [t](double l) { return std::exp(-t * l); };
  auto d1 = [t](double l) { return -t * std::exp(-t * l); };
  auto d2 = [t](double l) { return t * t * std::exp(-t * l); };
  return make_function_spec(eval, d1, d2, -kInf, kInf, "exp:t=" + fmt(t), FamilyKind::Exp,
                            {{"t", t}}, -4.0 / t, 8.0 / t);
}

FunctionSpec make_power_family(double z, double p) {
  if (!(p >= 2.0)) {
    throw PreconditionError("power family requires p >= 2 (concave derivative), got p = " +
                            fmt(p));
  }
  if (!std::isfinite(z)) throw PreconditionError("power family requires finite z");
  auto eval = [z, p](double l) { return std::pow(z - l, p); };
  auto d1 = [z, p](double l) { return -p * std::pow(z - l, p - 1.0); };
  auto d2 = [z, p](double l) { return p * (p - 1.0) * std::pow(z - l, p - 2.0); };
  const double w = 2.0 * std::max(1.0, std::abs(z));
  return make_function_spec(eval, d1, d2, -kInf, z,
                            "power:z=" + fmt(z) + ":p=" + fmt(p), FamilyKind::Power,
                            {{"z", z}, {"p", p}}, z - w, z);
}

FunctionSpec make_moment_family(double z, double p, double q) {
  if (!(z > 0.0)) throw PreconditionError("moment family requires z > 0, got z = " + fmt(z));
  if (!(p > q && q > 0.0)) {
    throw PreconditionError("moment family requires p > q > 0, got p = " + fmt(p) +
                            ", q = " + fmt(q));
  }
  if (!(q <= std::min(1.0, p))) {
    throw PreconditionError("moment family requires q <= min(1, p), got q = " + fmt(q));
  }
  if (!(p + q <= 3.0)) {
    throw PreconditionError("moment family requires p + q <= 3, got p + q = " + fmt(p + q));
  }
  auto eval = [z, p, q](double l) {
    return q * std::pow(l, p) - p * std::pow(l, q) * std::pow(z, p - q) +
           (p - q) * std::pow(z, p);
  };
  auto d1 = [z, p, q](double l) {
    return p * q * (std::pow(l, p - 1.0) - std::pow(l, q - 1.0) * std::pow(z, p - q));
  };
  auto d2 = [z, p, q](double l) {
    return p * q * std::pow(l, q - 2.0) *
           ((p - 1.0) * std::pow(l, p - q) - (q - 1.0) * std::pow(z, p - q));
  };
  return make_function_spec(eval, d1, d2, 0.0, z,
                            "moment:z=" + fmt(z) + ":p=" + fmt(p) + ":q=" + fmt(q),
                            FamilyKind::Moment, {{"z", z}, {"p", p}, {"q", q}}, 0.0, z);
}

FunctionSpec make_log_family(double z, double p) {
  if (!(z > 0.0)) throw PreconditionError("log family requires z > 0, got z = " + fmt(z));
  if (!(p > 0.0 && p <= 3.0)) {
    throw PreconditionError("log family requires 0 < p <= 3, got p = " + fmt(p));
  }
  const double zp = std::pow(z, p);
  auto eval = [z, p, zp](double l) {
    return std::pow(l, p) - p * zp * std::log(l) + p * zp * std::log(z) - zp;
  };
  auto d1 = [p, zp](double l) { return p * std::pow(l, p - 1.0) - p * zp / l; };
  auto d2 = [p, zp](double l) {
    return p * (p - 1.0) * std::pow(l, p - 2.0) + p * zp / (l * l);
  };
  const double lo = z * 1e-12;
  return make_function_spec(eval, d1, d2, lo, z, "log:z=" + fmt(z) + ":p=" + fmt(p),
                            FamilyKind::Log, {{"z", z}, {"p", p}}, z * 1e-6, z);
}

FunctionSpec make_quadratic(double a, double b, double c) {
  if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c))) {
    throw PreconditionError("quadratic family requires finite coefficients");
  }
  auto eval = [a, b, c](double l) { return (a * l + b) * l + c; };
  auto d1 = [a, b](double l) { return 2.0 * a * l + b; };
  auto d2 = [a](double) { return 2.0 * a; };
  return make_function_spec(eval, d1, d2, -kInf, kInf,
                            "quad:a=" + fmt(a) + ":b=" + fmt(b) + ":c=" + fmt(c),
                            FamilyKind::Quadratic, {{"a", a}, {"b", b}, {"c", c}}, -8.0, 8.0);
}

namespace {

double need(const std::optional<double>& v, const char* family, const char* name) {
  if (!v) {
    throw PreconditionError(std::string(family) + " family requires parameter " + name);
  }
  return *v;
}

}  // namespace

FunctionSpec make_family(FamilyKind kind, const FamilyParams& fp) {
  switch (kind) {
    case FamilyKind::Exp:
      return make_exp_family(need(fp.t, "exp", "t"));
    case FamilyKind::Power:
      return make_power_family(need(fp.z, "power", "z"), need(fp.p, "power", "p"));
    case FamilyKind::Moment:
      return make_moment_family(need(fp.z, "moment", "z"), need(fp.p, "moment", "p"),
                                need(fp.q, "moment", "q"));
    case FamilyKind::Log:
      return make_log_family(need(fp.z, "log", "z"), need(fp.p, "log", "p"));
    case FamilyKind::Quadratic:
      return make_quadratic(need(fp.a, "quad", "a"), need(fp.b, "quad", "b"),
                            need(fp.c, "quad", "c"));
    case FamilyKind::Custom:
      break;
  }
  throw PreconditionError("make_family: unknown family kind");
}

FunctionSpec product_spec(const FunctionSpec& f, const FunctionSpec& g) {
  const double lo = std::max(f.domain_lo, g.domain_lo);
  const double hi = std::min(f.domain_hi, g.domain_hi);
  if (!(lo < hi)) {
    throw PreconditionError("product_spec: domains of " + f.family_tag + " and " +
                            g.family_tag + " have empty intersection");
  }
  auto fe = f.eval, ge = g.eval, fd = f.deriv1, gd = g.deriv1;
  auto eval = [fe, ge](double l) { return fe(l) * ge(l); };
  auto d1 = [fe, ge, fd, gd](double l) { return fd(l) * ge(l) + fe(l) * gd(l); };
  std::function<double(double)> d2;
  if (f.has_deriv2() && g.has_deriv2()) {
    auto fdd = f.deriv2, gdd = g.deriv2;
    d2 = [fe, ge, fd, gd, fdd, gdd](double l) {
      return fdd(l) * ge(l) + 2.0 * fd(l) * gd(l) + fe(l) * gdd(l);
    };
  }
  const double clo = std::max(f.self_check_lo, g.self_check_lo);
  const double chi = std::min(f.self_check_hi, g.self_check_hi);
  if (!(clo < chi)) {
    throw PreconditionError("product_spec: self-check windows do not overlap");
  }
  return make_function_spec(eval, d1, d2, lo, hi,
                            "product(" + f.family_tag + "," + g.family_tag + ")",
                            FamilyKind::Custom, {}, clo, chi);
}

FunctionSpec shifted_spec(const FunctionSpec& f, double eta) {
  auto fe = f.eval, fd = f.deriv1;
  auto eval = [fe, eta](double l) { return fe(l - eta); };
  auto d1 = [fd, eta](double l) { return fd(l - eta); };
  std::function<double(double)> d2;
  if (f.has_deriv2()) {
    auto fdd = f.deriv2;
    d2 = [fdd, eta](double l) { return fdd(l - eta); };
  }
  auto params = f.params;
  params["shift"] = eta;
  return make_function_spec(eval, d1, d2, f.domain_lo + eta, f.domain_hi + eta,
                            f.family_tag + "|shift=" + fmt(eta), f.kind, std::move(params),
                            f.self_check_lo + eta, f.self_check_hi + eta);
}

// ── Hypotheses ──────────────────────────────────────────────────────────

namespace {

// Minimizes value_at by scanning random points in [lo, hi], keeping the
// smallest value and its argument.
template <typename Fn>
void refine_min(Fn&& value_at, double lo, double hi, int count, std::mt19937_64& rng,
                double& best, double& arg) {
  if (!(lo < hi)) return;
  std::uniform_real_distribution<double> pick(lo, hi);
  for (int i = 0; i < count; ++i) {
    const double x = pick(rng);
    const double v = value_at(x);
    if (v < best) {
      best = v;
      arg = x;
    }
  }
}

}  // namespace

HypothesisReport check_hypotheses(const FunctionSpec& f, double hull_lo, double hull_hi,
                                  double a, const HypothesisOptions& opts) {
  if (!(hull_lo <= hull_hi)) throw PreconditionError("check_hypotheses: hull_lo > hull_hi");
  f.require_contains(hull_lo, hull_hi, "check_hypotheses");
  if (!(std::isfinite(a) && a > hull_hi)) {
    throw PreconditionError("check_hypotheses: shift point a = " + fmt(a) +
                            " must be finite and exceed sup of the hull = " + fmt(hull_hi));
  }
  const int m = std::max(3, opts.samples);
  std::mt19937_64 rng(opts.seed);

  std::vector<double> xs;
  if (hull_hi == hull_lo) {
    xs.assign(1, hull_lo);
  } else {
    xs.resize(m);
    for (int i = 0; i < m; ++i) xs[i] = hull_lo + (hull_hi - hull_lo) * i / (m - 1);
  }
  const int n = static_cast<int>(xs.size());

  std::vector<double> fv(n), dv(n), gv(n);
  double sf = 0.0, sd = 0.0, sg = 0.0;
  for (int i = 0; i < n; ++i) {
    fv[i] = f.eval(xs[i]);
    dv[i] = f.deriv1(xs[i]);
    gv[i] = 2.0 * fv[i] + dv[i] * (a - xs[i]);
    sf = std::max(sf, std::abs(fv[i]));
    sd = std::max(sd, std::abs(dv[i]));
    sg = std::max(sg, std::abs(gv[i]));
  }
  const double tol_f = opts.tol_rel * std::max(sf, 1.0);
  const double tol_d = opts.tol_rel * std::max(sd, 1.0);
  const double tol_g = opts.tol_rel * std::max(sg, 1.0);

  HypothesisReport report;
  report.a_used = a;

  // H1: f >= 0. Track the minimum, refine randomly around it.
  {
    double best = fv[0], arg = xs[0];
    int bi = 0;
    for (int i = 1; i < n; ++i) {
      if (fv[i] < best) {
        best = fv[i];
        arg = xs[i];
        bi = i;
      }
    }
    if (n > 1) {
      refine_min([&](double x) { return f.eval(x); }, xs[std::max(0, bi - 1)],
                 xs[std::min(n - 1, bi + 1)], 128, rng, best, arg);
    }
    if (best < -tol_f) {
      report.h1.pass = false;
      report.h1.witness = HypothesisWitness{arg, best, 0.0, 0.0};
    }
  }

  // H2: f' <= 0.
  {
    double best = -dv[0], arg = xs[0];
    int bi = 0;
    for (int i = 1; i < n; ++i) {
      if (-dv[i] < best) {
        best = -dv[i];
        arg = xs[i];
        bi = i;
      }
    }
    if (n > 1) {
      refine_min([&](double x) { return -f.deriv1(x); }, xs[std::max(0, bi - 1)],
                 xs[std::min(n - 1, bi + 1)], 128, rng, best, arg);
    }
    if (-best > tol_d) {
      report.h2.pass = false;
      report.h2.witness = HypothesisWitness{arg, -best, 0.0, 0.0};
    }
  }

  // H3: midpoint concavity of f' over adjacent triples plus random pairs.
  if (n >= 3) {
    double worst = -kInf;
    double wx = xs[0], wy = xs[0], wm = xs[0];
    auto consider = [&](double x, double y) {
      const double mid = 0.5 * (x + y);
      const double deficit = 0.5 * (f.deriv1(x) + f.deriv1(y)) - f.deriv1(mid);
      if (deficit > worst) {
        worst = deficit;
        wx = x;
        wy = y;
        wm = mid;
      }
    };
    for (int i = 0; i + 2 < n; ++i) consider(xs[i], xs[i + 2]);
    std::uniform_real_distribution<double> pick(hull_lo, hull_hi);
    for (int i = 0; i < 256; ++i) {
      double x = pick(rng), y = pick(rng);
      if (x == y) continue;
      consider(x, y);
    }
    // Local refinement around the worst pair.
    const double span = wy - wx;
    std::uniform_real_distribution<double> near_lo(std::max(hull_lo, wx - span),
                                                   std::min(hull_hi, wx + span));
    std::uniform_real_distribution<double> near_hi(std::max(hull_lo, wy - span),
                                                   std::min(hull_hi, wy + span));
    for (int i = 0; i < 128; ++i) {
      double x = near_lo(rng), y = near_hi(rng);
      if (x == y) continue;
      consider(x, y);
    }
    if (worst > tol_d) {
      report.h3.pass = false;
      report.h3.witness = HypothesisWitness{wm, worst, wx, wy};
    }
  }

  // H4: g nondecreasing across the grid.
  if (n >= 2) {
    double worst = -kInf;
    double wx = xs[0], wy = xs[1];
    for (int i = 0; i + 1 < n; ++i) {
      const double drop = gv[i] - gv[i + 1];
      if (drop > worst) {
        worst = drop;
        wx = xs[i];
        wy = xs[i + 1];
      }
    }
    auto g_at = [&](double x) { return 2.0 * f.eval(x) + f.deriv1(x) * (a - x); };
    std::uniform_real_distribution<double> pick(wx, wy);
    for (int i = 0; i < 128; ++i) {
      double x = pick(rng), y = pick(rng);
      if (x > y) std::swap(x, y);
      if (x == y) continue;
      const double drop = g_at(x) - g_at(y);
      if (drop > worst) {
        worst = drop;
        wx = x;
        wy = y;
      }
    }
    if (worst > tol_g) {
      report.h4.pass = false;
      report.h4.witness = HypothesisWitness{wx, worst, wx, wy};
    }
  }

  // H4': f'(b) + f''(b)(a - b) >= 0 at b = sup hull.
  {
    const double b = hull_hi;
    const double d1b = f.deriv1(b);
    const double d2b = f.second_derivative(b);
    const double v = d1b + d2b * (a - b);
    const double tol = opts.tol_rel * std::max({std::abs(d1b), std::abs(d2b * (a - b)), 1.0});
    if (v < -tol) {
      report.h4_prime.pass = false;
      report.h4_prime.witness = HypothesisWitness{b, v, 0.0, 0.0};
    }
  }

  return report;
}

void require_concave_derivative(const FunctionSpec& f, double lo, double hi,
                                const HypothesisOptions& opts) {
  if (lo == hi) return;
  f.require_contains(lo, hi, "require_concave_derivative");
  const int m = std::max(3, opts.samples);
  std::mt19937_64 rng(opts.seed);
  const double sd_tol = [&] {
    double sd = 0.0;
    for (int i = 0; i < m; ++i) {
      sd = std::max(sd, std::abs(f.deriv1(lo + (hi - lo) * i / (m - 1))));
    }
    return opts.tol_rel * std::max(sd, 1.0);
  }();

  double worst = -kInf, wx = lo, wy = hi, wm = lo;
  auto consider = [&](double x, double y) {
    const double mid = 0.5 * (x + y);
    const double deficit = 0.5 * (f.deriv1(x) + f.deriv1(y)) - f.deriv1(mid);
    if (deficit > worst) {
      worst = deficit;
      wx = x;
      wy = y;
      wm = mid;
    }
  };
  for (int i = 0; i + 2 < m; ++i) {
    consider(lo + (hi - lo) * i / (m - 1), lo + (hi - lo) * (i + 2) / (m - 1));
  }
  std::uniform_real_distribution<double> pick(lo, hi);
  for (int i = 0; i < 256; ++i) {
    double x = pick(rng), y = pick(rng);
    if (x != y) consider(x, y);
  }
  if (worst > sd_tol) {
    std::ostringstream os;
    os << "hypothesis H3 violated for " << f.family_tag << ": midpoint concavity of f' fails "
       << "on the triple (" << fmt(wx) << ", " << fmt(wm) << ", " << fmt(wy)
       << ") with deficit " << worst;
    throw HypothesisError(os.str(), wm, worst);
  }
}

double chord_slope_residual(const FunctionSpec& f, double x, double y) {
  if (x == y) {
    throw PreconditionError("chord_slope_residual requires distinct points, got x = y = " +
                            fmt(x));
  }
  f.require_contains(std::min(x, y), std::max(x, y), "chord_slope_residual");
  return (f.eval(y) - f.eval(x)) / (y - x) - 0.5 * (f.deriv1(x) + f.deriv1(y));
}

// ── Concavity transform ─────────────────────────────────────────────────

ConcavityTransformReport concavity_transform_check(const std::function<double(double)>& h,
                                                   double x0, int grid_points) {
  if (!h) throw PreconditionError("concavity_transform_check requires a function");
  if (!(x0 > 0.0)) throw PreconditionError("concavity_transform_check requires x0 > 0");
  if (grid_points < 5) throw PreconditionError("concavity_transform_check needs >= 5 points");

  const int m = grid_points;
  Vector grid(m);
  for (int i = 0; i < m; ++i) grid[i] = x0 * (i + 1) / static_cast<double>(m);

  // Hypothesis surface is deliberately minimal: only concavity of h matters.
  {
    double sh = 0.0;
    for (int i = 0; i < m; ++i) sh = std::max(sh, std::abs(h(grid[i])));
    const double tol_h = 1e-9 * std::max(sh, 1.0);
    for (int i = 0; i + 2 < m; ++i) {
      const double x = grid[i], y = grid[i + 2], mid = grid[i + 1];
      const double deficit = 0.5 * (h(x) + h(y)) - h(mid);
      if (deficit > tol_h) {
        std::ostringstream os;
        os << "concavity_transform_check: h is not concave on (0, x0]; midpoint test fails at ("
           << fmt(x) << ", " << fmt(mid) << ", " << fmt(y) << ") with deficit " << deficit;
        throw PreconditionError(os.str());
      }
    }
  }

  // Phi(x) = x h(x) - 2 Int_0^x h, with the integral accumulated piecewise.
  Vector phi(m);
  double integral = adaptive_simpson(h, 0.0, grid[0], 1e-11);
  phi[0] = grid[0] * h(grid[0]) - 2.0 * integral;
  for (int i = 1; i < m; ++i) {
    integral += adaptive_simpson(h, grid[i - 1], grid[i], 1e-11);
    phi[i] = grid[i] * h(grid[i]) - 2.0 * integral;
  }

  ConcavityTransformReport report;
  report.grid = grid;
  report.phi = phi;
  double scale = 0.0;
  for (int i = 0; i < m; ++i) scale = std::max(scale, std::abs(phi[i]));
  report.tolerance = 1e-9 * std::max(scale, 1.0);
  double worst = -kInf;
  for (int i = 1; i + 1 < m; ++i) {
    worst = std::max(worst, 0.5 * (phi[i - 1] + phi[i + 1]) - phi[i]);
  }
  report.max_violation = worst;
  report.verdict = worst <= report.tolerance;
  return report;
}

}  // namespace specbound
